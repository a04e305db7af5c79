#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qhist/bayes.hpp"

namespace qhist {

enum class ViolationKind { NonLp, NonQuasi, OrderViolation };

// Generic draws Haar unitaries and Gram initial states; Commuting shares
// one eigenbasis across every operator, a classical regime that preserves
// order and realisability.
enum class SearchEnsemble { Generic, Commuting };

struct SearchWitness {
  ViolationKind kind = ViolationKind::NonQuasi;
  int dim = 0;
  int n_times = 0;
  long long trial = 0;
  std::uint64_t model_seed = 0;
  SystemModel model;
  // Witness set members; every member is a disjunction of product
  // histories over the model families.
  std::vector<HistoryProposition> set;
  // Per member, the family indices of each product-history block, one
  // index per time.  Single-block members round-trip as slot lists.
  std::vector<std::vector<std::vector<int>>> member_blocks;
  // Severity: lp value (NonLp), realisability spread (NonQuasi) or
  // probability excess over the dominating negation (OrderViolation).
  double value = 0.0;
  // Offending member pair for OrderViolation.
  std::pair<int, int> pair{-1, -1};
};

struct SearchOutcome {
  std::optional<SearchWitness> witness;
  long long trials_used = 0;
};

// Scans random models along an escalating (dim, times) ladder, sharing the
// budget across rungs; deterministic in the seed and independent of
// scheduling.  Candidates are screened with the homogeneous product form
// of the class operator and every reported witness is confirmed through
// the general embedding path first.  Absence of a witness is reported, not
// raised.
SearchOutcome search_violations(ViolationKind kind, long long budget,
                                std::uint64_t seed,
                                SearchEnsemble ensemble = SearchEnsemble::Generic,
                                double tol = default_tolerance());

}  // namespace qhist
