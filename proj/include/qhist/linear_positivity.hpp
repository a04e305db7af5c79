#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qhist/decoherence.hpp"

namespace qhist {

// --------------------------- linear positivity ---------------------------

// tr(C_a rho); complex in general.
Complex lp_value(const SystemModel& model, const HistoryProposition& a);

// Real part of lp_value.  Never clamped: negative values signal failure of
// linear positivity and must stay visible.
double lp_probability(const SystemModel& model, const HistoryProposition& a);

// |Re d(a, not a) - (Re lp(a) - d(a, a))|; vanishes identically up to
// arithmetic noise.
double bridge_identity_residual(const SystemModel& model,
                                const HistoryProposition& a,
                                double tol = default_tolerance());

// --------------------------- set reports --------------------------------

struct LpEntry {
  Complex value;
  double probability;       // Re value, unclamped
  double neg_probability;   // Re lp of the negation, unclamped
  double realisability_sum; // probability + neg_probability, one by linearity
  bool positive;            // member and negation both above -tol
};

struct LpReport {
  std::vector<LpEntry> entries;
  // True when the set was completed internally by appending the negation
  // of the members' disjunction; the appended entry is last.
  bool completed_with_remainder = false;
  bool is_lp = false;
  // Ordered pairs (i, j) with member i below not-member-j in the lattice
  // but above it in lp probability.
  std::vector<std::pair<int, int>> order_violations;
};

// Members must share one support.  Sets that do not sum to the tensor
// identity are completed with the single remainder history before
// evaluation.
LpReport is_lp_set(const SystemModel& model, std::vector<HistoryProposition> set,
                   double tol = default_tolerance());

// --------------------------- searches -----------------------------------

struct NonLpWitness {
  SystemModel model;
  HomogeneousHistory history;
  double value;  // offending lp probability
  int trial;
};

// Walks `trials` generated models and scans every product history of the
// model families for Re lp < -10 * tol.  Deterministic in the seed; the
// generator receives a seed derived from (seed, trial index).
std::optional<NonLpWitness> find_non_lp(
    const std::function<SystemModel(std::uint64_t)>& generator, int trials,
    std::uint64_t seed, double tol = default_tolerance());

}  // namespace qhist
