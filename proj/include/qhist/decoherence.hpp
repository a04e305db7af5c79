#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qhist/history.hpp"

namespace qhist {

// --------------------------- decoherence functional ----------------------

// d(a, b) = tr(C_a rho C_b^dagger) with class operators taken in the
// model's Heisenberg picture.
Complex dfunc(const SystemModel& model, const HistoryProposition& a,
              const HistoryProposition& b);

// d(a, a) as a probability: real within tolerance, negatives within
// tolerance clamp to zero, larger negatives raise ValidationError.
double probability(const SystemModel& model, const HistoryProposition& a,
                   double tol = default_tolerance());

// Gram-type matrix of pairwise decoherence values.  Hermitian and positive
// semidefinite within tolerance by construction; for complete sets the
// entries sum to one within tolerance.
struct DecoherenceMatrix {
  std::vector<HistoryProposition> set;
  Eigen::MatrixXcd values;
};

DecoherenceMatrix decoherence_matrix(const SystemModel& model,
                                     const std::vector<HistoryProposition>& set,
                                     double tol = default_tolerance());

// --------------------------- consistency --------------------------------

// Strong requires vanishing off-diagonal values, medium only vanishing
// real parts.
enum class ConsistencyMode { Strong, Medium };

struct ConsistencyVerdict {
  ConsistencyMode mode = ConsistencyMode::Strong;
  // Off-diagonals vanish in the requested mode and the set is complete.
  bool is_consistent = false;
  // Largest off-diagonal magnitude (strong) or real part magnitude (medium).
  double max_offdiag = 0.0;
  // Operators sum to the tensor identity within tolerance.
  bool is_complete = false;
  // d(a, a) + d(not a, not a) per member.
  std::vector<double> realisability;
  // Common realisability sum K when all members agree within tolerance.
  std::optional<double> quasi_constant;
  // Ordered pairs (i, j) with member i below not-member-j in the lattice
  // but above it in probability.
  std::vector<std::pair<int, int>> order_violations;
};

ConsistencyVerdict classify(const SystemModel& model,
                            const std::vector<HistoryProposition>& set,
                            ConsistencyMode mode = ConsistencyMode::Strong,
                            double tol = default_tolerance());

// --------------------------- Boolean families ---------------------------

// For a family closed under conjunction, checks the pairwise condition
// d(w_i and w_j, w_i and w_j) = d(w_i, w_j).  Members must commute
// pairwise and every conjunction must already be a member, otherwise
// NotBooleanClosed is raised.
bool boolean_consistent(const SystemModel& model,
                        const std::vector<HistoryProposition>& w,
                        double tol = default_tolerance());

}  // namespace qhist
