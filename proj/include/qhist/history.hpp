#pragma once

#include <vector>

#include "qhist/model.hpp"

namespace qhist {

// --------------------------- homogeneous histories -----------------------

// One Schrodinger-picture projector per grid time of the support.
class HomogeneousHistory {
 public:
  HomogeneousHistory(TemporalSupport support, std::vector<Projector> slots);

  const TemporalSupport& support() const { return support_; }
  const std::vector<Projector>& slots() const { return slots_; }
  Eigen::Index dim() const { return slots_.front().dim(); }

 private:
  TemporalSupport support_;
  std::vector<Projector> slots_;
};

// Identity-pad onto a larger grid before cross-operations: existing slots
// keep their times, missing times receive identity slots.  The fiducial
// time must agree and every time of h must appear in the target support.
HomogeneousHistory pad_to_support(const HomogeneousHistory& h,
                                  const TemporalSupport& support);

// --------------------------- history propositions ------------------------

// Projector on the n-fold tensor product space with tensor factors ordered
// earliest time first.  Operators with norm within tolerance of zero are
// canonicalized to the exact zero matrix, so null propositions compare
// bitwise equal.
class HistoryProposition {
 public:
  HistoryProposition(TemporalSupport support, int base_dim, Matrix op,
                     double tol = default_tolerance());

  static HistoryProposition zero(const TemporalSupport& support, int base_dim);
  static HistoryProposition unit(const TemporalSupport& support, int base_dim);

  const TemporalSupport& support() const { return support_; }
  int base_dim() const { return base_dim_; }
  const Matrix& op() const { return op_; }
  bool is_null() const { return op_.isZero(0.0); }
  Eigen::Index rank() const;

 private:
  TemporalSupport support_;
  int base_dim_;
  Matrix op_;
};

// Class operator on the base space, obtained from a proposition by the
// linear extension of (A_1 tensor ... tensor A_n) -> A_n ... A_1, latest
// factor leftmost.
struct ClassOperator {
  Matrix matrix;
};

// --------------------------- operations ---------------------------------

// Tensor product of the Heisenberg-picture slots, earliest time leftmost.
// The history support must equal the model support.
HistoryProposition embed(const SystemModel& model, const HomogeneousHistory& h,
                         double tol = default_tolerance());

HistoryProposition negate(const HistoryProposition& h,
                          double tol = default_tolerance());

// Conjunction; defined only for commuting propositions over one support.
HistoryProposition conj(const HistoryProposition& a, const HistoryProposition& b,
                        double tol = default_tolerance());

// Disjunction; defined only for commuting propositions over one support.
HistoryProposition disj(const HistoryProposition& a, const HistoryProposition& b,
                        double tol = default_tolerance());

// Product norm within tolerance of zero.
bool disjoint(const HistoryProposition& a, const HistoryProposition& b,
              double tol = default_tolerance());

// Lattice order: a <= b exactly when their product reproduces a.
bool leq(const HistoryProposition& a, const HistoryProposition& b,
         double tol = default_tolerance());

ClassOperator class_operator(const SystemModel& model, const HistoryProposition& h);

// Closure of the generators (plus the null and unit propositions) under
// negation, conjunction and disjunction, deduplicated within tolerance.
// Throws NonCommuting for incompatible generators and ValidationError when
// the closure exceeds max_size elements.
std::vector<HistoryProposition> boolean_closure(
    std::vector<HistoryProposition> generators, double tol = default_tolerance(),
    std::size_t max_size = 256);

}  // namespace qhist
