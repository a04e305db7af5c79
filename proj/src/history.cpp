#include "qhist/history.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <cmath>
#include <utility>

namespace qhist {

namespace {

Eigen::Index tensor_dim(int base_dim, int n_times) {
  Eigen::Index t = 1;
  for (int k = 0; k < n_times; ++k) t *= base_dim;
  return t;
}

void require_same_frame(const HistoryProposition& a, const HistoryProposition& b,
                        const char* who) {
  if (a.support() != b.support()) {
    throw SupportMismatch(std::string(who) + ": temporal supports differ");
  }
  if (a.base_dim() != b.base_dim()) {
    throw SupportMismatch(std::string(who) + ": base dimensions differ");
  }
}

void require_commuting(const HistoryProposition& a, const HistoryProposition& b,
                       double tol, const char* who) {
  if (!nearly_zero(a.op() * b.op() - b.op() * a.op(), tol)) {
    throw NonCommuting(std::string(who) + ": propositions do not commute");
  }
}

}  // namespace

// --------------------------- HomogeneousHistory -------------------------

HomogeneousHistory::HomogeneousHistory(TemporalSupport support,
                                       std::vector<Projector> slots)
    : support_(std::move(support)), slots_(std::move(slots)) {
  if (static_cast<int>(slots_.size()) != support_.size()) {
    throw ValidationError("HomogeneousHistory: one slot per grid time is required");
  }
  const Eigen::Index d = slots_.front().dim();
  for (const Projector& slot : slots_) {
    if (slot.dim() != d) {
      throw ValidationError("HomogeneousHistory: slots must share one dimension");
    }
  }
}

HomogeneousHistory pad_to_support(const HomogeneousHistory& h,
                                  const TemporalSupport& support) {
  if (h.support().t0() != support.t0()) {
    throw SupportMismatch("pad_to_support: fiducial times differ");
  }
  const Eigen::Index d = h.dim();
  std::vector<Projector> slots;
  slots.reserve(static_cast<std::size_t>(support.size()));
  for (double t : support.times()) {
    if (h.support().contains(t)) {
      const int k = h.support().grid_index(t);
      slots.push_back(h.slots()[static_cast<std::size_t>(k)]);
    } else {
      slots.push_back(Projector::identity(d));
    }
  }
  for (double t : h.support().times()) {
    if (!support.contains(t)) {
      throw SupportMismatch("pad_to_support: target support misses a history time");
    }
  }
  return HomogeneousHistory(support, std::move(slots));
}

// --------------------------- HistoryProposition -------------------------

HistoryProposition::HistoryProposition(TemporalSupport support, int base_dim,
                                       Matrix op, double tol)
    : support_(std::move(support)), base_dim_(base_dim), op_(std::move(op)) {
  if (base_dim_ < 1) {
    throw ValidationError("HistoryProposition: base dimension must be positive");
  }
  const Eigen::Index t = tensor_dim(base_dim_, support_.size());
  if (op_.rows() != t || op_.cols() != t) {
    throw ValidationError(
        "HistoryProposition: operator must be square of dimension base_dim^n");
  }
  if (nearly_zero(op_, tol)) {
    op_.setZero();
    return;
  }
  if (!nearly_equal(op_, op_.adjoint(), tol)) {
    throw ValidationError("HistoryProposition: operator is not Hermitian");
  }
  if (!nearly_equal(op_ * op_, op_, tol)) {
    throw ValidationError("HistoryProposition: operator is not idempotent");
  }
}

HistoryProposition HistoryProposition::zero(const TemporalSupport& support,
                                            int base_dim) {
  const Eigen::Index t = tensor_dim(base_dim, support.size());
  return HistoryProposition(support, base_dim, Matrix::Zero(t, t));
}

HistoryProposition HistoryProposition::unit(const TemporalSupport& support,
                                            int base_dim) {
  const Eigen::Index t = tensor_dim(base_dim, support.size());
  return HistoryProposition(support, base_dim, Matrix::Identity(t, t));
}

Eigen::Index HistoryProposition::rank() const {
  return static_cast<Eigen::Index>(std::llround(op_.trace().real()));
}

// --------------------------- operations ---------------------------------

HistoryProposition embed(const SystemModel& model, const HomogeneousHistory& h,
                         double tol) {
  if (h.support() != model.support()) {
    throw SupportMismatch("embed: history support must equal the model support");
  }
  if (h.dim() != model.dim()) {
    throw ValidationError("embed: slot dimension must equal the model dimension");
  }
  Matrix op = Matrix::Identity(1, 1);
  for (int k = 0; k < model.support().size(); ++k) {
    const double t = model.support().times()[static_cast<std::size_t>(k)];
    const Projector slot =
        heisenberg(model, h.slots()[static_cast<std::size_t>(k)], t, tol);
    op = Eigen::kroneckerProduct(op, slot.matrix()).eval();
  }
  return HistoryProposition(model.support(), model.dim(), std::move(op), tol);
}

HistoryProposition negate(const HistoryProposition& h, double tol) {
  const Matrix i = Matrix::Identity(h.op().rows(), h.op().cols());
  return HistoryProposition(h.support(), h.base_dim(), i - h.op(), tol);
}

HistoryProposition conj(const HistoryProposition& a, const HistoryProposition& b,
                        double tol) {
  require_same_frame(a, b, "conj");
  require_commuting(a, b, tol, "conj");
  return HistoryProposition(a.support(), a.base_dim(), a.op() * b.op(), tol);
}

HistoryProposition disj(const HistoryProposition& a, const HistoryProposition& b,
                        double tol) {
  require_same_frame(a, b, "disj");
  require_commuting(a, b, tol, "disj");
  return HistoryProposition(a.support(), a.base_dim(),
                            a.op() + b.op() - a.op() * b.op(), tol);
}

bool disjoint(const HistoryProposition& a, const HistoryProposition& b,
              double tol) {
  require_same_frame(a, b, "disjoint");
  return nearly_zero(a.op() * b.op(), tol);
}

bool leq(const HistoryProposition& a, const HistoryProposition& b, double tol) {
  require_same_frame(a, b, "leq");
  return nearly_zero(a.op() * b.op() - a.op(), tol);
}

ClassOperator class_operator(const SystemModel& model, const HistoryProposition& h) {
  if (h.support() != model.support()) {
    throw SupportMismatch("class_operator: history support must equal the model support");
  }
  if (h.base_dim() != model.dim()) {
    throw ValidationError("class_operator: base dimension must equal the model dimension");
  }
  const Eigen::Index d = model.dim();
  const Eigen::Index block = h.op().rows() / d;  // d^(n-1)

  // Linear extension of (A_1 tensor ... tensor A_n) -> A_n ... A_1 in the
  // elementary product basis.  With factors ordered earliest first, the
  // chain of elementary products contracts to
  //   C(a, b) = sum_m op(m * d + a, b * block + m).
  Matrix c = Matrix::Zero(d, d);
  for (Eigen::Index m = 0; m < block; ++m) {
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        c(a, b) += h.op()(m * d + a, b * block + m);
      }
    }
  }
  return ClassOperator{std::move(c)};
}

std::vector<HistoryProposition> boolean_closure(
    std::vector<HistoryProposition> generators, double tol, std::size_t max_size) {
  if (generators.empty()) {
    throw ValidationError("boolean_closure: at least one generator is required");
  }
  const TemporalSupport& support = generators.front().support();
  const int d = generators.front().base_dim();

  std::vector<HistoryProposition> closure;
  auto insert = [&](const HistoryProposition& p) {
    for (const HistoryProposition& q : closure) {
      if (nearly_equal(p.op(), q.op(), tol)) return false;
    }
    if (closure.size() >= max_size) {
      throw ValidationError("boolean_closure: closure exceeds max_size elements");
    }
    closure.push_back(p);
    return true;
  };

  insert(HistoryProposition::zero(support, d));
  insert(HistoryProposition::unit(support, d));
  for (const HistoryProposition& g : generators) {
    require_same_frame(generators.front(), g, "boolean_closure");
    insert(g);
  }

  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t count = closure.size();
    for (std::size_t i = 0; i < count; ++i) {
      grew |= insert(negate(closure[i], tol));
      for (std::size_t j = i + 1; j < count; ++j) {
        grew |= insert(conj(closure[i], closure[j], tol));
        grew |= insert(disj(closure[i], closure[j], tol));
      }
    }
  }
  return closure;
}

}  // namespace qhist
