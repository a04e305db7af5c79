#include "qhist/decoherence.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

namespace qhist {

namespace {

void require_uniform_set(const std::vector<HistoryProposition>& set, const char* who) {
  if (set.empty()) {
    throw ValidationError(std::string(who) + ": set must not be empty");
  }
  for (const HistoryProposition& h : set) {
    if (h.support() != set.front().support() ||
        h.base_dim() != set.front().base_dim()) {
      throw SupportMismatch(std::string(who) + ": members must share one support");
    }
  }
}

bool set_is_complete(const std::vector<HistoryProposition>& set, double tol) {
  Matrix sum = Matrix::Zero(set.front().op().rows(), set.front().op().cols());
  for (const HistoryProposition& h : set) sum += h.op();
  return nearly_equal(sum, Matrix::Identity(sum.rows(), sum.cols()), tol);
}

}  // namespace

// --------------------------- dfunc / probability -------------------------

Complex dfunc(const SystemModel& model, const HistoryProposition& a,
              const HistoryProposition& b) {
  const Matrix ca = class_operator(model, a).matrix;
  const Matrix cb = class_operator(model, b).matrix;
  return (ca * model.initial_state().matrix() * cb.adjoint()).trace();
}

double probability(const SystemModel& model, const HistoryProposition& a,
                   double tol) {
  const Complex d = dfunc(model, a, a);
  if (std::abs(d.imag()) > tol) {
    throw ValidationError("probability: diagonal decoherence value is not real");
  }
  if (d.real() < -tol) {
    std::ostringstream out;
    out << "probability: diagonal decoherence value " << d.real()
        << " is below -tolerance";
    throw ValidationError(out.str());
  }
  return d.real() < 0.0 ? 0.0 : d.real();
}

// --------------------------- decoherence matrix --------------------------

DecoherenceMatrix decoherence_matrix(const SystemModel& model,
                                     const std::vector<HistoryProposition>& set,
                                     double tol) {
  require_uniform_set(set, "decoherence_matrix");
  const int n = static_cast<int>(set.size());

  std::vector<Matrix> class_ops;
  class_ops.reserve(set.size());
  for (const HistoryProposition& h : set) {
    class_ops.push_back(class_operator(model, h).matrix);
  }

  Eigen::MatrixXcd values(n, n);
  const Matrix& rho = model.initial_state().matrix();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      values(i, j) = (class_ops[static_cast<std::size_t>(i)] * rho *
                      class_ops[static_cast<std::size_t>(j)].adjoint())
                         .trace();
    }
  }

  if (!nearly_equal(values, values.adjoint(), tol)) {
    throw ValidationError("decoherence_matrix: values are not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(values);
  if (solver.info() != Eigen::Success) {
    throw ValidationError("decoherence_matrix: eigendecomposition failed");
  }
  if (solver.eigenvalues().minCoeff() < -tol) {
    throw ValidationError("decoherence_matrix: values are not positive semidefinite");
  }
  if (set_is_complete(set, tol) && std::abs(values.sum().real() - 1.0) > tol) {
    throw ValidationError("decoherence_matrix: complete set values do not sum to one");
  }

  return DecoherenceMatrix{set, std::move(values)};
}

// --------------------------- classify -----------------------------------

ConsistencyVerdict classify(const SystemModel& model,
                            const std::vector<HistoryProposition>& set,
                            ConsistencyMode mode, double tol) {
  const DecoherenceMatrix dm = decoherence_matrix(model, set, tol);
  const int n = static_cast<int>(set.size());

  ConsistencyVerdict verdict;
  verdict.mode = mode;
  verdict.is_complete = set_is_complete(set, tol);

  double max_offdiag = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double weight = mode == ConsistencyMode::Strong
                                ? std::abs(dm.values(i, j))
                                : std::abs(dm.values(i, j).real());
      max_offdiag = std::max(max_offdiag, weight);
    }
  }
  verdict.max_offdiag = max_offdiag;
  verdict.is_consistent = verdict.is_complete && max_offdiag <= tol;

  // Realisability sums use the same class-operator path as every other
  // probability, negation included.
  std::vector<double> neg_probability(static_cast<std::size_t>(n));
  verdict.realisability.reserve(set.size());
  for (int i = 0; i < n; ++i) {
    const double q =
        probability(model, negate(set[static_cast<std::size_t>(i)], tol), tol);
    neg_probability[static_cast<std::size_t>(i)] = q;
    verdict.realisability.push_back(dm.values(i, i).real() + q);
  }

  double lo = verdict.realisability.front();
  double hi = lo;
  for (double s : verdict.realisability) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (hi - lo <= tol) {
    double mean = 0.0;
    for (double s : verdict.realisability) mean += s;
    verdict.quasi_constant = mean / static_cast<double>(n);
  }

  for (int i = 0; i < n; ++i) {
    const double pi = std::max(dm.values(i, i).real(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const HistoryProposition not_j = negate(set[static_cast<std::size_t>(j)], tol);
      if (!leq(set[static_cast<std::size_t>(i)], not_j, tol)) continue;
      if (pi > neg_probability[static_cast<std::size_t>(j)] + tol) {
        verdict.order_violations.emplace_back(i, j);
      }
    }
  }
  return verdict;
}

// --------------------------- Boolean families ----------------------------

bool boolean_consistent(const SystemModel& model,
                        const std::vector<HistoryProposition>& w, double tol) {
  require_uniform_set(w, "boolean_consistent");
  const int n = static_cast<int>(w.size());

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Matrix& a = w[static_cast<std::size_t>(i)].op();
      const Matrix& b = w[static_cast<std::size_t>(j)].op();
      if (!nearly_zero(a * b - b * a, tol)) {
        throw NotBooleanClosed("boolean_consistent: members do not commute pairwise");
      }
    }
  }

  auto find_member = [&](const HistoryProposition& p) -> bool {
    for (const HistoryProposition& q : w) {
      if (nearly_equal(p.op(), q.op(), tol)) return true;
    }
    return false;
  };

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const HistoryProposition meet =
          conj(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)], tol);
      if (!find_member(meet)) {
        throw NotBooleanClosed(
            "boolean_consistent: family is not closed under conjunction");
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const HistoryProposition meet =
          conj(w[static_cast<std::size_t>(i)], w[static_cast<std::size_t>(j)], tol);
      const Complex lhs = dfunc(model, meet, meet);
      const Complex rhs = dfunc(model, w[static_cast<std::size_t>(i)],
                                w[static_cast<std::size_t>(j)]);
      if (std::abs(lhs - rhs) > tol) return false;
    }
  }
  return true;
}

}  // namespace qhist
