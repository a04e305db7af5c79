#include "qhist/entropy.hpp"

#include <cmath>
#include <sstream>

namespace qhist {

namespace {

void require_context(const ContextLabel& context,
                     const std::vector<HistoryProposition>& set_a) {
  switch (context.kind) {
    case ContextLabel::Kind::APriori:
      return;
    case ContextLabel::Kind::NullCounterfactual:
      if (context.index < 0 ||
          context.index >= static_cast<int>(set_a.size())) {
        throw ValidationError(
            "entropy context: counterfactual index outside the conditioning set");
      }
      return;
    default:
      throw ValidationError(
          "entropy context: only a-priori and null-counterfactual contexts are "
          "meaningful here");
  }
}

void require_co_exclusive(const SystemModel& model,
                          const std::vector<HistoryProposition>& set,
                          ConsistencyMode mode, double tol, const char* label) {
  const ConsistencyVerdict verdict = classify(model, set, mode, tol);
  if (!verdict.is_consistent) {
    std::ostringstream out;
    out << "entropy: " << label << " is not an exclusive-exhaustive set"
        << " (complete: " << (verdict.is_complete ? "yes" : "no")
        << ", max off-diagonal " << verdict.max_offdiag << ")";
    throw NotCoExclusive(out.str());
  }
}

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

}  // namespace

// --------------------------- distributions -------------------------------

Distribution Distribution::from_values(std::vector<double> values, double tol) {
  Distribution dist;
  dist.labels.resize(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dist.labels[i] = static_cast<int>(i);
    if (values[i] < -tol) {
      std::ostringstream out;
      out << "Distribution: entry " << i << " is negative (" << values[i] << ")";
      throw ValidationError(out.str());
    }
    values[i] = std::max(values[i], 0.0);
    sum += values[i];
  }
  if (std::abs(sum - 1.0) > tol) {
    std::ostringstream out;
    out << "Distribution: entries sum to " << sum;
    throw NotNormalized(out.str());
  }
  dist.p = std::move(values);
  return dist;
}

double shannon(const Distribution& dist, double tol) {
  if (dist.p.size() != dist.labels.size()) {
    throw ValidationError("shannon: labels and probabilities differ in length");
  }
  double sum = 0.0;
  double entropy = 0.0;
  for (double p : dist.p) {
    if (p < -tol) throw ValidationError("shannon: negative probability");
    sum += p;
    entropy -= plogp(p);
  }
  if (std::abs(sum - 1.0) > tol) {
    throw NotNormalized("shannon: probabilities do not sum to one");
  }
  return entropy;
}

// --------------------------- co-exclusive pairs --------------------------

Eigen::MatrixXd joint_distribution(const SystemModel& model,
                                   const std::vector<HistoryProposition>& set_a,
                                   const std::vector<HistoryProposition>& set_b,
                                   ConsistencyMode mode, double tol) {
  if (set_a.empty() || set_b.empty()) {
    throw ValidationError("joint_distribution: sets must not be empty");
  }
  require_co_exclusive(model, set_a, mode, tol, "the first set");
  require_co_exclusive(model, set_b, mode, tol, "the second set");

  std::vector<HistoryProposition> joint;
  joint.reserve(set_a.size() * set_b.size());
  try {
    for (const HistoryProposition& a : set_a) {
      for (const HistoryProposition& b : set_b) {
        joint.push_back(conj(a, b, tol));
      }
    }
  } catch (const NonCommuting&) {
    throw NotCoExclusive(
        "entropy: the two sets do not commute, so their joint is undefined");
  }
  require_co_exclusive(model, joint, mode, tol, "the conjunction set");

  Eigen::MatrixXd values(static_cast<Eigen::Index>(set_a.size()),
                         static_cast<Eigen::Index>(set_b.size()));
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    for (std::size_t j = 0; j < set_b.size(); ++j) {
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          probability(model, joint[i * set_b.size() + j], tol);
    }
  }
  return values;
}

double conditional_entropy(const SystemModel& model,
                           const std::vector<HistoryProposition>& set_a,
                           const std::vector<HistoryProposition>& set_b,
                           ContextLabel context, ConsistencyMode mode,
                           double tol) {
  require_context(context, set_a);
  const Eigen::MatrixXd joint = joint_distribution(model, set_a, set_b, mode, tol);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < joint.rows(); ++i) {
    const double p_i =
        probability(model, set_a[static_cast<std::size_t>(i)], tol);
    if (p_i <= tol) continue;
    double row = 0.0;
    for (Eigen::Index j = 0; j < joint.cols(); ++j) {
      row -= plogp(joint(i, j) / p_i);
    }
    entropy += p_i * row;
  }
  return entropy;
}

// --------------------------- identity report -----------------------------

EntropyReport entropy_identities(const SystemModel& model,
                                 const std::vector<HistoryProposition>& set_a,
                                 const std::vector<HistoryProposition>& set_b,
                                 ContextLabel context, ConsistencyMode mode,
                                 double tol) {
  require_context(context, set_a);
  const Eigen::MatrixXd joint = joint_distribution(model, set_a, set_b, mode, tol);

  std::vector<double> p_a(set_a.size());
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    p_a[i] = probability(model, set_a[i], tol);
  }
  std::vector<double> p_b(set_b.size());
  for (std::size_t j = 0; j < set_b.size(); ++j) {
    p_b[j] = probability(model, set_b[j], tol);
  }
  std::vector<double> p_joint(joint.data(), joint.data() + joint.size());

  EntropyReport report;
  report.entropy_a = shannon(Distribution::from_values(p_a, tol), tol);
  report.entropy_b = shannon(Distribution::from_values(p_b, tol), tol);
  report.entropy_joint = shannon(Distribution::from_values(p_joint, tol), tol);
  report.conditional_b_given_a =
      conditional_entropy(model, set_a, set_b, ContextLabel{}, mode, tol);
  report.conditional_a_given_b =
      conditional_entropy(model, set_b, set_a, ContextLabel{}, mode, tol);
  report.additivity_residual_ab = std::abs(
      report.entropy_joint - report.entropy_a - report.conditional_b_given_a);
  report.additivity_residual_ba = std::abs(
      report.entropy_joint - report.entropy_b - report.conditional_a_given_b);
  report.concavity_margin_b = report.entropy_b - report.conditional_b_given_a;
  report.concavity_margin_a = report.entropy_a - report.conditional_a_given_b;
  return report;
}

}  // namespace qhist
