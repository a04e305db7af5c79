#include "qhist/bayes.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qhist {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

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

void require_member_index(const std::vector<HistoryProposition>& set, int i,
                          const char* who) {
  if (i < 0 || i >= static_cast<int>(set.size())) {
    throw ValidationError(std::string(who) + ": member index out of range");
  }
}

// Expansion of p(alpha_i | M) over mixture components; probabilities are
// decoherence values throughout, as in the mixture theorem.
double mixture_expansion(const SystemModel& model,
                         const std::vector<HistoryProposition>& set,
                         const std::vector<double>& weights, int i, double tol) {
  const HistoryProposition& alpha_i = set[static_cast<std::size_t>(i)];
  double value = weights[static_cast<std::size_t>(i)] * probability(model, alpha_i, tol);
  for (int j = 0; j < static_cast<int>(set.size()); ++j) {
    if (j == i) continue;
    const HistoryProposition& alpha_j = set[static_cast<std::size_t>(j)];
    const double both = probability(model, conj(alpha_i, alpha_j, tol), tol);
    const double with_not =
        probability(model, conj(alpha_i, negate(alpha_j, tol), tol), tol);
    value += weights[static_cast<std::size_t>(j)] * (both + with_not);
  }
  return value;
}

std::vector<double> uniform_weights(std::size_t n) {
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

void validate_weights(const std::vector<double>& weights, std::size_t n,
                      double tol, const char* who) {
  if (weights.size() != n) {
    throw ValidationError(std::string(who) + ": one weight per member is required");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < -tol) {
      throw ValidationError(std::string(who) + ": weights must be nonnegative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw NotNormalized(std::string(who) + ": weights must sum to one");
  }
}

ProbabilitySource resolve_source(const SystemModel& model,
                                 const std::vector<HistoryProposition>& set,
                                 ProbabilitySource source, double tol) {
  if (source != ProbabilitySource::Auto) return source;
  for (const HistoryProposition& h : set) {
    const double sum = dfunc(model, h, h).real() +
                       dfunc(model, negate(h, tol), negate(h, tol)).real();
    if (std::abs(sum - 1.0) > tol) return ProbabilitySource::LinearPositive;
  }
  return ProbabilitySource::Decoherence;
}

double source_probability(const SystemModel& model, const HistoryProposition& h,
                          ProbabilitySource source, double tol) {
  return source == ProbabilitySource::LinearPositive
             ? lp_probability(model, h)
             : probability(model, h, tol);
}

}  // namespace

// --------------------------- pairwise operations -------------------------

ConditionalValue conditional(const SystemModel& model, const HistoryProposition& a,
                             const HistoryProposition& b, double tol) {
  const double denom = probability(model, negate(b, tol), tol);
  if (denom <= tol) {
    throw DegenerateConditioning(
        "conditional: probability of the negated condition is within tolerance of zero");
  }
  ConditionalValue result;
  result.value = probability(model, a, tol) / denom;
  result.well_defined = result.value <= 1.0 + tol;
  return result;
}

std::pair<double, double> negneg_decompositions(const SystemModel& model,
                                                const HistoryProposition& a,
                                                const HistoryProposition& b,
                                                double tol) {
  const double not_a = probability(model, negate(a, tol), tol);
  const double not_b = probability(model, negate(b, tol), tol);
  if (not_a <= tol || not_b <= tol) {
    throw DegenerateConditioning(
        "negneg_decompositions: a negated member has probability within tolerance of zero");
  }
  const double first = not_b - probability(model, a, tol);
  const double second = not_a - probability(model, b, tol);
  return {first, second};
}

// --------------------------- mixtures ------------------------------------

MixtureModel::MixtureModel(const SystemModel& model,
                           std::vector<HistoryProposition> set,
                           std::vector<double> weights, double tol)
    : set_(std::move(set)), weights_(std::move(weights)) {
  require_uniform_set(set_, "MixtureModel");
  validate_weights(weights_, set_.size(), tol, "MixtureModel");
  for (std::size_t i = 0; i < set_.size(); ++i) {
    const double sum = dfunc(model, set_[i], set_[i]).real() +
                       dfunc(model, negate(set_[i], tol), negate(set_[i], tol)).real();
    if (std::abs(sum - 1.0) > tol) {
      std::ostringstream out;
      out << "MixtureModel: member " << i << " is not d-realisable (sum " << sum
          << ")";
      throw ValidationError(out.str());
    }
  }
}

double mixture_probability(const SystemModel& model, const MixtureModel& mixture,
                           int i, double tol) {
  require_member_index(mixture.set(), i, "mixture_probability");
  return mixture_expansion(model, mixture.set(), mixture.weights(), i, tol);
}

// --------------------------- posterior bookkeeping -----------------------

double posterior_rule(const SystemModel& model,
                      const std::vector<HistoryProposition>& set, int i, int k,
                      double tol) {
  require_uniform_set(set, "posterior_rule");
  require_member_index(set, i, "posterior_rule");
  require_member_index(set, k, "posterior_rule");
  const double context_weight = 1.0 / static_cast<double>(set.size());
  if (context_weight <= tol) {
    throw DegenerateConditioning("posterior_rule: context weight is degenerate");
  }
  const HistoryProposition& alpha_i = set[static_cast<std::size_t>(i)];
  const HistoryProposition& alpha_k = set[static_cast<std::size_t>(k)];
  // A-priori joint probabilities carry the uniform context weight; the
  // final division by p(1_k | C) removes it.
  const double joint =
      (probability(model, conj(alpha_i, alpha_k, tol), tol) +
       probability(model, conj(alpha_i, negate(alpha_k, tol), tol), tol)) *
      context_weight;
  return joint / context_weight;
}

double ratio_identity_residual(const SystemModel& model,
                               const std::vector<HistoryProposition>& set, int i,
                               int k, double tol) {
  require_uniform_set(set, "ratio_identity_residual");
  require_member_index(set, i, "ratio_identity_residual");
  require_member_index(set, k, "ratio_identity_residual");
  const double context_weight = 1.0 / static_cast<double>(set.size());
  const double p_i = probability(model, set[static_cast<std::size_t>(i)], tol);
  const double not_k =
      probability(model, negate(set[static_cast<std::size_t>(k)], tol), tol);
  if (not_k <= tol) {
    throw DegenerateConditioning(
        "ratio_identity_residual: negated member has probability within tolerance of zero");
  }
  const double a_priori = (p_i * context_weight) / (not_k * context_weight);
  const double a_posteriori = p_i / not_k;
  return std::abs(a_priori - a_posteriori);
}

// --------------------------- Cox checks ----------------------------------

CoxReport cox_consistency(const SystemModel& model,
                          const std::vector<HistoryProposition>& set,
                          ProbabilitySource source, double tol) {
  require_uniform_set(set, "cox_consistency");
  const int n = static_cast<int>(set.size());

  CoxReport report;
  report.source = resolve_source(model, set, source, tol);

  // Associativity over a bounded deterministic selection of triples.
  const long long triples = static_cast<long long>(n) * n * n;
  const long long triple_stride = std::max(1LL, triples / 64);
  double assoc = 0.0;
  for (long long t = 0; t < triples; t += triple_stride) {
    const int i = static_cast<int>(t / (static_cast<long long>(n) * n));
    const int j = static_cast<int>((t / n) % n);
    const int k = static_cast<int>(t % n);
    const Matrix& a = set[static_cast<std::size_t>(i)].op();
    const Matrix& b = set[static_cast<std::size_t>(j)].op();
    const Matrix& c = set[static_cast<std::size_t>(k)].op();
    assoc = std::max(assoc, ((a * b) * c - a * (b * c)).norm());
  }
  report.associativity_residual = assoc;

  const long long pairs = static_cast<long long>(n) * n;
  const long long pair_stride = std::max(1LL, pairs / 128);
  double comm = 0.0;
  for (long long t = 0; t < pairs; t += pair_stride) {
    const int i = static_cast<int>(t / n);
    const int j = static_cast<int>(t % n);
    const Matrix& a = set[static_cast<std::size_t>(i)].op();
    const Matrix& b = set[static_cast<std::size_t>(j)].op();
    comm = std::max(comm, (a * b - b * a).norm());
  }
  report.commutativity_residual = comm;

  // Product rule over members and negations, skipping degenerate
  // conditionings.
  double product = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const HistoryProposition& alpha_i = set[static_cast<std::size_t>(i)];
      const HistoryProposition& alpha_j = set[static_cast<std::size_t>(j)];
      const HistoryProposition not_i = negate(alpha_i, tol);
      const HistoryProposition not_j = negate(alpha_j, tol);
      const double p_i = source_probability(model, alpha_i, report.source, tol);
      const double p_j = source_probability(model, alpha_j, report.source, tol);
      const double pn_i = source_probability(model, not_i, report.source, tol);
      const double pn_j = source_probability(model, not_j, report.source, tol);

      // p(alpha_i | alpha_j I) = 0 for distinct disjoint members.
      product = std::max(
          product, std::abs(source_probability(
                       model, conj(alpha_i, alpha_j, tol), report.source, tol)));

      if (pn_j > tol) {
        const double chain = (p_i / pn_j) * pn_j;
        const double direct = source_probability(
            model, conj(alpha_i, not_j, tol), report.source, tol);
        product = std::max(product, std::abs(direct - chain));
      }
      if (pn_i > tol) {
        const double chain = (1.0 - p_j / pn_i) * pn_i;
        const double direct = source_probability(
            model, conj(not_i, not_j, tol), report.source, tol);
        product = std::max(product, std::abs(direct - chain));
      }
    }
  }
  report.product_rule_residual = product;
  return report;
}

// --------------------------- audit ---------------------------------------

AuditReport audit(const SystemModel& model,
                  const std::vector<HistoryProposition>& set,
                  const std::vector<double>& weights, ConsistencyMode mode,
                  ProbabilitySource source, double tol) {
  require_uniform_set(set, "audit");
  const int n = static_cast<int>(set.size());

  AuditReport report;
  report.verdict = classify(model, set, mode, tol);
  report.source = resolve_source(model, set, source, tol);
  report.quasi_constant = report.verdict.quasi_constant;
  report.context_weight = 1.0 / static_cast<double>(n);
  if (report.quasi_constant) {
    report.a_priori_constant = *report.quasi_constant * report.context_weight;
  } else {
    report.failures.push_back("realisability sums are not constant across members");
  }

  auto note = [&](const std::string& text) { report.failures.push_back(text); };

  std::vector<HistoryProposition> negations;
  negations.reserve(set.size());
  for (const HistoryProposition& h : set) negations.push_back(negate(h, tol));

  report.probabilities.resize(static_cast<std::size_t>(n));
  report.neg_probabilities.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double p =
        source_probability(model, set[static_cast<std::size_t>(i)], report.source, tol);
    const double q = source_probability(model, negations[static_cast<std::size_t>(i)],
                                        report.source, tol);
    report.probabilities[static_cast<std::size_t>(i)] = p;
    report.neg_probabilities[static_cast<std::size_t>(i)] = q;
    if (p < -tol || p > 1.0 + tol || q < -tol || q > 1.0 + tol) {
      std::ostringstream out;
      out << "member " << i << " carries a probability outside [0, 1]";
      note(out.str());
    }
  }

  // Conditional table p(alpha_i | not alpha_j I).
  report.conditionals = Eigen::MatrixXd::Constant(n, n, kNaN);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        // alpha_i conjoined with its own negation is null, so the
        // conditional vanishes whatever the denominator.
        report.conditionals(i, i) = 0.0;
        continue;
      }
      const double denom = report.neg_probabilities[static_cast<std::size_t>(j)];
      if (denom <= tol) {
        report.degenerate_conditionals.emplace_back(i, j);
        continue;
      }
      const double value =
          report.probabilities[static_cast<std::size_t>(i)] / denom;
      report.conditionals(i, j) = value;
      if (value > 1.0 + tol || value < -tol) {
        report.unbounded_conditionals.emplace_back(i, j);
      }
    }
  }
  if (!report.degenerate_conditionals.empty()) {
    note("degenerate conditionals were skipped");
  }
  if (!report.unbounded_conditionals.empty()) {
    note("conditional probabilities escape [0, 1]");
  }

  // Chain decompositions of p(not alpha_i and not alpha_j | I), always on
  // decoherence values: the residual equals the realisability-sum gap, the
  // quantity quasi-realisability is about.
  std::vector<double> dec(static_cast<std::size_t>(n));
  std::vector<double> dec_neg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dec[static_cast<std::size_t>(i)] =
        probability(model, set[static_cast<std::size_t>(i)], tol);
    dec_neg[static_cast<std::size_t>(i)] =
        probability(model, negations[static_cast<std::size_t>(i)], tol);
  }
  report.negneg_residuals = Eigen::MatrixXd::Constant(n, n, kNaN);
  report.max_negneg_residual = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double pn_i = dec_neg[static_cast<std::size_t>(i)];
      const double pn_j = dec_neg[static_cast<std::size_t>(j)];
      if (pn_i <= tol || pn_j <= tol) continue;
      const double first = pn_j - dec[static_cast<std::size_t>(i)];
      const double second = pn_i - dec[static_cast<std::size_t>(j)];
      const double residual = std::abs(first - second);
      report.negneg_residuals(i, j) = residual;
      report.max_negneg_residual = std::max(report.max_negneg_residual, residual);
    }
  }
  if (report.max_negneg_residual > tol) {
    note("chain decompositions of joint negations disagree");
  }

  // Mixture checks on decoherence values.
  report.weights = weights.empty() ? uniform_weights(set.size()) : weights;
  validate_weights(report.weights, set.size(), tol, "audit");
  report.mixture_values.resize(static_cast<std::size_t>(n));
  report.max_mixture_residual = 0.0;
  for (int i = 0; i < n; ++i) {
    const double value = mixture_expansion(model, set, report.weights, i, tol);
    report.mixture_values[static_cast<std::size_t>(i)] = value;
    const double target =
        probability(model, set[static_cast<std::size_t>(i)], tol);
    report.max_mixture_residual =
        std::max(report.max_mixture_residual, std::abs(value - target));
  }
  if (report.max_mixture_residual > tol) {
    note("mixture expansion disagrees with member probabilities");
  }

  // Posterior and ratio checks under uniform context weights.
  report.max_posterior_residual = 0.0;
  report.max_ratio_residual = 0.0;
  report.max_exhaustive_posterior_residual = 0.0;
  for (int i = 0; i < n; ++i) {
    const double target = probability(model, set[static_cast<std::size_t>(i)], tol);
    double joint_over_contexts = 0.0;
    double weight_over_contexts = 0.0;
    for (int k = 0; k < n; ++k) {
      const double value = posterior_rule(model, set, i, k, tol);
      report.max_posterior_residual =
          std::max(report.max_posterior_residual, std::abs(value - target));
      joint_over_contexts += value * report.context_weight;
      weight_over_contexts += report.context_weight;
      const double not_k =
          probability(model, negate(set[static_cast<std::size_t>(k)], tol), tol);
      if (not_k > tol) {
        report.max_ratio_residual =
            std::max(report.max_ratio_residual,
                     ratio_identity_residual(model, set, i, k, tol));
      }
    }
    report.max_exhaustive_posterior_residual =
        std::max(report.max_exhaustive_posterior_residual,
                 std::abs(joint_over_contexts / weight_over_contexts - target));
  }
  if (report.max_posterior_residual > tol) {
    note("posterior rule disagrees with member probabilities");
  }
  if (report.max_ratio_residual > tol) {
    note("a-priori and a-posteriori probability ratios disagree");
  }

  // Disjunction tables conditioned on members; exclusive-family axioms make
  // every entry 0 or 1.
  report.or_table_matches = true;
  for (int i = 0; i < n && report.or_table_matches; ++i) {
    for (int j = 0; j < n && report.or_table_matches; ++j) {
      for (int k = 0; k < n; ++k) {
        const double given_i = i == k ? 1.0 : 0.0;
        const double given_j = j == k ? 1.0 : 0.0;
        const double both = given_i * given_j;
        const double or_plain = given_i + given_j - both;
        const double or_neg = given_i + (1.0 - given_j) - given_i * (1.0 - given_j);
        const double or_negneg =
            (1.0 - given_i) + (1.0 - given_j) - (1.0 - given_i) * (1.0 - given_j);
        const double want_plain = (k == i || k == j) ? 1.0 : 0.0;
        const double want_neg = (k == i || k != j) ? 1.0 : 0.0;
        const double want_negneg = (k == i && k == j) ? 0.0 : 1.0;
        if (or_plain != want_plain || or_neg != want_neg ||
            or_negneg != want_negneg) {
          report.or_table_matches = false;
          note("disjunction table departs from the exclusive-family case analysis");
          break;
        }
      }
    }
  }

  report.cox = cox_consistency(model, set, source, tol);

  report.bayes_consistent =
      report.quasi_constant.has_value() && report.degenerate_conditionals.empty() &&
      report.unbounded_conditionals.empty() && report.max_negneg_residual <= tol &&
      report.max_mixture_residual <= tol && report.max_posterior_residual <= tol &&
      report.max_ratio_residual <= tol &&
      report.max_exhaustive_posterior_residual <= tol && report.or_table_matches;
  return report;
}

}  // namespace qhist
