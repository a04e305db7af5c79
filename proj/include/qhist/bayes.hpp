#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhist/linear_positivity.hpp"

namespace qhist {

// --------------------------- contexts ------------------------------------

// Bookkeeping label for the context a probability is read in.  Numeric
// context weights are uniform: with N null counterfactuals each carries
// a-priori weight 1/N.
struct ContextLabel {
  enum class Kind { APriori, NullCounterfactual, Mixture, Posterior };
  Kind kind = Kind::APriori;
  // Member index for NullCounterfactual and Posterior kinds.
  int index = -1;
};

// --------------------------- pairwise operations -------------------------

struct ConditionalValue {
  double value = 0.0;
  // Within [0, 1 + tol]; false marks a recorded but unusable entry.
  bool well_defined = false;
};

// p(a | not b, I) = probability(a) / probability(not b).  Throws
// DegenerateConditioning when the denominator is within tolerance of zero.
ConditionalValue conditional(const SystemModel& model, const HistoryProposition& a,
                             const HistoryProposition& b,
                             double tol = default_tolerance());

// The two chain decompositions of p(not a and not b | I):
//   first  = p(not b | I) - p(a | I)
//   second = p(not a | I) - p(b | I)
// They agree exactly when the realisability sums of a and b agree.
std::pair<double, double> negneg_decompositions(const SystemModel& model,
                                                const HistoryProposition& a,
                                                const HistoryProposition& b,
                                                double tol = default_tolerance());

// --------------------------- mixtures ------------------------------------

// Convex mixture over a set of d-realisable histories.  Weights must be
// nonnegative and sum to one; every member must have realisability sum one
// within tolerance.
class MixtureModel {
 public:
  MixtureModel(const SystemModel& model, std::vector<HistoryProposition> set,
               std::vector<double> weights, double tol = default_tolerance());

  const std::vector<HistoryProposition>& set() const { return set_; }
  const std::vector<double>& weights() const { return weights_; }
  int size() const { return static_cast<int>(set_.size()); }

 private:
  std::vector<HistoryProposition> set_;
  std::vector<double> weights_;
};

// p(alpha_i | M) expanded over the mixture components:
//   w_i p(alpha_i) + sum_{j != i} w_j [p(alpha_i and alpha_j)
//                                      + p(alpha_i and not alpha_j)].
// Equal to probability(alpha_i) for every valid weight vector.
double mixture_probability(const SystemModel& model, const MixtureModel& mixture,
                           int i, double tol = default_tolerance());

// --------------------------- posterior bookkeeping -----------------------

// Posterior of member i after conditioning on the null counterfactual of
// member k under uniform context weights:
//   [p(alpha_i and alpha_k | C) + p(alpha_i and not alpha_k | C)] / p(1_k | C).
double posterior_rule(const SystemModel& model,
                      const std::vector<HistoryProposition>& set, int i, int k,
                      double tol = default_tolerance());

// |p(alpha_i | C) / p(not alpha_k | C)
//  - p(alpha_i | 1_k C) / p(not alpha_k | 1_k C)|; zero by construction
// under uniform context weights.
double ratio_identity_residual(const SystemModel& model,
                               const std::vector<HistoryProposition>& set, int i,
                               int k, double tol = default_tolerance());

// --------------------------- Cox checks ----------------------------------

enum class ProbabilitySource { Auto, Decoherence, LinearPositive };

struct CoxReport {
  double associativity_residual = 0.0;
  double commutativity_residual = 0.0;
  double product_rule_residual = 0.0;
  ProbabilitySource source = ProbabilitySource::Decoherence;
};

// Associativity and commutativity of the conjunction on the set operators,
// plus the product rule p(a and b | I) = p(a | b I) p(b | I) evaluated
// with the resolved probability assignment over members and negations.
CoxReport cox_consistency(const SystemModel& model,
                          const std::vector<HistoryProposition>& set,
                          ProbabilitySource source = ProbabilitySource::Auto,
                          double tol = default_tolerance());

// --------------------------- audit ---------------------------------------

struct AuditReport {
  ConsistencyVerdict verdict;
  // Source the Bayes-side tables were computed with.  Auto resolves to
  // decoherence values on d-realisable sets and lp values otherwise.
  ProbabilitySource source = ProbabilitySource::Decoherence;

  std::vector<double> probabilities;      // per member, resolved source
  std::vector<double> neg_probabilities;  // per negation, resolved source

  // conditionals(i, j) = p(alpha_i | not alpha_j I); NaN when degenerate.
  Eigen::MatrixXd conditionals;
  std::vector<std::pair<int, int>> degenerate_conditionals;
  // Entries beyond 1 + tol, the boundedness failures.
  std::vector<std::pair<int, int>> unbounded_conditionals;

  // |first - second| chain decompositions per ordered pair; NaN when
  // degenerate.
  Eigen::MatrixXd negneg_residuals;
  double max_negneg_residual = 0.0;

  // Mixture checks always evaluate decoherence values; the mixture theorem
  // pins them to the decoherence diagonal.
  std::vector<double> weights;
  std::vector<double> mixture_values;
  double max_mixture_residual = 0.0;

  double max_posterior_residual = 0.0;
  double max_exhaustive_posterior_residual = 0.0;
  double max_ratio_residual = 0.0;

  // Disjunction tables conditioned on members match the exclusive-family
  // case analysis with values in {0, 1}.
  bool or_table_matches = false;

  std::optional<double> quasi_constant;   // K
  double context_weight = 0.0;            // L' = 1/N
  std::optional<double> a_priori_constant;  // L = K L'

  CoxReport cox;

  // Quasi-realisable, bounded and non-degenerate conditionals, agreeing
  // decompositions, mixture and posterior checks within tolerance.
  bool bayes_consistent = false;
  std::vector<std::string> failures;
};

// Full Bayes-side audit of an exclusive-family set.  Failures are recorded
// in the report instead of raised, except for malformed inputs.
AuditReport audit(const SystemModel& model,
                  const std::vector<HistoryProposition>& set,
                  const std::vector<double>& weights = {},
                  ConsistencyMode mode = ConsistencyMode::Strong,
                  ProbabilitySource source = ProbabilitySource::Auto,
                  double tol = default_tolerance());

}  // namespace qhist
