#pragma once

#include <vector>

#include "qhist/bayes.hpp"

namespace qhist {

// --------------------------- distributions -------------------------------

// Probability distribution over labelled histories.  Entries below zero by
// at most tol are clamped to zero; the total must be one within tolerance.
struct Distribution {
  std::vector<int> labels;
  std::vector<double> p;

  static Distribution from_values(std::vector<double> values,
                                  double tol = default_tolerance());
};

// Natural-log Shannon entropy with 0 ln 0 = 0; range [0, ln N].
double shannon(const Distribution& dist, double tol = default_tolerance());

// --------------------------- co-exclusive pairs --------------------------

// Joint probabilities p(a_i and b_j | I) for two exclusive-exhaustive sets.
// Requires each set and the conjunction set to be consistent and complete;
// throws NotCoExclusive otherwise.  Row index runs over set_a.
Eigen::MatrixXd joint_distribution(const SystemModel& model,
                                   const std::vector<HistoryProposition>& set_a,
                                   const std::vector<HistoryProposition>& set_b,
                                   ConsistencyMode mode = ConsistencyMode::Strong,
                                   double tol = default_tolerance());

// H of set_b conditioned on set_a:
//   -sum_i p(a_i) sum_j p(b_j | a_i) ln p(b_j | a_i)
// with p(b_j | a_i) = p(a_i and b_j) / p(a_i).  Conditioning rows with
// probability within tolerance of zero contribute nothing.  The context
// names where the probabilities are read; null-counterfactual contexts
// reuse the a-priori values, which the uniform-weight ratio identity makes
// exact.
double conditional_entropy(const SystemModel& model,
                           const std::vector<HistoryProposition>& set_a,
                           const std::vector<HistoryProposition>& set_b,
                           ContextLabel context = {},
                           ConsistencyMode mode = ConsistencyMode::Strong,
                           double tol = default_tolerance());

// --------------------------- identity report -----------------------------

struct EntropyReport {
  double entropy_a = 0.0;
  double entropy_b = 0.0;
  double entropy_joint = 0.0;
  double conditional_b_given_a = 0.0;
  double conditional_a_given_b = 0.0;
  // |H(joint) - H(a) - H(b|a)| and |H(joint) - H(b) - H(a|b)|.
  double additivity_residual_ab = 0.0;
  double additivity_residual_ba = 0.0;
  // H(b) - H(b|a) and H(a) - H(a|b); nonnegative up to tolerance.
  double concavity_margin_b = 0.0;
  double concavity_margin_a = 0.0;
};

// Strong additivity in both orderings plus the conditioning-reduces-entropy
// margins for a co-exclusive pair.
EntropyReport entropy_identities(const SystemModel& model,
                                 const std::vector<HistoryProposition>& set_a,
                                 const std::vector<HistoryProposition>& set_b,
                                 ContextLabel context = {},
                                 ConsistencyMode mode = ConsistencyMode::Strong,
                                 double tol = default_tolerance());

}  // namespace qhist
