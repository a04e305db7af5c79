#include "qhist/linear_positivity.hpp"

#include <cmath>

namespace qhist {

// --------------------------- pointwise values ----------------------------

Complex lp_value(const SystemModel& model, const HistoryProposition& a) {
  const Matrix ca = class_operator(model, a).matrix;
  return (ca * model.initial_state().matrix()).trace();
}

double lp_probability(const SystemModel& model, const HistoryProposition& a) {
  return lp_value(model, a).real();
}

double bridge_identity_residual(const SystemModel& model,
                                const HistoryProposition& a, double tol) {
  const double cross = dfunc(model, a, negate(a, tol)).real();
  const double diag = dfunc(model, a, a).real();
  return std::abs(cross - (lp_probability(model, a) - diag));
}

// --------------------------- set reports --------------------------------

LpReport is_lp_set(const SystemModel& model, std::vector<HistoryProposition> set,
                   double tol) {
  if (set.empty()) {
    throw ValidationError("is_lp_set: set must not be empty");
  }
  for (const HistoryProposition& h : set) {
    if (h.support() != set.front().support() ||
        h.base_dim() != set.front().base_dim()) {
      throw SupportMismatch("is_lp_set: members must share one support");
    }
  }

  LpReport report;

  Matrix sum = Matrix::Zero(set.front().op().rows(), set.front().op().cols());
  for (const HistoryProposition& h : set) sum += h.op();
  if (!nearly_equal(sum, Matrix::Identity(sum.rows(), sum.cols()), tol)) {
    HistoryProposition join = set.front();
    for (std::size_t i = 1; i < set.size(); ++i) {
      join = disj(join, set[i], tol);
    }
    set.push_back(negate(join, tol));
    report.completed_with_remainder = true;
  }

  const int n = static_cast<int>(set.size());
  std::vector<double> neg_probability(static_cast<std::size_t>(n));
  bool all_positive = true;
  for (int i = 0; i < n; ++i) {
    const HistoryProposition& h = set[static_cast<std::size_t>(i)];
    LpEntry entry;
    entry.value = lp_value(model, h);
    entry.probability = entry.value.real();
    entry.neg_probability = lp_probability(model, negate(h, tol));
    entry.realisability_sum = entry.probability + entry.neg_probability;
    entry.positive = entry.probability >= -tol && entry.neg_probability >= -tol;
    all_positive = all_positive && entry.positive;
    neg_probability[static_cast<std::size_t>(i)] = entry.neg_probability;
    report.entries.push_back(entry);
  }
  report.is_lp = all_positive;

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const HistoryProposition not_j = negate(set[static_cast<std::size_t>(j)], tol);
      if (!leq(set[static_cast<std::size_t>(i)], not_j, tol)) continue;
      if (report.entries[static_cast<std::size_t>(i)].probability >
          neg_probability[static_cast<std::size_t>(j)] + tol) {
        report.order_violations.emplace_back(i, j);
      }
    }
  }
  return report;
}

// --------------------------- searches -----------------------------------

namespace {

// Lexicographic walk over one slot index per grid time.
bool advance_combo(std::vector<int>& combo, const SystemModel& model) {
  for (int k = static_cast<int>(combo.size()) - 1; k >= 0; --k) {
    combo[static_cast<std::size_t>(k)] += 1;
    if (combo[static_cast<std::size_t>(k)] < model.family(k).size()) return true;
    combo[static_cast<std::size_t>(k)] = 0;
  }
  return false;
}

HomogeneousHistory combo_history(const SystemModel& model,
                                 const std::vector<int>& combo) {
  std::vector<Projector> slots;
  slots.reserve(combo.size());
  for (int k = 0; k < static_cast<int>(combo.size()); ++k) {
    slots.push_back(model.family(k).member(combo[static_cast<std::size_t>(k)]));
  }
  return HomogeneousHistory(model.support(), std::move(slots));
}

}  // namespace

std::optional<NonLpWitness> find_non_lp(
    const std::function<SystemModel(std::uint64_t)>& generator, int trials,
    std::uint64_t seed, double tol) {
  if (trials < 1) {
    throw ValidationError("find_non_lp: at least one trial is required");
  }
  for (int trial = 0; trial < trials; ++trial) {
    const SystemModel model =
        generator(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    std::vector<int> combo(static_cast<std::size_t>(model.support().size()), 0);
    do {
      const HomogeneousHistory history = combo_history(model, combo);
      const double value = lp_probability(model, embed(model, history, tol));
      if (value < -10.0 * tol) {
        return NonLpWitness{model, history, value, trial};
      }
    } while (advance_combo(combo, model));
  }
  return std::nullopt;
}

}  // namespace qhist
