#include "qhist/search.hpp"

#include <algorithm>
#include <random>

namespace qhist {

namespace {

struct Rung {
  int dim;
  int n_times;
};

constexpr Rung kLadder[] = {{2, 2}, {2, 3}, {3, 3}, {4, 4}};
constexpr int kRungs = static_cast<int>(sizeof(kLadder) / sizeof(kLadder[0]));
constexpr double kSpreadThreshold = 1e-3;
constexpr double kScreenMargin = 1e-8;

// Heisenberg family members per time, used to screen product histories in
// the base space before any embedding.
struct TrialFrame {
  std::vector<std::vector<Matrix>> heis;
  Matrix rho;
  int dim = 0;
  int n_times = 0;
  long long combos = 0;
};

TrialFrame make_frame(const SystemModel& model) {
  TrialFrame frame;
  frame.dim = model.dim();
  frame.n_times = model.support().size();
  frame.rho = model.initial_state().matrix();
  frame.combos = 1;
  for (int k = 0; k < frame.n_times; ++k) {
    const double t = model.support().times()[static_cast<std::size_t>(k)];
    std::vector<Matrix> at_time;
    for (const Projector& p : model.family(k).members()) {
      at_time.push_back(heisenberg(model, p, t).matrix());
    }
    frame.combos *= static_cast<long long>(at_time.size());
    frame.heis.push_back(std::move(at_time));
  }
  return frame;
}

std::vector<int> decode_combo(const TrialFrame& frame, long long index) {
  std::vector<int> combo(static_cast<std::size_t>(frame.n_times));
  for (int k = frame.n_times - 1; k >= 0; --k) {
    const int size = static_cast<int>(frame.heis[static_cast<std::size_t>(k)].size());
    combo[static_cast<std::size_t>(k)] = static_cast<int>(index % size);
    index /= size;
  }
  return combo;
}

// Product-history class operator: latest projector leftmost.
Matrix combo_operator(const TrialFrame& frame, const std::vector<int>& combo) {
  Matrix c = Matrix::Identity(frame.dim, frame.dim);
  for (int k = 0; k < frame.n_times; ++k) {
    c = frame.heis[static_cast<std::size_t>(k)]
                  [static_cast<std::size_t>(combo[static_cast<std::size_t>(k)])] *
        c;
  }
  return c;
}

double diag_value(const Matrix& c, const Matrix& rho) {
  return (c * rho * c.adjoint()).trace().real();
}

// Production-side proposition for a disjunction of product blocks.
HistoryProposition build_member(const SystemModel& model,
                                const std::vector<std::vector<int>>& blocks,
                                double tol) {
  std::vector<HistoryProposition> parts;
  for (const std::vector<int>& block : blocks) {
    std::vector<Projector> slots;
    for (int k = 0; k < model.support().size(); ++k) {
      slots.push_back(
          model.family(k).member(block[static_cast<std::size_t>(k)]));
    }
    parts.push_back(
        embed(model, HomogeneousHistory(model.support(), std::move(slots)), tol));
  }
  HistoryProposition member = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) {
    member = disj(member, parts[i], tol);
  }
  return member;
}

std::optional<SearchWitness> confirm(ViolationKind kind, const SystemModel& model,
                                     std::vector<std::vector<std::vector<int>>> members,
                                     std::pair<int, int> pair, double tol) {
  std::vector<HistoryProposition> set;
  set.reserve(members.size());
  for (const auto& blocks : members) set.push_back(build_member(model, blocks, tol));

  SearchWitness witness{kind, model.dim(), model.support().size(), 0, 0,
                        model,  std::move(set), std::move(members), 0.0, pair};
  switch (kind) {
    case ViolationKind::NonLp: {
      witness.value = lp_probability(model, witness.set.front());
      if (witness.value < -10.0 * tol) return witness;
      return std::nullopt;
    }
    case ViolationKind::NonQuasi: {
      const ConsistencyVerdict verdict =
          classify(model, witness.set, ConsistencyMode::Strong, tol);
      const auto [lo, hi] = std::minmax_element(verdict.realisability.begin(),
                                                verdict.realisability.end());
      witness.value = *hi - *lo;
      if (!verdict.quasi_constant && witness.value > kSpreadThreshold) {
        return witness;
      }
      return std::nullopt;
    }
    case ViolationKind::OrderViolation: {
      const ConsistencyVerdict verdict =
          classify(model, witness.set, ConsistencyMode::Strong, tol);
      for (const std::pair<int, int>& hit : verdict.order_violations) {
        if (hit != pair) continue;
        const double p = probability(model, witness.set[static_cast<std::size_t>(
                                                pair.first)],
                                     tol);
        const double bound = probability(
            model,
            negate(witness.set[static_cast<std::size_t>(pair.second)], tol), tol);
        witness.value = p - bound;
        return witness;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<SearchWitness> scan_non_lp(const SystemModel& model,
                                         const TrialFrame& frame, double tol) {
  long long best = -1;
  double best_value = -10.0 * tol;
  for (long long m = 0; m < frame.combos; ++m) {
    const Matrix c = combo_operator(frame, decode_combo(frame, m));
    const double value = (c * frame.rho).trace().real();
    if (value < best_value) {
      best_value = value;
      best = m;
    }
  }
  if (best < 0) return std::nullopt;
  return confirm(ViolationKind::NonLp, model, {{decode_combo(frame, best)}},
                 {-1, -1}, tol);
}

std::optional<SearchWitness> scan_non_quasi(const SystemModel& model,
                                            const TrialFrame& frame, double tol) {
  long long lo = 0;
  long long hi = 0;
  double lo_value = 0.0;
  double hi_value = 0.0;
  const Matrix id = Matrix::Identity(frame.dim, frame.dim);
  for (long long m = 0; m < frame.combos; ++m) {
    const Matrix c = combo_operator(frame, decode_combo(frame, m));
    const double sum = diag_value(c, frame.rho) + diag_value(id - c, frame.rho);
    if (m == 0 || sum < lo_value) {
      lo_value = sum;
      lo = m;
    }
    if (m == 0 || sum > hi_value) {
      hi_value = sum;
      hi = m;
    }
  }
  if (hi_value - lo_value <= kSpreadThreshold || lo == hi) return std::nullopt;
  return confirm(ViolationKind::NonQuasi, model,
                 {{decode_combo(frame, lo)}, {decode_combo(frame, hi)}}, {-1, -1},
                 tol);
}

std::optional<SearchWitness> scan_order(const SystemModel& model,
                                        const TrialFrame& frame,
                                        std::uint64_t trial_seed, double tol) {
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(frame.combos));
  for (long long m = 0; m < frame.combos; ++m) {
    ops.push_back(combo_operator(frame, decode_combo(frame, m)));
  }

  std::mt19937_64 rng(derive_seed(trial_seed, 0x5eed));
  std::bernoulli_distribution coin(0.5);
  const int attempts = 6;
  for (int a = 0; a < attempts; ++a) {
    std::vector<long long> inside;
    std::vector<long long> outside;
    for (long long m = 0; m < frame.combos; ++m) {
      (coin(rng) ? inside : outside).push_back(m);
    }
    if (inside.empty() || outside.size() < 2) continue;

    Matrix c_inside = Matrix::Zero(frame.dim, frame.dim);
    for (long long m : inside) c_inside += ops[static_cast<std::size_t>(m)];
    const Matrix c_not = Matrix::Identity(frame.dim, frame.dim) - c_inside;
    const double bound = diag_value(c_not, frame.rho);

    // Singles below the negation, then one strict sub-disjunction.
    for (long long m : outside) {
      const double p = diag_value(ops[static_cast<std::size_t>(m)], frame.rho);
      if (p > bound + kScreenMargin) {
        std::vector<std::vector<int>> small{decode_combo(frame, m)};
        std::vector<std::vector<int>> large;
        for (long long j : inside) large.push_back(decode_combo(frame, j));
        auto witness = confirm(ViolationKind::OrderViolation, model,
                               {small, large}, {0, 1}, tol);
        if (witness) return witness;
      }
    }
    Matrix c_sub = Matrix::Zero(frame.dim, frame.dim);
    std::vector<std::vector<int>> sub_blocks;
    for (std::size_t i = 0; i < outside.size() / 2; ++i) {
      c_sub += ops[static_cast<std::size_t>(outside[i])];
      sub_blocks.push_back(decode_combo(frame, outside[i]));
    }
    if (!sub_blocks.empty() &&
        diag_value(c_sub, frame.rho) > bound + kScreenMargin) {
      std::vector<std::vector<int>> large;
      for (long long j : inside) large.push_back(decode_combo(frame, j));
      auto witness = confirm(ViolationKind::OrderViolation, model,
                             {sub_blocks, large}, {0, 1}, tol);
      if (witness) return witness;
    }
  }
  return std::nullopt;
}

}  // namespace

SearchOutcome search_violations(ViolationKind kind, long long budget,
                                std::uint64_t seed, SearchEnsemble ensemble,
                                double tol) {
  if (budget < 1) throw ValidationError("search_violations: budget must be >= 1");

  RandomModelOptions options;
  options.commuting = ensemble == SearchEnsemble::Commuting;

  std::vector<long long> per_rung(kRungs, budget / kRungs);
  for (int r = 0; r < static_cast<int>(budget % kRungs); ++r) per_rung[r] += 1;

  SearchOutcome outcome;
  for (int r = 0; r < kRungs; ++r) {
    for (long long trial = 0; trial < per_rung[static_cast<std::size_t>(r)];
         ++trial) {
      const std::uint64_t model_seed = derive_seed(
          seed, (static_cast<std::uint64_t>(r) << 32) |
                    static_cast<std::uint64_t>(trial));
      const SystemModel model = random_instance(kLadder[r].dim,
                                                kLadder[r].n_times, model_seed,
                                                options);
      const TrialFrame frame = make_frame(model);
      outcome.trials_used += 1;

      std::optional<SearchWitness> witness;
      switch (kind) {
        case ViolationKind::NonLp:
          witness = scan_non_lp(model, frame, tol);
          break;
        case ViolationKind::NonQuasi:
          witness = scan_non_quasi(model, frame, tol);
          break;
        case ViolationKind::OrderViolation:
          witness = scan_order(model, frame, model_seed, tol);
          break;
      }
      if (witness) {
        witness->trial = trial;
        witness->model_seed = model_seed;
        outcome.witness = std::move(witness);
        return outcome;
      }
    }
  }
  return outcome;
}

}  // namespace qhist
