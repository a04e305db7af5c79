#include "qhist/linear_positivity.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"

namespace {

using qhist::Matrix;

qhist::HistoryProposition embed_picks(const qhist::SystemModel& model,
                                      const std::vector<int>& picks) {
  std::vector<qhist::Projector> slots;
  for (int k = 0; k < model.support().size(); ++k) {
    slots.push_back(model.family(k).member(picks[static_cast<std::size_t>(k)]));
  }
  return qhist::embed(model, qhist::HomogeneousHistory(model.support(), slots));
}

std::vector<Matrix> raw_picks(const qhist::SystemModel& model,
                              const std::vector<int>& picks) {
  std::vector<Matrix> slots;
  for (int k = 0; k < model.support().size(); ++k) {
    slots.push_back(model.family(k).member(picks[static_cast<std::size_t>(k)]).matrix());
  }
  return slots;
}

std::vector<qhist::HistoryProposition> product_set(const qhist::SystemModel& model) {
  const int n = model.support().size();
  long long combos = 1;
  for (int k = 0; k < n; ++k) combos *= model.family(k).size();
  std::vector<qhist::HistoryProposition> set;
  for (long long c = 0; c < combos; ++c) {
    long long rest = c;
    std::vector<int> picks(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      picks[static_cast<std::size_t>(k)] = static_cast<int>(rest % model.family(k).size());
      rest /= model.family(k).size();
    }
    set.push_back(embed_picks(model, picks));
  }
  return set;
}

}  // namespace

TEST_CASE("lp values match the oracle trace") {
  for (std::uint64_t seed : {137u, 139u}) {
    qhist::SystemModel model = qhist::random_instance(3, 2, seed);
    std::vector<int> picks{1, 2};
    qhist::Complex via_library = qhist::lp_value(model, embed_picks(model, picks));
    Matrix c = oracle::class_operator(model, raw_picks(model, picks));
    qhist::Complex via_oracle = (c * model.initial_state().matrix()).trace();
    CHECK(std::abs(via_library - via_oracle) < 1e-11);
    CHECK(qhist::lp_probability(model, embed_picks(model, picks)) ==
          doctest::Approx(via_oracle.real()).epsilon(1e-12));
  }
}

TEST_CASE("member and negation lp values sum to one by linearity") {
  qhist::SystemModel model = qhist::random_instance(3, 3, 149);
  for (std::vector<int> picks : {std::vector<int>{0, 1, 2}, {2, 0, 1}, {1, 1, 1}}) {
    qhist::HistoryProposition alpha = embed_picks(model, picks);
    double sum = qhist::lp_probability(model, alpha) +
                 qhist::lp_probability(model, qhist::negate(alpha));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lp partitions are additive and normalized even without decoherence") {
  qhist::SystemModel model = qhist::random_instance(3, 2, 151);
  std::vector<qhist::HistoryProposition> set = product_set(model);
  double total = 0.0;
  for (const auto& alpha : set) total += qhist::lp_probability(model, alpha);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  qhist::HistoryProposition pair = qhist::disj(set[0], set[1]);
  CHECK(qhist::lp_probability(model, pair) ==
        doctest::Approx(qhist::lp_probability(model, set[0]) +
                        qhist::lp_probability(model, set[1]))
            .epsilon(1e-12));
}

TEST_CASE("bridge identity ties the off-diagonal to the lp excess") {
  for (std::uint64_t seed : {157u, 163u, 167u}) {
    qhist::SystemModel model = qhist::random_instance(3, 2, seed);
    std::vector<qhist::HistoryProposition> set = product_set(model);
    for (const auto& alpha : {set[0], set[4], set[7]}) {
      CHECK(qhist::bridge_identity_residual(model, alpha) < 1e-10);

      qhist::Complex cross = qhist::dfunc(model, alpha, qhist::negate(alpha));
      double excess = qhist::lp_probability(model, alpha) -
                      qhist::probability(model, alpha);
      CHECK(cross.real() == doctest::Approx(excess).epsilon(1e-10));
    }
  }
}

TEST_CASE("lp reports complete partial sets with the disjunction remainder") {
  qhist::SystemModel model = qhist::random_instance(2, 2, 173);
  std::vector<qhist::HistoryProposition> set = product_set(model);

  qhist::LpReport full = qhist::is_lp_set(model, set);
  CHECK(!full.completed_with_remainder);
  CHECK(full.entries.size() == 4);

  qhist::LpReport partial = qhist::is_lp_set(model, {set[0], set[1]});
  CHECK(partial.completed_with_remainder);
  CHECK(partial.entries.size() == 3);
  double total = 0.0;
  for (const auto& entry : partial.entries) total += entry.probability;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& entry : partial.entries) {
    CHECK(entry.realisability_sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("lp verdict tracks the sign of the entries") {
  // commuting models carry genuinely classical, hence nonnegative, lp values
  qhist::SystemModel classical = qhist::random_instance(3, 2, 179, {.commuting = true});
  qhist::LpReport report = qhist::is_lp_set(classical, product_set(classical));
  CHECK(report.is_lp);
  CHECK(report.order_violations.empty());
  for (const auto& entry : report.entries) {
    CHECK(entry.positive);
    CHECK(entry.probability >= -1e-12);
  }
}

TEST_CASE("negative lp values are found by seeded search and stay visible") {
  auto generator = [](std::uint64_t seed) {
    return qhist::random_instance(3, 3, seed);
  };
  std::optional<qhist::NonLpWitness> witness =
      qhist::find_non_lp(generator, 200, 2026);
  REQUIRE(witness.has_value());
  CHECK(witness->value < -1e-9);

  // the reported value is an unclamped production-path lp probability
  qhist::HistoryProposition alpha = qhist::embed(witness->model, witness->history);
  CHECK(qhist::lp_probability(witness->model, alpha) ==
        doctest::Approx(witness->value).epsilon(1e-12));
  qhist::LpReport report = qhist::is_lp_set(witness->model, {alpha});
  CHECK(!report.is_lp);

  CHECK_THROWS_AS(qhist::find_non_lp(generator, 0, 1), qhist::ValidationError);
}
