#include "qhist/decoherence.hpp"

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

// all product histories of the model families
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

// single-time family embedded with identities elsewhere
std::vector<qhist::HistoryProposition> marginal_set(const qhist::SystemModel& model,
                                                    int time_index) {
  std::vector<qhist::HistoryProposition> set;
  for (int i = 0; i < model.family(time_index).size(); ++i) {
    std::vector<qhist::Projector> slots;
    for (int k = 0; k < model.support().size(); ++k) {
      slots.push_back(k == time_index ? model.family(k).member(i)
                                      : qhist::Projector::identity(model.dim()));
    }
    set.push_back(
        qhist::embed(model, qhist::HomogeneousHistory(model.support(), slots)));
  }
  return set;
}

}  // namespace

TEST_CASE("decoherence functional matches the accumulated-product oracle") {
  for (std::uint64_t seed : {61u, 67u, 71u}) {
    qhist::SystemModel model = qhist::random_instance(3, 2, seed);
    std::vector<int> pa{0, 1};
    std::vector<int> pb{2, 1};
    qhist::Complex via_library =
        qhist::dfunc(model, embed_picks(model, pa), embed_picks(model, pb));
    qhist::Complex via_oracle =
        oracle::dfunc(model, oracle::class_operator(model, raw_picks(model, pa)),
                      oracle::class_operator(model, raw_picks(model, pb)));
    CHECK(std::abs(via_library - via_oracle) < 1e-11);
  }
}

TEST_CASE("diagonal values agree with explicit state collapse") {
  for (std::uint64_t seed : {73u, 79u}) {
    qhist::SystemModel model = qhist::random_instance(2, 3, seed);
    std::vector<int> picks{1, 0, 1};
    double via_library = qhist::probability(model, embed_picks(model, picks));
    double via_collapse = oracle::collapse_chain(model, raw_picks(model, picks));
    CHECK(via_library == doctest::Approx(via_collapse).epsilon(1e-10));
  }
}

TEST_CASE("probability clamps arithmetic noise but stays in range") {
  qhist::SystemModel model = qhist::random_instance(3, 2, 83);
  qhist::HistoryProposition null_history =
      qhist::HistoryProposition::zero(model.support(), 3);
  CHECK(qhist::probability(model, null_history) == 0.0);
  CHECK(qhist::probability(model, qhist::HistoryProposition::unit(model.support(), 3)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("decoherence matrices are hermitian gram matrices summing to one") {
  qhist::SystemModel model = qhist::random_instance(2, 2, 89);
  std::vector<qhist::HistoryProposition> set = product_set(model);
  qhist::DecoherenceMatrix d = qhist::decoherence_matrix(model, set);

  CHECK(d.values.rows() == 4);
  CHECK((d.values - d.values.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(d.values);
  CHECK(solver.eigenvalues().minCoeff() > -1e-10);
  CHECK(d.values.sum().real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(d.values.sum().imag()) < 1e-10);
}

TEST_CASE("single-time families are strongly consistent with unit constant") {
  for (std::uint64_t seed : {97u, 101u}) {
    qhist::SystemModel model = qhist::random_instance(3, 2, seed);
    for (int k = 0; k < 2; ++k) {
      qhist::ConsistencyVerdict verdict = qhist::classify(model, marginal_set(model, k));
      CHECK(verdict.is_consistent);
      CHECK(verdict.is_complete);
      CHECK(verdict.max_offdiag < 1e-12);
      REQUIRE(verdict.quasi_constant.has_value());
      CHECK(*verdict.quasi_constant == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(verdict.order_violations.empty());
      for (double s : verdict.realisability) {
        CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("generic product sets are complete but not consistent") {
  qhist::SystemModel model = qhist::random_instance(3, 2, 103);
  qhist::ConsistencyVerdict verdict = qhist::classify(model, product_set(model));
  CHECK(verdict.is_complete);
  CHECK(!verdict.is_consistent);
  CHECK(verdict.max_offdiag > 1e-6);
}

TEST_CASE("commuting models decohere exactly") {
  qhist::SystemModel model = qhist::random_instance(3, 2, 107, {.commuting = true});
  qhist::ConsistencyVerdict verdict = qhist::classify(model, product_set(model));
  CHECK(verdict.is_consistent);
  CHECK(verdict.max_offdiag < 1e-12);
  REQUIRE(verdict.quasi_constant.has_value());
  CHECK(*verdict.quasi_constant == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("incomplete sets never classify as consistent") {
  qhist::SystemModel model = qhist::random_instance(2, 2, 109);
  std::vector<qhist::HistoryProposition> set = product_set(model);
  set.pop_back();
  qhist::ConsistencyVerdict verdict = qhist::classify(model, set);
  CHECK(!verdict.is_complete);
  CHECK(!verdict.is_consistent);
}

TEST_CASE("medium consistency ignores imaginary off-diagonals") {
  // arm histories against the detector complement carry a purely imaginary
  // overlap at quarter-period phase
  qhist::SystemModel model = qhist::random_instance(2, 2, 113);
  std::vector<qhist::HistoryProposition> set = product_set(model);
  qhist::ConsistencyVerdict strong =
      qhist::classify(model, set, qhist::ConsistencyMode::Strong);
  qhist::ConsistencyVerdict medium =
      qhist::classify(model, set, qhist::ConsistencyMode::Medium);
  CHECK(strong.mode == qhist::ConsistencyMode::Strong);
  CHECK(medium.mode == qhist::ConsistencyMode::Medium);
  CHECK(medium.max_offdiag <= strong.max_offdiag + 1e-15);
}

TEST_CASE("classify rejects malformed inputs") {
  qhist::SystemModel model = qhist::random_instance(2, 2, 127);
  CHECK_THROWS_AS(qhist::classify(model, {}), qhist::ValidationError);

  qhist::TemporalSupport other(0.0, {1.0, 2.5});
  qhist::HistoryProposition foreign =
      qhist::HistoryProposition::unit(other, 2);
  CHECK_THROWS_AS(qhist::classify(model, {foreign}), qhist::SupportMismatch);
}

TEST_CASE("boolean families check the pairwise grain condition") {
  qhist::SystemModel model = qhist::random_instance(3, 2, 131, {.commuting = true});
  std::vector<qhist::HistoryProposition> atoms = marginal_set(model, 0);
  std::vector<qhist::HistoryProposition> family = qhist::boolean_closure(atoms);
  CHECK(qhist::boolean_consistent(model, family));

  // dropping the conjunctions breaks closure
  std::vector<qhist::HistoryProposition> not_closed{qhist::disj(atoms[0], atoms[1]),
                                                    qhist::disj(atoms[1], atoms[2])};
  CHECK_THROWS_AS(qhist::boolean_consistent(model, not_closed), qhist::NotBooleanClosed);
}
