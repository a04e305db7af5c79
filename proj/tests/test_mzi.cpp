#include "qhist/mzi.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

#include "qhist/decoherence.hpp"
#include "qhist/linear_positivity.hpp"
#include "oracles.hpp"

namespace {

using qhist::Complex;
using qhist::Matrix;

}  // namespace

TEST_CASE("the beam splitter is balanced and unitary") {
  Matrix b = qhist::beam_splitter();
  CHECK((b.adjoint() * b).isIdentity(1e-14));
  CHECK(std::abs(b(0, 0) - Complex(1.0, 0.0) / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(b(0, 1) - Complex(0.0, 1.0) / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("the detector port is selected behaviorally as the bright port") {
  qhist::MziScenario scenario = qhist::build_mzi({.phase = 0.0});
  CHECK(scenario.detector_port == 1);
  CHECK(qhist::probability(scenario.model, scenario.alpha_e) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the brightness curve follows the closed-form interference law") {
  for (int k = 0; k < 16; ++k) {
    const double phase = 2.0 * M_PI * k / 16.0;
    qhist::MziScenario scenario = qhist::build_mzi({.phase = phase});
    oracle::MziAmplitudes amplitudes = oracle::mzi_amplitudes(phase);
    CHECK(qhist::probability(scenario.model, scenario.alpha_e) ==
          doctest::Approx(amplitudes.brightness).epsilon(1e-10));
    CHECK(qhist::lp_probability(scenario.model, scenario.alpha_e) ==
          doctest::Approx(amplitudes.brightness).epsilon(1e-10));
  }
}

TEST_CASE("arm probabilities stay flat while their overlap carries the phase") {
  for (double phase : {0.0, M_PI / 3, M_PI / 2, 2.4}) {
    qhist::MziScenario scenario = qhist::build_mzi({.phase = phase});
    oracle::MziAmplitudes amplitudes = oracle::mzi_amplitudes(phase);

    CHECK(qhist::probability(scenario.model, scenario.alpha_u) ==
          doctest::Approx(0.25).epsilon(1e-10));
    CHECK(qhist::probability(scenario.model, scenario.alpha_d) ==
          doctest::Approx(0.25).epsilon(1e-10));

    // d(upper, lower) = A_u conj(A_d) = e^{i phase} / 4
    Complex overlap = qhist::dfunc(scenario.model, scenario.alpha_u, scenario.alpha_d);
    Complex expected = amplitudes.upper * std::conj(amplitudes.lower);
    CHECK(std::abs(overlap - expected) < 1e-12);
    CHECK(std::abs(expected - std::exp(Complex(0.0, phase)) / 4.0) < 1e-14);

    // the arm-detector cross terms vanish identically
    CHECK(std::abs(qhist::dfunc(scenario.model, scenario.alpha_u,
                                qhist::negate(scenario.alpha_e))) < 1e-12);
  }
}

TEST_CASE("the detector history is the operator sum of the arm histories") {
  qhist::MziScenario scenario = qhist::build_mzi({.phase = 1.1});
  Matrix sum = scenario.alpha_u.op() + scenario.alpha_d.op();
  CHECK((scenario.alpha_e.op() - sum).cwiseAbs().maxCoeff() < 1e-12);

  qhist::HistoryProposition joined = qhist::disj(scenario.alpha_u, scenario.alpha_d);
  CHECK((scenario.alpha_e.op() - joined.op()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("arm realisability interpolates between half and three halves") {
  for (double phase : {0.0, M_PI / 3, M_PI / 2, M_PI}) {
    qhist::MziScenario scenario = qhist::build_mzi({.phase = phase});
    qhist::ConsistencyVerdict verdict = qhist::classify(
        scenario.model, {scenario.alpha_u, scenario.alpha_d, scenario.alpha_e});
    const double expected = 1.0 - std::cos(phase) / 2.0;
    CHECK(verdict.realisability[0] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(verdict.realisability[1] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(verdict.realisability[2] == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("amplitudes reproduce the collapse-chain probabilities") {
  const double phase = 2.0;
  qhist::MziScenario scenario = qhist::build_mzi({.phase = phase});
  const Matrix arm0 = scenario.model.family(0).member(0).matrix();
  const Matrix port = scenario.model.family(1).member(scenario.detector_port).matrix();
  const double chain = oracle::collapse_chain(scenario.model, {arm0, port});
  CHECK(chain == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(qhist::probability(scenario.model, scenario.alpha_u) ==
        doctest::Approx(chain).epsilon(1e-10));
}

TEST_CASE("arm and complement detector form a medium but not strongly consistent set") {
  qhist::MziScenario quarter = qhist::build_mzi({.phase = M_PI / 2});
  std::vector<qhist::HistoryProposition> set{quarter.alpha_u, quarter.alpha_d,
                                             qhist::negate(quarter.alpha_e)};

  qhist::ConsistencyVerdict strong = qhist::classify(quarter.model, set);
  CHECK(strong.is_complete);
  CHECK(!strong.is_consistent);
  CHECK(strong.max_offdiag == doctest::Approx(0.25).epsilon(1e-10));

  qhist::ConsistencyVerdict medium =
      qhist::classify(quarter.model, set, qhist::ConsistencyMode::Medium);
  CHECK(medium.is_consistent);
  CHECK(medium.max_offdiag < 1e-12);

  // at zero phase the overlap turns real and medium consistency fails too
  qhist::MziScenario bright = qhist::build_mzi({.phase = 0.0});
  std::vector<qhist::HistoryProposition> bright_set{
      bright.alpha_u, bright.alpha_d, qhist::negate(bright.alpha_e)};
  qhist::ConsistencyVerdict bright_medium =
      qhist::classify(bright.model, bright_set, qhist::ConsistencyMode::Medium);
  CHECK(!bright_medium.is_consistent);
  CHECK(bright_medium.max_offdiag == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("interference breaks the naive sum rule at zero phase") {
  qhist::MziScenario bright = qhist::build_mzi({.phase = 0.0});
  const double whole = qhist::probability(bright.model, bright.alpha_e);
  const double parts = qhist::probability(bright.model, bright.alpha_u) +
                       qhist::probability(bright.model, bright.alpha_d);
  CHECK(whole == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(parts == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(whole - parts) > 0.4);
}

TEST_CASE("interferometer histories are linearly positive at every phase") {
  for (double phase : {0.0, 0.9, M_PI / 2, M_PI, 5.0}) {
    qhist::MziScenario scenario = qhist::build_mzi({.phase = phase});
    qhist::LpReport report = qhist::is_lp_set(
        scenario.model, {scenario.alpha_u, scenario.alpha_d});
    CHECK(report.is_lp);
    CHECK(report.completed_with_remainder);
    CHECK(report.order_violations.empty());
    const double expected_arm = (1.0 + std::cos(phase)) / 4.0;
    CHECK(report.entries[0].probability ==
          doctest::Approx(expected_arm).epsilon(1e-10));
    CHECK(report.entries[1].probability ==
          doctest::Approx(expected_arm).epsilon(1e-10));
  }
}

TEST_CASE("the builder validates its configuration") {
  CHECK_THROWS_AS(qhist::build_mzi({.phase = std::nan("")}), qhist::ValidationError);
  qhist::MziScenario scenario = qhist::build_mzi({.phase = 0.3, .path_detection = false});
  CHECK(scenario.config.path_detection == false);
  CHECK(scenario.model.support().size() == 2);
}
