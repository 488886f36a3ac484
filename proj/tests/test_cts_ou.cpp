#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "tsou/cts_ou.hpp"
#include "tsou/errors.hpp"
#include "tsou/harness.hpp"
#include "tsou/levy.hpp"
#include "tsou/quadrature.hpp"

using namespace tsou;

namespace {

const CtsParams kStationary{0.5, 1.4, 0.8};
const CtsOuProcess kProcess{kStationary, 10.0};
constexpr double kDay = 1.0 / 365.0;

double rel(double x, double y) { return std::abs(x - y) / std::abs(y); }

// Every estimated cumulant within 4 batch SE of its target.
void check_cumulants(const std::vector<double>& x, const std::array<double, 4>& truth) {
  const CumulantVector est = estimate_cumulants(x, 100);
  for (int k = 0; k < 4; ++k) {
    CAPTURE(k + 1);
    CAPTURE(est.k[k]);
    CAPTURE(truth[k]);
    CAPTURE(est.se[k]);
    CHECK(std::abs(est.k[k] - truth[k]) <= 4.0 * est.se[k]);
  }
}

// Two independent estimates agree within 4 combined SE.
void check_same_cumulants(const std::vector<double>& x, const std::vector<double>& y) {
  const CumulantVector ex = estimate_cumulants(x, 100), ey = estimate_cumulants(y, 100);
  for (int k = 0; k < 4; ++k) {
    CAPTURE(k + 1);
    CHECK(std::abs(ex.k[k] - ey.k[k]) <= 4.0 * std::hypot(ex.se[k], ey.se[k]));
  }
}

std::array<double, 4> exact(const CtsOuProcess& p, double x0, double dt) {
  std::array<double, 4> out{};
  for (int k = 1; k <= 4; ++k) out[k - 1] = cumulants_ctsou(p, x0, dt, k);
  return out;
}

}  // namespace

TEST_CASE("step law components") {
  const CtsOuStepLaw law = step_law(kProcess, kDay);
  CHECK(law.a == doctest::Approx(0.97297).epsilon(1e-5));
  CHECK(law.x1_params.alpha == kStationary.alpha);
  CHECK(law.x1_params.beta == kStationary.beta);
  CHECK(law.x1_params.c < kStationary.c);
  CHECK(law.lambda_a > 0.0);

  Tempering plain;
  plain.q = [](double x) { return std::exp(-1.4 * x); };
  plain.difference = [](double x, double y) { return -std::exp(-1.4 * x) * std::expm1(-1.4 * (y - x)); };
  const double quadrature = ts_remainder_decompose({0.5, 0.8, plain}, law.a).lambda_a;
  CHECK(rel(law.lambda_a, quadrature) < 1e-8);

  CHECK_THROWS_AS(step_law({{0.0, 1.4, 0.8}, 10.0}, kDay), DomainError);
  CHECK_THROWS_AS(step_law(kProcess, 0.0), DomainError);
  CHECK_THROWS_AS(step_law(kProcess, -1.0), DomainError);
  CHECK_THROWS_AS(step_law({kStationary, 0.0}, kDay), DomainError);
}

TEST_CASE("intensity asymptotics") {
  for (const double alpha : {0.3, 0.5, 0.7, 0.9}) {
    const CtsOuProcess p{{alpha, 1.4, 0.8}, 10.0};
    const double slope = 0.8 * std::tgamma(1.0 - alpha) * 10.0 * std::pow(1.4, alpha);
    CHECK(rel(step_law(p, 1e-6).lambda_a / 1e-6, slope) < 1e-3);
    const double limit = 0.8 * std::tgamma(1.0 - alpha) * std::pow(1.4, alpha) / alpha;
    CHECK(rel(step_law(p, 100.0).lambda_a, limit) < 1e-12);
  }
}

TEST_CASE("mixing variable by inversion") {
  const double a = 0.5, alpha = 0.5;
  CHECK(v_from_uniform_ctsou(a, alpha, 0.0) == 1.0);
  CHECK(v_from_uniform_ctsou(a, alpha, 1.0) == doctest::Approx(1.0 / a).epsilon(1e-15));
  const double v = v_from_uniform_ctsou(a, alpha, 0.25);
  CHECK(v == doctest::Approx(1.2178300858899106).epsilon(1e-14));
  const double cdf = quad::integrate([&](double s) { return f_v_ctsou(s, a, alpha); }, 1.0, v).value;
  CHECK(std::abs(cdf - 0.25) < 1e-10);

  RngStream s(4, 0);
  const auto before = s.position();
  sample_v_ctsou(a, alpha, s);
  CHECK(s.position() == before + 1);
}

TEST_CASE("mixing variable histogram") {
  for (const double alpha : {0.3, 0.9}) {
    for (const double a : {std::exp(-10.0 * kDay), 0.05}) {
      const auto v = testing::draws(
          200000, [&](RngStream& s) { return sample_v_ctsou(a, alpha, s); }, 61);
      for (const double x : v) {
        CHECK(x >= 1.0);
        CHECK(x <= 1.0 / a * (1.0 + 1e-14));
      }
      const auto chi = testing::chi_square(v, 1.0, 1.0 / a, 50, [&](double lo, double hi) {
        return quad::integrate([&](double s) { return f_v_ctsou(s, a, alpha); }, lo, hi).value;
      });
      CAPTURE(alpha);
      CAPTURE(a);
      CHECK(chi.statistic < chi.critical);
    }
  }
}

TEST_CASE("transition cumulants") {
  SUBCASE("daily step") {
    const auto x = testing::draws(
        1000000, [](RngStream& s) { return sample_transition_ctsou(kProcess, 0.0, kDay, s); }, 71);
    check_cumulants(x, exact(kProcess, 0.0, kDay));
  }
  SUBCASE("monthly step, alpha 0.3, nonzero start") {
    const CtsOuProcess p{{0.3, 1.4, 0.8}, 10.0};
    const auto x = testing::draws(
        1000000, [&](RngStream& s) { return sample_transition_ctsou(p, 0.7, 30 * kDay, s); }, 72);
    check_cumulants(x, exact(p, 0.7, 30 * kDay));
  }
  SUBCASE("alpha 0.9") {
    const CtsOuProcess p{{0.9, 1.4, 0.8}, 10.0};
    const auto x = testing::draws(
        1000000, [&](RngStream& s) { return sample_transition_ctsou(p, 0.0, 30 * kDay, s); }, 73);
    check_cumulants(x, exact(p, 0.0, 30 * kDay));
  }
}

TEST_CASE("near-zero intensity leaves only the decayed start") {
  const CtsOuProcess p{{0.5, 1.4, 1e-12}, 10.0};
  RngStream s(5, 0);
  for (int i = 0; i < 1000; ++i) {
    CHECK(std::abs(sample_transition_ctsou(p, 2.0, kDay, s) - 2.0 * std::exp(-10.0 * kDay)) <
          1e-9);
  }
}

TEST_CASE("two half steps equal one step in law") {
  const CtsOuProcess p{{0.7, 1.4, 0.8}, 10.0};
  const double dt = 30 * kDay;
  const auto one = testing::draws(
      1000000, [&](RngStream& s) { return sample_transition_ctsou(p, 0.5, dt, s); }, 81);
  const auto two = testing::draws(
      1000000,
      [&](RngStream& s) {
        return sample_transition_ctsou(p, sample_transition_ctsou(p, 0.5, dt / 2, s), dt / 2, s);
      },
      82);
  check_same_cumulants(one, two);
}

TEST_CASE("stationarity") {
  for (const double dt : {kDay, 30 * kDay}) {
    const auto x = testing::draws(
        1000000,
        [&](RngStream& s) { return sample_transition_ctsou(kProcess, sample_cts(kStationary, s), dt, s); },
        91);
    std::array<double, 4> truth{};
    for (int k = 1; k <= 4; ++k) truth[k - 1] = cts_cumulants(kStationary, k);
    CAPTURE(dt);
    check_cumulants(x, truth);
  }
}

TEST_CASE("inverse Gaussian route for the CTS component") {
  const CtsOuStepLaw law = step_law(kProcess, 30 * kDay);
  const auto x = testing::draws(
      100000, [&](RngStream& s) { return sample_transition_ctsou(law, 0.0, s, X1Sampler::cts); },
      101);
  const auto y = testing::draws(
      100000,
      [&](RngStream& s) {
        return sample_transition_ctsou(law, 0.0, s, X1Sampler::inverse_gaussian);
      },
      102);
  CHECK(testing::ks_two_sample(x, y) < testing::ks_two_sample_critical(x.size(), y.size(), 0.01));
}

TEST_CASE("gamma-OU step") {
  const CtsOuProcess p{{0.0, 1.4, 0.8}, 10.0};
  SUBCASE("long horizon recovers the stationary gamma law") {
    const auto x = testing::draws(
        1000000, [&](RngStream& s) { return gamma_ou_step(p, 0.0, 2.0, s); }, 111);
    std::array<double, 4> truth{};
    for (int k = 1; k <= 4; ++k) truth[k - 1] = 0.8 * std::tgamma(k) / std::pow(1.4, k);
    check_cumulants(x, truth);
  }
  SUBCASE("mean at dt 0.1") {
    const auto x = testing::draws(
        1000000, [&](RngStream& s) { return gamma_ou_step(p, 1.5, 0.1, s); }, 112);
    const double k1 = ou_cumulants_from_stationary(0.8 / 1.4, 1.5, 10.0, 0.1, 1);
    CHECK(testing::within_sigmas(testing::mean_estimate(x), k1));
    check_cumulants(x, exact(p, 1.5, 0.1));
  }
  SUBCASE("no jumps") {
    const CtsOuProcess quiet{{0.0, 1.4, 1e-15}, 10.0};
    RngStream s(113, 0);
    for (int i = 0; i < 100; ++i) CHECK(gamma_ou_step(quiet, 3.0, 0.1, s) == 3.0 * std::exp(-1.0));
  }
  SUBCASE("the process overload routes alpha 0 here") {
    RngStream s(114, 0), t(114, 0);
    CHECK(sample_transition_ctsou(p, 1.0, 0.1, s) == gamma_ou_step(p, 1.0, 0.1, t));
  }
  RngStream s(1, 0);
  CHECK_THROWS_AS(gamma_ou_step(kProcess, 0.0, 0.1, s), DomainError);
}

TEST_CASE("skeleton") {
  SUBCASE("single point equals one transition") {
    RngStream s(121, 0), t(121, 0);
    const auto path = simulate_skeleton_ctsou(kProcess, 0.3, {kDay}, s);
    REQUIRE(path.size() == 1);
    CHECK(path[0] == sample_transition_ctsou(kProcess, 0.3, kDay, t));
  }
  SUBCASE("deterministic for a fixed seed") {
    std::vector<double> grid;
    for (int i = 1; i <= 365; ++i) grid.push_back(i * kDay);
    RngStream s(122, 3), t(122, 3);
    CHECK(simulate_skeleton_ctsou(kProcess, 0.0, grid, s) ==
          simulate_skeleton_ctsou(kProcess, 0.0, grid, t));
  }
  SUBCASE("uniform and non-uniform grids agree at the endpoint") {
    const std::vector<double> uniform_grid{0.025, 0.05, 0.075, 0.1};
    const std::vector<double> mixed_grid{0.01, 0.07, 0.1};
    const auto x = testing::draws(
        500000,
        [&](RngStream& s) { return simulate_skeleton_ctsou(kProcess, 0.2, uniform_grid, s).back(); },
        123);
    const auto y = testing::draws(
        500000,
        [&](RngStream& s) { return simulate_skeleton_ctsou(kProcess, 0.2, mixed_grid, s).back(); },
        124);
    check_same_cumulants(x, y);
    check_cumulants(x, exact(kProcess, 0.2, 0.1));
  }
  SUBCASE("alpha 0") {
    const CtsOuProcess p{{0.0, 1.4, 0.8}, 10.0};
    RngStream s(125, 0);
    CHECK(simulate_skeleton_ctsou(p, 0.0, {0.1, 0.2}, s).size() == 2);
  }
  RngStream s(1, 0);
  CHECK_THROWS_AS(simulate_skeleton_ctsou(kProcess, 0.0, {}, s), InputError);
  CHECK_THROWS_AS(simulate_skeleton_ctsou(kProcess, 0.0, {0.1, 0.1}, s), InputError);
  CHECK_THROWS_AS(simulate_skeleton_ctsou(kProcess, 0.0, {0.2, 0.1}, s), InputError);
  CHECK_THROWS_AS(simulate_skeleton_ctsou(kProcess, 0.0, {0.0, 0.1}, s), InputError);
}

TEST_CASE("closed-form transition cumulants") {
  for (int k = 1; k <= 4; ++k) {
    CHECK(cumulants_ctsou(kProcess, 0.0, 1e3, k) ==
          doctest::Approx(cts_cumulants(kStationary, k)).epsilon(1e-14));
  }
  const double dt = std::log(2.0) / kProcess.b;
  CHECK(cumulants_ctsou(kProcess, 1.0, dt, 1) ==
        doctest::Approx(0.5 + 0.5 * cts_cumulants(kStationary, 1)).epsilon(1e-14));
  CHECK_THROWS_AS(cumulants_ctsou(kProcess, 0.0, kDay, 0), DomainError);
  CHECK_THROWS_AS(cumulants_ctsou(kProcess, 0.0, kDay, 5), DomainError);
}

TEST_CASE("cumulant additivity of the step-law components") {
  for (const double alpha : {0.3, 0.5, 0.7, 0.9}) {
    for (const double dt : {kDay, 30 * kDay}) {
      const CtsOuProcess p{{alpha, 1.4, 0.8}, 10.0};
      const CtsOuStepLaw law = step_law(p, dt);
      for (int k = 1; k <= 4; ++k) {
        CAPTURE(alpha);
        CAPTURE(dt);
        CAPTURE(k);
        CHECK(rel(ctsou_component_cumulant(law, 0.4, k), cumulants_ctsou(p, 0.4, dt, k)) < 1e-8);
      }
    }
  }
}
