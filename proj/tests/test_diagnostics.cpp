#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "dremr/diagnostics.hpp"

using namespace dremr;

namespace {

// Build a (t, lambda) trace on [0, horizon] with constant step.
std::vector<std::pair<double, Vec>> make_trace(double horizon, double dt,
                                               const std::function<Vec(double)>& lambda_of_t) {
  std::vector<std::pair<double, Vec>> tr;
  const long steps = std::lround(horizon / dt);
  for (long k = 0; k <= steps; ++k) {
    const double t = k * dt;
    tr.emplace_back(t, lambda_of_t(t));
  }
  return tr;
}

}  // namespace

TEST_CASE("rank_of thresholds eigenvalues") {
  EigenDecomposition e;
  e.lambda = {5.0, 2.0, 0.4};
  CHECK(rank_of(e, 1e-10) == 3);
  e.lambda = {5.0, 2.0, 1e-12};
  CHECK(rank_of(e, 1e-10) == 2);
  e.lambda = {0.0, 0.0, 0.0};
  CHECK(rank_of(e, 1e-10) == 0);
}

TEST_CASE("classify: persistent excitation") {
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(2.0, 0.01, [](double) { return Vec{3.0, 2.0, 1.0}; }), cfg);
  CHECK(rep.cls == ExcitationClass::PE);
  CHECK(rep.pe);
  CHECK(rep.fe);
  CHECK(rep.s_pe);
  CHECK(rep.s_fe);
  CHECK(rep.s_pe_rank == 3);
  CHECK(rep.switch_times.empty());
}

TEST_CASE("classify: finite excitation only") {
  // Full rank on [0.6, 1.2] only, nothing outside.
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(2.0, 0.01,
                                       [](double t) {
                                         const double v = (t >= 0.6 && t <= 1.2) ? 1.0 : 0.0;
                                         return Vec{v, v, v};
                                       }),
                            cfg);
  CHECK(rep.cls == ExcitationClass::FE);
  CHECK(!rep.pe);
  CHECK(rep.fe);
  CHECK(rep.s_fe);
  REQUIRE(rep.full_rank_intervals.size() == 1);
  CHECK(rep.full_rank_intervals[0].begin == doctest::Approx(0.6));
  CHECK(rep.full_rank_intervals[0].end == doctest::Approx(1.2));
}

TEST_CASE("classify: semi-persistent excitation of rank 2") {
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(2.0, 0.01, [](double) { return Vec{3.0, 2.0, 0.0}; }), cfg);
  CHECK(rep.cls == ExcitationClass::SemiPE);
  CHECK(rep.s_pe_rank == 2);
  CHECK(!rep.pe);
  CHECK(!rep.fe);
  CHECK(rep.s_fe);
}

TEST_CASE("classify: semi-finite excitation only") {
  // One eigenvalue alive on a sub-interval only.
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(2.0, 0.01,
                                       [](double t) {
                                         return Vec{(t >= 0.3 && t <= 0.9) ? 1.0 : 0.0, 0.0, 0.0};
                                       }),
                            cfg);
  CHECK(rep.cls == ExcitationClass::SemiFE);
  CHECK(!rep.pe);
  CHECK(!rep.fe);
  CHECK(!rep.s_pe);
  CHECK(rep.s_fe);
}

TEST_CASE("classify: no excitation") {
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(1.0, 0.01, [](double) { return Vec{0.0, 0.0, 0.0}; }), cfg);
  CHECK(rep.cls == ExcitationClass::None);
  CHECK(!rep.s_fe);
}

TEST_CASE("classify: implication chain is structurally enforced") {
  ExcitationConfig cfg;
  for (auto lam : {Vec{1.0, 1.0, 1.0}, Vec{1.0, 1.0, 0.0}, Vec{1.0, 0.0, 0.0}, Vec{0.0, 0.0, 0.0}}) {
    const auto rep = classify(make_trace(1.0, 0.01, [&](double) { return lam; }), cfg);
    if (rep.pe) {
      CHECK(rep.fe);
      CHECK(rep.s_pe);
    }
    if (rep.fe || rep.s_pe) CHECK(rep.s_fe);
  }
}

TEST_CASE("classify: rank switch times recorded") {
  ExcitationConfig cfg;
  const auto rep = classify(make_trace(2.0, 0.01,
                                       [](double t) {
                                         return Vec{1.0, t >= 1.0 ? 1.0 : 0.0, 0.0};
                                       }),
                            cfg);
  REQUIRE(rep.switch_times.size() == 1);
  CHECK(rep.switch_times[0] == doctest::Approx(1.0));
}

TEST_CASE("classify rejects short or empty traces") {
  ExcitationConfig cfg;
  CHECK_THROWS_AS(classify({}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(classify(make_trace(0.3, 0.01, [](double) { return Vec{1.0, 1.0, 1.0}; }), cfg),
                  std::invalid_argument);
  ExcitationConfig bad = cfg;
  bad.mu = 0.0;
  CHECK_THROWS_AS(classify(make_trace(1.0, 0.01, [](double) { return Vec{1.0}; }), bad),
                  std::invalid_argument);
}

TEST_CASE("nullspace_switches: constant basis yields no switches") {
  Mat v2(3, 1);
  v2(2, 0) = 1.0;
  std::vector<std::pair<double, Mat>> tr;
  for (int k = 0; k < 10; ++k) tr.emplace_back(0.1 * k, v2);
  CHECK(nullspace_switches(tr).empty());
}

TEST_CASE("nullspace_switches: sign flip is not a switch, basis swap is") {
  Mat e3(3, 1);
  e3(2, 0) = 1.0;
  Mat e3_neg = e3;
  e3_neg(2, 0) = -1.0;
  Mat e1(3, 1);
  e1(0, 0) = 1.0;
  std::vector<std::pair<double, Mat>> tr;
  for (int k = 0; k < 10; ++k) tr.emplace_back(k * 1.0, k < 5 ? (k % 2 ? e3_neg : e3) : e1);
  const auto sw = nullspace_switches(tr);
  REQUIRE(sw.size() == 1);
  CHECK(sw[0] == doctest::Approx(5.0));
}

TEST_CASE("nullspace_switches: rank change counts as a switch") {
  Mat empty(3, 0);
  Mat e3(3, 1);
  e3(2, 0) = 1.0;
  std::vector<std::pair<double, Mat>> tr{{0.0, e3}, {1.0, e3}, {2.0, empty}};
  const auto sw = nullspace_switches(tr);
  REQUIRE(sw.size() == 1);
  CHECK(sw[0] == 2.0);
}

TEST_CASE("contraction_check arithmetic") {
  std::vector<ErrorRecord> errors;
  for (int k = 0; k <= 100; ++k) {
    ErrorRecord e;
    e.t = 0.1 * k;
    const double decay = std::exp(-0.5 * e.t);
    e.tilde_theta = {18.0 * decay, 0.0, 0.0};
    e.tilde_z = 2.0 * decay;
    errors.push_back(e);
  }
  const double theta_max = 15.0, gamma0 = 5.0;
  const auto rep = contraction_check(errors, 0.0, 10.0, gamma0, theta_max);
  CHECK(rep.beta1 == doctest::Approx(18.0 / 15.0));
  CHECK(rep.beta == doctest::Approx(std::exp(-0.5 * gamma0 * 10.0) + 15.0 / 18.0));
  CHECK(rep.sufficient_condition_met);
  CHECK(rep.theta_contracted);  // e^{-5} << beta
  CHECK(rep.z_contracted);
}

TEST_CASE("contraction_check: zero initial error is trivially contracted") {
  std::vector<ErrorRecord> errors(2);
  errors[0].t = 0.0;
  errors[0].tilde_theta = {0.0, 0.0};
  errors[1].t = 1.0;
  errors[1].tilde_theta = {0.0, 0.0};
  const auto rep = contraction_check(errors, 0.0, 1.0, 5.0, 15.0);
  CHECK(rep.theta_contracted);
  CHECK(!rep.sufficient_condition_met);  // beta1 = 0
}

TEST_CASE("contraction_check validates coverage") {
  std::vector<ErrorRecord> errors(1);
  errors[0].t = 0.0;
  errors[0].tilde_theta = {1.0};
  CHECK_THROWS_AS(contraction_check(errors, 0.0, 5.0, 5.0, 15.0), std::invalid_argument);
  CHECK_THROWS_AS(contraction_check({}, 0.0, 1.0, 5.0, 15.0), std::invalid_argument);
}

TEST_CASE("monotonicity_check flags the first increase") {
  std::vector<std::pair<double, Vec>> tr{
      {0.0, {3.0, 1.0}}, {1.0, {2.0, 1.0}}, {2.0, {2.5, 1.0}}, {3.0, {2.0, 1.0}}};
  const auto rep = monotonicity_check(tr, {});
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].t == 2.0);
  CHECK(rep.violations[0].index == 0);
  CHECK(rep.violations[0].increase == doctest::Approx(0.5));
}

TEST_CASE("monotonicity_check allows jumps across declared switches") {
  std::vector<std::pair<double, Vec>> tr{
      {0.0, {3.0}}, {1.0, {2.0}}, {2.0, {9.0}}, {3.0, {8.0}}};
  CHECK(monotonicity_check(tr, {2.0}).pass());
  CHECK(!monotonicity_check(tr, {}).pass());
}

TEST_CASE("monotonicity_check tolerance") {
  std::vector<std::pair<double, Vec>> tr{{0.0, {1.0}}, {1.0, {1.0 + 5e-10}}};
  CHECK(monotonicity_check(tr, {}).pass());
  std::vector<std::pair<double, Vec>> tr2{{0.0, {1.0}}, {1.0, {1.0 + 5e-9}}};
  CHECK(!monotonicity_check(tr2, {}).pass());
}

TEST_CASE("envelope_check measures the worst envelope constant") {
  // Exact decay at rate 3 against a bound at rate 5: A = e^{2(t-t0)}.
  std::vector<std::pair<double, double>> tr;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.01 * k;
    tr.emplace_back(t, 10.0 * std::exp(-3.0 * t));
  }
  const auto fail = envelope_check(tr, {{0.0, 1.0}}, 5.0, 2.0);
  CHECK(!fail.pass);
  CHECK(fail.a_max == doctest::Approx(std::exp(2.0)).epsilon(1e-6));

  const auto pass = envelope_check(tr, {{0.0, 1.0}}, 3.0, 2.0);
  CHECK(pass.pass);
  CHECK(pass.a_max == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("envelope_check ignores records at the numerical floor") {
  std::vector<std::pair<double, double>> tr{{0.0, 1.0}, {1.0, 1e-4}, {2.0, 1e-4}};
  // Without the floor the flat tail would violate any decaying bound.
  const auto rep = envelope_check(tr, {{0.0, 2.0}}, 5.0, 2.0, 1e-3);
  CHECK(rep.pass);
}
