#include <doctest.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pmc/constants.hpp"
#include "pmc/errors.hpp"
#include "pmc/solver.hpp"

using namespace pmc;
using std::numbers::pi;
using Quad = boost::multiprecision::cpp_bin_float_quad;

namespace {

// Twice-the-precision evaluation of the same formulas, written from scratch.
Quad delta_formula(Quad delta, Quad theta, Quad beta, Quad c1, Quad c, Quad vol) {
  using boost::multiprecision::cbrt;
  using boost::multiprecision::sqrt;
  Quad m = delta;
  m = std::min(m, Quad(theta / ((1 + 128 * c1) * sqrt(beta))));
  m = std::min(m, Quad(theta / (9 * sqrt(beta) * sqrt(Quad(1) / 32 + c * c1))));
  m = std::min(m, Quad(cbrt(vol / (4 * c1))));
  return std::min(m, Quad(1));
}

Quad delta1_oracle(const LocalControlConstants& in) {
  return delta_formula(in.delta_msy, in.theta, in.beta, in.c1, in.c, in.vol_M);
}
Quad delta2_oracle(const LocalControlConstants& in) {
  return delta_formula(in.delta_msy, Quad(in.rho0) / 2, in.beta0, in.c1, in.c, in.vol_M);
}
Quad eta_oracle(const LocalControlConstants& in) {
  Quad m = Quad(in.vol_M) / 2;
  if (in.c > 0) m = std::min(m, Quad(1 / (8 * Quad(in.c) * in.c * in.c * in.c1 * in.c1)));
  return std::min(m, Quad(Quad(in.c1) * in.delta_msy * in.delta_msy * in.delta_msy));
}

// 4 ulps of the result.
bool ulp_close(double got, const Quad& want) {
  const double w = static_cast<double>(want);
  return std::abs(got - w) <= 4 * std::numeric_limits<double>::epsilon() * std::abs(w);
}

LocalControlConstants example() {
  LocalControlConstants in;
  in.delta_msy = 0.5;
  in.theta = 0.5 - 1e-12;  // theta must lie in (0, 1/2)
  in.beta = 1.0;
  in.c1 = 1.0;
  in.c = 1.0;
  in.vol_M = 8.0;
  in.rho0 = 1.0;
  in.beta0 = 1.0;
  return in;
}

// Root of 8 pi/(1 + c^2/4) = 4 pi + 2 pi^2 c, i.e. 2 = (1 + (pi/2) c)(1 + c^2/4),
// from a 30-digit mpmath solve.
constexpr double kCMax = 0.547773680428051679;

}  // namespace

TEST_CASE("delta1 examples") {
  LocalControlConstants in;
  in.delta_msy = 1e-3;
  in.theta = 0.45;
  in.c1 = 1e-4;
  CHECK(delta1(in) == 1e-3);

  auto ex = example();
  CHECK(delta1(ex) == doctest::Approx(0.5 / 129).epsilon(1e-10));
  CHECK(ulp_close(delta1(ex), delta1_oracle(ex)));

  auto big = LocalControlConstants{};
  big.delta_msy = 1e-3;
  big.c = 0.0;
  const double at0 = delta1(big);
  big.c = 1.0;
  CHECK(delta1(big) == at0);
}

TEST_CASE("delta2 examples") {
  auto ex = example();
  ex.theta = 0.1;  // delta2 ignores theta and beta
  CHECK(delta2(ex) == doctest::Approx(0.5 / 129).epsilon(1e-15));
  CHECK(ulp_close(delta2(ex), delta2_oracle(ex)));

  LocalControlConstants in;
  in.delta_msy = 0.9;
  in.vol_M = 1e6;
  in.c = 0.5;
  in.c1 = 0.01;
  const double t2 = (in.rho0 / 2) / ((1 + 128 * in.c1) * std::sqrt(in.beta0));
  const double t3 = (in.rho0 / 2) / (9 * std::sqrt(in.beta0) * std::sqrt(1.0 / 32 + in.c * in.c1));
  CHECK(delta2(in) == doctest::Approx(std::min(t2, t3)).epsilon(1e-15));
  in.beta0 *= 4;
  CHECK(delta2(in) == doctest::Approx(std::min(t2, t3) / 2).epsilon(1e-15));

  LocalControlConstants tiny;
  tiny.vol_M = 1e-9;
  CHECK(delta2(tiny) == doctest::Approx(std::cbrt(1e-9 / 4)).epsilon(1e-15));
  tiny.vol_M = 1e-15;
  CHECK(delta2(tiny) < 1e-5);
}

TEST_CASE("eta examples") {
  LocalControlConstants in;
  in.c = 0.0;
  in.vol_M = 3.0;
  in.c1 = 2.0;
  in.delta_msy = 0.5;
  CHECK(eta(in) == std::min(1.5, 2.0 * 0.125));

  LocalControlConstants ex;
  ex.vol_M = 2.0;
  ex.c = 1.0;
  ex.c1 = 1.0;
  ex.delta_msy = 0.5;
  CHECK(eta(ex) == 0.125);
  CHECK(ulp_close(eta(ex), eta_oracle(ex)));

  LocalControlConstants scale;
  scale.vol_M = 1e9;
  scale.delta_msy = 0.99;
  scale.c1 = 100.0;
  scale.c = 1.0;
  const double before = eta(scale);
  scale.c = 2.0;
  CHECK(eta(scale) == doctest::Approx(before / 8).epsilon(1e-15));
}

TEST_CASE("property: evaluators match the quad-precision oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    LocalControlConstants in;
    in.rho0 = 0.01 + 2 * u01(rng);
    in.mu = 1.0;
    in.beta0 = 1.0 + 9 * u01(rng);
    in.delta_msy = 0.001 + 0.998 * u01(rng);
    in.c1 = std::pow(10.0, -3 + 5 * u01(rng));
    in.vol_M = std::pow(10.0, -6 + 10 * u01(rng));
    in.c = trial % 7 == 0 ? 0.0 : 3 * u01(rng);
    in.theta = 0.001 + 0.498 * u01(rng);
    in.beta = 1.0 + 9 * u01(rng);
    CHECK(ulp_close(delta1(in), delta1_oracle(in)));
    CHECK(ulp_close(delta2(in), delta2_oracle(in)));
    CHECK(ulp_close(eta(in), eta_oracle(in)));
    CHECK(delta1(in) <= in.delta_msy);
    CHECK(delta1(in) > 0.0);
    CHECK(delta2(in) > 0.0);
    CHECK(eta(in) > 0.0);
    if (in.theta <= in.rho0 / 2 && in.beta >= in.beta0) CHECK(delta1(in) <= delta2(in));
  }
}

TEST_CASE("input validation") {
  LocalControlConstants in;
  in.theta = 0.5;
  CHECK_THROWS_AS(in.validate(), InvalidArgument);
  CHECK_THROWS_AS(delta1(in), InvalidArgument);
  in = {};
  in.beta = 0.5;
  CHECK_THROWS_AS(in.validate(), InvalidArgument);
  in = {};
  in.delta_msy = 1.0;
  CHECK_THROWS_AS(in.validate(), InvalidArgument);
  CHECK_THROWS_AS(mass_bounds({-1.0, 0.0, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(mass_bounds({1.0, -0.1, 0.5}), InvalidArgument);
  CHECK_THROWS_AS(mass_bounds({1.0, 0.0, -0.5}), InvalidArgument);
}

TEST_CASE("mass bounds") {
  const double v = 2 * pi * pi;
  const auto a = mass_bounds({v, 0.0, 0.5});
  CHECK(a.upper == doctest::Approx(4 * pi + pi * pi).epsilon(1e-15));
  CHECK(a.upper == doctest::Approx(22.436).epsilon(1e-4));
  CHECK(a.lower == doctest::Approx(8 * pi / 1.0625).epsilon(1e-15));
  CHECK(a.lower == doctest::Approx(23.654).epsilon(1e-4));
  CHECK(a.density_one_forced);
  CHECK_FALSE(mass_bounds({v, 0.0, 0.6}).density_one_forced);
  const auto z = mass_bounds({1.0, 0.0, 0.0});
  CHECK(z.upper == 4 * pi);
  CHECK(z.lower == 8 * pi);
  CHECK(z.density_one_forced);
}

TEST_CASE("property: density-one forcing flips once along c") {
  for (double v : {1.0, 2 * pi * pi, 50.0}) {
    for (double kappa : {0.0, 0.1, 0.3}) {
      int flips = 0;
      bool prev = mass_bounds({v, kappa, 0.0}).density_one_forced;
      for (int k = 1; k <= 4000; ++k) {
        const bool now = mass_bounds({v, kappa, 2.0 * k / 4000}).density_one_forced;
        if (now != prev) {
          ++flips;
          CHECK_FALSE(now);
        }
        prev = now;
      }
      CHECK(flips == 1);
    }
  }
}

TEST_CASE("c_max") {
  const double v = 2 * pi * pi;
  const double got = solve_c_max(v, 0.0);
  CHECK(std::abs(got - kCMax) <= 1e-10);
  CHECK(std::floor(got * 1000) / 1000 == 0.547);
  CHECK(solve_c_max(1e-12, 0.0) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(solve_c_max(v, std::sqrt(2.0) - 1.0), NoThreshold);
  CHECK_THROWS_AS(solve_c_max(v, 0.5), NoThreshold);

  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < 100; ++k) (void)solve_c_max(v, 0.0);
  const double per_call = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 100;
  CHECK(per_call < 1e-3);
}

TEST_CASE("property: c_max is non-increasing in v and kappa") {
  const double vs[] = {1.0, 5.0, 2 * pi * pi, 40.0, 100.0};
  const double ks[] = {0.0, 0.05, 0.1, 0.2, 0.3};
  double grid[5][5];
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) grid[i][j] = solve_c_max(vs[i], ks[j]);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      if (i > 0) CHECK(grid[i][j] <= grid[i - 1][j]);
      if (j > 0) CHECK(grid[i][j] <= grid[i][j - 1]);
      const auto mb = mass_bounds({vs[i], ks[j], grid[i][j]});
      CHECK(mb.lower == doctest::Approx(mb.upper).epsilon(1e-9));
    }
  }
}

TEST_CASE("check_iso_pmc") {
  // Small Euclidean ball: volume <= c1 area^{3/2} holds with c1 = 1/(6 sqrt(pi)).
  const double r = 0.1;
  const double area = 4 * pi * r * r, vol = 4.0 / 3.0 * pi * r * r * r;
  const double c1_ball = 1.0 / (6.0 * std::sqrt(pi));
  CHECK(vol == doctest::Approx(c1_ball * std::pow(area, 1.5)).epsilon(1e-14));
  CHECK(check_iso_pmc(area, vol, 1.0, 1.0, 1.0));
  CHECK_FALSE(check_iso_pmc(area, vol, 1.0, 1.0, 0.5 * c1_ball));
  CHECK_THROWS_AS(check_iso_pmc(area, vol, 1.0, 0.5 * vol), Inapplicable);
  // A^c >= area/2 fails when c volume exceeds half the area.
  CHECK_FALSE(check_iso_pmc(1.0, 0.4, 2.0, 1.0, 10.0));
}

TEST_CASE("check_iso_pmc on a solved stack") {
  LocalControlConstants in;
  in.c = 0.01;
  in.c1 = 10.0;
  in.delta_msy = 0.9;
  in.vol_M = 100.0;
  const double eta_val = eta(in);
  const auto rep = solve_symmetric_stack(StackProblem(0.01, 0.1, 400, StackMode::SymmetricStack));
  REQUIRE(rep.converged);
  REQUIRE(rep.energy.volume <= eta_val);
  CHECK(check_iso_pmc(rep.energy.area, rep.energy.volume, 0.01, eta_val, in.c1));
  CHECK(rep.energy.area - 0.01 * rep.energy.volume >= 0.5 * rep.energy.area);
}

TEST_CASE("evaluate_constants") {
  const auto r = evaluate_constants({}, {2 * pi * pi, 0.0, 0.5}, true);
  CHECK(r.density_one_forced);
  REQUIRE(r.c_max);
  CHECK(std::abs(*r.c_max - kCMax) <= 1e-10);
  CHECK_FALSE(r.no_threshold);
  const auto none = evaluate_constants({}, {2 * pi * pi, 0.5, 0.5}, true);
  CHECK_FALSE(none.c_max);
  CHECK(none.no_threshold);
  const auto skip = evaluate_constants({}, {2 * pi * pi, 0.0, 0.5}, false);
  CHECK_FALSE(skip.c_max);
  CHECK_FALSE(skip.no_threshold);
}
