#include "pmc/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}

double delta_scale(double delta, double radius, double beta, double c, double c1, double vol) {
  return std::min({delta,
                   radius / ((1.0 + 128.0 * c1) * std::sqrt(beta)),
                   radius / (9.0 * std::sqrt(beta) * std::sqrt(1.0 / 32.0 + c * c1)),
                   std::cbrt(vol / (4.0 * c1)),
                   1.0});
}

double mass_gap(double v, double kappa, double c) {
  const double a = 1.0 + kappa;
  return 8.0 * std::numbers::pi / (a * a + 0.25 * c * c) - (4.0 * std::numbers::pi + v * c);
}

}  // namespace

void LocalControlConstants::validate() const {
  require(rho0 > 0.0, "rho0 must be positive");
  require(mu > 0.0, "mu must be positive");
  require(beta0 >= 1.0, "beta0 must be >= 1");
  require(delta_msy > 0.0 && delta_msy < 1.0, "delta must lie in (0, 1)");
  require(c1 > 0.0, "c1 must be positive");
  require(vol_M > 0.0, "vol_M must be positive");
  require(c >= 0.0, "c must be >= 0");
  require(theta > 0.0 && theta < 0.5, "theta must lie in (0, 1/2)");
  require(beta >= 1.0, "beta must be >= 1");
}

double delta1(const LocalControlConstants& in) {
  in.validate();
  return delta_scale(in.delta_msy, in.theta, in.beta, in.c, in.c1, in.vol_M);
}

double delta2(const LocalControlConstants& in) {
  in.validate();
  return delta_scale(in.delta_msy, 0.5 * in.rho0, in.beta0, in.c, in.c1, in.vol_M);
}

double eta(const LocalControlConstants& in) {
  in.validate();
  const double middle = in.c > 0.0 ? 1.0 / (8.0 * in.c * in.c * in.c * in.c1 * in.c1)
                                   : std::numeric_limits<double>::infinity();
  const double d = in.delta_msy;
  return std::min({0.5 * in.vol_M, middle, in.c1 * d * d * d});
}

void MassBoundInputs::validate() const {
  require(v > 0.0, "v must be positive");
  require(kappa >= 0.0, "kappa must be >= 0");
  require(c >= 0.0, "c must be >= 0");
}

MassBounds mass_bounds(const MassBoundInputs& in) {
  in.validate();
  const double a = 1.0 + in.kappa;
  MassBounds out;
  out.upper = 4.0 * std::numbers::pi + in.v * in.c;
  out.lower = 8.0 * std::numbers::pi / (a * a + 0.25 * in.c * in.c);
  out.density_one_forced = out.lower > out.upper;
  return out;
}

double solve_c_max(double v, double kappa, double tol) {
  MassBoundInputs{v, kappa, 0.0}.validate();
  double lo = 0.0;
  double hi = 2.0;
  if (!(mass_gap(v, kappa, lo) > 0.0))
    throw NoThreshold("mass lower bound does not exceed the upper bound at c = 0");
  if (mass_gap(v, kappa, hi) > 0.0) throw NoThreshold("mass bounds do not cross on (0, 2)");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mass_gap(v, kappa, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool check_iso_pmc(double area, double volume, double c, double eta_val, double c1) {
  require(area >= 0.0 && volume >= 0.0, "area and volume must be nonnegative");
  require(c >= 0.0 && c1 > 0.0, "c must be >= 0 and c1 > 0");
  if (volume > eta_val) throw Inapplicable("volume exceeds eta");
  const bool iso = volume <= c1 * std::pow(area, 1.5);
  const bool controls = area - c * volume >= 0.5 * area;
  return iso && controls;
}

ConstantsReport evaluate_constants(const LocalControlConstants& local, const MassBoundInputs& mass,
                                   bool with_c_max) {
  ConstantsReport r;
  r.local = local;
  r.mass_inputs = mass;
  r.delta1 = delta1(local);
  r.delta2 = delta2(local);
  r.eta = eta(local);
  const MassBounds mb = mass_bounds(mass);
  r.mass_upper = mb.upper;
  r.mass_lower = mb.lower;
  r.density_one_forced = mb.density_one_forced;
  if (with_c_max) {
    try {
      r.c_max = solve_c_max(mass.v, mass.kappa);
    } catch (const NoThreshold&) {
      r.no_threshold = true;
    }
  }
  return r;
}

}  // namespace pmc
