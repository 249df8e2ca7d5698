#pragma once

// Explicit constants of the regularity and min-max arguments: the smallness
// scales delta_1, delta_2, eta, and the two varifold mass bounds whose
// crossing gives the largest admissible prescribing bound c_max.

#include <optional>

namespace pmc {

/// Inputs of the local-control constants. delta_msy and c1 come from the
/// thin-tube isoperimetric inequality and have no closed form; the defaults
/// are placeholders for examples.
struct LocalControlConstants {
  double rho0 = 1.0;
  double mu = 1.0;
  double beta0 = 1.0;
  double delta_msy = 0.1;
  double c1 = 1.0;
  double vol_M = 1.0;
  double c = 0.0;
  double theta = 0.25;
  double beta = 1.0;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

/// min{delta, theta/((1+128 c1) beta^1/2), theta/(9 beta^1/2 (1/32 + c c1)^1/2),
///     (vol_M/(4 c1))^1/3, 1}
double delta1(const LocalControlConstants& in);

/// delta1 with theta -> rho0/2 and beta -> beta0.
double delta2(const LocalControlConstants& in);

/// min{vol_M/2, 1/(8 c^3 c1^2), c1 delta^3}; the middle term is dropped at c = 0.
double eta(const LocalControlConstants& in);

struct MassBoundInputs {
  double v;      // volume bound
  double kappa;  // second fundamental form slack, |A| <= 1 + kappa
  double c;      // prescribing bound

  void validate() const;
};

struct MassBounds {
  double upper;  // 4 pi + v c
  double lower;  // 8 pi / ((1 + kappa)^2 + c^2/4), at a point of density >= 2
  bool density_one_forced;  // lower > upper
};

MassBounds mass_bounds(const MassBoundInputs& in);

/// Root of 8 pi/((1+kappa)^2 + c^2/4) = 4 pi + v c on (0, 2) by bisection.
/// Throws NoThreshold when the bounds do not cross there.
double solve_c_max(double v, double kappa, double tol = 1e-10);

/// For a region with volume <= eta_val: volume <= c1 area^{3/2} and
/// area - c volume >= area/2. Throws Inapplicable when volume > eta_val.
bool check_iso_pmc(double area, double volume, double c, double eta_val, double c1 = 1.0);

struct ConstantsReport {
  LocalControlConstants local;
  MassBoundInputs mass_inputs;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double eta = 0.0;
  double mass_upper = 0.0;
  double mass_lower = 0.0;
  bool density_one_forced = false;
  /// Present when requested and a threshold exists.
  std::optional<double> c_max;
  /// Set when c_max was requested but the bounds never cross.
  bool no_threshold = false;
};

ConstantsReport evaluate_constants(const LocalControlConstants& local, const MassBoundInputs& mass,
                                   bool with_c_max);

}  // namespace pmc
