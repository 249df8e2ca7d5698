#include "pmc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pmc/errors.hpp"
#include "pmc/kernels.hpp"

namespace pmc {

namespace {

bool in_cylinder(double z) { return std::isfinite(z) && z >= -1.0 && z <= 1.0; }

void check_ordering(const RadialProfile& lower, const RadialProfile& upper) {
  if (lower.n() != upper.n()) throw InvalidArgument("lower and upper sheets have different grids");
  for (int i = 0; i <= lower.n(); ++i) {
    if (lower[i] > upper[i])
      throw OrderingViolation("lower sheet above upper sheet at node " + std::to_string(i));
  }
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw InvalidArgument("a radial profile needs at least two nodes");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!in_cylinder(values_[i]))
      throw InvalidArgument("profile value at node " + std::to_string(i) + " leaves [-1, 1]");
  }
}

RadialProfile RadialProfile::sample(int n, const std::function<double(double)>& f) {
  if (n < 1) throw InvalidArgument("grid resolution must be positive");
  std::vector<double> v(n + 1);
  for (int i = 0; i <= n; ++i) v[i] = f(static_cast<double>(i) / n);
  return RadialProfile(std::move(v));
}

RadialProfile RadialProfile::constant(int n, double value) {
  return sample(n, [value](double) { return value; });
}

RadialProfile RadialProfile::reflected() const {
  std::vector<double> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(), [](double z) { return -z; });
  return RadialProfile(std::move(v));
}

StackProblem::StackProblem(double c_, double eps_, int n_, StackMode mode_)
    : c(c_), eps(eps_), n(n_), mode(mode_) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("prescribing constant c must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("separation eps must lie in (0, 1)");
  if (n < 2) throw InvalidArgument("grid resolution n must be >= 2");
}

CapParams cap_params(double c, double eps) {
  if (!(c > 0.0)) throw InvalidArgument("cap requires c > 0");
  if (c > 2.0) throw RadiusTooSmall("cap radius 2/c is below 1 for c > 2");
  const double radius = 2.0 / c;
  const double touch = radius - std::sqrt(radius * radius - 1.0);
  return {radius, touch - eps, touch};
}

Grid2DPair::Grid2DPair(int m_, std::vector<double> lower_, std::vector<double> upper_)
    : m(m_), lower(std::move(lower_)), upper(std::move(upper_)) {
  if (m < 2) throw InvalidArgument("grid needs at least 2 nodes per axis");
  const auto size = static_cast<std::size_t>(m) * m;
  if (lower.size() != size || upper.size() != size)
    throw InvalidArgument("grid pair arrays must have m*m entries");
  for (std::size_t k = 0; k < size; ++k) {
    if (!in_cylinder(lower[k]) || !in_cylinder(upper[k]))
      throw InvalidArgument("grid heights must lie in [-1, 1]");
    if (lower[k] > upper[k]) throw OrderingViolation("grid pair has lower > upper");
  }
}

double graph_area(const RadialProfile& profile) { return kernels::serial::radial_area(profile.values()); }

double region_volume(const RadialProfile& profile) {
  return kernels::serial::radial_volume_below(profile.values());
}

double region_volume_above(const RadialProfile& profile) {
  return kernels::serial::radial_volume_above(profile.values());
}

EnergyBreakdown ah_energy(const StackProblem& problem, const RadialProfile& lower) {
  switch (problem.mode) {
    case StackMode::SingleSheet: {
      EnergyBreakdown e{graph_area(lower), region_volume(lower), 0.0};
      e.total = e.area - problem.c * e.volume;
      return e;
    }
    case StackMode::SymmetricStack:
      return ah_energy(problem, lower, lower.reflected());
    case StackMode::TwoMembrane:
      break;
  }
  throw InvalidArgument("two-membrane energy needs both sheets");
}

EnergyBreakdown ah_energy(const StackProblem& problem, const RadialProfile& lower,
                          const RadialProfile& upper) {
  if (problem.mode == StackMode::SingleSheet)
    throw InvalidArgument("single-sheet energy takes no upper sheet");
  check_ordering(lower, upper);
  EnergyBreakdown e;
  e.area = graph_area(lower) + graph_area(upper);
  e.volume = region_volume(lower) + region_volume_above(upper);
  e.total = e.area - problem.c * e.volume;
  return e;
}

RadialProfile cap_profile(double c, double eps, int n) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("separation eps must lie in (0, 1)");
  const CapParams cap = cap_params(c, eps);
  const double r2 = cap.radius * cap.radius;
  const double rim = std::sqrt(r2 - 1.0);
  auto values = RadialProfile::sample(n, [&](double r) {
    return std::sqrt(r2 - r * r) - rim - eps;
  });
  // The rim term cancels only up to rounding; pin the Dirichlet value.
  std::vector<double> v(values.values().begin(), values.values().end());
  v.back() = -eps;
  return RadialProfile(std::move(v));
}

double touching_eps(double c) { return cap_params(c, 0.0).touching_eps; }

double calibration_residual(const RadialProfile& profile, double c) {
  const int n = profile.n();
  if (n < 8) throw InvalidArgument("calibration residual needs n >= 8");
  const double h = profile.h();
  auto flux = [&](int i) {  // r u'/sqrt(1+u'^2) at r_{i+1/2}
    const double s = (profile[i + 1] - profile[i]) / h;
    return (i + 0.5) * h * s / std::sqrt(1.0 + s * s);
  };
  double worst = 0.0;
  for (int i = 2; i <= n - 2; ++i) {
    const double div = (flux(i) - flux(i - 1)) / (profile.radius(i) * h);
    worst = std::max(worst, std::abs(div + c));
  }
  return worst;
}

double grid_graph_area(int m, std::span<const double> heights) {
  if (heights.size() != static_cast<std::size_t>(m) * m)
    throw InvalidArgument("grid heights must have m*m entries");
  return kernels::parallel::grid_area(m, heights);
}

Grid2DPair steiner_symmetrize(const Grid2DPair& pair) {
  std::vector<double> lower(pair.lower.size());
  std::vector<double> upper(pair.upper.size());
  for (std::size_t k = 0; k < lower.size(); ++k) {
    // Occupied column length is 2 + lower - upper; split it evenly.
    lower[k] = 0.5 * (pair.lower[k] - pair.upper[k]);
    upper[k] = -lower[k];
  }
  return Grid2DPair(pair.m, std::move(lower), std::move(upper));
}

}  // namespace pmc
