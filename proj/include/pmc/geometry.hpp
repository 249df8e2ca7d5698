#pragma once

// Radial and 2D graphs in the unit cylinder B_1 x (-1, 1), their discrete
// area/volume/A^c energies, and the closed-form spherical-cap solution.
//
// Discretization: uniform radial grid r_i = i/n, i = 0..n. Slopes are forward
// differences on cells, cell weights are 2*pi*r_{i+1/2}*h. The center node has
// no area weight; it enters the volume through the midpoint value of cell 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace pmc {

/// Height function u(r) sampled at r_i = i/n. Values stay inside [-1, 1].
class RadialProfile {
 public:
  /// Takes n+1 samples; throws InvalidArgument if fewer than two or if any
  /// sample leaves [-1, 1] or is not finite.
  explicit RadialProfile(std::vector<double> values);

  /// Samples f at the n+1 grid radii.
  static RadialProfile sample(int n, const std::function<double(double)>& f);
  static RadialProfile constant(int n, double value);

  int n() const { return static_cast<int>(values_.size()) - 1; }
  double h() const { return 1.0 / n(); }
  double radius(int i) const { return static_cast<double>(i) / n(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double boundary_value() const { return values_.back(); }
  std::span<const double> values() const { return values_; }

  /// Pointwise negation -u (the vertical reflection z -> -z).
  RadialProfile reflected() const;

 private:
  std::vector<double> values_;
};

enum class StackMode { SingleSheet, SymmetricStack, TwoMembrane };

/// One instance of the cylinder minimization: prescribing constant c, initial
/// sheet separation eps, grid resolution n.
struct StackProblem {
  double c;
  double eps;
  int n;
  StackMode mode;

  /// Validates c >= 0, 0 < eps < 1, n >= 2.
  StackProblem(double c, double eps, int n, StackMode mode);
};

struct EnergyBreakdown {
  double area = 0.0;
  double volume = 0.0;
  double total = 0.0;
};

struct CapParams {
  double radius;
  double apex_height;
  double touching_eps;
};

/// R = 2/c, apex and touching separation. Throws RadiusTooSmall for c > 2
/// and InvalidArgument for c <= 0.
CapParams cap_params(double c, double eps);

/// Two height fields on an m x m grid over [-1, 1]^2, row-major.
struct Grid2DPair {
  int m;
  std::vector<double> lower;
  std::vector<double> upper;

  /// Validates sizes, range [-1, 1] and lower <= upper.
  Grid2DPair(int m, std::vector<double> lower, std::vector<double> upper);
};

double graph_area(const RadialProfile& profile);

/// Volume between z = -1 and the graph.
double region_volume(const RadialProfile& profile);

/// Volume between the graph and z = 1 (the region of an upper sheet).
double region_volume_above(const RadialProfile& profile);

/// Area minus c times enclosed volume. SingleSheet takes only the lower sheet;
/// SymmetricStack derives the upper sheet as -lower when none is given.
/// Throws OrderingViolation when lower > upper anywhere.
EnergyBreakdown ah_energy(const StackProblem& problem, const RadialProfile& lower);
EnergyBreakdown ah_energy(const StackProblem& problem, const RadialProfile& lower,
                          const RadialProfile& upper);

/// u(r) = sqrt(R^2 - r^2) - sqrt(R^2 - 1) - eps with R = 2/c.
RadialProfile cap_profile(double c, double eps, int n);

/// eps at which the cap apex sits on z = 0: 2/c - sqrt(4/c^2 - 1).
double touching_eps(double c);

/// max over nodes 2..n-2 of |(1/r)(r u'/sqrt(1+u'^2))' + c| with centered
/// fluxes. Requires n >= 8.
double calibration_residual(const RadialProfile& profile, double c);

/// Discrete area of a graph on the m x m grid over [-1, 1]^2.
double grid_graph_area(int m, std::span<const double> heights);

/// Columnwise rearrangement into a vertically symmetric pair with the same
/// occupied length per column: lower' = (lower - upper)/2, upper' = -lower'.
Grid2DPair steiner_symmetrize(const Grid2DPair& pair);

}  // namespace pmc
