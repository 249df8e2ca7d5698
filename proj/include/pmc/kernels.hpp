#pragma once

// Inner loops of the energy evaluation. `serial` is the reference
// implementation used by the solver and the tests; `parallel` holds the
// OpenMP versions. Parallel kernels reduce over fixed-size blocks and combine
// the block sums in index order, so their results do not depend on the
// thread count.
//
// All radial kernels take the n+1 node values of a profile on r_i = i/n.

#include <cmath>
#include <span>
#include <vector>

namespace pmc::kernels {

/// Block size of the deterministic parallel reductions.
inline constexpr int kReductionBlock = 512;

/// Neumaier-compensated accumulator. Energies of converged iterates differ in
/// the 12th digit, so plain summation would hide the descent.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      carry += (sum - t) + x;
    else
      carry += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// Volume carried by each node, dV/du_i. Sums to pi over all nodes.
std::vector<double> node_volume_weights(int n);

namespace serial {

double radial_area(std::span<const double> u);
double radial_volume_below(std::span<const double> u);
double radial_volume_above(std::span<const double> u);

/// d(area)/du_i for every node (the boundary entry is filled too).
void radial_area_gradient(std::span<const double> u, std::span<double> grad);

/// Tridiagonal Hessian of the area: diag has n+1 entries, off has n
/// (off[i] couples nodes i and i+1).
void radial_area_hessian(std::span<const double> u, std::span<double> diag,
                         std::span<double> off);

double grid_area(int m, std::span<const double> heights);

/// Single-sheet A^c energies of many profiles of equal length.
std::vector<double> batch_energy(double c, std::span<const std::vector<double>> profiles);

}  // namespace serial

namespace parallel {

double radial_area(std::span<const double> u);
double grid_area(int m, std::span<const double> heights);
std::vector<double> batch_energy(double c, std::span<const std::vector<double>> profiles);

}  // namespace parallel

}  // namespace pmc::kernels
