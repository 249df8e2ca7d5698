#include "pmc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pmc::kernels {

namespace {

int cells(std::span<const double> u) { return static_cast<int>(u.size()) - 1; }

double cell_weight(int i, double h) { return 2.0 * std::numbers::pi * (i + 0.5) * h * h; }

double cell_area(std::span<const double> u, int i, double h) {
  const double slope = (u[i + 1] - u[i]) / h;
  return cell_weight(i, h) * std::sqrt(1.0 + slope * slope);
}

double grid_row_area(int m, std::span<const double> z, int row) {
  const double h = 2.0 / (m - 1);
  double acc = 0.0;
  for (int j = 0; j + 1 < m; ++j) {
    const double zx = (z[(row + 1) * m + j] - z[row * m + j]) / h;
    const double zy = (z[row * m + j + 1] - z[row * m + j]) / h;
    acc += h * h * std::sqrt(1.0 + zx * zx + zy * zy);
  }
  return acc;
}

double sheet_energy(double c, std::span<const double> u) {
  return serial::radial_area(u) - c * serial::radial_volume_below(u);
}

}  // namespace

std::vector<double> node_volume_weights(int n) {
  const double h = 1.0 / n;
  std::vector<double> w(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    const double half = 0.5 * cell_weight(i, h);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

namespace serial {

double radial_area(std::span<const double> u) {
  const int n = cells(u);
  const double h = 1.0 / n;
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) acc.add(cell_area(u, i, h));
  return acc.value();
}

double radial_volume_below(std::span<const double> u) {
  const int n = cells(u);
  const double h = 1.0 / n;
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) acc.add(cell_weight(i, h) * (0.5 * (u[i] + u[i + 1]) + 1.0));
  return acc.value();
}

double radial_volume_above(std::span<const double> u) {
  const int n = cells(u);
  const double h = 1.0 / n;
  CompensatedSum acc;
  for (int i = 0; i < n; ++i) acc.add(cell_weight(i, h) * (1.0 - 0.5 * (u[i] + u[i + 1])));
  return acc.value();
}

void radial_area_gradient(std::span<const double> u, std::span<double> grad) {
  const int n = cells(u);
  const double h = 1.0 / n;
  for (auto& g : grad) g = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (u[i + 1] - u[i]) / h;
    const double flux = cell_weight(i, h) * s / (h * std::sqrt(1.0 + s * s));
    grad[i] -= flux;
    grad[i + 1] += flux;
  }
}

void radial_area_hessian(std::span<const double> u, std::span<double> diag,
                         std::span<double> off) {
  const int n = cells(u);
  const double h = 1.0 / n;
  for (auto& d : diag) d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = (u[i + 1] - u[i]) / h;
    const double q = 1.0 + s * s;
    const double k = cell_weight(i, h) / (h * h * q * std::sqrt(q));
    diag[i] += k;
    diag[i + 1] += k;
    off[i] = -k;
  }
}

double grid_area(int m, std::span<const double> heights) {
  double total = 0.0;
  for (int row = 0; row + 1 < m; ++row) total += grid_row_area(m, heights, row);
  return total;
}

std::vector<double> batch_energy(double c, std::span<const std::vector<double>> profiles) {
  std::vector<double> out(profiles.size());
  for (std::size_t k = 0; k < profiles.size(); ++k) out[k] = sheet_energy(c, profiles[k]);
  return out;
}

}  // namespace serial

namespace parallel {

double radial_area(std::span<const double> u) {
  const int n = cells(u);
  const double h = 1.0 / n;
  const int blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<double> partial(blocks, 0.0);

#pragma omp parallel for schedule(static)
  for (int b = 0; b < blocks; ++b) {
    CompensatedSum acc;
    const int end = std::min(n, (b + 1) * kReductionBlock);
    for (int i = b * kReductionBlock; i < end; ++i) acc.add(cell_area(u, i, h));
    partial[b] = acc.value();
  }

  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

double grid_area(int m, std::span<const double> heights) {
  std::vector<double> rows(m > 1 ? m - 1 : 0, 0.0);

#pragma omp parallel for schedule(static)
  for (int row = 0; row < m - 1; ++row) rows[row] = grid_row_area(m, heights, row);

  double total = 0.0;
  for (double r : rows) total += r;
  return total;
}

std::vector<double> batch_energy(double c, std::span<const std::vector<double>> profiles) {
  std::vector<double> out(profiles.size());
  const auto count = static_cast<long>(profiles.size());

#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) out[k] = sheet_energy(c, profiles[k]);
  return out;
}

}  // namespace parallel

}  // namespace pmc::kernels
