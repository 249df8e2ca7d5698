#include "pmc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

// Third differences are scanned this many cells either side of the free boundary.
constexpr int kThirdDiffWindow = 5;
// Offset of the one-sided second differences used for the jump.
constexpr int kJumpOffset = 3;

double second_diff(std::span<const double> u, int i, double h) {
  return (u[i - 1] - 2.0 * u[i] + u[i + 1]) / (h * h);
}

double third_diff(std::span<const double> u, int i, double h) {
  return (u[i + 2] - 3.0 * u[i + 1] + 3.0 * u[i] - u[i - 1]) / (h * h * h);
}

// Outermost node of the contact interval at the center, if the contact set
// is a proper, nonempty subset of the grid.
std::optional<int> free_boundary_node(const SolveReport& report) {
  if (report.contact.empty()) return std::nullopt;
  const IndexInterval& first = report.contact.front();
  if (first.first == 0 && first.last == report.lower.n()) return std::nullopt;
  return first.last;
}

}  // namespace

RegularityReport regularity_scan(const SolveReport& report, const StackProblem& problem) {
  const auto u = report.lower.values();
  const int n = report.lower.n();
  const double h = report.lower.h();
  if (n != problem.n) throw InvalidArgument("report and problem grids differ");
  if (n < 4) throw InvalidArgument("regularity scan needs n >= 4");

  RegularityReport out;
  out.grid_n = n;
  out.free_boundary_node = free_boundary_node(report);
  const auto fb = out.free_boundary_node;

  for (int i = 1; i <= n - 1; ++i) {
    if (fb && (i == *fb || i == *fb + 1)) continue;
    out.max_second_diff = std::max(out.max_second_diff, std::abs(second_diff(u, i, h)));
  }

  int lo = 1;
  int hi = n - 2;
  if (fb) {
    lo = std::max(lo, *fb - kThirdDiffWindow);
    hi = std::min(hi, *fb + kThirdDiffWindow);
  }
  for (int i = lo; i <= hi; ++i)
    out.max_third_diff = std::max(out.max_third_diff, std::abs(third_diff(u, i, h)));

  if (fb) {
    const int inside = std::max(1, *fb - kJumpOffset);
    const int outside = *fb + kJumpOffset;
    if (outside <= n - 1) out.second_diff_jump_at_fb = second_diff(u, inside, h) - second_diff(u, outside, h);
  }
  return out;
}

double contact_radius(const SolveReport& report) {
  if (report.contact.empty()) throw NoFreeBoundary("contact set is empty");
  const IndexInterval& first = report.contact.front();
  if (first.first != 0) throw DisconnectedContact("contact set does not contain the center");
  if (first.last == report.lower.n()) throw NoFreeBoundary("contact set covers the whole disk");
  return report.lower.radius(first.last) + 0.5 * report.lower.h();
}

StabilityResult stability_form(const RadialProfile& profile, double c, std::span<const double> psi,
                               const AmbientTerms& ambient) {
  const int n = profile.n();
  const double h = profile.h();
  if (static_cast<int>(psi.size()) != n + 1) throw InvalidArgument("psi must have n+1 nodal values");
  if (std::abs(psi[n]) > 1e-14) throw InvalidArgument("psi must vanish at the rim");
  if (n < 2) throw InvalidArgument("stability form needs n >= 2");
  const auto u = profile.values();

  // Nodal u'' with the even extension u_{-1} = u_1 at the center and a
  // constant extrapolation at the rim.
  std::vector<double> upp(n + 1);
  upp[0] = 2.0 * (u[1] - u[0]) / (h * h);
  for (int i = 1; i < n; ++i) upp[i] = second_diff(u, i, h);
  upp[n] = upp[n - 1];

  StabilityResult out;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * h;
    const double du = (u[i + 1] - u[i]) / h;
    const double q = 1.0 + du * du;
    const double d2u = 0.5 * (upp[i] + upp[i + 1]);
    const double k1 = d2u / (q * std::sqrt(q));
    const double k2 = du / (r * std::sqrt(q));
    // Mean curvature oriented so that a sheet bounding the region below it,
    // bent upward, has H = c.
    const double mean = -(k1 + k2);
    const double a2 = k1 * k1 + k2 * k2;

    const double p = 0.5 * (psi[i] + psi[i + 1]);
    const double dp = (psi[i + 1] - psi[i]) / h;
    const double grad2 = dp * dp / q;
    const double area = 2.0 * std::numbers::pi * r * std::sqrt(q) * h;

    out.lhs += (grad2 - (a2 + ambient.ricci_normal) * p * p) * area;
    out.rhs += (mean * c + ambient.normal_derivative_h - mean * mean) * p * p * area;
  }
  out.margin = out.lhs - out.rhs;
  return out;
}

std::vector<std::vector<double>> stability_test_suite(int n) {
  const std::vector<double (*)(double)> shapes = {
      [](double r) { return 1.0 - r; },
      [](double r) { return std::pow(1.0 - r, 2); },
      [](double r) { return std::pow(1.0 - r, 3); },
      [](double r) { return std::pow(1.0 - r, 4); },
      [](double r) { return 1.0 - r * r; },
      [](double r) { return std::pow(1.0 - r * r, 2); },
      [](double r) { return std::pow(1.0 - r * r, 3); },
      [](double r) { return std::cos(0.5 * std::numbers::pi * r); },
      [](double r) { return std::sin(std::numbers::pi * r); },
      [](double r) { return r * r * (1.0 - r); },
  };
  std::vector<std::vector<double>> suite;
  for (auto f : shapes) {
    std::vector<double> psi(n + 1);
    for (int i = 0; i <= n; ++i) psi[i] = f(static_cast<double>(i) / n);
    psi[n] = 0.0;
    suite.push_back(std::move(psi));
  }
  return suite;
}

}  // namespace pmc
