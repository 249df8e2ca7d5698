#pragma once

// Diagnostics on solved profiles: free-boundary location, discrete second and
// third differences across it, and the second-variation (stability) form.

#include <optional>
#include <span>
#include <vector>

#include "pmc/geometry.hpp"
#include "pmc/solver.hpp"

namespace pmc {

struct RegularityReport {
  /// sup |u_{i-1} - 2u_i + u_{i+1}| / h^2 over interior nodes, skipping the
  /// two nodes next to the free boundary.
  double max_second_diff = 0.0;
  /// Second difference 3 cells inside the contact set minus the one 3 cells
  /// outside. Absent without a free boundary.
  std::optional<double> second_diff_jump_at_fb;
  /// sup of |third difference| / h^3 within a few cells of the free boundary
  /// (over the whole grid when there is none).
  double max_third_diff = 0.0;
  int grid_n = 0;
  /// Index of the outermost contact node when a free boundary exists.
  std::optional<int> free_boundary_node;
};

/// Never throws NoFreeBoundary: when the contact set is empty or covers the
/// whole grid the jump fields are left empty.
RegularityReport regularity_scan(const SolveReport& report, const StackProblem& problem);

/// Outer radius of the contact interval that contains the center node, plus
/// half a cell. Throws NoFreeBoundary (no contact or contact everywhere) and
/// DisconnectedContact (contact away from the center).
double contact_radius(const SolveReport& report);

struct StabilityResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

/// Ambient terms of the second variation that vanish in the flat cylinder
/// with constant h; kept so the formula carries every term.
struct AmbientTerms {
  double ricci_normal = 0.0;
  double normal_derivative_h = 0.0;
};

/// Both sides of the stability inequality for variations psi * normal of a
/// radial graph with prescribed mean curvature c:
///   lhs = int |grad psi|^2 - (|A|^2 + Ric(nu,nu)) psi^2,
///   rhs = int (H c + d_nu h - H^2) psi^2,
/// over the graph's area element. psi holds n+1 nodal values and must vanish
/// at the rim.
StabilityResult stability_form(const RadialProfile& profile, double c, std::span<const double> psi,
                               const AmbientTerms& ambient = {});

/// Fixed suite of ten radial test functions vanishing at r = 1.
std::vector<std::vector<double>> stability_test_suite(int n);

}  // namespace pmc
