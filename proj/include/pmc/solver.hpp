#pragma once

// Minimization of the discrete A^c energy over radial graphs:
//   * a single sheet with Dirichlet value -eps,
//   * the vertically symmetric stack (lower sheet u <= 0, upper sheet -u),
//   * the general two-membrane problem u1 <= u2 with no imposed symmetry.
//
// The energy is strictly convex on the free nodes, so the minimizer is unique.
// The method is a scaled projected gradient with Armijo backtracking followed
// by a projected Newton phase on the inactive set (tridiagonal or banded
// Hessian), which drives the KKT residual to grad_tol.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pmc/geometry.hpp"

namespace pmc {

enum class StepRule { FixedStep, BacktrackingArmijo };

struct SolverConfig {
  int max_iters = 200'000;
  /// Sup-norm of the projected gradient, measured per unit enclosed volume
  /// (i.e. in units of the discrete mean-curvature residual).
  double grad_tol = 1e-9;
  StepRule step_rule = StepRule::BacktrackingArmijo;
  bool active_set_refine = true;

  double armijo_shrink = 0.5;
  double armijo_slope = 1e-4;
  /// Step length of FixedStep, as a multiple of h^2.
  double fixed_step = 0.2;
  /// Projected-gradient iterations before the Newton phase takes over.
  int warmup_iters = 50;
  /// Nodes with upper - lower <= contact_tol are reported as contact.
  double contact_tol = 1e-6;
  /// Record the energy after every accepted step.
  bool record_trace = false;
};

/// Closed index interval [first, last] of grid nodes.
struct IndexInterval {
  int first;
  int last;
  bool operator==(const IndexInterval&) const = default;
};

struct SolveReport {
  RadialProfile lower;
  /// Absent for SingleSheet; -lower in SymmetricStack.
  std::optional<RadialProfile> upper;
  EnergyBreakdown energy;
  int iterations = 0;
  double kkt_residual = 0.0;
  std::vector<IndexInterval> contact;
  bool converged = false;
  /// Energies of accepted iterates (only when record_trace is set).
  std::vector<double> energy_trace;
  /// Largest energy increase between accepted iterates (0 when monotone).
  double max_energy_increase = 0.0;
  /// Largest constraint violation seen over all iterates.
  double max_infeasibility = 0.0;
};

SolveReport solve_single_sheet(const StackProblem& problem, const SolverConfig& cfg = {});
SolveReport solve_symmetric_stack(const StackProblem& problem, const SolverConfig& cfg = {});

/// Same solves from a caller-supplied lower sheet (its rim value is reset to
/// -eps and it is projected onto the constraint).
SolveReport solve_single_sheet(const StackProblem& problem, const SolverConfig& cfg,
                               const RadialProfile& lower0);
SolveReport solve_symmetric_stack(const StackProblem& problem, const SolverConfig& cfg,
                                  const RadialProfile& lower0);
SolveReport solve_two_membrane(const StackProblem& problem, const SolverConfig& cfg = {});

/// Two-membrane solve from a caller-supplied initial pair (Dirichlet values
/// are reset to -eps / +eps and the pair is projected onto lower <= upper).
SolveReport solve_two_membrane(const StackProblem& problem, const SolverConfig& cfg,
                               const RadialProfile& lower0, const RadialProfile& upper0);

/// Dispatches on problem.mode.
SolveReport solve(const StackProblem& problem, const SolverConfig& cfg = {});

/// Dispatches on problem.mode, starting from random_initial_pair(problem, seed).
SolveReport solve_from_seed(const StackProblem& problem, const SolverConfig& cfg, std::uint64_t seed);

/// Initial guess: linear in r from min(0, cap apex) at the center (the cap
/// apex itself for a single sheet) to -eps at the rim.
RadialProfile initial_guess(const StackProblem& problem);

/// Random smooth admissible pair (lower <= upper, rim values -eps / +eps,
/// inside the cylinder), reproducible from the seed.
std::pair<RadialProfile, RadialProfile> random_initial_pair(const StackProblem& problem,
                                                            std::uint64_t seed);

/// Contact intervals of a pair, using upper - lower <= tol.
std::vector<IndexInterval> contact_intervals(const RadialProfile& lower, const RadialProfile& upper,
                                             double tol);

/// Free-boundary radius of the symmetric stack from the radial PMC equation
///   r u'/sqrt(1+u'^2) = -(c/2)(r^2 - r*^2),  r > r*,
/// with u(r*) = 0, u(1) = -eps. Bisection on r* with adaptive quadrature.
/// Independent of the grid solver. Throws NoContact if eps >= touching_eps(c).
/// `quad_tol` is the relative tolerance of the inner quadrature.
double shooting_oracle(double c, double eps, double quad_tol = 1e-10);

}  // namespace pmc
