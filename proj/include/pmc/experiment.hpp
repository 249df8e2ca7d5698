#pragma once

// Experiment runners behind the pmc_lab command line. Each runner uses only
// the public geometry/solver/analysis/constants API, writes its files into
// an output directory, and returns the process exit code:
//   0 success, 1 usage error, 2 solver did not converge.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmc/analysis.hpp"
#include "pmc/constants.hpp"
#include "pmc/geometry.hpp"
#include "pmc/solver.hpp"

namespace pmc::experiment {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNotConverged = 2;

StackMode parse_mode(const std::string& name);
std::string mode_name(StackMode mode);

struct SolveOptions {
  double c = 1.0;
  double eps = 0.1;
  int n = 1000;
  StackMode mode = StackMode::SymmetricStack;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = ".";
};

/// Writes profile.csv (r,u_lower,u_upper,contact) and report.txt (JSON sidecar).
int run_solve(const SolveOptions& opt, std::ostream& log);

enum class FigureCase { Fig4, Fig5, Fig6 };

FigureCase parse_figure_case(const std::string& name);
std::string figure_case_name(FigureCase fig);
/// (c, eps) of the case: c = 1 with eps = 0.4, 2 - sqrt(3), 0.1.
StackProblem figure_problem(FigureCase fig, int n = 1000);

/// Solves the stack problem of the case and writes <case>.svg and <case>.csv.
int run_figure(FigureCase fig, const std::filesystem::path& out, std::ostream& log);

struct SweepOptions {
  double c = 1.0;
  int n = 1000;
  double eps_from = 0.05;
  double eps_to = 0.45;
  int steps = 40;
  StackMode mode = StackMode::SymmetricStack;
  std::filesystem::path out = ".";
};

struct SweepRow {
  double eps = 0.0;
  bool converged = false;
  int iterations = 0;
  EnergyBreakdown energy;
  double kkt_residual = 0.0;
  int contact_nodes = 0;
  std::optional<double> r_star;
  std::optional<double> r_star_oracle;
  RegularityReport regularity;
  /// Stability form of the test function with the smallest margin.
  StabilityResult stability;
};

/// eps values of the sweep: uniform, endpoints included (a single step uses eps_from).
std::vector<double> sweep_eps_values(const SweepOptions& opt);

/// Solves every eps of the sweep (in parallel); rows come back in ascending eps.
std::vector<SweepRow> sweep(const SweepOptions& opt, const SolverConfig& cfg = {});

std::string sweep_csv_header();
std::string sweep_csv_row(double c, int n, const SweepRow& row);

/// Writes sweep.csv.
int run_sweep(const SweepOptions& opt, std::ostream& log);

struct ConstantsOptions {
  LocalControlConstants local;
  MassBoundInputs mass{2.0 * 3.141592653589793 * 3.141592653589793, 0.0, 0.0};
  bool solve_max_c = false;
};

/// Prints the key=value block to `os` (c_max with 6 digits when requested).
int run_constants(const ConstantsOptions& opt, std::ostream& os);

/// Stack solves at each n; prints the regularity blocks and writes regularity.csv.
int run_regularity(double c, double eps, const std::vector<int>& ns, const std::filesystem::path& out,
                   std::ostream& log);

/// Solves one configuration and evaluates the stability form on the fixed
/// test suite; writes stability.csv.
int run_stability(const SolveOptions& opt, std::ostream& log);

/// key=value pairs of the [experiment] section of an INI file. Blank lines
/// and lines starting with '#' or ';' are skipped.
std::map<std::string, std::string> parse_experiment_ini(std::istream& is);

}  // namespace pmc::experiment
