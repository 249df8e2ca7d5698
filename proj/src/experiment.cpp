#include "pmc/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pmc/errors.hpp"
#include "pmc/io.hpp"

namespace pmc::experiment {

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InvalidArgument("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw InvalidArgument("cannot write " + file.string());
  return os;
}

std::optional<double> try_contact_radius(const SolveReport& report) {
  try {
    return contact_radius(report);
  } catch (const NoFreeBoundary&) {
    return std::nullopt;
  } catch (const DisconnectedContact&) {
    return std::nullopt;
  }
}

std::optional<double> try_oracle(const StackProblem& problem) {
  if (problem.mode == StackMode::SingleSheet || problem.c <= 0.0 || problem.c > 2.0) return std::nullopt;
  try {
    return shooting_oracle(problem.c, problem.eps);
  } catch (const NoContact&) {
    return std::nullopt;
  }
}

int contact_node_count(const SolveReport& report) {
  int count = 0;
  for (const auto& iv : report.contact) count += iv.last - iv.first + 1;
  return count;
}

StabilityResult weakest_stability(const SolveReport& report, double c) {
  StabilityResult weakest;
  bool first = true;
  for (const auto& psi : stability_test_suite(report.lower.n())) {
    const StabilityResult s = stability_form(report.lower, c, psi);
    if (first || s.margin < weakest.margin) weakest = s;
    first = false;
  }
  return weakest;
}

std::string opt_text(std::optional<double> x) { return x ? io::format_double(*x) : std::string(); }

}  // namespace

StackMode parse_mode(const std::string& name) {
  if (name == "single") return StackMode::SingleSheet;
  if (name == "stack") return StackMode::SymmetricStack;
  if (name == "membrane") return StackMode::TwoMembrane;
  throw InvalidArgument("unknown mode '" + name + "' (expected single, stack or membrane)");
}

std::string mode_name(StackMode mode) {
  switch (mode) {
    case StackMode::SingleSheet:
      return "single";
    case StackMode::SymmetricStack:
      return "stack";
    case StackMode::TwoMembrane:
      return "membrane";
  }
  return "?";
}

int run_solve(const SolveOptions& opt, std::ostream& log) {
  const StackProblem problem(opt.c, opt.eps, opt.n, opt.mode);
  ensure_dir(opt.out);
  const SolveReport report = opt.seed ? solve_from_seed(problem, {}, *opt.seed) : solve(problem);
  const auto r_star = try_contact_radius(report);
  const auto oracle = try_oracle(problem);

  auto csv = open_out(opt.out / "profile.csv");
  io::write_report_csv(csv, report);
  auto sidecar = open_out(opt.out / "report.txt");
  sidecar << io::report_sidecar(problem, report, r_star, oracle, opt.seed);

  log << "mode=" << mode_name(opt.mode) << " c=" << io::format_double(opt.c)
      << " eps=" << io::format_double(opt.eps) << " n=" << opt.n << '\n'
      << "seed=" << (opt.seed ? std::to_string(*opt.seed) : std::string("none")) << '\n'
      << "converged=" << (report.converged ? "true" : "false") << " iterations=" << report.iterations
      << " kkt_residual=" << io::format_double(report.kkt_residual) << '\n'
      << "energy total=" << io::format_double(report.energy.total) << '\n';
  if (r_star) log << "r_star=" << io::format_double(*r_star) << '\n';
  return report.converged ? kExitOk : kExitNotConverged;
}

FigureCase parse_figure_case(const std::string& name) {
  if (name == "fig4") return FigureCase::Fig4;
  if (name == "fig5") return FigureCase::Fig5;
  if (name == "fig6") return FigureCase::Fig6;
  throw InvalidArgument("unknown figure case '" + name + "' (expected fig4, fig5 or fig6)");
}

std::string figure_case_name(FigureCase fig) {
  switch (fig) {
    case FigureCase::Fig4:
      return "fig4";
    case FigureCase::Fig5:
      return "fig5";
    case FigureCase::Fig6:
      return "fig6";
  }
  return "?";
}

StackProblem figure_problem(FigureCase fig, int n) {
  double eps = 0.1;
  switch (fig) {
    case FigureCase::Fig4:
      eps = 0.4;
      break;
    case FigureCase::Fig5:
      eps = touching_eps(1.0);
      break;
    case FigureCase::Fig6:
      eps = 0.1;
      break;
  }
  return StackProblem(1.0, eps, n, StackMode::SymmetricStack);
}

int run_figure(FigureCase fig, const std::filesystem::path& out, std::ostream& log) {
  const StackProblem problem = figure_problem(fig);
  ensure_dir(out);
  const SolveReport report = solve_symmetric_stack(problem);
  const std::string name = figure_case_name(fig);

  auto csv = open_out(out / (name + ".csv"));
  io::write_report_csv(csv, report);
  auto svg = open_out(out / (name + ".svg"));
  svg << io::two_curve_svg(report.lower, *report.upper,
                           name + ": c = 1, eps = " + io::format_double(problem.eps));

  double min_gap = 2.0;
  for (int i = 0; i <= report.lower.n(); ++i)
    min_gap = std::min(min_gap, (*report.upper)[i] - report.lower[i]);
  log << name << " eps=" << io::format_double(problem.eps) << " converged=" << (report.converged ? "true" : "false")
      << '\n'
      << "apex_gap=" << io::format_double((*report.upper)[0] - report.lower[0]) << '\n'
      << "min_gap=" << io::format_double(min_gap) << '\n'
      << "contact_nodes=" << contact_node_count(report) << '\n';
  if (auto r = try_contact_radius(report)) log << "r_star=" << io::format_double(*r) << '\n';
  return report.converged ? kExitOk : kExitNotConverged;
}

std::vector<double> sweep_eps_values(const SweepOptions& opt) {
  if (opt.steps < 1) throw InvalidArgument("sweep needs at least one step");
  if (!(opt.eps_from > 0.0 && opt.eps_to < 1.0 && opt.eps_from <= opt.eps_to))
    throw InvalidArgument("sweep range must satisfy 0 < eps_from <= eps_to < 1");
  std::vector<double> eps(opt.steps);
  for (int k = 0; k < opt.steps; ++k)
    eps[k] = opt.steps == 1 ? opt.eps_from
                            : opt.eps_from + (opt.eps_to - opt.eps_from) * k / (opt.steps - 1);
  return eps;
}

std::vector<SweepRow> sweep(const SweepOptions& opt, const SolverConfig& cfg) {
  const std::vector<double> eps = sweep_eps_values(opt);
  std::vector<SweepRow> rows(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());
  const int count = static_cast<int>(eps.size());

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      const StackProblem problem(opt.c, eps[k], opt.n, opt.mode);
      const SolveReport report = solve(problem, cfg);
      SweepRow& row = rows[k];
      row.eps = eps[k];
      row.converged = report.converged;
      row.iterations = report.iterations;
      row.energy = report.energy;
      row.kkt_residual = report.kkt_residual;
      row.contact_nodes = contact_node_count(report);
      row.r_star = try_contact_radius(report);
      row.r_star_oracle = try_oracle(problem);
      row.regularity = regularity_scan(report, problem);
      row.stability = weakest_stability(report, opt.c);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

std::string sweep_csv_header() {
  return "eps,c,n,converged,iterations,area,volume,total,kkt_residual,contact_nodes,r_star,"
         "r_star_oracle,max_second_diff,second_diff_jump_at_fb,max_third_diff,stability_lhs,"
         "stability_rhs,stability_margin";
}

std::string sweep_csv_row(double c, int n, const SweepRow& row) {
  std::ostringstream os;
  os << io::format_double(row.eps) << ',' << io::format_double(c) << ',' << n << ','
     << (row.converged ? 1 : 0) << ',' << row.iterations << ',' << io::format_double(row.energy.area) << ','
     << io::format_double(row.energy.volume) << ',' << io::format_double(row.energy.total) << ','
     << io::format_double(row.kkt_residual) << ',' << row.contact_nodes << ',' << opt_text(row.r_star) << ','
     << opt_text(row.r_star_oracle) << ',' << io::format_double(row.regularity.max_second_diff) << ','
     << opt_text(row.regularity.second_diff_jump_at_fb) << ','
     << io::format_double(row.regularity.max_third_diff) << ',' << io::format_double(row.stability.lhs) << ','
     << io::format_double(row.stability.rhs) << ',' << io::format_double(row.stability.margin);
  return os.str();
}

int run_sweep(const SweepOptions& opt, std::ostream& log) {
  ensure_dir(opt.out);
  const auto rows = sweep(opt);
  auto csv = open_out(opt.out / "sweep.csv");
  csv << sweep_csv_header() << '\n';
  bool all_converged = true;
  for (const auto& row : rows) {
    csv << sweep_csv_row(opt.c, opt.n, row) << '\n';
    all_converged = all_converged && row.converged;
  }

  // Regime transition: last eps with contact, first without.
  std::optional<double> last_contact, first_free;
  for (const auto& row : rows) {
    if (row.contact_nodes > 0) last_contact = row.eps;
    if (row.contact_nodes == 0 && !first_free) first_free = row.eps;
  }
  log << "rows=" << rows.size() << " all_converged=" << (all_converged ? "true" : "false") << '\n';
  if (last_contact && first_free)
    log << "contact_transition=[" << io::format_double(*last_contact) << ','
        << io::format_double(*first_free) << "]\n";
  return all_converged ? kExitOk : kExitNotConverged;
}

int run_constants(const ConstantsOptions& opt, std::ostream& os) {
  const ConstantsReport report = evaluate_constants(opt.local, opt.mass, opt.solve_max_c);
  os << io::constants_key_value(report);
  return kExitOk;
}

int run_regularity(double c, double eps, const std::vector<int>& ns, const std::filesystem::path& out,
                   std::ostream& log) {
  if (ns.empty()) throw InvalidArgument("regularity needs at least one resolution");
  ensure_dir(out);
  std::vector<RegularityReport> reports(ns.size());
  std::vector<char> converged(ns.size(), 0);
  std::vector<std::exception_ptr> errors(ns.size());
  const int count = static_cast<int>(ns.size());

#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    try {
      const StackProblem problem(c, eps, ns[k], StackMode::SymmetricStack);
      const SolveReport report = solve_symmetric_stack(problem);
      reports[k] = regularity_scan(report, problem);
      converged[k] = report.converged;
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  auto csv = open_out(out / "regularity.csv");
  csv << "n,max_second_diff,second_diff_jump_at_fb,max_third_diff\n";
  bool ok = true;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const auto& r = reports[k];
    csv << ns[k] << ',' << io::format_double(r.max_second_diff) << ','
        << opt_text(r.second_diff_jump_at_fb) << ',' << io::format_double(r.max_third_diff) << '\n';
    log << io::regularity_key_value(r);
    ok = ok && converged[k];
  }
  return ok ? kExitOk : kExitNotConverged;
}

int run_stability(const SolveOptions& opt, std::ostream& log) {
  const StackProblem problem(opt.c, opt.eps, opt.n, opt.mode);
  ensure_dir(opt.out);
  const SolveReport report = opt.seed ? solve_from_seed(problem, {}, *opt.seed) : solve(problem);
  auto csv = open_out(opt.out / "stability.csv");
  csv << "test_function,lhs,rhs,margin\n";
  double worst = 0.0;
  int k = 0;
  for (const auto& psi : stability_test_suite(opt.n)) {
    const StabilityResult s = stability_form(report.lower, opt.c, psi);
    csv << k << ',' << io::format_double(s.lhs) << ',' << io::format_double(s.rhs) << ','
        << io::format_double(s.margin) << '\n';
    worst = k == 0 ? s.margin : std::min(worst, s.margin);
    ++k;
  }
  log << "converged=" << (report.converged ? "true" : "false") << '\n'
      << "min_margin=" << io::format_double(worst) << '\n';
  return report.converged ? kExitOk : kExitNotConverged;
}

std::map<std::string, std::string> parse_experiment_ini(std::istream& is) {
  std::map<std::string, std::string> out;
  std::string line;
  bool in_section = false;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      in_section = line == "[experiment]";
      continue;
    }
    if (!in_section) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("config line without '=': " + line);
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace pmc::experiment
