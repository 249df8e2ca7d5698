// pmc_lab: experiment runner for the prescribed-mean-curvature cylinder problems.
//
//   pmc_lab solve --c 1 --eps 0.1 --n 1000 --mode stack --out run/
//   pmc_lab figure --case fig6 --out figs/
//   pmc_lab sweep --c 1 --eps-from 0.05 --eps-to 0.45 --steps 40 --out sweep/
//   pmc_lab constants --v 19.7392088 --kappa 0 --solve-max-c
//   pmc_lab regularity --eps 0.1 --ns 250,500,1000,2000
//   pmc_lab stability --c 1 --eps 0.1 --mode stack
//
// Any flag may also come from `--config FILE` ([experiment] section,
// key = flag name without dashes); flags on the command line win.

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "pmc/errors.hpp"
#include "pmc/experiment.hpp"

namespace ex = pmc::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Prescribed mean curvature laboratory"};
  app.require_subcommand(0, 1);

  std::string config_file;
  app.add_option("--config", config_file, "INI file with an [experiment] section")->check(CLI::ExistingFile);

  ex::SolveOptions solve_opt;
  ex::SweepOptions sweep_opt;
  ex::ConstantsOptions const_opt;
  std::string mode = "stack";
  std::string fig_case = "fig6";
  std::string out = ".";
  std::vector<int> ns = {250, 500, 1000, 2000};
  std::uint64_t seed = 0;
  double c = 1.0;
  double eps = 0.1;
  int n = 1000;

  auto* solve = app.add_subcommand("solve", "Solve one single/stack/membrane problem");
  auto* figure = app.add_subcommand("figure", "Reproduce one of the three contact regimes");
  auto* sweep = app.add_subcommand("sweep", "Sweep eps and tabulate energies, r* and diagnostics");
  auto* constants = app.add_subcommand("constants", "Evaluate the explicit constants and mass bounds");
  auto* regularity = app.add_subcommand("regularity", "Second/third differences across resolutions");
  auto* stability = app.add_subcommand("stability", "Second-variation form on the fixed test suite");

  // Options shared by several commands, keyed by name so config files can fill them in.
  std::map<std::string, std::vector<std::pair<CLI::App*, CLI::Option*>>> registered;
  auto reg = [&](const std::string& key, CLI::App* sub, CLI::Option* o) { registered[key].push_back({sub, o}); };

  for (auto* sub : {solve, stability, sweep, regularity}) {
    reg("c", sub, sub->add_option("--c", c, "Prescribing constant"));
    reg("n", sub, sub->add_option("--n", n, "Grid resolution"));
    reg("out", sub, sub->add_option("--out", out, "Output directory"));
  }
  for (auto* sub : {solve, stability, regularity}) reg("eps", sub, sub->add_option("--eps", eps, "Sheet separation"));
  for (auto* sub : {solve, stability, sweep})
    reg("mode", sub, sub->add_option("--mode", mode, "single | stack | membrane"));
  for (auto* sub : {solve, stability}) reg("seed", sub, sub->add_option("--seed", seed, "Random initial guess seed"));

  reg("eps-from", sweep, sweep->add_option("--eps-from", sweep_opt.eps_from, "Sweep start"));
  reg("eps-to", sweep, sweep->add_option("--eps-to", sweep_opt.eps_to, "Sweep end"));
  reg("steps", sweep, sweep->add_option("--steps", sweep_opt.steps, "Number of sweep points"));

  reg("case", figure, figure->add_option("--case", fig_case, "fig4 | fig5 | fig6"));
  reg("out", figure, figure->add_option("--out", out, "Output directory"));

  reg("ns", regularity, regularity->add_option("--ns", ns, "Resolutions")->delimiter(','));

  auto& loc = const_opt.local;
  reg("v", constants, constants->add_option("--v", const_opt.mass.v, "Volume bound"));
  reg("kappa", constants, constants->add_option("--kappa", const_opt.mass.kappa, "Second fundamental form slack"));
  reg("c", constants, constants->add_option("--c", const_opt.mass.c, "Prescribing bound"));
  reg("solve-max-c", constants, constants->add_flag("--solve-max-c", const_opt.solve_max_c, "Solve for c_max"));
  reg("delta", constants, constants->add_option("--delta", loc.delta_msy, "Thin-tube delta"));
  reg("c1", constants, constants->add_option("--c1", loc.c1, "Thin-tube isoperimetric constant"));
  reg("vol-M", constants, constants->add_option("--vol-M", loc.vol_M, "Volume of M"));
  reg("theta", constants, constants->add_option("--theta", loc.theta, "Collar width theta"));
  reg("beta", constants, constants->add_option("--beta", loc.beta, "Isoperimetric constant beta"));
  reg("rho0", constants, constants->add_option("--rho0", loc.rho0, "Local control radius"));
  reg("beta0", constants, constants->add_option("--beta0", loc.beta0, "Local isoperimetric constant"));
  reg("mu", constants, constants->add_option("--mu", loc.mu, "Local control mu"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ex::kExitOk : ex::kExitUsage;
  }

  try {
    std::map<std::string, std::string> cfg;
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      cfg = ex::parse_experiment_ini(is);
    }

    CLI::App* active = nullptr;
    for (auto* sub : app.get_subcommands()) active = sub;
    if (!active && cfg.count("command")) active = app.get_subcommand(cfg.at("command"));
    if (!active) {
      std::cerr << app.help();
      return ex::kExitUsage;
    }

    // Config values fill options of the active command not set on the command line.
    for (const auto& [key, value] : cfg) {
      if (key == "command") continue;
      auto it = registered.find(key);
      if (it == registered.end()) throw pmc::InvalidArgument("unknown config key '" + key + "'");
      for (auto [sub, o] : it->second) {
        if (sub != active || o->count() > 0) continue;
        o->clear();
        if (o->get_type_size() == 0)
          o->add_result(value == "true" || value == "1" ? "true" : "false");
        else
          o->add_result(value);
        o->run_callback();
      }
    }

    auto seed_given = [&](CLI::App* sub) {
      for (auto [owner, o] : registered["seed"])
        if (owner == sub && o->count() > 0) return true;
      return false;
    };

    solve_opt.c = c;
    solve_opt.eps = eps;
    solve_opt.n = n;
    solve_opt.out = out;

    if (active == solve || active == stability) {
      solve_opt.mode = ex::parse_mode(mode);
      if (seed_given(active)) solve_opt.seed = seed;
      return active == solve ? ex::run_solve(solve_opt, std::cout) : ex::run_stability(solve_opt, std::cout);
    }
    if (active == figure) return ex::run_figure(ex::parse_figure_case(fig_case), out, std::cout);
    if (active == sweep) {
      sweep_opt.c = c;
      sweep_opt.n = n;
      sweep_opt.mode = ex::parse_mode(mode);
      sweep_opt.out = out;
      return ex::run_sweep(sweep_opt, std::cout);
    }
    if (active == constants) return ex::run_constants(const_opt, std::cout);
    if (active == regularity) return ex::run_regularity(c, eps, ns, out, std::cout);
  } catch (const pmc::InvalidArgument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return ex::kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return ex::kExitUsage;
  } catch (const pmc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::kExitNotConverged;
  }
  return ex::kExitUsage;
}
