#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <fstream>
#include <optional>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <omp.h>

#include "pmc/errors.hpp"
#include "pmc/experiment.hpp"
#include "pmc/io.hpp"

namespace fs = std::filesystem;
namespace ex = pmc::experiment;
using namespace pmc;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("pmc_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<double> column(const fs::path& p, const std::string& name) {
  std::ifstream is(p);
  return io::read_csv_column(is, name);
}

// Runs pmc_lab with the arguments; stdout goes to `out` when given.
int lab(const std::string& args, const fs::path& out = {}) {
  std::string cmd = std::string(PMC_LAB_PATH) + " " + args;
  cmd += out.empty() ? " > /dev/null" : " > " + out.string();
  cmd += " 2> /dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq != std::string::npos) kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

}  // namespace

TEST_CASE("cli solve") {
  const auto dir = scratch_dir("solve");
  SUBCASE("contact disk") {
    CHECK(lab("solve --c 1 --eps 0.1 --n 1000 --mode stack --out " + (dir / "a").string()) == 0);
    const auto contact = column(dir / "a" / "profile.csv", "contact");
    REQUIRE(contact.size() == 1001);
    CHECK(contact[0] == 1.0);
    CHECK(contact[100] == 1.0);
    CHECK(contact[1000] == 0.0);
    const auto j = slurp(dir / "a" / "report.txt");
    CHECK(j.find("\"converged\": true") != std::string::npos);
  }
  SUBCASE("flat") {
    CHECK(lab("solve --c 0 --eps 0.3 --n 100 --out " + (dir / "b").string()) == 0);
    for (double u : column(dir / "b" / "profile.csv", "u_lower")) CHECK(std::abs(u + 0.3) <= 1e-9);
  }
  SUBCASE("cap against the golden file") {
    CHECK(lab("solve --c 1 --eps 0.4 --n 2000 --mode single --out " + (dir / "c").string()) == 0);
    const auto got = column(dir / "c" / "profile.csv", "u_lower");
    const auto want = column(fs::path(PMC_TEST_DATA) / "cap_c1_eps0.4_n2000.csv", "u");
    REQUIRE(got.size() == want.size());
    double err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
    CHECK(err <= 5e-4);
  }
  SUBCASE("seeded membrane") {
    CHECK(lab("solve --c 1 --eps 0.2 --n 200 --mode membrane --seed 3 --out " + (dir / "d").string()) == 0);
    CHECK(slurp(dir / "d" / "report.txt").find("\"seed\": 3") != std::string::npos);
  }
  fs::remove_all(dir);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch_dir("codes");
  CHECK(lab("") == 1);
  CHECK(lab("solve --bogus 1") == 1);
  CHECK(lab("solve --mode sideways --out " + dir.string()) == 1);
  CHECK(lab("solve --eps 1.5 --out " + dir.string()) == 1);
  CHECK(lab("figure --case fig9 --out " + dir.string()) == 1);
  CHECK(lab("sweep --steps 0 --out " + dir.string()) == 1);
  CHECK(lab("solve --c 3 --mode single --out " + dir.string()) == 2);
  CHECK(lab("--help") == 0);
  fs::remove_all(dir);
}

TEST_CASE("cli constants") {
  const auto dir = scratch_dir("constants");
  const auto out = dir / "out.txt";
  CHECK(lab("constants --v 19.7392088 --kappa 0 --solve-max-c", out) == 0);
  auto kv = key_values(slurp(out));
  REQUIRE(kv.count("c_max"));
  CHECK(kv["c_max"].substr(0, 5) == "0.547");
  CHECK(kv["c_max"].size() == 8);

  CHECK(lab("constants --v 19.7392088 --kappa 0 --c 0.5", out) == 0);
  CHECK(key_values(slurp(out))["density_one_forced"] == "true");

  CHECK(lab("constants --c 0 --kappa 0 --v 1", out) == 0);
  kv = key_values(slurp(out));
  CHECK(std::stod(kv["mass_upper"]) == doctest::Approx(4 * M_PI).epsilon(1e-15));
  CHECK(std::stod(kv["mass_lower"]) == doctest::Approx(8 * M_PI).epsilon(1e-15));

  CHECK(lab("constants --v 19.7392088 --kappa 0.5 --solve-max-c", out) == 0);
  CHECK(key_values(slurp(out))["c_max"] == "NoThreshold");
  fs::remove_all(dir);
}

TEST_CASE("cli config file") {
  const auto dir = scratch_dir("config");
  const auto ini = dir / "run.ini";
  std::ofstream(ini) << "# demo\n[experiment]\ncommand = solve\nc = 0\neps = 0.25\nn = 40\nmode = single\nout = "
                     << (dir / "from_ini").string() << "\n";
  CHECK(lab("--config " + ini.string()) == 0);
  CHECK(column(dir / "from_ini" / "profile.csv", "u_lower").front() == -0.25);
  // Flags on the command line win over the file.
  CHECK(lab("--config " + ini.string() + " solve --eps 0.35") == 0);
  CHECK(column(dir / "from_ini" / "profile.csv", "u_lower").front() == -0.35);

  std::ofstream(ini) << "[experiment]\ncommand = solve\nwidth = 3\n";
  CHECK(lab("--config " + ini.string()) == 1);
  fs::remove_all(dir);
}

TEST_CASE("INI parsing") {
  std::istringstream is("; comment\n[other]\nc = 5\n[experiment]\n  c = 1  \n\n# note\neps=0.2\n");
  const auto kv = ex::parse_experiment_ini(is);
  CHECK(kv.size() == 2);
  CHECK(kv.at("c") == "1");
  CHECK(kv.at("eps") == "0.2");
  std::istringstream bad("[experiment]\nnonsense\n");
  CHECK_THROWS_AS(ex::parse_experiment_ini(bad), InvalidArgument);
}

TEST_CASE("figures") {
  const auto dir = scratch_dir("figures");
  const double h = 1.0 / 1000;
  std::ostringstream log4, log5, log6;
  CHECK(ex::run_figure(ex::FigureCase::Fig4, dir, log4) == 0);
  CHECK(ex::run_figure(ex::FigureCase::Fig5, dir, log5) == 0);
  CHECK(ex::run_figure(ex::FigureCase::Fig6, dir, log6) == 0);
  CHECK(std::stod(key_values(log4.str())["min_gap"]) >= 0.2);
  CHECK(std::stod(key_values(log5.str())["apex_gap"]) <= 2 * h);
  CHECK(std::stod(key_values(log6.str())["r_star"]) >= 0.05);
  for (const char* name : {"fig4", "fig5", "fig6"}) {
    CHECK(fs::exists(dir / (std::string(name) + ".csv")));
    CHECK(slurp(dir / (std::string(name) + ".svg")).find("<svg") == 0);
  }
  CHECK(ex::figure_problem(ex::FigureCase::Fig5).eps == touching_eps(1.0));
  fs::remove_all(dir);
}

TEST_CASE("sweep") {
  SUBCASE("eps grid") {
    ex::SweepOptions opt;
    const auto eps = ex::sweep_eps_values(opt);
    REQUIRE(eps.size() == 40);
    CHECK(eps.front() == 0.05);
    CHECK(eps.back() == 0.45);
    opt.steps = 1;
    CHECK(ex::sweep_eps_values(opt) == std::vector<double>{0.05});
    opt.eps_from = 0.5;
    opt.eps_to = 0.4;
    CHECK_THROWS_AS(ex::sweep_eps_values(opt), InvalidArgument);
  }
  SUBCASE("single step equals a solve") {
    ex::SweepOptions opt;
    opt.steps = 1;
    opt.eps_from = 0.12;
    opt.n = 300;
    const auto rows = ex::sweep(opt);
    REQUIRE(rows.size() == 1);
    const auto rep = solve(StackProblem(1.0, 0.12, 300, StackMode::SymmetricStack));
    CHECK(rows[0].energy.total == rep.energy.total);
    CHECK(rows[0].iterations == rep.iterations);
    CHECK(*rows[0].r_star == contact_radius(rep));
  }
  SUBCASE("regime transition and monotone free boundary") {
    ex::SweepOptions opt;
    const auto rows = ex::sweep(opt);
    double last_contact = 0.0, first_free = 1.0;
    std::optional<double> prev_r;
    for (const auto& row : rows) {
      CHECK(row.converged);
      if (row.contact_nodes > 0) last_contact = row.eps;
      if (row.contact_nodes == 0) first_free = std::min(first_free, row.eps);
      if (row.r_star) {
        if (prev_r) CHECK(*row.r_star <= *prev_r);
        prev_r = row.r_star;
      }
    }
    const double step = 0.4 / 39;
    CHECK(last_contact <= touching_eps(1.0));
    CHECK(first_free >= touching_eps(1.0));
    CHECK(first_free - last_contact <= step * (1 + 1e-12));
  }
}

TEST_CASE("sweep output is deterministic") {
  const auto dir = scratch_dir("determinism");
  ex::SweepOptions opt;
  opt.n = 200;
  opt.steps = 12;
  std::ostringstream log;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  opt.out = dir / "one";
  CHECK(ex::run_sweep(opt, log) == 0);
  omp_set_num_threads(4);
  opt.out = dir / "four";
  CHECK(ex::run_sweep(opt, log) == 0);
  opt.out = dir / "again";
  CHECK(ex::run_sweep(opt, log) == 0);
  omp_set_num_threads(saved);
  const auto a = slurp(dir / "one" / "sweep.csv");
  CHECK(a == slurp(dir / "four" / "sweep.csv"));
  CHECK(a == slurp(dir / "again" / "sweep.csv"));
  CHECK(a.rfind(ex::sweep_csv_header() + "\n", 0) == 0);

  CHECK(lab("solve --c 1 --eps 0.2 --n 300 --mode membrane --seed 5 --out " + (dir / "s1").string()) == 0);
  CHECK(lab("solve --c 1 --eps 0.2 --n 300 --mode membrane --seed 5 --out " + (dir / "s2").string()) == 0);
  CHECK(slurp(dir / "s1" / "profile.csv") == slurp(dir / "s2" / "profile.csv"));
  CHECK(slurp(dir / "s1" / "report.txt") == slurp(dir / "s2" / "report.txt"));
  fs::remove_all(dir);
}

TEST_CASE("regularity and stability runners") {
  const auto dir = scratch_dir("runners");
  std::ostringstream log;
  CHECK(ex::run_regularity(1.0, 0.1, {250, 500}, dir, log) == 0);
  const auto d2 = column(dir / "regularity.csv", "max_second_diff");
  CHECK(d2.size() == 2);
  ex::SolveOptions opt;
  opt.n = 300;
  opt.out = dir;
  std::ostringstream slog;
  CHECK(ex::run_stability(opt, slog) == 0);
  CHECK(column(dir / "stability.csv", "margin").size() == 10);
  CHECK(std::stod(key_values(slog.str())["min_margin"]) >= -1e-8);
  fs::remove_all(dir);
}
