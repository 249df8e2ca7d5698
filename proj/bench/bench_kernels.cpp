// Serial reference vs OpenMP kernels, plus an eps sweep at 1 and N threads.
//
//   bench_kernels [repeats]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include <omp.h>

#include "pmc/experiment.hpp"
#include "pmc/kernels.hpp"

namespace k = pmc::kernels;

namespace {

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

volatile double sink;

void row(const char* name, double serial, double parallel, double diff) {
  std::printf("%-26s %12.3e %12.3e %8.2fx   |diff| %.1e\n", name, serial, parallel, serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  const int threads = omp_get_max_threads();
  std::printf("threads %d, best of %d\n", threads, repeats);
  std::printf("%-26s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

  const int n = 4'000'000;
  std::vector<double> u(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double r = static_cast<double>(i) / n;
    u[i] = std::sqrt(4.0 - r * r) - std::sqrt(3.0) - 0.2;
  }
  double a = 0, b = 0;
  const double ts = best_of(repeats, [&] { sink = a = k::serial::radial_area(u); });
  const double tp = best_of(repeats, [&] { sink = b = k::parallel::radial_area(u); });
  row("radial_area n=4e6", ts, tp, std::abs(a - b));

  const int m = 2048;
  std::vector<double> grid(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) grid[static_cast<std::size_t>(i) * m + j] = std::sin(0.01 * i) * std::cos(0.013 * j);
  const double gs = best_of(repeats, [&] { sink = a = k::serial::grid_area(m, grid); });
  const double gp = best_of(repeats, [&] { sink = b = k::parallel::grid_area(m, grid); });
  row("grid_area m=2048", gs, gp, std::abs(a - b));

  std::vector<std::vector<double>> profiles(256, std::vector<double>(4001));
  for (std::size_t p = 0; p < profiles.size(); ++p)
    for (int i = 0; i <= 4000; ++i) profiles[p][i] = 0.1 * std::sin(0.001 * (p + 1) * i) - 0.3;
  std::vector<double> es, ep;
  const double bs = best_of(repeats, [&] { es = k::serial::batch_energy(1.0, profiles); });
  const double bp = best_of(repeats, [&] { ep = k::parallel::batch_energy(1.0, profiles); });
  double worst = 0;
  for (std::size_t p = 0; p < es.size(); ++p) worst = std::max(worst, std::abs(es[p] - ep[p]));
  row("batch_energy 256 x 4001", bs, bp, worst);

  pmc::experiment::SweepOptions opt;
  opt.n = 500;
  opt.steps = 16;
  std::vector<pmc::experiment::SweepRow> one, many;
  omp_set_num_threads(1);
  const double ss = best_of(1, [&] { one = pmc::experiment::sweep(opt); });
  omp_set_num_threads(threads);
  const double sp = best_of(1, [&] { many = pmc::experiment::sweep(opt); });
  worst = 0;
  for (std::size_t p = 0; p < one.size(); ++p)
    worst = std::max(worst, std::abs(one[p].energy.total - many[p].energy.total));
  row("sweep 16 eps, n=500", ss, sp, worst);
}
