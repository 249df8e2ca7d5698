#include "pmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pmc/errors.hpp"
#include "pmc/kernels.hpp"

namespace pmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Optimization variables for one problem mode, with box bounds.
//   SingleSheet     x_i = u_i,                       unbounded
//   SymmetricStack  x_i = u_i,                       x_i <= 0, energy doubled
//   TwoMembrane     x_{2i} = (u1_i + u2_i)/2 = s_i,  x_{2i+1} = (u2_i - u1_i)/2 = t_i >= 0
// Only nodes 0..n-1 are free; node n carries the Dirichlet values.
class Formulation {
 public:
  explicit Formulation(const StackProblem& p)
      : p_(p), n_(p.n), weights_(kernels::node_volume_weights(p.n)) {
    const int nv = size();
    lo_.assign(nv, -kInf);
    hi_.assign(nv, kInf);
    scale_.resize(nv);
    for (int i = 0; i < n_; ++i) {
      switch (p_.mode) {
        case StackMode::SingleSheet:
          scale_[i] = weights_[i];
          break;
        case StackMode::SymmetricStack:
          scale_[i] = 2.0 * weights_[i];
          hi_[i] = 0.0;
          break;
        case StackMode::TwoMembrane:
          scale_[2 * i] = scale_[2 * i + 1] = 2.0 * weights_[i];
          lo_[2 * i + 1] = 0.0;
          break;
      }
    }
    u1_.resize(n_ + 1);
    u2_.resize(n_ + 1);
    g1_.resize(n_ + 1);
    g2_.resize(n_ + 1);
  }

  int size() const { return membrane() ? 2 * n_ : n_; }
  bool membrane() const { return p_.mode == StackMode::TwoMembrane; }
  double lo(int k) const { return lo_[k]; }
  double hi(int k) const { return hi_[k]; }
  double scale(int k) const { return scale_[k]; }

  double clamp(int k, double v) const { return std::clamp(v, lo_[k], hi_[k]); }

  void project(std::vector<double>& x) const {
    for (int k = 0; k < size(); ++k) x[k] = clamp(k, x[k]);
  }

  double infeasibility(const std::vector<double>& x) const {
    double worst = 0.0;
    for (int k = 0; k < size(); ++k)
      worst = std::max({worst, x[k] - hi_[k], lo_[k] - x[k]});
    return worst;
  }

  std::vector<double> from_sheets(std::span<const double> lower, std::span<const double> upper) const {
    std::vector<double> x(size());
    for (int i = 0; i < n_; ++i) {
      if (membrane()) {
        x[2 * i] = 0.5 * (lower[i] + upper[i]);
        x[2 * i + 1] = 0.5 * (upper[i] - lower[i]);
      } else {
        x[i] = lower[i];
      }
    }
    return x;
  }

  // Fills u1_ (and u2_ for the membrane) from x.
  void unpack(const std::vector<double>& x) const {
    for (int i = 0; i < n_; ++i) {
      if (membrane()) {
        u1_[i] = x[2 * i] - x[2 * i + 1];
        u2_[i] = x[2 * i] + x[2 * i + 1];
      } else {
        u1_[i] = x[i];
      }
    }
    u1_[n_] = -p_.eps;
    u2_[n_] = p_.eps;
  }

  const std::vector<double>& lower_sheet() const { return u1_; }
  const std::vector<double>& upper_sheet() const { return u2_; }

  double energy(const std::vector<double>& x) const {
    unpack(x);
    const double c = p_.c;
    const double e1 = kernels::serial::radial_area(u1_) - c * kernels::serial::radial_volume_below(u1_);
    switch (p_.mode) {
      case StackMode::SingleSheet:
        return e1;
      case StackMode::SymmetricStack:
        return 2.0 * e1;
      case StackMode::TwoMembrane:
        return e1 + kernels::serial::radial_area(u2_) - c * kernels::serial::radial_volume_above(u2_);
    }
    return e1;
  }

  // energy(xt) - energy(x) without cancellation: per cell the area change is
  // w (s'^2 - s^2) / (sqrt(1+s'^2) + sqrt(1+s^2)), the volume change is linear.
  // Near the minimizer the decrease of a step is far below one ulp of the
  // energy, and a plain difference of two energies cannot see it.
  double energy_change(const std::vector<double>& x, const std::vector<double>& xt) const {
    unpack(x);
    const std::vector<double> a1 = u1_, a2 = u2_;
    unpack(xt);
    const double h = 1.0 / n_;
    kernels::CompensatedSum sum;
    auto sheet = [&](const std::vector<double>& before, const std::vector<double>& after, double sign) {
      for (int i = 0; i < n_; ++i) {
        const double s0 = (before[i + 1] - before[i]) / h;
        const double s1 = (after[i + 1] - after[i]) / h;
        const double ds = ((after[i + 1] - before[i + 1]) - (after[i] - before[i])) / h;
        const double w = 2.0 * std::numbers::pi * (i + 0.5) * h * h;
        sum.add(w * ds * (s0 + s1) / (std::sqrt(1.0 + s1 * s1) + std::sqrt(1.0 + s0 * s0)));
        sum.add(-sign * p_.c * weights_[i] * (after[i] - before[i]));
      }
    };
    sheet(a1, u1_, 1.0);
    if (membrane()) sheet(a2, u2_, -1.0);
    return p_.mode == StackMode::SymmetricStack ? 2.0 * sum.value() : sum.value();
  }

  void gradient(const std::vector<double>& x, std::vector<double>& g) const {
    unpack(x);
    const double c = p_.c;
    kernels::serial::radial_area_gradient(u1_, g1_);
    for (int i = 0; i < n_; ++i) g1_[i] -= c * weights_[i];
    if (membrane()) {
      kernels::serial::radial_area_gradient(u2_, g2_);
      for (int i = 0; i < n_; ++i) g2_[i] += c * weights_[i];
    }
    g.resize(size());
    for (int i = 0; i < n_; ++i) {
      switch (p_.mode) {
        case StackMode::SingleSheet:
          g[i] = g1_[i];
          break;
        case StackMode::SymmetricStack:
          g[i] = 2.0 * g1_[i];
          break;
        case StackMode::TwoMembrane:
          g[2 * i] = g1_[i] + g2_[i];
          g[2 * i + 1] = g2_[i] - g1_[i];
          break;
      }
    }
  }

  Eigen::SparseMatrix<double> hessian(const std::vector<double>& x) const {
    unpack(x);
    std::vector<double> d1(n_ + 1), o1(n_), d2(n_ + 1), o2(n_);
    kernels::serial::radial_area_hessian(u1_, d1, o1);
    if (membrane()) kernels::serial::radial_area_hessian(u2_, d2, o2);

    std::vector<Eigen::Triplet<double>> t;
    t.reserve(8 * n_);
    auto add_sheet_entry = [&](int i, int j, double a1, double a2) {
      if (!membrane()) {
        const double f = p_.mode == StackMode::SymmetricStack ? 2.0 : 1.0;
        t.emplace_back(i, j, f * a1);
        return;
      }
      // x = (s, t) with u1 = s - t, u2 = s + t.
      t.emplace_back(2 * i, 2 * j, a1 + a2);
      t.emplace_back(2 * i, 2 * j + 1, a2 - a1);
      t.emplace_back(2 * i + 1, 2 * j, a2 - a1);
      t.emplace_back(2 * i + 1, 2 * j + 1, a1 + a2);
    };
    for (int i = 0; i < n_; ++i) {
      add_sheet_entry(i, i, d1[i], d2[i]);
      if (i + 1 < n_) {
        add_sheet_entry(i, i + 1, o1[i], o2[i]);
        add_sheet_entry(i + 1, i, o1[i], o2[i]);
      }
    }
    Eigen::SparseMatrix<double> h(size(), size());
    h.setFromTriplets(t.begin(), t.end());
    return h;
  }

  // Projected gradient, measured per unit volume weight.
  double kkt_residual(const std::vector<double>& x, const std::vector<double>& g) const {
    double worst = 0.0;
    for (int k = 0; k < size(); ++k) {
      double r = g[k] / scale_[k];
      // A descent step of -r is blocked when it would leave the box.
      if (x[k] >= hi_[k] && r < 0.0) r = 0.0;
      if (x[k] <= lo_[k] && r > 0.0) r = 0.0;
      worst = std::max(worst, std::abs(r));
    }
    return worst;
  }

 private:
  const StackProblem& p_;
  int n_;
  std::vector<double> weights_;
  std::vector<double> lo_, hi_, scale_;
  mutable std::vector<double> u1_, u2_, g1_, g2_;
};

class BoundConstrainedSolver {
 public:
  BoundConstrainedSolver(const Formulation& f, const SolverConfig& cfg, double h)
      : f_(f), cfg_(cfg), h2_(h * h) {
    if (!(cfg.grad_tol > 0.0)) throw InvalidArgument("grad_tol must be positive");
    if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  }

  struct Result {
    std::vector<double> x;
    int iterations = 0;
    double kkt = 0.0;
    bool converged = false;
    std::vector<double> trace;
    double max_increase = 0.0;
    double max_infeasibility = 0.0;
  };

  Result run(std::vector<double> x) {
    f_.project(x);
    Result res;
    double energy = f_.energy(x);
    std::vector<double> g;
    f_.gradient(x, g);
    if (cfg_.record_trace) res.trace.push_back(energy);

    // The running energy is advanced by the cancellation-free change, so the
    // trace is exactly as monotone as the accepted steps.
    auto accept = [&](std::vector<double>&& xt, double de) {
      res.max_increase = std::max(res.max_increase, de);
      res.max_infeasibility = std::max(res.max_infeasibility, f_.infeasibility(xt));
      x = std::move(xt);
      energy += de;
      f_.gradient(x, g);
      if (cfg_.record_trace) res.trace.push_back(energy);
    };

    const int warmup = cfg_.active_set_refine ? std::min(cfg_.warmup_iters, cfg_.max_iters)
                                              : cfg_.max_iters;
    double step = h2_;
    int it = 0;

    for (; it < warmup; ++it) {
      res.kkt = f_.kkt_residual(x, g);
      if (res.kkt <= cfg_.grad_tol) break;
      if (cfg_.step_rule == StepRule::FixedStep) {
        auto xt = gradient_point(x, g, cfg_.fixed_step * h2_);
        const double de = f_.energy_change(x, xt);
        accept(std::move(xt), de);
        continue;
      }
      step = std::min(2.0 * step, 1e6 * h2_);
      if (!armijo_gradient_step(x, g, step, accept)) break;
    }

    if (cfg_.active_set_refine) {
      for (; it < cfg_.max_iters; ++it) {
        res.kkt = f_.kkt_residual(x, g);
        if (res.kkt <= cfg_.grad_tol) break;
        if (newton_step(x, g, accept)) continue;
        // Newton direction rejected: fall back to one projected-gradient step.
        step = h2_;
        if (!armijo_gradient_step(x, g, step, accept)) break;
      }
    }

    res.kkt = f_.kkt_residual(x, g);
    res.converged = res.kkt <= cfg_.grad_tol;
    res.iterations = it;
    res.x = std::move(x);
    return res;
  }

 private:
  std::vector<double> gradient_point(const std::vector<double>& x, const std::vector<double>& g,
                                     double step) const {
    std::vector<double> xt(x.size());
    for (int k = 0; k < f_.size(); ++k) xt[k] = f_.clamp(k, x[k] - step * g[k] / f_.scale(k));
    return xt;
  }

  static double directional(const std::vector<double>& g, const std::vector<double>& x,
                            const std::vector<double>& xt) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += g[k] * (xt[k] - x[k]);
    return s;
  }

  template <class Accept>
  bool armijo_gradient_step(const std::vector<double>& x, const std::vector<double>& g,
                            double& step, Accept&& accept) {
    while (step > 1e-16 * h2_) {
      auto xt = gradient_point(x, g, step);
      const double de = f_.energy_change(x, xt);
      const double slope = directional(g, x, xt);
      if (slope < 0.0 && de <= cfg_.armijo_slope * slope) {
        accept(std::move(xt), de);
        return true;
      }
      step *= cfg_.armijo_shrink;
    }
    return false;
  }

  // One projected Newton step: variables near a bound whose gradient pushes
  // into it are moved by a scaled gradient step (and land on the bound); the
  // rest take the Newton step of the reduced Hessian.
  template <class Accept>
  bool newton_step(const std::vector<double>& x, const std::vector<double>& g, Accept&& accept) {
    const int nv = f_.size();
    const auto probe = gradient_point(x, g, h2_);
    double gap = 0.0;
    for (int k = 0; k < nv; ++k) gap = std::max(gap, std::abs(probe[k] - x[k]));
    const double band = std::min(1e-8, gap);

    std::vector<int> free_index(nv, -1);
    std::vector<int> free_vars;
    for (int k = 0; k < nv; ++k) {
      const double r = g[k] / f_.scale(k);
      const bool at_hi = x[k] >= f_.hi(k) - band && r < 0.0;
      const bool at_lo = x[k] <= f_.lo(k) + band && r > 0.0;
      if (!(at_hi || at_lo)) {
        free_index[k] = static_cast<int>(free_vars.size());
        free_vars.push_back(k);
      }
    }

    std::vector<double> dir(nv, 0.0);

    if (!free_vars.empty()) {
      const Eigen::SparseMatrix<double> full = f_.hessian(x);
      std::vector<Eigen::Triplet<double>> t;
      for (int col = 0; col < full.outerSize(); ++col) {
        if (free_index[col] < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator e(full, col); e; ++e) {
          if (free_index[e.row()] >= 0) t.emplace_back(free_index[e.row()], free_index[col], e.value());
        }
      }
      const auto m = static_cast<Eigen::Index>(free_vars.size());
      Eigen::SparseMatrix<double> reduced(m, m);
      reduced.setFromTriplets(t.begin(), t.end());
      Eigen::VectorXd rhs(m);
      for (Eigen::Index j = 0; j < m; ++j) rhs[j] = -g[free_vars[j]];
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(reduced);
      if (ldlt.info() != Eigen::Success) return false;
      const Eigen::VectorXd d = ldlt.solve(rhs);
      if (ldlt.info() != Eigen::Success) return false;
      for (Eigen::Index j = 0; j < m; ++j) dir[free_vars[j]] = d[j];
    }

    double alpha = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, alpha *= cfg_.armijo_shrink) {
      std::vector<double> xt(nv);
      for (int k = 0; k < nv; ++k) {
        if (free_index[k] >= 0)
          xt[k] = f_.clamp(k, x[k] + alpha * dir[k]);
        else
          xt[k] = g[k] < 0.0 ? f_.hi(k) : f_.lo(k);  // snap onto the bound it pushes against
      }
      const double slope = directional(g, x, xt);
      const double de = f_.energy_change(x, xt);
      if (de > cfg_.armijo_slope * std::min(slope, 0.0)) continue;
      // No measurable decrease: take the step only if it improves stationarity.
      if (de < 0.0 || f_.kkt_residual(xt, gradient_at(xt)) < f_.kkt_residual(x, g)) {
        accept(std::move(xt), de);
        return true;
      }
      return false;
    }
    return false;
  }

  std::vector<double> gradient_at(const std::vector<double>& x) const {
    std::vector<double> g;
    f_.gradient(x, g);
    return g;
  }

  const Formulation& f_;
  const SolverConfig& cfg_;
  double h2_;
};

SolveReport finish(const StackProblem& problem, const SolverConfig& cfg, const Formulation& f,
                   BoundConstrainedSolver::Result&& res) {
  f.unpack(res.x);
  RadialProfile lower(f.lower_sheet());
  std::optional<RadialProfile> upper;
  switch (problem.mode) {
    case StackMode::SingleSheet:
      break;
    case StackMode::SymmetricStack:
      upper = lower.reflected();
      break;
    case StackMode::TwoMembrane:
      upper = RadialProfile(f.upper_sheet());
      break;
  }
  SolveReport report{.lower = std::move(lower), .upper = std::move(upper), .energy = {}, .contact = {},
                     .energy_trace = {}};
  report.energy = report.upper ? ah_energy(problem, report.lower, *report.upper)
                               : ah_energy(problem, report.lower);
  report.iterations = res.iterations;
  report.kkt_residual = res.kkt;
  report.converged = res.converged;
  if (report.upper) report.contact = contact_intervals(report.lower, *report.upper, cfg.contact_tol);
  report.energy_trace = std::move(res.trace);
  report.max_energy_increase = res.max_increase;
  report.max_infeasibility = res.max_infeasibility;
  return report;
}

SolveReport run_solver(const StackProblem& problem, const SolverConfig& cfg, std::vector<double> x0) {
  const Formulation f(problem);
  BoundConstrainedSolver solver(f, cfg, 1.0 / problem.n);
  return finish(problem, cfg, f, solver.run(std::move(x0)));
}

void require_mode(const StackProblem& problem, StackMode mode, const char* what) {
  if (problem.mode != mode) throw InvalidArgument(std::string(what) + ": problem has the wrong mode");
}

}  // namespace

RadialProfile initial_guess(const StackProblem& problem) {
  double apex = -problem.eps;
  if (problem.c > 0.0 && problem.c <= 2.0) apex = cap_params(problem.c, problem.eps).apex_height;
  if (problem.mode != StackMode::SingleSheet) apex = std::min(apex, 0.0);
  const double rim = -problem.eps;
  return RadialProfile::sample(problem.n, [&](double r) { return apex + (rim - apex) * r; });
}

std::vector<IndexInterval> contact_intervals(const RadialProfile& lower, const RadialProfile& upper,
                                             double tol) {
  if (lower.n() != upper.n()) throw InvalidArgument("sheets have different grids");
  std::vector<IndexInterval> out;
  for (int i = 0; i <= lower.n(); ++i) {
    if (upper[i] - lower[i] > tol) continue;
    if (!out.empty() && out.back().last == i - 1)
      out.back().last = i;
    else
      out.push_back({i, i});
  }
  return out;
}

SolveReport solve_single_sheet(const StackProblem& problem, const SolverConfig& cfg) {
  return solve_single_sheet(problem, cfg, initial_guess(problem));
}

SolveReport solve_single_sheet(const StackProblem& problem, const SolverConfig& cfg,
                               const RadialProfile& lower0) {
  require_mode(problem, StackMode::SingleSheet, "solve_single_sheet");
  if (problem.c > 2.0)
    throw NonCoercive("single-sheet energy is unbounded below for c > 2");
  if (lower0.n() != problem.n) throw InvalidArgument("initial sheet must match the problem grid");
  auto init = lower0.values();
  return run_solver(problem, cfg, std::vector<double>(init.begin(), init.end() - 1));
}

SolveReport solve_symmetric_stack(const StackProblem& problem, const SolverConfig& cfg) {
  return solve_symmetric_stack(problem, cfg, initial_guess(problem));
}

SolveReport solve_symmetric_stack(const StackProblem& problem, const SolverConfig& cfg,
                                  const RadialProfile& lower0) {
  require_mode(problem, StackMode::SymmetricStack, "solve_symmetric_stack");
  if (lower0.n() != problem.n) throw InvalidArgument("initial sheet must match the problem grid");
  auto init = lower0.values();
  return run_solver(problem, cfg, std::vector<double>(init.begin(), init.end() - 1));
}

SolveReport solve_two_membrane(const StackProblem& problem, const SolverConfig& cfg) {
  require_mode(problem, StackMode::TwoMembrane, "solve_two_membrane");
  const RadialProfile lower = initial_guess(problem);
  return solve_two_membrane(problem, cfg, lower, lower.reflected());
}

SolveReport solve_two_membrane(const StackProblem& problem, const SolverConfig& cfg,
                               const RadialProfile& lower0, const RadialProfile& upper0) {
  require_mode(problem, StackMode::TwoMembrane, "solve_two_membrane");
  if (lower0.n() != problem.n || upper0.n() != problem.n)
    throw InvalidArgument("initial sheets must match the problem grid");
  const Formulation f(problem);
  BoundConstrainedSolver solver(f, cfg, 1.0 / problem.n);
  return finish(problem, cfg, f, solver.run(f.from_sheets(lower0.values(), upper0.values())));
}

SolveReport solve(const StackProblem& problem, const SolverConfig& cfg) {
  switch (problem.mode) {
    case StackMode::SingleSheet:
      return solve_single_sheet(problem, cfg);
    case StackMode::SymmetricStack:
      return solve_symmetric_stack(problem, cfg);
    case StackMode::TwoMembrane:
      return solve_two_membrane(problem, cfg);
  }
  throw InvalidArgument("unknown stack mode");
}

SolveReport solve_from_seed(const StackProblem& problem, const SolverConfig& cfg, std::uint64_t seed) {
  auto [lower, upper] = random_initial_pair(problem, seed);
  switch (problem.mode) {
    case StackMode::SingleSheet:
      return solve_single_sheet(problem, cfg, lower);
    case StackMode::SymmetricStack:
      return solve_symmetric_stack(problem, cfg, lower);
    case StackMode::TwoMembrane:
      return solve_two_membrane(problem, cfg, lower, upper);
  }
  throw InvalidArgument("unknown stack mode");
}

std::pair<RadialProfile, RadialProfile> random_initial_pair(const StackProblem& problem,
                                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-0.3, 0.3);
  auto random_sheet = [&](double rim) {
    // A few low modes vanishing at the rim, on top of the flat sheet.
    std::vector<double> a(4);
    for (auto& x : a) x = amp(rng);
    return RadialProfile::sample(problem.n, [&](double r) {
      double z = rim;
      for (std::size_t k = 0; k < a.size(); ++k)
        z += a[k] * std::cos((k + 0.5) * std::numbers::pi * r);
      return std::clamp(z, -0.99, 0.99);
    });
  };
  RadialProfile lower = random_sheet(-problem.eps);
  RadialProfile upper = random_sheet(problem.eps);
  std::vector<double> lo(lower.values().begin(), lower.values().end());
  std::vector<double> hi(upper.values().begin(), upper.values().end());
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (problem.mode == StackMode::SymmetricStack) lo[i] = std::min(lo[i], 0.0);
    if (lo[i] > hi[i]) lo[i] = hi[i] = 0.5 * (lo[i] + hi[i]);
  }
  lo.back() = -problem.eps;
  hi.back() = problem.eps;
  return {RadialProfile(std::move(lo)), RadialProfile(std::move(hi))};
}

double shooting_oracle(double c, double eps, double quad_tol) {
  if (!(c > 0.0)) throw InvalidArgument("shooting oracle needs c > 0");
  if (!(eps > 0.0)) throw InvalidArgument("shooting oracle needs eps > 0");
  if (eps >= touching_eps(c)) throw NoContact("sheets stay disjoint for eps >= touching_eps(c)");

  // Height drop from the free boundary r* to the rim, minus eps. Negative
  // when r* is too small (the sheet would overshoot the rim value).
  auto mismatch = [&](double rs) {
    auto slope = [&](double r) {
      const double q = -0.5 * c * (r * r - rs * rs) / r;
      return q / std::sqrt(1.0 - q * q);
    };
    const double drop = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        slope, rs, 1.0, 20, quad_tol);
    return drop + eps;
  };

  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mismatch(mid) < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace pmc
