#include "accrete/step_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "accrete/config.hpp"
#include "accrete/errors.hpp"

namespace accrete {

Tau::Tau(double value) : value_(value) {
  if (!(value > 0.0)) throw DomainError("tau must be positive or infinite");
}

void StepProblem::validate() const {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_cells);
  if (densities.size() != n || h_prev.size() != n || lower_bound.size() != n) {
    throw PreconditionError("step problem: densities, h_prev and lower_bound need n_cells entries");
  }
  if (!std::isfinite(mass_target) || !(mass_target > 0.0)) {
    throw DomainError("mass target must be positive and finite");
  }
  const double floor_mass = lower_bound.mass(config.cell_width());
  if (mass_mode == MassMode::Equality && floor_mass > mass_target * (1.0 + 1e-12)) {
    throw InfeasibleError("mass target " + format_number(mass_target) +
                          " is below the mass of the lower bound " + format_number(floor_mass));
  }
}

double StepProblem::objective(std::span<const double> h) const {
  const double inv_tau = tau.inverse();
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    sum += densities[j].value(h[j]);
    if (inv_tau != 0.0) {
      const double d = h[j] - h_prev[j];
      sum += 0.5 * inv_tau * d * d;
    }
  }
  return config.cell_width() * sum;
}

void StepProblem::gradient(std::span<const double> h, std::span<double> out) const {
  const double inv_tau = tau.inverse();
  for (std::size_t j = 0; j < h.size(); ++j) {
    out[j] = densities[j].derivative(h[j]) + inv_tau * (h[j] - h_prev[j]);
  }
}

std::vector<double> project_mass_lb(std::span<const double> z, std::span<const double> lb,
                                    double mass, double delta, MassMode mode) {
  if (z.size() != lb.size() || z.empty()) {
    throw PreconditionError("project_mass_lb: z and lb must be non-empty and of equal size");
  }
  if (!(delta > 0.0)) throw DomainError("project_mass_lb: delta must be positive");
  const double target = mass / delta;
  const double lb_sum = std::accumulate(lb.begin(), lb.end(), 0.0);
  const std::size_t n = z.size();
  std::vector<double> h(n);

  if (lb_sum > target + 1e-12 * std::abs(target)) {
    if (mode == MassMode::Equality) {
      throw InfeasibleError("project_mass_lb: mass " + format_number(mass) +
                            " is below delta * sum(lb) = " + format_number(delta * lb_sum));
    }
    throw InfeasibleError("project_mass_lb: lower bound exceeds the mass budget");
  }
  if (mode == MassMode::Equality && lb_sum >= target * (1.0 - 1e-14)) {
    // No room above the bound, up to rounding in the sums.
    return std::vector<double>(lb.begin(), lb.end());
  }

  if (mode == MassMode::Inequality) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      h[j] = std::max(lb[j], z[j]);
      sum += h[j];
    }
    if (sum <= target) return h;
  }

  auto filled = [&](double shift) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::max(lb[j], z[j] - shift);
    return s;
  };

  // filled() is nonincreasing in the shift; bracket the root.
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) hi = std::max(hi, z[j] - lb[j]);
  double lo = (std::accumulate(z.begin(), z.end(), 0.0) - target) / static_cast<double>(n);
  if (lo > hi) lo = hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (filled(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  // Close on the free set identified by the bracket.
  double shift = 0.5 * (lo + hi);
  for (int pass = 0; pass < 3; ++pass) {
    double free_sum = 0.0;
    double fixed_sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (z[j] - shift > lb[j]) {
        free_sum += z[j];
        ++n_free;
      } else {
        fixed_sum += lb[j];
      }
    }
    if (n_free == 0) break;
    const double exact = (free_sum + fixed_sum - target) / static_cast<double>(n_free);
    if (exact == shift) break;
    shift = exact;
  }
  for (std::size_t j = 0; j < n; ++j) h[j] = std::max(lb[j], z[j] - shift);
  return h;
}

namespace {

struct Classified {
  std::vector<char> free;
  std::size_t n_free = 0;
};

Classified classify(const StepProblem& p, std::span<const double> h, double tol_active) {
  Classified c;
  c.free.resize(h.size());
  for (std::size_t j = 0; j < h.size(); ++j) {
    c.free[j] = h[j] > p.lower_bound[j] + tol_active;
    c.n_free += c.free[j] ? 1 : 0;
  }
  return c;
}

Multipliers multipliers_from_gradient(const StepProblem& p, std::span<const double> h,
                                      std::span<const double> g, const SolverOptions& opt) {
  const auto cls = classify(p, h, opt.tol_active);
  Multipliers m;
  const double mass = p.config.cell_width() * std::accumulate(h.begin(), h.end(), 0.0);
  const bool mass_active = p.mass_mode == MassMode::Equality ||
                           mass >= p.mass_target * (1.0 - opt.tol_mass);

  if (mass_active) {
    if (cls.n_free > 0) {
      double s = 0.0;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (cls.free[j]) s += g[j];
      }
      m.lambda = -s / static_cast<double>(cls.n_free);
    } else {
      m.lambda = -*std::min_element(g.begin(), g.end());
      m.degenerate = true;
    }
    if (p.mass_mode == MassMode::Inequality) m.lambda = std::max(0.0, m.lambda);
  }

  m.mu.assign(h.size(), 0.0);
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (cls.free[j]) continue;
    const double v = g[j] + m.lambda;
    m.mu[j] = std::max(0.0, v);
    m.dual_infeasibility = std::max(m.dual_infeasibility, -v);
  }
  return m;
}

double stationarity(const StepProblem& p, std::span<const double> h, std::span<const double> g,
                    double lambda, double tol_active) {
  double r = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] > p.lower_bound[j] + tol_active) r = std::max(r, std::abs(g[j] + lambda));
  }
  return r;
}

// Newton on the free-set KKT system g_j(h_j) + lambda = 0, sum(h) = target,
// with bound cells held fixed. Returns the number of iterations taken, or 0
// if the free set would change, the reduced Hessian degenerates or the
// iteration does not settle.
int newton_polish(const StepProblem& p, std::vector<double>& h, std::vector<double>& g,
                   const SolverOptions& opt, double lambda, bool mass_active) {
  const auto n = h.size();
  const double delta = p.config.cell_width();
  const auto cls = classify(p, h, opt.tol_active);
  if (cls.n_free == 0) return 0;
  const double target = p.mass_target / delta;
  std::vector<double> x = h;
  std::vector<double> gx = g;
  std::vector<double> d(n, 0.0);
  int used = 0;
  bool settled = false;
  for (int it = 0; it < 12 && !settled; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!cls.free[j]) continue;
      const double e = 1e-5 * std::max(x[j], 1.0);
      const double up = p.densities[j].derivative(x[j] + e) + p.tau.inverse() * (x[j] + e - p.h_prev[j]);
      d[j] = (up - gx[j]) / e;
      if (!(std::abs(d[j]) > 1e-300)) return 0;
    }
    double rho = target - std::accumulate(x.begin(), x.end(), 0.0);
    double sum_r = 0.0;
    double sum_inv = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (!cls.free[j]) continue;
      sum_r += (gx[j] + lambda) / d[j];
      sum_inv += 1.0 / d[j];
    }
    double dlam = 0.0;
    if (mass_active) {
      if (sum_inv == 0.0) return 0;
      dlam = -(rho + sum_r) / sum_inv;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!cls.free[j]) continue;
      x[j] -= (gx[j] + lambda + dlam) / d[j];
      if (!(x[j] > p.lower_bound[j] + opt.tol_active)) return 0;
    }
    lambda += dlam;
    p.gradient(x, gx);
    ++used;
    settled = stationarity(p, x, gx, lambda, opt.tol_active) <= 0.1 * opt.tol_kkt;
  }
  if (!settled) {
    // Rounding can stall short of 0.1 * tol; the caller judges the result.
    if (!(stationarity(p, x, gx, lambda, opt.tol_active) <= opt.tol_kkt)) return 0;
  }
  h.swap(x);
  g.swap(gx);
  return used;
}

}  // namespace

double kkt_residual(const StepProblem& problem, const HeightField& h, double lambda) {
  std::vector<double> g(h.size());
  problem.gradient(h.values(), g);
  return stationarity(problem, h.values(), g, lambda, SolverOptions{}.tol_active);
}

Multipliers estimate_multipliers(const StepProblem& problem, std::span<const double> h,
                                 const SolverOptions& options) {
  std::vector<double> g(h.size());
  problem.gradient(h, g);
  return multipliers_from_gradient(problem, h, g, options);
}

StepSolution minimize_step(const StepProblem& problem, const SolverOptions& options) {
  problem.validate();
  const auto n = problem.h_prev.size();
  const double delta = problem.config.cell_width();
  const auto lb = problem.lower_bound.values();
  const double mass = problem.mass_target;

  auto project = [&](std::span<const double> z) {
    return project_mass_lb(z, lb, mass, delta, problem.mass_mode);
  };

  std::vector<double> h = project(problem.h_prev.values());
  std::vector<double> g(n), g_next(n), trial(n), z(n);
  problem.gradient(h, g);
  double f = problem.objective(h);

  StepSolution sol;
  if (options.record_history) sol.history.push_back(f);

  auto finish = [&](const Multipliers& mult, double stat, int pg_iters, int newton_iters) {
    sol.h = HeightField(h);
    sol.lambda = mult.lambda;
    sol.mu = mult.mu;
    sol.objective = f;
    sol.kkt_residual = stat;
    sol.dual_infeasibility = mult.dual_infeasibility;
    sol.iterations = pg_iters;
    sol.newton_iterations = newton_iters;
    sol.degenerate = mult.degenerate;
    return sol;
  };

  // Continuation: follow the KKT branch through the starting point with
  // Newton on its free set. On nonconvex densities this may end on a saddle of
  // the step problem; that is still a KKT point, and it is the one that varies
  // smoothly from step to step.
  if (options.continuation) {
    auto m0 = multipliers_from_gradient(problem, h, g, options);
    std::vector<double> hn = h;
    std::vector<double> gn = g;
    const bool mass_active = problem.mass_mode == MassMode::Equality || m0.lambda > 0.0;
    const int used = newton_polish(problem, hn, gn, options, m0.lambda, mass_active);
    if (used > 0) {
      const auto mn = multipliers_from_gradient(problem, hn, gn, options);
      const double sn = stationarity(problem, hn, gn, mn.lambda, options.tol_active);
      if (std::max(sn, mn.dual_infeasibility) <= options.tol_kkt) {
        h.swap(hn);
        g.swap(gn);
        f = problem.objective(h);
        if (options.record_history) sol.history.push_back(f);
        return finish(mn, sn, 0, used);
      }
    }
  }

  const double g_inf = std::abs(*std::max_element(g.begin(), g.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));
  double alpha = 0.1 * problem.h_prev.max() / std::max(g_inf, 1e-12);
  constexpr double kAlphaMin = 1e-14;
  constexpr double kAlphaMax = 1e14;
  constexpr double kArmijo = 1e-4;

  std::vector<double> best = h;
  double best_residual = std::numeric_limits<double>::infinity();
  const double cap = options.max_move > 0.0 ? options.max_move * problem.h_prev.max()
                                             : std::numeric_limits<double>::infinity();
  int next_polish = 0;
  int polish_iters = 0;
  bool stalled = false;

  for (int it = 0; it <= options.max_iter; ++it) {
    auto mult = multipliers_from_gradient(problem, h, g, options);
    double stat = stationarity(problem, h, g, mult.lambda, options.tol_active);
    double residual = std::max(stat, mult.dual_infeasibility);
    if (residual > options.tol_kkt && (stalled || (residual < 1e3 * options.tol_kkt && it >= next_polish))) {
      next_polish = it + 10;
      std::vector<double> hp = h;
      std::vector<double> gp = g;
      const bool mass_active = problem.mass_mode == MassMode::Equality || mult.lambda > 0.0;
      const int used = newton_polish(problem, hp, gp, options, mult.lambda, mass_active);
      if (used > 0) {
        const auto mp = multipliers_from_gradient(problem, hp, gp, options);
        const double sp = stationarity(problem, hp, gp, mp.lambda, options.tol_active);
        const double fp = problem.objective(hp);
        if (std::max(sp, mp.dual_infeasibility) < residual &&
            fp <= f + 1e-10 * (1.0 + std::abs(f))) {
          h.swap(hp);
          g.swap(gp);
          f = fp;
          polish_iters += used;
          mult = mp;
          stat = sp;
          residual = std::max(sp, mp.dual_infeasibility);
        }
      }
    }
    if (residual < best_residual) {
      best_residual = residual;
      best = h;
    }
    if (stalled && residual > options.tol_kkt) break;
    if (residual <= options.tol_kkt) return finish(mult, stat, it, polish_iters);
    if (it == options.max_iter) break;

    // Backtrack along the projection arc.
    const double slack = 1e-13 * (1.0 + std::abs(f));
    double step = alpha;
    bool accepted = false;
    double f_next = f;
    for (int bt = 0; bt < 60; ++bt) {
      for (std::size_t j = 0; j < n; ++j) z[j] = h[j] - step * g[j];
      trial = project(z);
      double move = 0.0;
      for (std::size_t j = 0; j < n; ++j) move = std::max(move, std::abs(trial[j] - h[j]));
      if (move > cap) {
        step *= std::min(0.5, cap / move);
        continue;
      }
      double dd = 0.0;
      for (std::size_t j = 0; j < n; ++j) dd += g[j] * (trial[j] - h[j]);
      dd *= delta;
      f_next = problem.objective(trial);
      if (f_next <= f + kArmijo * dd + slack) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Rounding has swamped the decrease; give the Newton polish one try.
      stalled = true;
      continue;
    }

    problem.gradient(trial, g_next);
    double sy = 0.0;
    double ss = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double s = trial[j] - h[j];
      sy += s * (g_next[j] - g[j]);
      ss += s * s;
    }
    if (ss == 0.0) {
      // The projected step is null: h is a fixed point of the projection map.
      alpha = std::min(kAlphaMax, 2.0 * step);
    } else {
      alpha = sy > 0.0 ? std::clamp(ss / sy, kAlphaMin, kAlphaMax) : std::min(kAlphaMax, 10.0 * step);
    }
    h.swap(trial);
    g.swap(g_next);
    f = f_next;
    if (options.record_history) sol.history.push_back(f);
  }

  throw ConvergenceError("minimize_step: no KKT point within tolerance after " +
                             std::to_string(options.max_iter) + " iterations (best residual " +
                             format_number(best_residual) + ")",
                         std::move(best), best_residual);
}

}  // namespace accrete
