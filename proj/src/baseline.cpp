#include "accrete/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "accrete/config.hpp"
#include "accrete/errors.hpp"

namespace accrete {

BaselineSolution solve_baseline_first(const BeamConfig& config, double p, double h0, double m1) {
  config.validate();
  if (!(h0 > 0.0)) throw DomainError("h0 must be positive");
  if (p == 0.0 || !std::isfinite(p)) throw DomainError("uniform load p must be nonzero and finite");
  const double len = config.length;
  const double m0 = h0 * len;
  if (!(m1 > m0)) {
    throw PreconditionError("solve_baseline_first: m1 = " + format_number(m1) +
                            " does not exceed m0 = " + format_number(m0) + ", nothing grows");
  }

  // Root with x_hat >= 0.
  const double root = m1 + std::sqrt(m1 * m1 - m0 * m0);
  const double slope = root / (len * len);  // (9 p^2 / (E lambda))^(1/4)
  const double x_hat = (1.0 - m0 / root) * len;

  BaselineSolution sol;
  sol.lambda = 9.0 * p * p / (config.young_modulus * std::pow(slope, 4));
  sol.x_hat = x_hat;
  sol.mass = m1;
  std::vector<double> h(config.n_cells);
  sol.growth_set.resize(config.n_cells);
  for (int j = 0; j < config.n_cells; ++j) {
    const double x = config.cell_center(j);
    const bool grows = x <= x_hat;
    sol.growth_set[j] = grows;
    h[j] = grows ? h0 * root / m0 * (len - x) / len : h0;
  }
  sol.h = HeightField(std::move(h));
  return sol;
}

BaselineSolution solve_baseline_step(const BeamConfig& config, const LoadCase& load,
                                     const HeightField& h_prev, double m_i) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_cells);
  if (h_prev.size() != n) throw PreconditionError("h_prev size does not match n_cells");
  const double delta = config.cell_width();
  const double e = config.young_modulus;
  const double prev_mass = h_prev.mass(delta);
  if (m_i < prev_mass * (1.0 - 1e-12)) {
    throw InfeasibleError("solve_baseline_step: target mass " + format_number(m_i) +
                          " is below the current mass " + format_number(prev_mass));
  }

  // Candidate height a_j * t with t = lambda^(-1/4); the mass is increasing in t.
  const auto moments = moments_at_centers(load, config);
  std::vector<double> a(n);
  double a_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = std::pow(36.0 * moments[j] * moments[j] / e, 0.25);
    a_sum += a[j];
  }

  BaselineSolution sol;
  sol.mass = m_i;
  sol.growth_set.assign(n, false);

  if (m_i <= prev_mass * (1.0 + 1e-14)) {
    // Empty growth set: the smallest lambda keeping every mu_j >= 0.
    double lam = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      lam = std::max(lam, 36.0 * moments[j] * moments[j] / (e * std::pow(h_prev[j], 4)));
    }
    sol.lambda = lam;
    sol.h = h_prev;
    return sol;
  }
  if (a_sum == 0.0) {
    throw PreconditionError("solve_baseline_step: zero bending moment everywhere, growth is undetermined");
  }

  const double target = m_i / delta;
  auto filled = [&](double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::max(h_prev[j], a[j] * t);
    return s;
  };
  double lo = 0.0;
  double hi = target / a_sum;
  while (filled(hi) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (filled(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }

  double t = 0.5 * (lo + hi);
  for (int pass = 0; pass < 3; ++pass) {
    double grow_a = 0.0;
    double fixed = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (a[j] * t > h_prev[j]) {
        grow_a += a[j];
      } else {
        fixed += h_prev[j];
      }
    }
    if (grow_a == 0.0) break;
    const double exact = (target - fixed) / grow_a;
    if (exact == t) break;
    t = exact;
  }

  std::vector<double> h(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double cand = a[j] * t;
    sol.growth_set[j] = cand > h_prev[j];
    h[j] = sol.growth_set[j] ? cand : h_prev[j];
  }
  sol.h = HeightField(std::move(h));
  sol.lambda = 1.0 / std::pow(t, 4);
  return sol;
}

BaselineCertificate baseline_certificate(const BeamConfig& config, const LoadCase& load,
                                         const HeightField& h_prev, double m_i,
                                         const BaselineSolution& sol) {
  BaselineCertificate c;
  const double e = config.young_modulus;
  const auto moments = moments_at_centers(load, config);
  for (std::size_t j = 0; j < sol.h.size(); ++j) {
    const double h = sol.h[j];
    const double q = 36.0 * moments[j] * moments[j] / (e * std::pow(h, 4));
    c.bound_violation = std::max(c.bound_violation, h_prev[j] - h);
    if (sol.growth_set[j]) {
      c.stationarity = std::max(c.stationarity, std::abs(sol.lambda - q) / std::max(sol.lambda, std::numeric_limits<double>::min()));
    } else {
      const double mu = sol.lambda - q;
      c.dual_infeasibility = std::max(c.dual_infeasibility, -mu);
      c.complementarity = std::max(c.complementarity, std::abs(std::max(mu, 0.0) * (h - h_prev[j])));
    }
  }
  c.mass_error = std::abs(sol.h.mass(config.cell_width()) - m_i) / m_i;
  return c;
}

}  // namespace accrete
