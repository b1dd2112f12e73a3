#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing in here calls into the library: every value is rebuilt from the
// balance equations, raw polynomial forms, brute force or quadrature.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace oracle {

// Five-point Gauss-Legendre rule, exact for polynomials up to degree 9.
template <typename R, typename Fn>
R integrate(const Fn& fn, R a, R b) {
  static const R node[5] = {0.0L, -0.538469310105683091036314420700L, 0.538469310105683091036314420700L,
                            -0.906179845938663992797626878299L, 0.906179845938663992797626878299L};
  static const R weight[5] = {0.568888888888888888888888888889L, 0.478628670499366468041291514836L,
                              0.478628670499366468041291514836L, 0.236926885056189087514264040720L,
                              0.236926885056189087514264040720L};
  const R mid = (a + b) / 2;
  const R half = (b - a) / 2;
  R s = 0;
  for (int k = 0; k < 5; ++k) s += weight[k] * fn(mid + half * node[k]);
  return half * s;
}

template <typename R = double>
struct Layer {
  R lo;
  R hi;
  R eps_p;
  R kappa_p;
};

template <typename R = double>
struct Strain {
  R eps;
  R kappa;
};

// Force and moment balance of a section of height h made of the original
// material plus prestrained layers. The stress is E (eps + y kappa - e_p(y));
// integrals by quadrature, 2x2 system by Cramer.
template <typename R>
Strain<R> section(R h, const std::vector<Layer<R>>& layers, R moment, R young) {
  const R a0 = integrate<R>([](R) { return R(1); }, 0, h);
  const R a1 = integrate<R>([](R y) { return y; }, 0, h);
  const R a2 = integrate<R>([](R y) { return y * y; }, 0, h);
  R p0 = 0;
  R p1 = 0;
  for (const auto& l : layers) {
    if (l.hi <= l.lo) continue;
    p0 += integrate<R>([&](R y) { return l.eps_p + y * l.kappa_p; }, l.lo, l.hi);
    p1 += integrate<R>([&](R y) { return y * (l.eps_p + y * l.kappa_p); }, l.lo, l.hi);
  }
  // eps a0 + kappa a1 = p0 ; eps a1 + kappa a2 = p1 - M / E
  const R r1 = p1 - moment / young;
  const R det = a0 * a2 - a1 * a1;
  return {(p0 * a2 - a1 * r1) / det, (a0 * r1 - a1 * p0) / det};
}

inline Strain<double> section(double h, const std::vector<Layer<double>>& layers, double moment,
                              double young) {
  return section<double>(h, layers, moment, young);
}

// Integral over the section of E e^2 with e = eps + y kappa.
template <typename R>
R compliance_density(Strain<R> s, R h, R young) {
  return integrate<R>([&](R y) { return young * (s.eps + y * s.kappa) * (s.eps + y * s.kappa); }, 0, h);
}

// Density of a cell whose column is h_0..h_{S-1} (`below`) with a new surface
// at h and one prestrain per layer above h_0. Layer k spans
// [h_{k-1}, min_{j>=k} h_j], so a surface below old layers trims them.
template <typename R>
R column_density(const std::vector<R>& below, const std::vector<std::pair<R, R>>& pre, R h, R moment,
                 R young) {
  std::vector<R> col = below;
  col.push_back(h);
  std::vector<Layer<R>> layers;
  for (std::size_t k = 1; k < col.size(); ++k) {
    R top = col[k];
    for (std::size_t j = k; j < col.size(); ++j) top = std::min(top, col[j]);
    layers.push_back({col[k - 1], std::max(col[k - 1], top), pre[k - 1].first, pre[k - 1].second});
  }
  return compliance_density<R>(section<R>(h, layers, moment, young), h, young);
}

// Central difference of column_density carried out in long double, so the
// reference slope keeps its digits even where the density is a small
// remainder of large cancelling terms.
inline double column_slope(const std::vector<double>& below, const std::vector<std::pair<double, double>>& pre,
                           double h, double moment, double young) {
  using LD = long double;
  const std::vector<LD> b(below.begin(), below.end());
  std::vector<std::pair<LD, LD>> p;
  for (const auto& [e, k] : pre) p.emplace_back(e, k);
  const LD step = 1e-6L * std::max<LD>(h, 1);
  const auto c = [&](LD x) { return column_density<LD>(b, p, x, moment, young); };
  return static_cast<double>((c(LD(h) + step) - c(LD(h) - step)) / (2 * step));
}

// Raw (expanded) dimensionless forms, s = 1 + 2 eta or 1 + 3 mu.
inline double f_raw(double eta, double x) {
  const double s = 1.0 + 2.0 * eta;
  return x - 2.0 + 4.0 / x - 6.0 * s / (x * x) + 3.0 * s * s / (x * x * x);
}
inline double f_first_raw(double eta, double x) {
  const double s = 1.0 + 2.0 * eta;
  return 1.0 - 4.0 / (x * x) + 12.0 * s / std::pow(x, 3) - 9.0 * s * s / std::pow(x, 4);
}
inline double f_second_raw(double eta, double x) {
  const double s = 1.0 + 2.0 * eta;
  return 8.0 / std::pow(x, 3) - 36.0 * s / std::pow(x, 4) + 36.0 * s * s / std::pow(x, 5);
}
inline double g_raw(double mu, double x) {
  const double s = 1.0 + 3.0 * mu;
  return 4.0 * s * s / (3.0 * x * x * x) - (2.0 - x * x * x + 6.0 * mu) / 3.0 - 2.0 * s / (x * x) +
         1.0 / x;
}
inline double g_second_raw(double mu, double x) {
  const double s = 1.0 + 3.0 * mu;
  return 2.0 * x + 16.0 * s * s / std::pow(x, 5) - 12.0 * s / std::pow(x, 4) + 2.0 / std::pow(x, 3);
}

template <typename R, typename Fn>
R central_difference(const Fn& fn, R x, R step) {
  return (fn(x + step) - fn(x - step)) / (2 * step);
}

// Euclidean projection onto {delta sum h = mass, h >= lb} by enumerating every
// active set and keeping the closest feasible candidate.
inline std::vector<double> project_bruteforce(const std::vector<double>& z,
                                              const std::vector<double>& lb, double mass,
                                              double delta) {
  const std::size_t n = z.size();
  const double target = mass / delta;
  std::vector<double> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<double> h(n);
    double fixed = 0.0;
    double free_z = 0.0;
    int n_free = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (mask & (1u << j)) {
        fixed += lb[j];
      } else {
        free_z += z[j];
        ++n_free;
      }
    }
    if (n_free == 0) {
      if (std::abs(fixed - target) > 1e-12 * target) continue;
    }
    const double shift = n_free > 0 ? (free_z - (target - fixed)) / n_free : 0.0;
    bool ok = true;
    for (std::size_t j = 0; j < n; ++j) {
      h[j] = (mask & (1u << j)) ? lb[j] : z[j] - shift;
      if (h[j] < lb[j] - 1e-14) ok = false;
    }
    if (!ok) continue;
    double dist = 0.0;
    for (std::size_t j = 0; j < n; ++j) dist += (h[j] - z[j]) * (h[j] - z[j]);
    if (dist < best_dist) {
      best_dist = dist;
      best = h;
    }
  }
  return best;
}

struct GridResult {
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> h;
};

// Exhaustive search over h = lb + pitch * k with nonnegative integers k that
// sum to `units`, minimizing delta * sum_j c_j(h_j).
inline GridResult grid_search(const std::vector<std::function<double(double)>>& density,
                              const std::vector<double>& lb, int units, double pitch,
                              double delta) {
  const std::size_t n = lb.size();
  GridResult best;
  std::vector<int> k(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t j, int left) {
    if (j + 1 == n) {
      k[j] = left;
      double obj = 0.0;
      std::vector<double> h(n);
      for (std::size_t i = 0; i < n; ++i) {
        h[i] = lb[i] + pitch * k[i];
        obj += delta * density[i](h[i]);
      }
      if (obj < best.objective) {
        best.objective = obj;
        best.h = h;
      }
      return;
    }
    for (int v = 0; v <= left; ++v) {
      k[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, units);
  return best;
}

// First growth step from constant h0 under a uniform load, from the
// continuous KKT system: h(x) = h0 k (l - x) / l on [0, x_hat], h0 beyond.
struct FirstStep {
  double slope_factor;
  double x_hat;
  double lambda;
};

inline FirstStep first_step(double length, double young, double p, double h0, double m1) {
  const double m0 = h0 * length;
  const double k = (m1 + std::sqrt(m1 * m1 - m0 * m0)) / m0;
  // On the growth set 36 M^2 / (E h^4) = lambda with M = p (l - x)^2 / 2.
  const double h_clamp = h0 * k;
  const double m_clamp = 0.5 * p * length * length;
  return {k, length * (1.0 - 1.0 / k), 36.0 * m_clamp * m_clamp / (young * std::pow(h_clamp, 4))};
}

inline double first_step_height(const FirstStep& s, double length, double h0, double x) {
  return x <= s.x_hat ? h0 * s.slope_factor * (length - x) / length : h0;
}

// Tip deflection of a uniform cantilever of height h under a uniform load:
// w'' = 12 M / (E h^3), M = p (l - x)^2 / 2, clamped at x = 0.
inline double tip_deflection_uniform(double length, double young, double h, double p) {
  const double c = 6.0 * p / (young * h * h * h);
  return c * std::pow(length, 4) / 4.0;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), std::numeric_limits<double>::min());
}

}  // namespace oracle
