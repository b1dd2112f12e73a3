#include "accrete/beam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accrete/config.hpp"
#include "accrete/errors.hpp"
#include "layers.hpp"

namespace accrete {

void BeamConfig::validate() const {
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw DomainError("beam length must be positive, got " + format_number(length));
  }
  if (!(young_modulus > 0.0) || !std::isfinite(young_modulus)) {
    throw DomainError("Young's modulus must be positive, got " + format_number(young_modulus));
  }
  if (n_cells < 1) {
    throw DomainError("n_cells must be at least 1, got " + std::to_string(n_cells));
  }
}

std::vector<double> BeamConfig::cell_centers() const {
  std::vector<double> xs(n_cells);
  for (int j = 0; j < n_cells; ++j) xs[j] = cell_center(j);
  return xs;
}

int BeamConfig::cell_of(double x) const {
  if (!(x >= 0.0 && x <= length)) {
    throw DomainError("x = " + format_number(x) + " lies outside [0, " +
                      format_number(length) + "]");
  }
  return std::min(static_cast<int>(x / cell_width()), n_cells - 1);
}

HeightField::HeightField(std::vector<double> values) : values_(std::move(values)) {
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!(values_[j] > 0.0) || !std::isfinite(values_[j])) {
      throw DomainError("height at cell " + std::to_string(j) + " must be positive, got " +
                        format_number(values_[j]));
    }
  }
}

HeightField HeightField::constant(int n_cells, double value) {
  return HeightField(std::vector<double>(n_cells, value));
}

double HeightField::mass(double cell_width) const {
  double sum = 0.0;
  for (double h : values_) sum += h;
  return cell_width * sum;
}

double HeightField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double HeightField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double bending_moment(const LoadCase& load, const BeamConfig& config, double x) {
  if (!(x >= 0.0 && x <= config.length)) {
    throw DomainError("bending_moment: x = " + format_number(x) + " outside [0, " +
                      format_number(config.length) + "]");
  }
  switch (load.kind) {
    case LoadKind::UniformLoad: {
      const double arm = config.length - x;
      return 0.5 * load.value * arm * arm;
    }
    case LoadKind::ConstantMoment:
      return load.value;
  }
  return 0.0;
}

std::vector<double> moments_at_centers(const LoadCase& load, const BeamConfig& config) {
  std::vector<double> m(config.n_cells);
  for (int j = 0; j < config.n_cells; ++j) m[j] = bending_moment(load, config, config.cell_center(j));
  return m;
}

void LayerStack::validate(bool allow_ablation) const {
  if (heights.empty()) throw PreconditionError("layer stack has no base height");
  if (heights.size() != prestrains.size() + 1) {
    throw PreconditionError("layer stack needs one prestrain per deposited layer");
  }
  const std::size_t n = heights.front().size();
  for (std::size_t i = 1; i < heights.size(); ++i) {
    if (heights[i].size() != n) throw PreconditionError("layer heights differ in cell count");
    if (allow_ablation) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (heights[i][j] < heights[i - 1][j]) {
        throw PreconditionError("layer " + std::to_string(i) + " lies below layer " +
                                std::to_string(i - 1) + " at cell " + std::to_string(j));
      }
    }
  }
  for (const auto& p : prestrains) {
    if (!std::isfinite(p.eps_p) || !std::isfinite(p.kappa_p)) {
      throw DomainError("prestrain values must be finite");
    }
  }
}

std::vector<double> LayerStack::column(std::size_t cell) const {
  std::vector<double> col(heights.size());
  for (std::size_t i = 0; i < heights.size(); ++i) col[i] = heights[i][cell];
  return col;
}

namespace detail {

std::vector<Interval> layer_intervals(std::span<const double> heights) {
  const std::size_t s = heights.size();
  std::vector<double> suffix_min(s);
  suffix_min[s - 1] = heights[s - 1];
  for (std::size_t k = s - 1; k-- > 0;) suffix_min[k] = std::min(heights[k], suffix_min[k + 1]);

  std::vector<Interval> out(s);
  out[0] = {0.0, suffix_min[0]};
  for (std::size_t k = 1; k < s; ++k) {
    const double lo = heights[k - 1];
    out[k] = {lo, std::max(lo, suffix_min[k])};
  }
  return out;
}

PrestrainMoments prestrain_moments(std::span<const double> heights,
                                   std::span<const PrestrainPair> prestrains) {
  PrestrainMoments pm{0.0, 0.0};
  const auto iv = layer_intervals(heights);
  for (std::size_t k = 1; k < iv.size(); ++k) {
    const auto [lo, hi] = iv[k];
    if (hi <= lo) continue;
    const auto& p = prestrains[k - 1];
    const double d1 = hi - lo;
    const double d2 = (hi * hi - lo * lo) / 2.0;
    const double d3 = (hi * hi * hi - lo * lo * lo) / 3.0;
    pm.force += p.eps_p * d1 + p.kappa_p * d2;
    pm.moment += p.eps_p * d2 + p.kappa_p * d3;
  }
  return pm;
}

}  // namespace detail

SectionStrain solve_section(std::span<const double> heights,
                            std::span<const PrestrainPair> prestrains, double moment,
                            double young_modulus) {
  if (heights.size() != prestrains.size() + 1) {
    throw PreconditionError("solve_section: need one prestrain per layer");
  }
  const double h = heights.back();
  if (!(h > 0.0)) throw DegenerateSectionError("cross-section height is zero");

  const auto pm = detail::prestrain_moments(heights, prestrains);
  // eps h + kappa h^2/2 = P0,  eps h^2/2 + kappa h^3/3 = P1 - M/E
  const double a = pm.moment - moment / young_modulus;
  const double eps = (4.0 * pm.force * h - 6.0 * a) / (h * h);
  const double kappa = (12.0 * a - 6.0 * pm.force * h) / (h * h * h);
  return {eps, kappa};
}

SectionResidual section_residual(std::span<const double> heights,
                                 std::span<const PrestrainPair> prestrains, double moment,
                                 double young_modulus, SectionStrain state) {
  const double h = heights.back();
  const auto pm = detail::prestrain_moments(heights, prestrains);
  const double force = state.eps * h + state.kappa * h * h / 2.0 - pm.force;
  const double m = -young_modulus * (state.eps * h * h / 2.0 + state.kappa * h * h * h / 3.0 -
                                     pm.moment) - moment;
  return {force, m};
}

EquilibriumState equilibrium_bare(const BeamConfig& config, const LoadCase& load,
                                  const HeightField& h0) {
  config.validate();
  if (h0.size() != static_cast<std::size_t>(config.n_cells)) {
    throw PreconditionError("height field size does not match n_cells");
  }
  const double e = config.young_modulus;
  EquilibriumState st;
  st.eps.resize(h0.size());
  st.kappa.resize(h0.size());
  for (int j = 0; j < config.n_cells; ++j) {
    const double m = bending_moment(load, config, config.cell_center(j));
    const double h = h0[j];
    st.eps[j] = 6.0 * m / (e * h * h);
    st.kappa[j] = -12.0 * m / (e * h * h * h);
  }
  return st;
}

EquilibriumState equilibrium_one_layer(const BeamConfig& config, const LoadCase& load,
                                       const HeightField& h0, const HeightField& h1,
                                       PrestrainPair pre) {
  config.validate();
  const auto n = static_cast<std::size_t>(config.n_cells);
  if (h0.size() != n || h1.size() != n) {
    throw PreconditionError("height field size does not match n_cells");
  }
  const double e = config.young_modulus;
  const double ep = pre.eps_p;
  const double kp = pre.kappa_p;
  EquilibriumState st;
  st.eps.resize(n);
  st.kappa.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double a = h0[j];
    const double b = h1[j];
    if (b < a) {
      throw PreconditionError("equilibrium_one_layer: h1 < h0 at cell " + std::to_string(j));
    }
    const double m = bending_moment(load, config, config.cell_center(static_cast<int>(j)));
    const double t = b - a;
    st.eps[j] = (ep * b - 3.0 * ep * a - 2.0 * kp * a * a) / (b * b) * t + 6.0 * m / (e * b * b);
    st.kappa[j] = (4.0 * kp * a * a + kp * a * b + 6.0 * ep * a + kp * b * b) / (b * b * b) * t -
                  12.0 * m / (e * b * b * b);
  }
  return st;
}

EquilibriumState equilibrium_general(const BeamConfig& config, const LoadCase& load,
                                     const LayerStack& stack) {
  config.validate();
  stack.validate(/*allow_ablation=*/true);
  const auto n = static_cast<std::size_t>(config.n_cells);
  if (stack.top().size() != n) throw PreconditionError("layer stack size does not match n_cells");

  EquilibriumState st;
  st.eps.resize(n);
  st.kappa.resize(n);
  std::vector<double> col(stack.heights.size());
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = stack.heights[i][j];
    const double m = bending_moment(load, config, config.cell_center(static_cast<int>(j)));
    const auto s = solve_section(col, stack.prestrains, m, config.young_modulus);
    st.eps[j] = s.eps;
    st.kappa[j] = s.kappa;
  }
  return st;
}

double stress_at(const EquilibriumState& state, const LayerStack& stack,
                 const BeamConfig& config, double x, double y) {
  const int j = config.cell_of(x);
  const auto col = stack.column(static_cast<std::size_t>(j));
  const double top = col.back();
  if (y < 0.0 || y > top * (1.0 + 1e-14)) {
    throw DomainError("stress_at: y = " + format_number(y) + " outside [0, " +
                      format_number(top) + "]");
  }
  const double e = state.eps[j] + y * state.kappa[j];
  const auto iv = detail::layer_intervals(col);
  if (y <= iv[0].hi) return config.young_modulus * e;
  for (std::size_t k = 1; k < iv.size(); ++k) {
    if (iv[k].hi > iv[k].lo && y >= iv[k].lo && y <= iv[k].hi) {
      const auto& p = stack.prestrains[k - 1];
      return config.young_modulus * (e - p.eps_p - y * p.kappa_p);
    }
  }
  // Only reachable through round-off at the surface.
  const auto& p = stack.prestrains.back();
  return config.young_modulus * (e - p.eps_p - y * p.kappa_p);
}

std::vector<double> deflection(const EquilibriumState& state, const BeamConfig& config) {
  const auto n = state.kappa.size();
  const double dx = config.cell_width();
  std::vector<double> w(n + 1, 0.0);
  double slope = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double next = slope - dx * state.kappa[j];
    w[j + 1] = w[j] + 0.5 * dx * (slope + next);
    slope = next;
  }
  return w;
}

}  // namespace accrete
