#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace accrete {

/// Cantilever geometry and material. Depth into the page is 1 dm.
///
/// The beam is clamped at x = 0 and free at x = length. The axis is split
/// into n_cells uniform cells; every field lives at the cell centers.
struct BeamConfig {
  double length = 20.0;         // dm
  double young_modulus = 1e5;   // N/dm^2
  int n_cells = 200;

  void validate() const;

  double cell_width() const { return length / n_cells; }
  double cell_center(int j) const { return (j + 0.5) * cell_width(); }
  double node(int j) const { return j * cell_width(); }
  std::vector<double> cell_centers() const;

  /// Index of the cell containing x (x = length maps to the last cell).
  int cell_of(double x) const;

  friend bool operator==(const BeamConfig&, const BeamConfig&) = default;
};

/// Piecewise-constant cross-section height, one strictly positive value per
/// cell.
class HeightField {
 public:
  HeightField() = default;
  explicit HeightField(std::vector<double> values);

  static HeightField constant(int n_cells, double value);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& vec() const { return values_; }

  /// delta * sum(h): the mass at unit density.
  double mass(double cell_width) const;
  double min() const;
  double max() const;

  friend bool operator==(const HeightField&, const HeightField&) = default;

 private:
  std::vector<double> values_;
};

enum class LoadKind { UniformLoad, ConstantMoment };

struct LoadCase {
  LoadKind kind = LoadKind::UniformLoad;
  double value = 0.0;  // p in N/dm, or M in N dm

  friend bool operator==(const LoadCase&, const LoadCase&) = default;
};

/// Bending moment of the statically determinate cantilever at abscissa x.
double bending_moment(const LoadCase& load, const BeamConfig& config, double x);

std::vector<double> moments_at_centers(const LoadCase& load, const BeamConfig& config);

/// Strain e = eps_p + y * kappa_p at which a deposited layer is stress free.
struct PrestrainPair {
  double eps_p = 0.0;
  double kappa_p = 0.0;

  bool is_zero() const { return eps_p == 0.0 && kappa_p == 0.0; }
  friend bool operator==(const PrestrainPair&, const PrestrainPair&) = default;
};

/// Deposition history: heights h_0..h_S and the prestrain of each layer.
///
/// Layer k occupies [h_{k-1}, min_{j>=k} h_j] at each cell, so a later
/// decrease of the surface (ablation) trims the layers above it.
struct LayerStack {
  std::vector<HeightField> heights;
  std::vector<PrestrainPair> prestrains;

  explicit LayerStack(HeightField h0) { heights.push_back(std::move(h0)); }
  LayerStack() = default;

  void validate(bool allow_ablation) const;
  std::size_t layers() const { return prestrains.size(); }
  const HeightField& top() const { return heights.back(); }

  void push(HeightField h, PrestrainPair pre) {
    heights.push_back(std::move(h));
    prestrains.push_back(pre);
  }

  /// Heights h_0..h_S at one cell.
  std::vector<double> column(std::size_t cell) const;
};

/// Axial strain and curvature at the cell centers.
struct EquilibriumState {
  std::vector<double> eps;
  std::vector<double> kappa;
};

struct SectionStrain {
  double eps;
  double kappa;
};

/// Force and moment balance of one layered cross-section.
///
/// `heights` holds h_0..h_S at the section (the last entry is the surface),
/// `prestrains` the S layer prestrains. Layer integrals are closed form, so
/// there is no quadrature in y.
SectionStrain solve_section(std::span<const double> heights,
                            std::span<const PrestrainPair> prestrains, double moment,
                            double young_modulus);

/// Force balance (per unit E) and moment balance residuals of a section state.
struct SectionResidual {
  double force;
  double moment;
};
SectionResidual section_residual(std::span<const double> heights,
                                 std::span<const PrestrainPair> prestrains, double moment,
                                 double young_modulus, SectionStrain state);

EquilibriumState equilibrium_bare(const BeamConfig& config, const LoadCase& load,
                                  const HeightField& h0);

/// Closed-form strain and curvature after one prestrained deposition.
EquilibriumState equilibrium_one_layer(const BeamConfig& config, const LoadCase& load,
                                       const HeightField& h0, const HeightField& h1,
                                       PrestrainPair pre);

EquilibriumState equilibrium_general(const BeamConfig& config, const LoadCase& load,
                                     const LayerStack& stack);

/// Axial stress at (x, y): E (e - e_k^p) inside layer k, E e in the original
/// section.
double stress_at(const EquilibriumState& state, const LayerStack& stack,
                 const BeamConfig& config, double x, double y);

/// Transverse displacement at the N + 1 grid nodes from w'' = -kappa with
/// w(0) = w'(0) = 0. Curvature is taken cellwise constant and the slope is
/// integrated with the trapezoidal rule.
std::vector<double> deflection(const EquilibriumState& state, const BeamConfig& config);

}  // namespace accrete
