#pragma once

#include <functional>
#include <span>
#include <vector>

#include "accrete/beam.hpp"

namespace accrete {

enum class DensityCase { General, Baseline, ConstPrestrain, ConstPrecurvFirst };

/// Pointwise compliance density c(h) of one cell, as a function of the cell's
/// new height h.
///
/// The structure is statically determinate, so the moment at a cell does not
/// depend on h and the total compliance is a sum of independent cell terms.
/// The closed-form cases are cheap and exact; General re-solves the layered
/// section for every candidate height.
class ComplianceDensity {
 public:
  static ComplianceDensity baseline(double moment, double young_modulus);
  static ComplianceDensity prestrain(double moment, double young_modulus, double h0, double eps_p);
  static ComplianceDensity precurv_first(double moment, double young_modulus, double h0,
                                         double kappa_p);
  /// `below` holds h_0..h_{i-1} at the cell, `prestrains` the i layer
  /// prestrains (the last one belongs to the layer being grown).
  static ComplianceDensity general(double moment, double young_modulus, std::vector<double> below,
                                   std::vector<PrestrainPair> prestrains);

  DensityCase kind() const { return kind_; }
  double moment() const { return moment_; }
  double young_modulus() const { return young_; }
  double base_height() const { return h0_; }
  double eps_p() const { return eps_p_; }
  double kappa_p() const { return kappa_p_; }
  const std::vector<double>& layers_below() const { return below_; }
  const std::vector<PrestrainPair>& prestrains() const { return prestrains_; }

  double value(double h) const;
  double derivative(double h) const;

 private:
  DensityCase kind_ = DensityCase::Baseline;
  double moment_ = 0.0;
  double young_ = 1.0;
  double h0_ = 0.0;
  double eps_p_ = 0.0;
  double kappa_p_ = 0.0;
  std::vector<double> below_;
  std::vector<PrestrainPair> prestrains_;
};

/// delta * sum_j E (eps_j^2 h_j + eps_j kappa_j h_j^2 + kappa_j^2 h_j^3 / 3).
double compliance_total(const EquilibriumState& state, const HeightField& h,
                        const BeamConfig& config);

/// 12 M^2 / (E h^3).
double density_baseline(double h, double moment, double young_modulus);

/// Constant prestrain, zero precurvature. Valid for every step when all
/// layers share eps_p; h0 is the original height.
double density_prestrain(double h, double h0, double moment, double young_modulus, double eps_p);

/// Zero prestrain, constant precurvature, first deposition.
double density_precurv_first(double h, double h0, double moment, double young_modulus,
                             double kappa_p);

/// dc/dh, analytic in every case. General returns the right-hand derivative
/// where h sits on a layer interface.
double density_derivative(const ComplianceDensity& density, double h);

// Dimensionless diagnostics. hbar = h / h0, eta = M / (E h0^2 eps_p),
// mu = M / (E h0^3 kappa_p).

double f_value(double eta, double hbar);
double f_first(double eta, double hbar);
double f_second(double eta, double hbar);

double g_value(double mu, double hbar);
double g_first(double mu, double hbar);
/// Completed-square form, positive for hbar >= 1.
double g_second(double mu, double hbar);

/// Interval [hbar_m, hbar_M] on which f'' <= 0.
struct ConcavityInterval {
  double lo;
  double hi;
};
ConcavityInterval f_concavity_interval(double eta);

struct Point {
  double x;
  double y;
};

/// Lower convex envelope of a sampled graph, evaluated at every sample
/// abscissa. Samples must be sorted by strictly increasing x.
std::vector<Point> convex_envelope_1d(std::span<const Point> samples);

/// `count` uniform samples of fn on [lo, hi].
std::vector<Point> sample_function(const std::function<double(double)>& fn, double lo, double hi,
                                   int count);

}  // namespace accrete
