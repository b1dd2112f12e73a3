#pragma once

#include <optional>
#include <vector>

#include "accrete/beam.hpp"

namespace accrete {

/// Exact KKT solution of the stress-free (no prestrain) step problem.
///
/// On the growth set the height is (36 M^2 / (E lambda))^(1/4); elsewhere it
/// stays at the previous height.
struct BaselineSolution {
  HeightField h;
  double lambda = 0.0;
  std::vector<bool> growth_set;
  /// End of the growth set, only for the closed-form first step.
  std::optional<double> x_hat;
  double mass = 0.0;
};

/// First step from constant h0 under a uniform load p, in closed form. Heights
/// are the continuous profile sampled at cell centers.
BaselineSolution solve_baseline_first(const BeamConfig& config, double p, double h0, double m1);

/// Any step, any load, any previous profile: lambda by bisection on the
/// monotone map lambda -> mass, then closed form on the identified growth set.
BaselineSolution solve_baseline_step(const BeamConfig& config, const LoadCase& load,
                                     const HeightField& h_prev, double m_i);

/// KKT residuals of a discrete baseline solution: stationarity, dual
/// feasibility, complementarity, the lower bound and the mass constraint.
struct BaselineCertificate {
  double stationarity = 0.0;      // max over growth set of |lambda - 36 M^2 / (E h^4)| / lambda
  double dual_infeasibility = 0.0;  // max over the rest of max(0, -(lambda - 36 M^2/(E h^4)))
  double complementarity = 0.0;   // max |mu_j (h_j - h_prev_j)|
  double bound_violation = 0.0;   // max(0, h_prev_j - h_j)
  double mass_error = 0.0;        // |delta sum h - m| / m
};
BaselineCertificate baseline_certificate(const BeamConfig& config, const LoadCase& load,
                                         const HeightField& h_prev, double m_i,
                                         const BaselineSolution& sol);

}  // namespace accrete
