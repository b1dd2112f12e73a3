#pragma once

#include <limits>
#include <span>
#include <vector>

#include "accrete/beam.hpp"
#include "accrete/compliance.hpp"

namespace accrete {

/// Proximal weight of the incremental problem. Infinite drops the
/// (1 / 2 tau) |h - h_prev|^2 term altogether.
class Tau {
 public:
  constexpr Tau() = default;
  explicit Tau(double value);

  static constexpr Tau infinite() { return Tau{}; }

  bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }
  double value() const { return value_; }
  /// 1 / tau, zero when infinite.
  double inverse() const { return is_infinite() ? 0.0 : 1.0 / value_; }

  friend bool operator==(const Tau&, const Tau&) = default;

 private:
  double value_ = std::numeric_limits<double>::infinity();
};

enum class MassMode { Equality, Inequality };

struct SolverOptions {
  double tol_kkt = 1e-8;
  double tol_mass = 1e-10;    // relative to the mass target
  double tol_active = 1e-9;   // h_j <= lb_j + tol_active counts as on the bound
  int max_iter = 10000;
  /// Largest per-iteration change of any h_j, as a fraction of max(h_prev).
  /// Keeps the search local on nonconvex densities; 0 disables the cap.
  double max_move = 0.05;
  /// Try Newton on the starting free set before any descent iteration.
  bool continuation = true;
  bool record_history = false;

  friend bool operator==(const SolverOptions&, const SolverOptions&) = default;
};

/// One incremental step: minimize
///   delta * sum_j c_j(h_j) + (1 / 2 tau) * delta * sum_j (h_j - h_prev_j)^2
/// subject to delta * sum_j h_j = m (or <= m) and h >= lower_bound.
struct StepProblem {
  std::vector<ComplianceDensity> densities;
  HeightField h_prev;
  double mass_target = 0.0;
  Tau tau;
  MassMode mass_mode = MassMode::Equality;
  HeightField lower_bound;
  BeamConfig config;

  void validate() const;

  double objective(std::span<const double> h) const;
  /// Per-cell L2 gradient c'_j(h_j) + (h_j - h_prev_j) / tau. The Euclidean
  /// gradient of the objective is delta times this.
  void gradient(std::span<const double> h, std::span<double> out) const;
};

/// Multipliers follow the Lagrangian
///   F(h) + sum_j mu_j (lb_j - h_j) + lambda (delta sum_j h_j - m),
/// so lambda = -g_j on free cells and mu_j = g_j + lambda >= 0 on the bound.
struct StepSolution {
  HeightField h;
  double lambda = 0.0;
  std::vector<double> mu;
  double objective = 0.0;
  double kkt_residual = 0.0;
  /// max over bound cells of max(0, -(g_j + lambda)).
  double dual_infeasibility = 0.0;
  int iterations = 0;  // projected-gradient iterations
  int newton_iterations = 0;
  /// No cell left the bound; lambda is the smallest admissible value.
  bool degenerate = false;
  std::vector<double> history;
};

/// Euclidean projection onto {delta * sum(h) = mass, h >= lb}, or onto
/// {delta * sum(h) <= mass, h >= lb} in Inequality mode.
std::vector<double> project_mass_lb(std::span<const double> z, std::span<const double> lb,
                                    double mass, double delta,
                                    MassMode mode = MassMode::Equality);

/// Discrete stationarity: max over free cells of |g_j + lambda|, zero when
/// every cell sits on its bound.
double kkt_residual(const StepProblem& problem, const HeightField& h, double lambda);

struct Multipliers {
  double lambda = 0.0;
  std::vector<double> mu;
  double dual_infeasibility = 0.0;
  bool degenerate = false;
};

/// Multiplier estimate at a feasible h.
Multipliers estimate_multipliers(const StepProblem& problem, std::span<const double> h,
                                 const SolverOptions& options);

/// Newton continuation on the starting free set, falling back to projected
/// gradient with Barzilai-Borwein steps and Armijo backtracking. Once the
/// descent residual is small, Newton iterations on the current free set
/// finish the job.
///
/// Returns a KKT point; for nonconvex densities nothing more is promised, and
/// with continuation enabled the point may be a saddle of the step problem.
/// Throws InfeasibleError when the bound already exceeds the mass target and
/// ConvergenceError after max_iter iterations.
StepSolution minimize_step(const StepProblem& problem, const SolverOptions& options = {});

}  // namespace accrete
