#pragma once

#include <stdexcept>
#include <vector>

#include "accrete/beam.hpp"
#include "accrete/step_solver.hpp"

namespace accrete {

/// Target masses m_1..m_S.
class MassSchedule {
 public:
  enum class Kind { Affine, Explicit };

  /// m_i = m0 + i * increment for i = 1..steps.
  static MassSchedule affine(double m0, double increment, int steps);
  static MassSchedule explicit_values(std::vector<double> values);

  Kind kind() const { return kind_; }
  int steps() const { return static_cast<int>(values_.size()); }
  /// Target mass after step i, 1-based.
  double mass_at(int i) const { return values_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<double>& values() const { return values_; }
  double initial() const { return m0_; }
  double increment() const { return increment_; }

  /// Nondecreasing, and m_1 >= m0 unless ablation is allowed.
  void validate(double m0, bool ablation) const;

 private:
  Kind kind_ = Kind::Explicit;
  double m0_ = 0.0;
  double increment_ = 0.0;
  std::vector<double> values_;
};

struct GrowthSetup {
  BeamConfig config;
  LoadCase load;
  HeightField h0;
  MassSchedule schedule;
  std::vector<PrestrainPair> prestrains;  // one per step
  Tau tau;
  MassMode mass_mode = MassMode::Equality;
  bool ablation = false;
  SolverOptions options;
};

struct StepRecord {
  int step = 0;
  HeightField h;
  double mass = 0.0;
  double mass_target = 0.0;
  double compliance = 0.0;
  double objective = 0.0;
  double lambda = 0.0;
  std::vector<double> mu;
  double growth_fraction = 0.0;
  double max_increment = 0.0;
  double kkt_residual = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  int newton_iterations = 0;
  bool degenerate = false;
  DensityCase density = DensityCase::Baseline;
  double wall_seconds = 0.0;
};

struct GrowthTrace {
  BeamConfig config;
  HeightField initial;
  double initial_compliance = 0.0;
  std::vector<StepRecord> steps;
  std::vector<StepProblem> problems;
  LayerStack stack;

  /// Height after step i; step 0 is the initial profile.
  const HeightField& height_at(int step) const;
};

/// A step failed. `partial` holds every step completed before it.
class GrowthError : public std::runtime_error {
 public:
  GrowthError(const std::string& what, GrowthTrace partial, int failed_step, bool convergence)
      : std::runtime_error(what),
        partial(std::move(partial)),
        failed_step(failed_step),
        convergence_failure(convergence) {}

  GrowthTrace partial;
  int failed_step;
  bool convergence_failure;
};

/// Floor used in place of h_{i-1} when ablation is enabled: 1e-3 * h0.
inline constexpr double kAblationFloorRatio = 1e-3;

/// Step problem for deposition i (1-based) on top of `stack`.
StepProblem build_step_problem(const GrowthSetup& setup, const LayerStack& stack, int step);

GrowthTrace run_growth(const GrowthSetup& setup);

struct StationarityReport {
  std::vector<double> residuals;
  std::vector<int> flagged;  // 1-based steps above tolerance
};

StationarityReport stationarity_report(const GrowthTrace& trace,
                                       const std::vector<StepProblem>& problems,
                                       double tolerance = SolverOptions{}.tol_kkt);

}  // namespace accrete
