#include "accrete/growth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "accrete/compliance.hpp"
#include "accrete/config.hpp"
#include "accrete/errors.hpp"

namespace accrete {

MassSchedule MassSchedule::affine(double m0, double increment, int steps) {
  if (steps < 1) throw DomainError("mass schedule needs at least one step");
  MassSchedule s;
  s.kind_ = Kind::Affine;
  s.m0_ = m0;
  s.increment_ = increment;
  s.values_.resize(steps);
  for (int i = 1; i <= steps; ++i) s.values_[i - 1] = m0 + i * increment;
  return s;
}

MassSchedule MassSchedule::explicit_values(std::vector<double> values) {
  if (values.empty()) throw DomainError("mass schedule needs at least one step");
  MassSchedule s;
  s.kind_ = Kind::Explicit;
  s.values_ = std::move(values);
  return s;
}

void MassSchedule::validate(double m0, bool ablation) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || !(values_[i] > 0.0)) {
      throw DomainError("mass m_" + std::to_string(i + 1) + " must be positive and finite");
    }
    if (i > 0 && values_[i] < values_[i - 1]) {
      throw DomainError("mass schedule must be nondecreasing (m_" + std::to_string(i + 1) + " < m_" +
                        std::to_string(i) + ")");
    }
  }
  if (!ablation && values_.front() < m0 * (1.0 - 1e-12)) {
    throw DomainError("m_1 = " + format_number(values_.front()) + " is below m0 = " +
                      format_number(m0));
  }
}

const HeightField& GrowthTrace::height_at(int step) const {
  if (step == 0) return initial;
  if (step < 0 || step > static_cast<int>(steps.size())) {
    throw DomainError("step " + std::to_string(step) + " is not in the trace");
  }
  return steps[static_cast<std::size_t>(step - 1)].h;
}

StepProblem build_step_problem(const GrowthSetup& setup, const LayerStack& stack, int step) {
  const auto& cfg = setup.config;
  const auto n = static_cast<std::size_t>(cfg.n_cells);
  const double e = cfg.young_modulus;
  const auto moments = moments_at_centers(setup.load, cfg);
  const PrestrainPair pre = setup.prestrains.at(static_cast<std::size_t>(step - 1));
  const std::vector<PrestrainPair> history(setup.prestrains.begin(),
                                           setup.prestrains.begin() + step);
  const bool stress_free =
      std::all_of(history.begin(), history.end(), [](const PrestrainPair& p) { return p.is_zero(); });
  const bool first = step == 1 && !setup.ablation;

  StepProblem p;
  p.config = cfg;
  p.h_prev = stack.top();
  p.mass_target = setup.schedule.mass_at(step);
  p.tau = setup.tau;
  p.mass_mode = setup.mass_mode;
  p.densities.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double m = moments[j];
    if (stress_free) {
      p.densities.push_back(ComplianceDensity::baseline(m, e));
    } else if (first && pre.kappa_p == 0.0) {
      p.densities.push_back(ComplianceDensity::prestrain(m, e, setup.h0[j], pre.eps_p));
    } else if (first && pre.eps_p == 0.0) {
      p.densities.push_back(ComplianceDensity::precurv_first(m, e, setup.h0[j], pre.kappa_p));
    } else {
      p.densities.push_back(ComplianceDensity::general(m, e, stack.column(j), history));
    }
  }
  if (setup.ablation) {
    std::vector<double> floor(n);
    for (std::size_t j = 0; j < n; ++j) floor[j] = kAblationFloorRatio * setup.h0[j];
    p.lower_bound = HeightField(std::move(floor));
  } else {
    p.lower_bound = stack.top();
  }
  return p;
}

GrowthTrace run_growth(const GrowthSetup& setup) {
  const auto& cfg = setup.config;
  cfg.validate();
  if (setup.h0.size() != static_cast<std::size_t>(cfg.n_cells)) {
    throw PreconditionError("h0 size does not match n_cells");
  }
  const int steps = setup.schedule.steps();
  if (static_cast<int>(setup.prestrains.size()) != steps) {
    throw PreconditionError("need one prestrain pair per step (" + std::to_string(steps) + "), got " +
                            std::to_string(setup.prestrains.size()));
  }
  const double delta = cfg.cell_width();
  setup.schedule.validate(setup.h0.mass(delta), setup.ablation);

  GrowthTrace trace;
  trace.config = cfg;
  trace.initial = setup.h0;
  trace.stack = LayerStack(setup.h0);
  trace.initial_compliance =
      compliance_total(equilibrium_bare(cfg, setup.load, setup.h0), setup.h0, cfg);

  for (int i = 1; i <= steps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    StepProblem problem = build_step_problem(setup, trace.stack, i);
    StepSolution sol;
    try {
      sol = minimize_step(problem, setup.options);
    } catch (const ConvergenceError& ex) {
      throw GrowthError("step " + std::to_string(i) + ": " + ex.what(), std::move(trace), i, true);
    } catch (const std::exception& ex) {
      throw GrowthError("step " + std::to_string(i) + ": " + ex.what(), std::move(trace), i, false);
    }

    StepRecord rec;
    rec.step = i;
    rec.mass = sol.h.mass(delta);
    rec.mass_target = problem.mass_target;
    rec.objective = sol.objective;
    rec.lambda = sol.lambda;
    rec.mu = sol.mu;
    rec.kkt_residual = sol.kkt_residual;
    rec.dual_infeasibility = sol.dual_infeasibility;
    rec.iterations = sol.iterations;
    rec.newton_iterations = sol.newton_iterations;
    rec.degenerate = sol.degenerate;
    rec.density = problem.densities.front().kind();

    const auto& prev = problem.h_prev;
    int grown = 0;
    double max_inc = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < prev.size(); ++j) {
      const double inc = sol.h[j] - prev[j];
      if (inc > setup.options.tol_active) ++grown;
      max_inc = std::max(max_inc, inc);
    }
    rec.growth_fraction = static_cast<double>(grown) / static_cast<double>(prev.size());
    rec.max_increment = max_inc;

    trace.stack.push(sol.h, setup.prestrains[static_cast<std::size_t>(i - 1)]);
    rec.compliance =
        compliance_total(equilibrium_general(cfg, setup.load, trace.stack), sol.h, cfg);
    rec.h = std::move(sol.h);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.steps.push_back(std::move(rec));
    trace.problems.push_back(std::move(problem));
  }
  return trace;
}

StationarityReport stationarity_report(const GrowthTrace& trace,
                                       const std::vector<StepProblem>& problems,
                                       double tolerance) {
  if (problems.size() != trace.steps.size()) {
    throw PreconditionError("stationarity_report: one problem per traced step required");
  }
  StationarityReport r;
  for (std::size_t i = 0; i < problems.size(); ++i) {
    const auto& rec = trace.steps[i];
    const double res = kkt_residual(problems[i], rec.h, rec.lambda);
    r.residuals.push_back(res);
    if (res > tolerance) r.flagged.push_back(rec.step);
  }
  return r;
}

}  // namespace accrete
