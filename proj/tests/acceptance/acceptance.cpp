// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "accrete/baseline.hpp"
#include "accrete/beam.hpp"
#include "accrete/compliance.hpp"
#include "accrete/config.hpp"
#include "accrete/growth.hpp"
#include "accrete/output.hpp"
#include "accrete/step_solver.hpp"
#include "oracles.hpp"

using namespace accrete;
namespace fs = std::filesystem;

namespace {

constexpr double kE = 1e5;
constexpr double kH0 = 0.3;
constexpr double kLength = 20.0;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

GrowthSetup make_setup(LoadCase load, PrestrainPair pre, Tau tau, int steps, double dm, MassMode mode) {
  GrowthSetup s;
  s.config = BeamConfig{kLength, kE, 200};
  s.load = load;
  s.h0 = HeightField::constant(200, kH0);
  s.schedule = MassSchedule::affine(kH0 * kLength, dm, steps);
  s.prestrains.assign(static_cast<std::size_t>(steps), pre);
  s.tau = tau;
  s.mass_mode = mode;
  return s;
}

const LoadCase kUniform{LoadKind::UniformLoad, 0.02};
const LoadCase kMoment{LoadKind::ConstantMoment, 20.0};

// Every step-level result that criterion 9 audits.
struct Audited {
  std::string name;
  StepProblem problem;
  StepSolution solution;
};
std::vector<Audited> audit;

void audit_trace(const std::string& name, const GrowthTrace& trace) {
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& r = trace.steps[i];
    StepSolution s;
    s.h = r.h;
    s.lambda = r.lambda;
    s.mu = r.mu;
    s.kkt_residual = r.kkt_residual;
    s.dual_infeasibility = r.dual_infeasibility;
    audit.push_back({name + " step " + std::to_string(r.step), trace.problems[i], s});
  }
}

Outcome criterion1() {
  StepProblem pr;
  pr.config = BeamConfig{kLength, kE, 200};
  for (double m : moments_at_centers(kUniform, pr.config)) pr.densities.push_back(ComplianceDensity::baseline(m, kE));
  pr.h_prev = HeightField::constant(200, kH0);
  pr.lower_bound = pr.h_prev;
  pr.mass_target = 7.5;

  const auto t0 = std::chrono::steady_clock::now();
  const auto sol = minimize_step(pr);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  audit.push_back({"first step", pr, sol});

  const auto ref = oracle::first_step(kLength, kE, 0.02, kH0, 7.5);
  double err = 0.0;
  int last_grown = -1;
  for (int j = 0; j < 200; ++j) {
    err = std::max(err, std::abs(sol.h[j] - oracle::first_step_height(ref, kLength, kH0, pr.config.cell_center(j))));
    if (sol.h[j] > kH0 + 1e-9) last_grown = j;
  }
  const double x_hat = pr.config.node(last_grown + 1);
  const double lam_err = oracle::rel_err(sol.lambda, 0.044444444444444446);
  const double delta = pr.config.cell_width();
  const bool ok = err <= 1e-3 * kH0 && lam_err <= 1e-4 && std::abs(x_hat - 10.0) <= delta && seconds <= 5.0;
  return {ok, fmt("Linf %.3e (<= 3e-4), lambda %.8f rel err %.2e (<= 1e-4), ", err, sol.lambda, lam_err) +
                  fmt("x_hat %.4f (10 +- %.2f), ", x_hat, delta) + fmt("%.3f s (<= 5 s)", seconds)};
}

Outcome criterion2() {
  const double eta_minus = 20.0 / (kE * kH0 * kH0 * -0.01);
  const double eta_plus = 20.0 / (kE * kH0 * kH0 * 0.01);
  const double a = f_second(eta_minus, 1.0);
  const double b = f_second(eta_plus, 2.56);
  const bool ok = std::abs(a + 0.89) <= 0.01 && std::abs(b + 0.05) <= 0.005;
  return {ok, fmt("f''(eta-, 1) = %.5f (-0.89 +- 0.01), f''(eta+, 2.56) = %.5f (-0.05 +- 0.005)", a, b)};
}

Outcome criterion3() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> um(-10.0, 10.0), ux(1.0, 10.0);
  int nonpositive = 0;
  double worst = 0.0;
  double smallest = 1e300;
  for (int t = 0; t < 100000; ++t) {
    const double mu = um(rng);
    const double x = ux(rng);
    const double v = g_second(mu, x);
    if (!(v > 0.0)) ++nonpositive;
    smallest = std::min(smallest, v);
    worst = std::max(worst, oracle::rel_err(v, oracle::g_second_raw(mu, x)));
  }
  return {nonpositive == 0 && worst <= 1e-10,
          fmt("1e5 samples, %g nonpositive, min g'' %.4e, max rel diff raw vs completed square %.2e (<= 1e-10)",
              nonpositive, smallest, worst)};
}

Outcome criterion4() {
  std::string detail;
  bool ok = true;
  for (PrestrainPair pre : {PrestrainPair{0.01, 0.0}, PrestrainPair{0.0, 0.05}, PrestrainPair{0.0, -0.05}}) {
    double spread = 0.0;
    for (Tau tau : {Tau::infinite(), Tau(0.01)}) {
      const auto trace = run_growth(make_setup(kMoment, pre, tau, 10, 0.6, MassMode::Equality));
      audit_trace("uniform", trace);
      for (const auto& r : trace.steps) spread = std::max(spread, r.h.max() - r.h.min());
    }
    ok = ok && spread <= 1e-6;
    detail += fmt("(%g, %g): max spread %.2e; ", pre.eps_p, pre.kappa_p, spread);
  }
  return {ok, detail + "tau inf and 0.01, limit 1e-6 dm"};
}

Outcome criterion5() {
  const auto trace = run_growth(make_setup(kMoment, {-0.01, 0.0}, Tau(0.01), 5, 0.6, MassMode::Inequality));
  audit_trace("no absorption", trace);
  const double added = trace.steps.back().mass - kH0 * kLength;
  return {added <= 1e-6, fmt("added mass after 5 steps %.3e dm^2 (<= 1e-6)", added)};
}

Outcome criterion6() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uh(0.05, 1.0), ug(1.0, 4.0), um(-100.0, 100.0);
  const BeamConfig c{1.0, kE, 1};
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double h0 = uh(rng);
    const double h1 = h0 * ug(rng);
    const double m = um(rng);
    const double eps0 = 6.0 * m / (kE * h0 * h0);
    const double kap0 = -12.0 * m / (kE * h0 * h0 * h0);
    const auto s = equilibrium_one_layer(c, {LoadKind::ConstantMoment, m}, HeightField({h0}), HeightField({h1}),
                                         {eps0, kap0});
    worst = std::max({worst, oracle::rel_err(s.eps[0], eps0), oracle::rel_err(s.kappa[0], kap0)});
  }
  return {worst <= 1e-10, fmt("100 random (h0, h1, M), max rel deviation %.2e (<= 1e-10)", worst)};
}

Outcome criterion7() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uh(0.1, 1.0), ug(1.0, 3.0), ue(-0.05, 0.05), uk(-0.5, 0.5),
      um(-60.0, 60.0), ud(0.0, 0.2), uu(0.0, 1.0);
  double worst[4] = {0, 0, 0, 0};
  for (int t = 0; t < 10000; ++t) {
    const int kind = t % 4;
    const double h0 = uh(rng);
    const double m = um(rng);
    double h = h0 * ug(rng);
    ComplianceDensity d = ComplianceDensity::baseline(m, kE);
    std::vector<double> below;
    std::vector<std::pair<double, double>> layers;
    if (kind == 1) {
      const double e = ue(rng);
      d = ComplianceDensity::prestrain(m, kE, h0, e);
      below = {h0};
      layers = {{e, 0.0}};
    }
    if (kind == 2) {
      const double k = uk(rng);
      d = ComplianceDensity::precurv_first(m, kE, h0, k);
      below = {h0};
      layers = {{0.0, k}};
    }
    if (kind == 3) {
      below = {h0};
      std::vector<PrestrainPair> pre;
      const int count = 1 + static_cast<int>(3 * uu(rng));
      for (int k = 1; k < count; ++k) {
        below.push_back(below.back() + ud(rng));
        pre.push_back({ue(rng), uk(rng)});
      }
      pre.push_back({ue(rng), uk(rng)});
      d = ComplianceDensity::general(m, kE, below, pre);
      for (const auto& q : pre) layers.emplace_back(q.eps_p, q.kappa_p);
      h = below.back() * (1.0 + uu(rng));
    }
    const double fd = oracle::column_slope(below, layers, h, m, kE);
    // Relative to |fd|, floored at 1e-3 of the natural scale c/h.
    const double scale = std::max(std::abs(fd), 1e-3 * std::abs(d.value(h)) / h);
    worst[kind] = std::max(worst[kind], std::abs(density_derivative(d, h) - fd) / std::max(scale, 1e-300));
  }
  const double w = std::max({worst[0], worst[1], worst[2], worst[3]});
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "1e4 samples, max rel error baseline %.1e, prestrain %.1e, precurvature %.1e, general %.1e (<= 1e-6)",
                worst[0], worst[1], worst[2], worst[3]);
  return {w <= 1e-6, buf};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_gap = -1e300;
  double worst_cert = 0.0;
  int instances = 0;
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 4; ++trial) {
      const BeamConfig c{static_cast<double>(n), kE, n};
      std::vector<double> hp(n);
      for (auto& v : hp) v = 0.3 + 0.05 * u(rng);
      const HeightField h_prev(hp);
      const int units = n <= 4 ? 40 : 20;
      const double pitch = 1e-3;
      const double mass = h_prev.mass(1.0) + units * pitch;
      const LoadCase load{LoadKind::UniformLoad, 2.0 + u(rng)};
      const auto moments = moments_at_centers(load, c);
      std::vector<std::function<double(double)>> dens;
      for (double m : moments) dens.push_back([m](double h) { return 12.0 * m * m / (kE * h * h * h); });
      const auto grid = oracle::grid_search(dens, hp, units, pitch, 1.0);

      StepProblem pr;
      pr.config = c;
      for (double m : moments) pr.densities.push_back(ComplianceDensity::baseline(m, kE));
      pr.h_prev = h_prev;
      pr.lower_bound = h_prev;
      pr.mass_target = mass;
      const auto num = minimize_step(pr);
      worst_gap = std::max(worst_gap, num.objective - grid.objective);

      const auto exact = solve_baseline_step(c, load, h_prev, mass);
      const auto cert = baseline_certificate(c, load, h_prev, mass, exact);
      worst_cert = std::max({worst_cert, cert.stationarity, cert.dual_infeasibility, cert.complementarity,
                             cert.bound_violation, cert.mass_error});
      ++instances;
    }
  }
  return {worst_gap <= 1e-6 && worst_cert <= 1e-10,
          fmt("%g instances, N = 2..6: max (solver - grid) objective %.2e (<= 1e-6), max certificate residual %.2e (<= 1e-10)",
              instances, worst_gap, worst_cert)};
}

Outcome criterion9() {
  double mass_err = 0.0, irrev = 0.0, comp = 0.0, stat = 0.0;
  std::string worst_name;
  for (const auto& a : audit) {
    const auto& pr = a.problem;
    const auto& s = a.solution;
    const double delta = pr.config.cell_width();
    const double m = s.h.mass(delta);
    const double me = pr.mass_mode == MassMode::Equality ? std::abs(m - pr.mass_target) / pr.mass_target
                                                         : std::max(0.0, m - pr.mass_target) / pr.mass_target;
    mass_err = std::max(mass_err, me);
    for (std::size_t j = 0; j < s.h.size(); ++j) {
      irrev = std::min(irrev, s.h[j] - pr.h_prev[j]);
      comp = std::max(comp, std::abs(s.mu[j] * (s.h[j] - pr.lower_bound[j])));
      if (s.mu[j] < 0.0) comp = std::max(comp, -s.mu[j]);
    }
    if (pr.mass_mode == MassMode::Inequality) {
      comp = std::max(comp, std::abs(s.lambda * (pr.mass_target - m)));
      if (s.lambda < 0.0) comp = std::max(comp, -s.lambda);
    }
    const double r = std::max(kkt_residual(pr, s.h, s.lambda), s.dual_infeasibility);
    if (r > stat) worst_name = a.name;
    stat = std::max(stat, r);
  }
  const bool ok = mass_err <= 1e-10 && irrev >= -1e-12 && comp <= 1e-8 && stat <= 1e-8;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "%zu steps: mass %.1e (<= 1e-10 m), min increment %.1e (>= -1e-12), complementarity %.1e, "
                "stationarity %.1e (<= 1e-8)%s%s",
                audit.size(), mass_err, irrev, comp, stat, worst_name.empty() ? "" : ", worst at ",
                worst_name.c_str());
  return {ok, buf};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  const std::string text =
      "load.kind = uniform\nload.value = 0.02\nprestrain.eps = 0.01\ntau = 0.01\nsteps = 4\n";
  const fs::path base = fs::temp_directory_path() / "accrete_acceptance_determinism";
  fs::remove_all(base);
  for (const char* run : {"a", "b"}) {
    const RunConfig cfg = parse_config(text);
    write_trace(run_growth(cfg.to_growth_setup()), base / run, &cfg);
  }
  const bool csv = slurp(base / "a" / "profile.csv") == slurp(base / "b" / "profile.csv");
  const bool json = slurp(base / "a" / "summary.json") == slurp(base / "b" / "summary.json");
  const bool nonempty = !slurp(base / "a" / "profile.csv").empty();
  fs::remove_all(base);
  return {csv && json && nonempty,
          std::string("profile.csv ") + (csv ? "identical" : "differs") + ", summary.json " +
              (json ? "identical" : "differs")};
}

// Added mass on [a, b) of the final profile.
double added_on(const GrowthTrace& t, double a, double b) {
  const auto& h = t.steps.back().h;
  const double delta = t.config.cell_width();
  double s = 0.0;
  for (int j = 0; j < t.config.n_cells; ++j) {
    const double x = t.config.cell_center(j);
    if (x >= a && x < b) s += delta * (h[j] - t.initial[j]);
  }
  return s;
}

Outcome qualitative(double eps, bool towards_clamp) {
  const auto inf = run_growth(make_setup(kUniform, {eps, 0.0}, Tau::infinite(), 10, 0.6, MassMode::Equality));
  const auto reg = run_growth(make_setup(kUniform, {eps, 0.0}, Tau(0.01), 10, 0.6, MassMode::Equality));
  audit_trace(std::string("eps ") + (eps > 0 ? "+" : "-") + " tau inf", inf);
  audit_trace(std::string("eps ") + (eps > 0 ? "+" : "-") + " tau 0.01", reg);
  const double total = inf.steps.back().mass - kH0 * kLength;
  const double a = towards_clamp ? 0.0 : kLength / 2;
  const double b = towards_clamp ? kLength / 2 : kLength + 1.0;
  const double m_inf = added_on(inf, a, b);
  const double m_reg = added_on(reg, a, b);
  const double margin = m_inf - m_reg;
  return {margin >= 0.01 * total,
          std::string("added mass on the ") + (towards_clamp ? "clamped" : "free") + " half: " +
              fmt("tau=inf %.4f, tau=0.01 %.4f, margin %.4f", m_inf, m_reg, margin) +
              fmt(" (>= %.4f)", 0.01 * total)};
}

}  // namespace

int main() {
  struct Item {
    const char* id;
    std::function<Outcome()> run;
  };
  // Criterion 9 audits the runs of the others, so it goes last.
  const std::vector<Item> items = {
      {"1", criterion1},  {"2", criterion2}, {"3", criterion3},
      {"4", criterion4},  {"5", criterion5}, {"6", criterion6},
      {"7", criterion7},  {"8", criterion8}, {"10", criterion10},
      {"a", [] { return qualitative(0.01, true); }},
      {"b", [] { return qualitative(-0.01, false); }},
      {"9", criterion9},
  };
  int failures = 0;
  for (const auto& item : items) {
    Outcome o;
    try {
      o = item.run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", item.id, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, items.size());
  return failures == 0 ? 0 : 1;
}
