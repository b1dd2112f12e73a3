// Command-line front end: growth runs, the closed-form stress-free solution,
// convexity curves and SVG rendering of stored traces.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "accrete/baseline.hpp"
#include "accrete/compliance.hpp"
#include "accrete/config.hpp"
#include "accrete/errors.hpp"
#include "accrete/growth.hpp"
#include "accrete/output.hpp"

namespace fs = std::filesystem;
using namespace accrete;

namespace {

enum Exit { kOk = 0, kConfig = 2, kSolver = 3, kIo = 4 };

struct Common {
  std::string output_dir;
  bool quiet = false;
};

fs::path pick_output_dir(const Common& common, const std::string& from_config,
                         const fs::path& fallback = "accrete_out") {
  if (!common.output_dir.empty()) return common.output_dir;
  if (!from_config.empty()) return from_config;
  if (const char* env = std::getenv("ACCRETE_OUTPUT_DIR"); env && *env) return env;
  return fallback;
}

std::vector<int> parse_steps(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("--steps: '" + item + "' is not an integer");
    out.push_back(v);
  }
  return out;
}

void print_step(const StepRecord& r) {
  std::printf("step %3d  mass %.10g  C %.10g  lambda %.6g  kkt %.2e  growth %.3f  max dh %.4g\n",
              r.step, r.mass, r.compliance, r.lambda, r.kkt_residual, r.growth_fraction,
              r.max_increment);
}

int cmd_run(const std::string& config_path, const Common& common) {
  const RunConfig cfg = load_config(config_path);
  const fs::path dir = pick_output_dir(common, cfg.output_dir);
  try {
    const GrowthTrace trace = run_growth(cfg.to_growth_setup());
    if (!common.quiet) {
      for (const auto& r : trace.steps) print_step(r);
    }
    write_trace(trace, dir, &cfg);
    render_profile_svg(profile_series(trace), cfg.plot_steps, dir);
    if (!common.quiet) std::printf("wrote %s\n", dir.string().c_str());
    return kOk;
  } catch (GrowthError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    if (!ex.partial.steps.empty()) {
      write_trace(ex.partial, dir, &cfg);
      std::fprintf(stderr, "partial trace (%zu steps) written to %s\n", ex.partial.steps.size(),
                   dir.string().c_str());
    }
    return ex.convergence_failure ? kSolver : kConfig;
  }
}

int cmd_analytic(const std::string& config_path, const Common& common) {
  const RunConfig cfg = load_config(config_path);
  const auto pre = cfg.prestrain_schedule();
  for (const auto& p : pre) {
    if (!p.is_zero()) throw ConfigError("analytic: the closed form needs zero prestrain and precurvature");
  }
  const fs::path dir = pick_output_dir(common, cfg.output_dir);
  const auto schedule = cfg.schedule();
  HeightField prev = HeightField::constant(cfg.beam.n_cells, cfg.h0);
  const HeightField initial = prev;
  std::vector<BaselineSolution> sols;
  std::vector<BaselineCertificate> certs;
  for (int i = 1; i <= schedule.steps(); ++i) {
    BaselineSolution s = solve_baseline_step(cfg.beam, cfg.load, prev, schedule.mass_at(i));
    if (i == 1 && cfg.load.kind == LoadKind::UniformLoad && schedule.mass_at(1) > cfg.initial_mass()) {
      s.x_hat = solve_baseline_first(cfg.beam, cfg.load.value, cfg.h0, schedule.mass_at(1)).x_hat;
    }
    certs.push_back(baseline_certificate(cfg.beam, cfg.load, prev, schedule.mass_at(i), s));
    if (!common.quiet) {
      std::printf("step %3d  lambda %.12g  growth cells %zu", i, s.lambda,
                  static_cast<std::size_t>(std::count(s.growth_set.begin(), s.growth_set.end(), true)));
      if (s.x_hat) std::printf("  x_hat %.6g", *s.x_hat);
      std::printf("\n");
    }
    prev = s.h;
    sols.push_back(std::move(s));
  }
  write_analytic(sols, initial, cfg.beam, cfg.load, certs, dir);
  render_profile_svg(read_trace(dir), cfg.plot_steps, dir);
  if (!common.quiet) std::printf("wrote %s\n", dir.string().c_str());
  return kOk;
}

int cmd_convexity(const std::string& config_path, const Common& common) {
  const RunConfig cfg = load_config(config_path);
  const PrestrainPair pre = cfg.prestrain_schedule().front();
  if (pre.is_zero()) throw ConfigError("convexity: prestrain.eps or prestrain.kappa must be nonzero");
  const fs::path dir = pick_output_dir(common, cfg.output_dir);
  const double moment =
      cfg.convexity_moment.value_or(std::abs(bending_moment(cfg.load, cfg.beam, 0.0)));
  const double e = cfg.beam.young_modulus;
  const double h0 = cfg.h0;

  auto emit = [&](ConvexityCurve curve) {
    curve.envelope = convex_envelope_1d(curve.samples);
    write_file_atomic(dir / (curve.name + ".csv"), convexity_csv(curve));
    render_convexity_svg(curve, dir);
  };

  std::error_code ec;
  fs::create_directories(dir, ec);
  if (pre.eps_p != 0.0) {
    const double eta = moment / (e * h0 * h0 * pre.eps_p);
    const auto iv = f_concavity_interval(eta);
    ConvexityCurve c;
    c.name = "f";
    c.label = "eta = " + format_number(eta);
    c.samples = sample_function([eta](double hb) { return f_value(eta, hb); }, cfg.convexity_hbar_min,
                                cfg.convexity_hbar_max, cfg.convexity_samples);
    double min_second = f_second(eta, c.samples.front().x);
    double at = c.samples.front().x;
    for (const auto& p : c.samples) {
      const double v = f_second(eta, p.x);
      if (v < min_second) {
        min_second = v;
        at = p.x;
      }
    }
    if (!common.quiet) {
      std::printf("f: eta = %.6g, f'' <= 0 on [%.6g, %.6g], min f'' on the grid = %.6g at hbar = %.6g\n",
                  eta, iv.lo, iv.hi, min_second, at);
    }
    emit(std::move(c));
  }
  if (pre.kappa_p != 0.0) {
    const double mu = moment / (e * h0 * h0 * h0 * pre.kappa_p);
    ConvexityCurve c;
    c.name = "g";
    c.label = "mu = " + format_number(mu);
    c.samples = sample_function([mu](double hb) { return g_value(mu, hb); }, cfg.convexity_hbar_min,
                                cfg.convexity_hbar_max, cfg.convexity_samples);
    double min_second = g_second(mu, c.samples.front().x);
    for (const auto& p : c.samples) min_second = std::min(min_second, g_second(mu, p.x));
    if (!common.quiet) std::printf("g: mu = %.6g, min g'' on the grid = %.6g\n", mu, min_second);
    emit(std::move(c));
  }
  if (!common.quiet) std::printf("wrote %s\n", dir.string().c_str());
  return kOk;
}

int cmd_plot(const std::string& trace_dir, const std::string& steps_text, bool steps_given,
             const Common& common) {
  const ProfileSeries series = read_trace(trace_dir);
  std::vector<int> steps = parse_steps(steps_text);
  if (!steps_given) {
    for (int i = 0; i <= series.steps(); ++i) steps.push_back(i);
  }
  const fs::path dir = common.output_dir.empty() ? fs::path(trace_dir) : fs::path(common.output_dir);
  const auto written = render_profile_svg(series, steps, dir);
  if (!common.quiet) {
    for (const auto& p : written) std::printf("wrote %s\n", p.string().c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental growth of prestrained cantilever beams"};
  app.require_subcommand(1);
  Common common;
  app.add_option("-o,--output-dir", common.output_dir,
                 "Output directory (default: output.dir, then $ACCRETE_OUTPUT_DIR, then ./accrete_out)");
  app.add_flag("-q,--quiet", common.quiet, "Only report errors");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the incremental growth problem");
  run->add_option("config", config_path, "Configuration file")->required();
  auto* analytic = app.add_subcommand("analytic", "Closed-form solution without prestrain");
  analytic->add_option("config", config_path, "Configuration file")->required();
  auto* convexity = app.add_subcommand("convexity", "Sample f or g with their convex envelopes");
  convexity->add_option("config", config_path, "Configuration file")->required();
  std::string trace_dir;
  std::string steps_text;
  auto* plot = app.add_subcommand("plot", "Render stored profiles as SVG");
  plot->add_option("trace-dir", trace_dir, "Directory holding profile.csv and summary.json")->required();
  auto* steps_opt = plot->add_option("--steps", steps_text, "Comma-separated steps (default: all)");

  for (auto* sub : {run, analytic, convexity, plot}) {
    sub->add_option("-o,--output-dir", common.output_dir, "Output directory");
    sub->add_flag("-q,--quiet", common.quiet, "Only report errors");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*run) return cmd_run(config_path, common);
    if (*analytic) return cmd_analytic(config_path, common);
    if (*convexity) return cmd_convexity(config_path, common);
    if (*plot) return cmd_plot(trace_dir, steps_text, steps_opt->count() > 0, common);
  } catch (const ConfigError& ex) {
    std::fprintf(stderr, "config error: %s\n", ex.what());
    return kConfig;
  } catch (const IoError& ex) {
    std::fprintf(stderr, "I/O error: %s\n", ex.what());
    return kIo;
  } catch (const ConvergenceError& ex) {
    std::fprintf(stderr, "solver error: %s\n", ex.what());
    return kSolver;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "invalid problem: %s\n", ex.what());
    return kConfig;
  }
  return kOk;
}
