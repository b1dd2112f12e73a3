#include "accrete/output.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "accrete/errors.hpp"
#include "json.hpp"

namespace accrete {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_double(const std::string& s, const fs::path& path, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError(path.string() + ":" + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

const char* density_name(DensityCase c) {
  switch (c) {
    case DensityCase::General: return "general";
    case DensityCase::Baseline: return "baseline";
    case DensityCase::ConstPrestrain: return "const_prestrain";
    case DensityCase::ConstPrecurvFirst: return "const_precurv_first";
  }
  return "unknown";
}

ordered_json beam_json(const BeamConfig& beam) {
  return {{"length", beam.length}, {"young_modulus", beam.young_modulus}, {"n_cells", beam.n_cells}};
}

ordered_json load_json(const LoadCase& load) {
  return {{"kind", load.kind == LoadKind::UniformLoad ? "uniform" : "moment"}, {"value", load.value}};
}

ordered_json config_json(const RunConfig& config) {
  // Key/value strings exactly as the canonical dump writes them.
  ordered_json out = ordered_json::object();
  std::istringstream in(dump_config(config));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

}  // namespace

ProfileSeries profile_series(const GrowthTrace& trace) {
  ProfileSeries s;
  s.length = trace.config.length;
  s.x_center = trace.config.cell_centers();
  s.heights.push_back(trace.initial.vec());
  for (const auto& rec : trace.steps) s.heights.push_back(rec.h.vec());
  return s;
}

std::string profile_csv(const ProfileSeries& series) {
  std::string out = "step,x_center,height\n";
  for (int i = 1; i <= series.steps(); ++i) {
    const auto& h = series.heights[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < h.size(); ++j) {
      out += std::to_string(i);
      out += ',';
      out += g17(series.x_center[j]);
      out += ',';
      out += g17(h[j]);
      out += '\n';
    }
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp.string() + " to " + path.string());
  }
}

void write_trace(const GrowthTrace& trace, const fs::path& dir, const RunConfig* config) {
  ensure_dir(dir);
  ordered_json summary;
  summary["beam"] = beam_json(trace.config);
  if (config) {
    summary["load"] = load_json(config->load);
    summary["config"] = config_json(*config);
  }
  summary["initial"] = {{"mass", trace.initial.mass(trace.config.cell_width())},
                        {"compliance", trace.initial_compliance}};
  summary["initial_height"] = trace.initial.vec();
  ordered_json steps = ordered_json::array();
  for (const auto& r : trace.steps) {
    steps.push_back({{"step", r.step},
                     {"mass", r.mass},
                     {"mass_target", r.mass_target},
                     {"compliance", r.compliance},
                     {"objective", r.objective},
                     {"lambda", r.lambda},
                     {"kkt_residual", r.kkt_residual},
                     {"dual_infeasibility", r.dual_infeasibility},
                     {"growth_fraction", r.growth_fraction},
                     {"max_increment", r.max_increment},
                     {"iterations", r.iterations},
                     {"newton_iterations", r.newton_iterations},
                     {"degenerate", r.degenerate},
                     {"density", density_name(r.density)}});
  }
  summary["steps"] = std::move(steps);

  write_file_atomic(dir / "profile.csv", profile_csv(profile_series(trace)));
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
}

void write_analytic(const std::vector<BaselineSolution>& steps, const HeightField& initial,
                    const BeamConfig& beam, const LoadCase& load,
                    const std::vector<BaselineCertificate>& certificates, const fs::path& dir) {
  ensure_dir(dir);
  ProfileSeries series;
  series.length = beam.length;
  series.x_center = beam.cell_centers();
  series.heights.push_back(initial.vec());
  ordered_json rows = ordered_json::array();
  const double delta = beam.cell_width();
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    series.heights.push_back(s.h.vec());
    const auto& prev = series.heights[i];
    std::size_t grown = 0;
    for (bool g : s.growth_set) grown += g ? 1 : 0;
    double max_inc = 0.0;
    for (std::size_t j = 0; j < prev.size(); ++j) max_inc = std::max(max_inc, s.h[j] - prev[j]);
    ordered_json row = {{"step", i + 1},
                        {"mass", s.h.mass(delta)},
                        {"mass_target", s.mass},
                        {"compliance", compliance_total(equilibrium_bare(beam, load, s.h), s.h, beam)},
                        {"lambda", s.lambda},
                        {"growth_fraction", static_cast<double>(grown) / static_cast<double>(prev.size())},
                        {"max_increment", max_inc}};
    if (s.x_hat) row["x_hat"] = *s.x_hat;
    if (i < certificates.size()) {
      const auto& c = certificates[i];
      row["certificate"] = {{"stationarity", c.stationarity},
                            {"dual_infeasibility", c.dual_infeasibility},
                            {"complementarity", c.complementarity},
                            {"bound_violation", c.bound_violation},
                            {"mass_error", c.mass_error}};
    }
    rows.push_back(std::move(row));
  }
  ordered_json summary;
  summary["beam"] = beam_json(beam);
  summary["load"] = load_json(load);
  summary["initial"] = {{"mass", initial.mass(delta)},
                        {"compliance", compliance_total(equilibrium_bare(beam, load, initial), initial, beam)}};
  summary["initial_height"] = initial.vec();
  summary["steps"] = std::move(rows);
  write_file_atomic(dir / "profile.csv", profile_csv(series));
  write_file_atomic(dir / "summary.json", summary.dump(2) + "\n");
}

ProfileSeries read_trace(const fs::path& dir) {
  const fs::path csv_path = dir / "profile.csv";
  const fs::path json_path = dir / "summary.json";
  ordered_json summary;
  try {
    summary = ordered_json::parse(read_file(json_path));
  } catch (const ordered_json::exception& ex) {
    throw IoError(json_path.string() + ": " + ex.what());
  }

  ProfileSeries s;
  try {
    s.length = summary.at("beam").at("length").get<double>();
    s.heights.push_back(summary.at("initial_height").get<std::vector<double>>());
  } catch (const ordered_json::exception& ex) {
    throw IoError(json_path.string() + ": " + ex.what());
  }

  std::istringstream in(read_file(csv_path));
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != "step,x_center,height") {
    throw IoError(csv_path.string() + ":1: unexpected header");
  }
  std::map<int, std::vector<double>> by_step;
  std::vector<double> x_first;
  int first_step = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw IoError(csv_path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    }
    const int step = static_cast<int>(parse_double(line.substr(0, c1), csv_path, line_no));
    const double x = parse_double(line.substr(c1 + 1, c2 - c1 - 1), csv_path, line_no);
    const double h = parse_double(line.substr(c2 + 1), csv_path, line_no);
    if (first_step < 0) first_step = step;
    if (step == first_step) x_first.push_back(x);
    by_step[step].push_back(h);
  }
  const std::size_t n = s.heights.front().size();
  int expected = 1;
  for (auto& [step, h] : by_step) {
    if (step != expected || h.size() != n) {
      throw IoError(csv_path.string() + ": step " + std::to_string(step) +
                    " is out of sequence or has the wrong number of cells");
    }
    s.heights.push_back(std::move(h));
    ++expected;
  }
  if (x_first.empty()) {
    const double delta = s.length / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) x_first.push_back((static_cast<double>(j) + 0.5) * delta);
  }
  s.x_center = std::move(x_first);
  return s;
}

std::string convexity_csv(const ConvexityCurve& curve) {
  std::string out = "hbar," + curve.name + "," + curve.name + "_envelope\n";
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    out += g17(curve.samples[i].x) + "," + g17(curve.samples[i].y) + "," +
           g17(curve.envelope[i].y) + "\n";
  }
  return out;
}

}  // namespace accrete
