#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "accrete/baseline.hpp"
#include "accrete/compliance.hpp"
#include "accrete/config.hpp"
#include "accrete/growth.hpp"

namespace accrete {

/// Heights by step as stored on disk. heights[0] is the initial profile.
struct ProfileSeries {
  double length = 0.0;
  std::vector<double> x_center;
  std::vector<std::vector<double>> heights;

  int steps() const { return static_cast<int>(heights.size()) - 1; }
};

ProfileSeries profile_series(const GrowthTrace& trace);

/// Writes `profile.csv` (steps 1..S) and `summary.json` into dir, creating it
/// if needed. Each file is written to a temporary name and renamed into place.
/// `config`, when given, is embedded in the summary.
void write_trace(const GrowthTrace& trace, const std::filesystem::path& dir,
                 const RunConfig* config = nullptr);

/// profile.csv + summary.json for the closed-form stress-free solution.
void write_analytic(const std::vector<BaselineSolution>& steps, const HeightField& initial,
                    const BeamConfig& beam, const LoadCase& load,
                    const std::vector<BaselineCertificate>& certificates,
                    const std::filesystem::path& dir);

/// Reads what write_trace (or write_analytic) produced.
ProfileSeries read_trace(const std::filesystem::path& dir);

/// The exact text of profile.csv for a series (steps 1..S).
std::string profile_csv(const ProfileSeries& series);

/// Text written atomically: temp file in the same directory, then rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

/// One `profile_step_<i>.svg` per requested step: the region 0 <= y <= h_i(x)
/// filled, earlier steps drawn as outlines. Returns the written paths.
std::vector<std::filesystem::path> render_profile_svg(const ProfileSeries& series,
                                                      const std::vector<int>& steps,
                                                      const std::filesystem::path& dir);

/// A sampled function of hbar and its lower convex envelope.
struct ConvexityCurve {
  std::string name;   // "f" or "g"
  std::string label;  // e.g. "eta = -0.0222"
  std::vector<Point> samples;
  std::vector<Point> envelope;
};

/// `<name>.svg` with the function and its envelope overlaid.
std::filesystem::path render_convexity_svg(const ConvexityCurve& curve,
                                           const std::filesystem::path& dir);

/// Columns hbar, value, envelope.
std::string convexity_csv(const ConvexityCurve& curve);

}  // namespace accrete
