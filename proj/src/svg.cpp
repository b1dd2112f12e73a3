#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "accrete/errors.hpp"
#include "accrete/output.hpp"

namespace accrete {

namespace fs = std::filesystem;

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Maps data coordinates into the plot box; y grows upwards.
struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

// Roughly five round tick values covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) {
    out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  }
  return out;
}

std::string open_svg(const std::string& title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(kWidth) +
       "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) +
       "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" " +
       "font-size=\"16\">" + xml_escape(title) + "</text>\n";
  return s;
}

std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  std::string s;
  s += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" +
       num(kWidth - kRight) + "\" y2=\"" + num(kHeight - kBottom) + "\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double t : ticks(f.x0, f.x1)) {
    const double x = f.px(t);
    s += "<line x1=\"" + num(x) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(kHeight - kBottom + 5) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(x) + "\" y=\"" + num(kHeight - kBottom + 18) +
         "\" text-anchor=\"middle\">" + num(t) + "</text>\n";
  }
  for (double t : ticks(f.y0, f.y1)) {
    const double y = f.py(t);
    s += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
         num(y) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + num(t) +
         "</text>\n";
  }
  s += "<text x=\"" + num((kLeft + kWidth - kRight) / 2) + "\" y=\"" + num(kHeight - 10) +
       "\" text-anchor=\"middle\">" + xml_escape(xlabel) + "</text>\n";
  s += "<text x=\"18\" y=\"" + num((kTop + kHeight - kBottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " + num((kTop + kHeight - kBottom) / 2) +
       ")\">" + xml_escape(ylabel) + "</text>\n";
  s += "</g>\n";
  return s;
}

// Staircase outline of a piecewise-constant profile.
std::string staircase(const Frame& f, const std::vector<double>& h, double length) {
  const double delta = length / static_cast<double>(h.size());
  std::string pts;
  for (std::size_t j = 0; j < h.size(); ++j) {
    const double a = static_cast<double>(j) * delta;
    pts += num(f.px(a)) + "," + num(f.py(h[j])) + " " + num(f.px(a + delta)) + "," + num(f.py(h[j])) + " ";
  }
  return pts;
}

std::string polyline(const Frame& f, const std::vector<Point>& pts) {
  std::string s;
  for (const auto& p : pts) s += num(f.px(p.x)) + "," + num(f.py(p.y)) + " ";
  return s;
}

}  // namespace

std::vector<fs::path> render_profile_svg(const ProfileSeries& series, const std::vector<int>& steps,
                                         const fs::path& dir) {
  for (int i : steps) {
    if (i < 0 || i > series.steps()) {
      throw DomainError("step " + std::to_string(i) + " is not in the trace (0.." +
                        std::to_string(series.steps()) + ")");
    }
  }
  std::vector<fs::path> written;
  if (steps.empty()) return written;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  double hmax = 0.0;
  for (const auto& h : series.heights) hmax = std::max(hmax, *std::max_element(h.begin(), h.end()));
  const Frame f{0.0, series.length, 0.0, 1.05 * hmax};

  for (int i : steps) {
    std::string s = open_svg("step " + std::to_string(i));
    s += axes(f, "x (dm)", "h (dm)");
    const auto& h = series.heights[static_cast<std::size_t>(i)];
    s += "<polygon fill=\"#9ecae1\" stroke=\"#08519c\" stroke-width=\"1\" points=\"" +
         num(f.px(0.0)) + "," + num(f.py(0.0)) + " " + staircase(f, h, series.length) +
         num(f.px(series.length)) + "," + num(f.py(0.0)) + "\"/>\n";
    for (int k = 0; k < i; ++k) {
      s += "<polyline fill=\"none\" stroke=\"#636363\" stroke-width=\"0.8\" stroke-dasharray=\"4 3\" points=\"" +
           staircase(f, series.heights[static_cast<std::size_t>(k)], series.length) + "\"/>\n";
    }
    s += "</svg>\n";
    char name[40];
    std::snprintf(name, sizeof name, "profile_step_%02d.svg", i);
    const fs::path path = dir / name;
    write_file_atomic(path, s);
    written.push_back(path);
  }
  return written;
}

fs::path render_convexity_svg(const ConvexityCurve& curve, const fs::path& dir) {
  if (curve.samples.size() < 2 || curve.samples.size() != curve.envelope.size()) {
    throw InputError("convexity curve needs matching samples and envelope");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

  double lo = curve.samples.front().y;
  double hi = lo;
  for (const auto& p : curve.samples) {
    lo = std::min(lo, p.y);
    hi = std::max(hi, p.y);
  }
  for (const auto& p : curve.envelope) lo = std::min(lo, p.y);
  const double pad = 0.05 * (hi - lo > 0.0 ? hi - lo : 1.0);
  const Frame f{curve.samples.front().x, curve.samples.back().x, lo - pad, hi + pad};

  std::string s = open_svg(curve.name + " and its convex envelope (" + curve.label + ")");
  s += axes(f, "hbar", curve.name);
  s += "<polyline fill=\"none\" stroke=\"#2171b5\" stroke-width=\"1.5\" points=\"" +
       polyline(f, curve.samples) + "\"/>\n";
  s += "<polyline fill=\"none\" stroke=\"#cb181d\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\" points=\"" +
       polyline(f, curve.envelope) + "\"/>\n";
  s += "</svg>\n";
  const fs::path path = dir / (curve.name + ".svg");
  write_file_atomic(path, s);
  return path;
}

}  // namespace accrete
