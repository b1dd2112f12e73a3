#include "accrete/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "accrete/config.hpp"
#include "accrete/errors.hpp"
#include "layers.hpp"

namespace accrete {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive, got " + format_number(v));
  }
}

double square(double v) { return v * v; }

double section_density(double h, const SectionStrain& s, double young) {
  return young * (s.eps * s.eps * h + s.eps * s.kappa * h * h + s.kappa * s.kappa * h * h * h / 3.0);
}

}  // namespace

ComplianceDensity ComplianceDensity::baseline(double moment, double young_modulus) {
  require_positive(young_modulus, "Young's modulus");
  ComplianceDensity d;
  d.kind_ = DensityCase::Baseline;
  d.moment_ = moment;
  d.young_ = young_modulus;
  return d;
}

ComplianceDensity ComplianceDensity::prestrain(double moment, double young_modulus, double h0,
                                               double eps_p) {
  require_positive(young_modulus, "Young's modulus");
  require_positive(h0, "base height h0");
  ComplianceDensity d;
  d.kind_ = DensityCase::ConstPrestrain;
  d.moment_ = moment;
  d.young_ = young_modulus;
  d.h0_ = h0;
  d.eps_p_ = eps_p;
  return d;
}

ComplianceDensity ComplianceDensity::precurv_first(double moment, double young_modulus, double h0,
                                                   double kappa_p) {
  require_positive(young_modulus, "Young's modulus");
  require_positive(h0, "base height h0");
  ComplianceDensity d;
  d.kind_ = DensityCase::ConstPrecurvFirst;
  d.moment_ = moment;
  d.young_ = young_modulus;
  d.h0_ = h0;
  d.kappa_p_ = kappa_p;
  return d;
}

ComplianceDensity ComplianceDensity::general(double moment, double young_modulus,
                                             std::vector<double> below,
                                             std::vector<PrestrainPair> prestrains) {
  require_positive(young_modulus, "Young's modulus");
  if (below.empty() || below.size() != prestrains.size()) {
    throw PreconditionError("general density needs h_0..h_{i-1} and i prestrains");
  }
  for (double h : below) require_positive(h, "layer height");
  ComplianceDensity d;
  d.kind_ = DensityCase::General;
  d.moment_ = moment;
  d.young_ = young_modulus;
  d.h0_ = below.front();
  d.below_ = std::move(below);
  d.prestrains_ = std::move(prestrains);
  d.eps_p_ = d.prestrains_.back().eps_p;
  d.kappa_p_ = d.prestrains_.back().kappa_p;
  return d;
}

double ComplianceDensity::value(double h) const {
  switch (kind_) {
    case DensityCase::Baseline:
      return density_baseline(h, moment_, young_);
    case DensityCase::ConstPrestrain:
      return density_prestrain(h, h0_, moment_, young_, eps_p_);
    case DensityCase::ConstPrecurvFirst:
      return density_precurv_first(h, h0_, moment_, young_, kappa_p_);
    case DensityCase::General: {
      require_positive(h, "height");
      std::vector<double> col(below_);
      col.push_back(h);
      const auto s = solve_section(col, prestrains_, moment_, young_);
      return section_density(h, s, young_);
    }
  }
  return 0.0;
}

double ComplianceDensity::derivative(double h) const { return density_derivative(*this, h); }

double compliance_total(const EquilibriumState& state, const HeightField& h,
                        const BeamConfig& config) {
  if (state.eps.size() != h.size() || state.kappa.size() != h.size()) {
    throw PreconditionError("compliance_total: state and height sizes differ");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) {
    sum += section_density(h[j], {state.eps[j], state.kappa[j]}, config.young_modulus);
  }
  return config.cell_width() * sum;
}

double density_baseline(double h, double moment, double young_modulus) {
  require_positive(h, "height");
  return 12.0 * moment * moment / (young_modulus * h * h * h);
}

double density_prestrain(double h, double h0, double moment, double young_modulus,
                         double eps_p) {
  require_positive(h0, "base height h0");
  require_positive(h, "height");
  const double e = young_modulus;
  const double a = e * eps_p * h0 * h0 + 2.0 * moment;
  return 3.0 * a * a / (e * h * h * h) - e * eps_p * eps_p * (2.0 * h0 - h) -
         6.0 * eps_p * h0 * a / (h * h) + 4.0 * e * eps_p * eps_p * h0 * h0 / h;
}

double density_precurv_first(double h, double h0, double moment, double young_modulus,
                             double kappa_p) {
  require_positive(h0, "base height h0");
  require_positive(h, "height");
  const double e = young_modulus;
  const double k = kappa_p;
  const double h03 = h0 * h0 * h0;
  const double b = e * k * h03 + 3.0 * moment;
  return 4.0 * b * b / (3.0 * e * h * h * h) - k * (2.0 * e * k * h03 - e * k * h * h * h + 6.0 * moment) / 3.0 -
         2.0 * h0 * h0 * k * b / (h * h) + e * h0 * h03 * k * k / h;
}

double density_derivative(const ComplianceDensity& density, double h) {
  require_positive(h, "height");
  const double e = density.young_modulus();
  const double m = density.moment();
  switch (density.kind()) {
    case DensityCase::Baseline:
      return -36.0 * m * m / (e * square(square(h)));
    case DensityCase::ConstPrestrain: {
      const double ep = density.eps_p();
      const double h0 = density.base_height();
      const double a = e * ep * h0 * h0 + 2.0 * m;
      return -9.0 * a * a / (e * square(square(h))) + e * ep * ep +
             12.0 * ep * h0 * a / (h * h * h) - 4.0 * e * ep * ep * h0 * h0 / (h * h);
    }
    case DensityCase::ConstPrecurvFirst: {
      const double k = density.kappa_p();
      const double h0 = density.base_height();
      const double h03 = h0 * h0 * h0;
      const double b = e * k * h03 + 3.0 * m;
      return -4.0 * b * b / (e * square(square(h))) + e * k * k * h * h +
             4.0 * h0 * h0 * k * b / (h * h * h) - e * h0 * h03 * k * k / (h * h);
    }
    case DensityCase::General: {
      // Differentiating the section balance in h gives d eps = -2 r / h and
      // d kappa = 6 r / h^2, r being the mismatch between the prestrain q of
      // the material entering at the top fibre and the strain s there.
      // Everything collapses to c' = E s (2 q - s).
      const auto& below = density.layers_below();
      std::vector<double> col(below);
      col.push_back(h);
      const auto state = solve_section(col, density.prestrains(), m, e);
      const double s = state.eps + state.kappa * h;
      PrestrainPair top{0.0, 0.0};
      if (h >= below.back()) {
        top = density.prestrains().back();
      } else {
        // Trimmed column: the material added at y = h belongs to the highest
        // surviving layer whose span contains it (right-hand limit).
        const auto spans = detail::layer_intervals(below);
        for (std::size_t k = spans.size(); k-- > 1;) {
          if (spans[k].lo <= h && h < spans[k].hi) {
            top = density.prestrains()[k - 1];
            break;
          }
        }
      }
      const double q = top.eps_p + top.kappa_p * h;
      return e * s * (2.0 * q - s);
    }
  }
  return 0.0;
}

double f_value(double eta, double hbar) {
  require_positive(hbar, "hbar");
  const double r = 1.0 / hbar;
  const double s = 1.0 + 2.0 * eta;
  return hbar - 2.0 + r * (4.0 + r * (-6.0 * s + r * 3.0 * s * s));
}

double f_first(double eta, double hbar) {
  require_positive(hbar, "hbar");
  const double r = 1.0 / hbar;
  const double s = 1.0 + 2.0 * eta;
  return 1.0 + r * r * (-4.0 + r * (12.0 * s - r * 9.0 * s * s));
}

double f_second(double eta, double hbar) {
  require_positive(hbar, "hbar");
  const double h2 = hbar * hbar;
  return 4.0 * (6.0 * eta - hbar + 3.0) * (6.0 * eta - 2.0 * hbar + 3.0) / (h2 * h2 * hbar);
}

double g_value(double mu, double hbar) {
  require_positive(hbar, "hbar");
  const double r = 1.0 / hbar;
  const double s = 3.0 * mu + 1.0;
  return hbar * hbar * hbar / 3.0 - (6.0 * mu + 2.0) / 3.0 +
         r * (1.0 + r * (-2.0 * s + r * 4.0 * s * s / 3.0));
}

double g_first(double mu, double hbar) {
  require_positive(hbar, "hbar");
  const double r = 1.0 / hbar;
  const double s = 3.0 * mu + 1.0;
  return hbar * hbar + r * r * (-1.0 + r * (4.0 * s - r * 4.0 * s * s));
}

double g_second(double mu, double hbar) {
  require_positive(hbar, "hbar");
  const double shift = mu + (8.0 - 3.0 * hbar) / 24.0;
  const double h2 = hbar * hbar;
  return 2.0 / (h2 * h2 * hbar) * (72.0 * shift * shift + h2 * (8.0 * h2 * h2 - 1.0) / 8.0);
}

ConcavityInterval f_concavity_interval(double eta) {
  const double a = 6.0 * eta + 3.0;
  return {std::min(a, a / 2.0), std::max(a, a / 2.0)};
}

std::vector<Point> convex_envelope_1d(std::span<const Point> samples) {
  if (samples.size() < 3) throw InputError("convex envelope needs at least 3 samples");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].x > samples[i - 1].x)) {
      throw InputError("samples must have strictly increasing x (index " + std::to_string(i) + ")");
    }
  }

  // Andrew's monotone chain, lower part only.
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    while (hull.size() >= 2) {
      const Point& a = samples[hull[hull.size() - 2]];
      const Point& b = samples[hull.back()];
      const Point& c = samples[i];
      const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(i);
  }

  std::vector<Point> out(samples.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i].x;
    while (seg + 2 < hull.size() && samples[hull[seg + 1]].x <= x) ++seg;
    const Point& a = samples[hull[seg]];
    const Point& b = samples[hull[seg + 1]];
    double y;
    if (i == hull[seg]) {
      y = a.y;
    } else if (i == hull[seg + 1]) {
      y = b.y;
    } else {
      const double t = (x - a.x) / (b.x - a.x);
      y = a.y + t * (b.y - a.y);
    }
    out[i] = {x, std::min(y, samples[i].y)};
  }
  return out;
}

std::vector<Point> sample_function(const std::function<double(double)>& fn, double lo, double hi,
                                   int count) {
  if (count < 2 || !(hi > lo)) throw InputError("need count >= 2 and hi > lo");
  std::vector<Point> pts(count);
  for (int i = 0; i < count; ++i) {
    const double x = lo + (hi - lo) * i / (count - 1);
    pts[i] = {x, fn(x)};
  }
  return pts;
}

}  // namespace accrete
