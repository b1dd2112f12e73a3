#include "accrete/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include "accrete/errors.hpp"

namespace accrete {

namespace {

struct Entry {
  std::string value;
  int line = 0;
  int column = 0;  // of the value
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty() || k.front() == '.' || k.back() == '.') return false;
  for (char c : k) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
    if (!ok) return false;
  }
  return k.find("..") == std::string::npos;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const Entry& entry(const std::string& key) const { return entries_.at(key); }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(key + ": " + msg);
    throw ConfigError("line " + std::to_string(it->second.line) + ", column " +
                          std::to_string(it->second.column) + ": " + key + ": " + msg,
                      it->second.line, it->second.column);
  }

  double number(const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || t.empty()) fail(key, "expected a number, got '" + t + "'");
    return v;
  }

  double real(const std::string& key) const { return number(key, entry(key).value); }

  long long integer(const std::string& key, const std::string& text) const {
    const std::string t = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
      fail(key, "expected an integer, got '" + t + "'");
    }
    return v;
  }

  bool boolean(const std::string& key) const {
    const auto& v = entry(key).value;
    if (v == "true") return true;
    if (v == "false") return false;
    fail(key, "expected true or false, got '" + v + "'");
  }

  std::vector<std::string> items(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(entry(key).value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (out.empty() || std::any_of(out.begin(), out.end(), [](const auto& s) { return s.empty(); })) {
      fail(key, "malformed list '" + entry(key).value + "'");
    }
    return out;
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : items(key)) out.push_back(number(key, s));
    return out;
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& c : config_keys()) k.emplace_back(c.name);
    return k;
  }();
  return keys;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v[i]);
  }
  return s;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"length", "number > 0", "20", "beam length (dm)"},
      {"young_modulus", "number > 0", "1e5", "Young's modulus (N/dm^2)"},
      {"n_cells", "integer >= 1", "200", "number of cells"},
      {"h0", "number > 0", "0.3", "initial height, constant along the beam (dm)"},
      {"load.kind", "uniform | moment", "uniform", "distributed load p or constant moment M"},
      {"load.value", "number", "(required)", "p in N/dm, or M in N dm"},
      {"steps", "integer >= 1", "10", "number of depositions S"},
      {"mass.mode", "equality | inequality", "equality", "mass constraint type"},
      {"mass.increment", "number >= 0", "m0 / 10", "mass added per step"},
      {"mass.values", "list of numbers", "(affine)", "explicit m_1..m_S; sets steps"},
      {"prestrain.eps", "number or list of S", "0", "layer prestrain"},
      {"prestrain.kappa", "number or list of S", "0", "layer precurvature (1/dm)"},
      {"tau", "number > 0 | inf", "inf", "proximal weight"},
      {"ablation", "true | false", "false", "allow the surface to recede"},
      {"solver.tol_kkt", "number > 0", "1e-8", "stationarity tolerance"},
      {"solver.tol_mass", "number > 0", "1e-10", "relative mass tolerance"},
      {"solver.tol_active", "number >= 0", "1e-9", "distance below which a cell is on its bound"},
      {"solver.max_iter", "integer >= 1", "10000", "iteration cap per step"},
      {"solver.max_move", "number >= 0", "0.05", "per-iteration move cap / max(h_prev); 0 = none"},
      {"solver.continuation", "true | false", "true", "Newton continuation before descent"},
      {"output.dir", "path", "(see CLI)", "output directory"},
      {"output.plot_steps", "list of integers", "(none)", "steps rendered as SVG after a run"},
      {"convexity.hbar_min", "number > 0", "0.5", "lower end of the hbar range"},
      {"convexity.hbar_max", "number > hbar_min", "4", "upper end of the hbar range"},
      {"convexity.samples", "integer >= 3", "2048", "sample count"},
      {"convexity.moment", "number", "|M(0)|", "moment entering eta and mu"},
  };
  return keys;
}

RunConfig parse_config(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      const auto col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
      throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(col) +
                            ": expected 'key = value'",
                        line_no, col);
    }
    const std::string key = trim(line.substr(0, eq));
    const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
    if (!valid_key(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(key_col) +
                            ": invalid key '" + key + "'",
                        line_no, key_col);
    }
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end()) {
      throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(key_col) +
                            ": unknown key '" + key + "'",
                        line_no, key_col);
    }
    if (entries.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(key_col) +
                            ": duplicate key '" + key + "' (first set on line " +
                            std::to_string(entries[key].line) + ")",
                        line_no, key_col);
    }
    const std::string rest = line.substr(eq + 1);
    const auto vpos = rest.find_first_not_of(" \t");
    const int value_col = static_cast<int>(eq + 1 + (vpos == std::string::npos ? 0 : vpos)) + 1;
    const std::string value = trim(rest);
    if (value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ", column " + std::to_string(value_col) +
                            ": missing value for '" + key + "'",
                        line_no, value_col);
    }
    entries[key] = {value, line_no, value_col};
  }

  const Reader r(std::move(entries));
  RunConfig c;

  auto positive = [&](const std::string& key, double& out) {
    if (!r.has(key)) return;
    out = r.real(key);
    if (!(out > 0.0) || !std::isfinite(out)) r.fail(key, "must be positive and finite");
  };
  auto nonnegative = [&](const std::string& key, double& out) {
    if (!r.has(key)) return;
    out = r.real(key);
    if (!(out >= 0.0) || !std::isfinite(out)) r.fail(key, "must be nonnegative and finite");
  };
  auto count = [&](const std::string& key, int& out, long long min) {
    if (!r.has(key)) return;
    const auto v = r.integer(key, r.entry(key).value);
    if (v < min || v > 100'000'000) r.fail(key, "must be an integer >= " + std::to_string(min));
    out = static_cast<int>(v);
  };

  positive("length", c.beam.length);
  positive("young_modulus", c.beam.young_modulus);
  count("n_cells", c.beam.n_cells, 1);
  positive("h0", c.h0);

  if (r.has("load.kind")) {
    const auto& v = r.entry("load.kind").value;
    if (v == "uniform") {
      c.load.kind = LoadKind::UniformLoad;
    } else if (v == "moment") {
      c.load.kind = LoadKind::ConstantMoment;
    } else {
      r.fail("load.kind", "expected uniform or moment, got '" + v + "'");
    }
  }
  if (!r.has("load.value")) throw ConfigError("load.value: required key is missing");
  c.load.value = r.real("load.value");
  if (!std::isfinite(c.load.value)) r.fail("load.value", "must be finite");

  count("steps", c.steps, 1);
  if (r.has("mass.mode")) {
    const auto& v = r.entry("mass.mode").value;
    if (v == "equality") {
      c.mass_mode = MassMode::Equality;
    } else if (v == "inequality") {
      c.mass_mode = MassMode::Inequality;
    } else {
      r.fail("mass.mode", "expected equality or inequality, got '" + v + "'");
    }
  }
  if (r.has("mass.increment")) {
    double inc = 0.0;
    nonnegative("mass.increment", inc);
    c.mass_increment = inc;
  }
  if (r.has("mass.values")) {
    if (r.has("mass.increment")) r.fail("mass.values", "conflicts with mass.increment");
    c.mass_values = r.reals("mass.values");
    if (r.has("steps") && static_cast<int>(c.mass_values.size()) != c.steps) {
      r.fail("mass.values", "has " + std::to_string(c.mass_values.size()) +
                                " entries but steps = " + std::to_string(c.steps));
    }
    c.steps = static_cast<int>(c.mass_values.size());
  }

  auto prestrain = [&](const std::string& key, std::vector<double>& out) {
    if (!r.has(key)) return;
    out = r.reals(key);
    for (double v : out) {
      if (!std::isfinite(v)) r.fail(key, "values must be finite");
    }
    if (out.size() != 1 && static_cast<int>(out.size()) != c.steps) {
      r.fail(key, "needs 1 or " + std::to_string(c.steps) + " values, got " +
                      std::to_string(out.size()));
    }
  };
  prestrain("prestrain.eps", c.prestrain_eps);
  prestrain("prestrain.kappa", c.prestrain_kappa);

  if (r.has("tau")) {
    const double t = r.real("tau");
    if (t == std::numeric_limits<double>::infinity()) {
      c.tau = Tau::infinite();
    } else if (t > 0.0 && std::isfinite(t)) {
      c.tau = Tau(t);
    } else {
      r.fail("tau", "must be positive or inf");
    }
  }
  if (r.has("ablation")) c.ablation = r.boolean("ablation");

  positive("solver.tol_kkt", c.solver.tol_kkt);
  positive("solver.tol_mass", c.solver.tol_mass);
  nonnegative("solver.tol_active", c.solver.tol_active);
  count("solver.max_iter", c.solver.max_iter, 1);
  nonnegative("solver.max_move", c.solver.max_move);
  if (r.has("solver.continuation")) c.solver.continuation = r.boolean("solver.continuation");

  if (r.has("output.dir")) c.output_dir = r.entry("output.dir").value;
  if (r.has("output.plot_steps")) {
    for (const auto& s : r.items("output.plot_steps")) {
      const auto v = r.integer("output.plot_steps", s);
      if (v < 0 || v > c.steps) {
        r.fail("output.plot_steps", "step " + s + " is outside 0.." + std::to_string(c.steps));
      }
      c.plot_steps.push_back(static_cast<int>(v));
    }
  }

  positive("convexity.hbar_min", c.convexity_hbar_min);
  positive("convexity.hbar_max", c.convexity_hbar_max);
  if (!(c.convexity_hbar_max > c.convexity_hbar_min)) {
    r.fail(r.has("convexity.hbar_max") ? "convexity.hbar_max" : "convexity.hbar_min",
           "hbar_max must exceed hbar_min");
  }
  count("convexity.samples", c.convexity_samples, 3);
  if (r.has("convexity.moment")) {
    const double m = r.real("convexity.moment");
    if (!std::isfinite(m)) r.fail("convexity.moment", "must be finite");
    c.convexity_moment = m;
  }

  // Cross-key checks against the growth module's own validation.
  try {
    c.schedule().validate(c.initial_mass(), c.ablation);
  } catch (const DomainError& ex) {
    const std::string key = r.has("mass.values") ? "mass.values" : "mass.increment";
    r.fail(key, ex.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading " + path);
  return parse_config(ss.str());
}

MassSchedule RunConfig::schedule() const {
  if (!mass_values.empty()) return MassSchedule::explicit_values(mass_values);
  const double m0 = initial_mass();
  return MassSchedule::affine(m0, mass_increment.value_or(m0 / 10.0), steps);
}

std::vector<PrestrainPair> RunConfig::prestrain_schedule() const {
  std::vector<PrestrainPair> out(static_cast<std::size_t>(steps));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].eps_p = prestrain_eps.size() == 1 ? prestrain_eps[0] : prestrain_eps.at(i);
    out[i].kappa_p = prestrain_kappa.size() == 1 ? prestrain_kappa[0] : prestrain_kappa.at(i);
  }
  return out;
}

GrowthSetup RunConfig::to_growth_setup() const {
  GrowthSetup s;
  s.config = beam;
  s.load = load;
  s.h0 = HeightField::constant(beam.n_cells, h0);
  s.schedule = schedule();
  s.prestrains = prestrain_schedule();
  s.tau = tau;
  s.mass_mode = mass_mode;
  s.ablation = ablation;
  s.options = solver;
  return s;
}

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  // Plain decimals for everyday magnitudes, exponent notation outside them.
  const double mag = std::abs(value);
  const bool fixed = mag == 0.0 || (mag >= 1e-4 && mag < 1e15);
  const auto [ptr, ec] = fixed ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                               : std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::logic_error("format_number: buffer too small");
  return std::string(buf, ptr);
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  line("length", format_number(c.beam.length));
  line("young_modulus", format_number(c.beam.young_modulus));
  line("n_cells", std::to_string(c.beam.n_cells));
  line("h0", format_number(c.h0));
  line("load.kind", c.load.kind == LoadKind::UniformLoad ? "uniform" : "moment");
  line("load.value", format_number(c.load.value));
  if (c.mass_values.empty()) line("steps", std::to_string(c.steps));
  line("mass.mode", c.mass_mode == MassMode::Equality ? "equality" : "inequality");
  if (c.mass_increment) line("mass.increment", format_number(*c.mass_increment));
  if (!c.mass_values.empty()) line("mass.values", join_numbers(c.mass_values));
  line("prestrain.eps", join_numbers(c.prestrain_eps));
  line("prestrain.kappa", join_numbers(c.prestrain_kappa));
  line("tau", format_number(c.tau.value()));
  line("ablation", c.ablation ? "true" : "false");
  line("solver.tol_kkt", format_number(c.solver.tol_kkt));
  line("solver.tol_mass", format_number(c.solver.tol_mass));
  line("solver.tol_active", format_number(c.solver.tol_active));
  line("solver.max_iter", std::to_string(c.solver.max_iter));
  line("solver.max_move", format_number(c.solver.max_move));
  line("solver.continuation", c.solver.continuation ? "true" : "false");
  if (!c.output_dir.empty()) line("output.dir", c.output_dir);
  if (!c.plot_steps.empty()) {
    std::string s;
    for (std::size_t i = 0; i < c.plot_steps.size(); ++i) {
      if (i) s += ", ";
      s += std::to_string(c.plot_steps[i]);
    }
    line("output.plot_steps", s);
  }
  line("convexity.hbar_min", format_number(c.convexity_hbar_min));
  line("convexity.hbar_max", format_number(c.convexity_hbar_max));
  line("convexity.samples", std::to_string(c.convexity_samples));
  if (c.convexity_moment) line("convexity.moment", format_number(*c.convexity_moment));
  return out.str();
}

}  // namespace accrete
