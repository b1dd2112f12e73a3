#pragma once

#include <optional>
#include <string>
#include <vector>

#include "accrete/beam.hpp"
#include "accrete/growth.hpp"
#include "accrete/step_solver.hpp"

namespace accrete {

/// Everything a run needs, as read from a configuration file.
///
/// Grammar: one `key = value` per line, keys are dotted names, `#` starts a
/// comment, blank lines are ignored. Lists are comma separated. Every key is
/// optional except `load.value`. See `config_keys()` for the full table.
struct RunConfig {
  BeamConfig beam;
  double h0 = 0.3;
  LoadCase load;

  int steps = 10;
  MassMode mass_mode = MassMode::Equality;
  /// Unset means m0 / 10.
  std::optional<double> mass_increment;
  /// Explicit m_1..m_S; overrides the affine schedule and fixes `steps`.
  std::vector<double> mass_values;

  /// One value (held for every step) or one per step.
  std::vector<double> prestrain_eps{0.0};
  std::vector<double> prestrain_kappa{0.0};

  Tau tau;
  bool ablation = false;
  SolverOptions solver;

  std::string output_dir;  // empty: decided by the caller
  std::vector<int> plot_steps;

  double convexity_hbar_min = 0.5;
  double convexity_hbar_max = 4.0;
  int convexity_samples = 2048;
  /// Moment used for eta and mu; unset means |M(0)| of the load.
  std::optional<double> convexity_moment;

  double initial_mass() const { return h0 * beam.length; }
  MassSchedule schedule() const;
  std::vector<PrestrainPair> prestrain_schedule() const;
  GrowthSetup to_growth_setup() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ConfigKey {
  const char* name;
  const char* type;
  const char* default_value;
  const char* meaning;
};

/// The documented key table, in canonical order.
const std::vector<ConfigKey>& config_keys();

/// Parses and validates. Throws ConfigError with 1-based line and column.
RunConfig parse_config(const std::string& text);

/// Reads a file, then parse_config. Throws IoError if it cannot be read.
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);

/// Shortest decimal that reads back to the same double ("inf" for infinity).
std::string format_number(double value);

}  // namespace accrete
