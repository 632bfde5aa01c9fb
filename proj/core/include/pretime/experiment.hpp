// Experiment runner behind the command-line tool: config parsing, the
// compiled-in figure presets, CSV/JSON artifacts, the rho sweep and the
// oracle verification suite.
//
// Config files are flat `key = value` lines; `#` starts a comment.
//
//   name = fig1
//   system = predefined          # fixed | predefined | first_order | second_order | bounds_sweep
//   alpha = 4
//   beta = 0.25
//   p = 0.5
//   q = 3
//   k = 1.5
//   t_c = 1
//   initial_conditions = 0.1; 1; 1e20     # second order: 0.1,0.1; 1,1
//   disturbance = sinusoid                # zero | sinusoid | table
//   disturbance_amplitude = 1
//   disturbance_period = 5
//   disturbance_table = 0:0, 0.5:1, 1:0    # t:value pairs
#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pretime/bounds.hpp"
#include "pretime/dynamics.hpp"

namespace pretime {

enum class SystemKind { fixed, predefined, first_order, second_order, bounds_sweep };

std::string to_string(SystemKind kind);

struct ExperimentConfig {
  std::string name = "experiment";
  SystemKind system = SystemKind::predefined;
  /// Model parameters by config name (alpha, beta, p, q, k, t_c, zeta,
  /// delta, alpha1, beta1, alpha2, beta2, t_c1, t_c2).
  std::map<std::string, double> params;
  std::vector<State> initial_conditions;

  std::string disturbance = "zero";
  double disturbance_amplitude = 0.0;
  double disturbance_period = 1.0;
  std::vector<std::pair<double, double>> disturbance_table;

  std::optional<double> horizon;
  std::string output_dir = ".";
  double tol = kSettlingTolerance;
  SimOptions sim;

  double rho_min = 1e-2;
  double rho_max = 1e2;
  std::size_t points = 201;
};

/// Throws ConfigError on syntax errors, unknown keys or malformed values.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Compiled-in presets fig1..fig4. Throws ConfigError for other names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Builds the simulated system; throws ConstraintViolation on invalid
/// parameters and ConfigError if a required parameter is missing.
System build_system(const ExperimentConfig& config);

/// PRETIME_OUT if set, otherwise config.output_dir.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

/// %.17g with a '.' separator regardless of locale.
std::string format_double(double value);

void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

struct RhoSweepRow {
  double rho;
  double t_max;
  double gamma_check;  // sup of the gained system; equals t_c
};

struct RhoSweep {
  std::vector<RhoSweepRow> rows;
  double argmin = 0.0;
  double min = 0.0;
};

/// Log-spaced sweep of t_max_of_rho over [rho_min, rho_max].
RhoSweep sweep_rho(double p, double q, double k, double t_c, double rho_min, double rho_max,
                   std::size_t points);

void write_sweep_csv(std::ostream& out, const RhoSweep& sweep);

struct CaptionCheck {
  std::string label;
  double expected = 0.0;
  double actual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// Informational lines are printed but never fail a run.
  bool note = false;
  std::string detail;
};

struct RunRecord {
  std::size_t index = 0;
  State x0{};
  std::optional<double> settled_at;
  std::optional<double> sliding_reached_at;
  std::size_t steps_taken = 0;
  bool partial = false;
};

struct RunSummary {
  std::string name;
  SystemKind system = SystemKind::predefined;
  std::vector<RunRecord> runs;
  BoundReport bounds;
  std::optional<RhoSweep> sweep;
  std::vector<CaptionCheck> checks;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> files;

  bool checks_pass() const;
};

/// Runs every initial condition, writes `<name>_x0_<i>.csv`, `<name>_x0_<i>.json`
/// and `<name>_summary.json` (or `<name>_sweep.csv` for bounds_sweep) into
/// `out_dir`. On StepCollapse the partial run is written with a `.partial`
/// suffix and the exception is rethrown.
RunSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir);

/// Caption checks attached to a preset run (empty for other configs).
std::vector<CaptionCheck> preset_checks(const std::string& preset_name, const RunSummary& summary);

struct VerifyReport {
  std::vector<CaptionCheck> lines;
  bool ok() const;
};

/// Oracle suite: gamma_bound against quadrature, the s-family closed form,
/// gained-system normalization, the reference bound values, and the notes on
/// the two alternative bound evaluations.
VerifyReport run_verify(double tol = kOracleTolerance);

void print_checks(std::ostream& out, const std::vector<CaptionCheck>& checks);

}  // namespace pretime
