// pretime: settling-time bounds, quadrature and closed-loop simulations from
// the command line.
//
// Exit codes: 0 ok, 1 verification failure, 2 invalid input,
// 3 quadrature tolerance not met, 4 integrator step collapse.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pretime/bounds.hpp"
#include "pretime/error.hpp"
#include "pretime/experiment.hpp"
#include "pretime/quadrature.hpp"

namespace {

using namespace pretime;

constexpr int kExitVerify = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitTolerance = 3;
constexpr int kExitCollapse = 4;

struct SystemFlags {
  double alpha = 0.0;
  double beta = 0.0;
  double p = 0.0;
  double q = 0.0;
  double k = 0.0;
  std::optional<double> t_c;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "gain on |x|^p")->required();
    cmd->add_option("--beta", beta, "gain on |x|^q")->required();
    cmd->add_option("--p", p, "lower exponent")->required();
    cmd->add_option("--q", q, "upper exponent")->required();
    cmd->add_option("--k", k, "outer exponent")->required();
    cmd->add_option("--t-c", t_c, "predefined time T_c");
  }

  SystemParams params() const { return SystemParams::validate(alpha, beta, p, q, k); }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void print_report(const char* heading, const BoundReport& r) {
  std::cout << heading << '\n'
            << "  gamma (least upper bound): " << num(r.gamma) << '\n'
            << "  T_max (classical):         " << num(r.t_max_classical) << '\n'
            << "  conservatism ratio:        " << num(r.conservatism_ratio) << (r.overflow ? "  (overflow)" : "")
            << '\n';
}

nlohmann::ordered_json report_json(const BoundReport& r) {
  return {{"gamma", r.gamma}, {"t_max", r.t_max_classical}, {"ratio", r.conservatism_ratio}, {"overflow", r.overflow}};
}

int cmd_bounds(const SystemFlags& f, double tol) {
  const SystemParams sp = f.params();
  const BoundReport fixed = conservatism_report(sp);
  const QuadratureResult quad = integrate_full(sp, tol);
  print_report("fixed-time system", fixed);
  std::cout << "  gamma (quadrature):        " << num(quad.value) << "  +- " << num(quad.abs_error_estimate) << '\n';
  nlohmann::ordered_json j{{"fixed", report_json(fixed)}, {"gamma_quadrature", quad.value}};
  if (f.t_c) {
    const BoundReport pre = conservatism_report(PredefinedParams::make(sp, *f.t_c));
    print_report("predefined-time system (gain gamma/T_c)", pre);
    j["predefined"] = report_json(pre);
  }
  std::cout << j.dump() << '\n';
  return 0;
}

int cmd_settle(const SystemFlags& f, double x0, double tol) {
  const SystemParams sp = f.params();
  const QuadratureResult r = f.t_c ? settling_time(PredefinedParams::make(sp, *f.t_c), x0, tol)
                                   : settling_time(sp, x0, tol);
  std::cout << "T(x0) = " << num(r.value) << "  +- " << num(r.abs_error_estimate) << "  (" << r.nodes_used
            << " nodes)\n";
  return 0;
}

int cmd_sweep(double p, double q, double k, double t_c, double rho_min, double rho_max, std::size_t points,
              const std::string& output) {
  const RhoSweep sweep = sweep_rho(p, q, k, t_c, rho_min, rho_max, points);
  std::ostream* summary = &std::cout;
  if (output.empty()) {
    write_sweep_csv(std::cout, sweep);
    summary = &std::cerr;
  } else {
    std::ofstream out(output, std::ios::binary);
    if (!out) throw Error("cannot write " + output);
    write_sweep_csv(out, sweep);
  }
  *summary << "argmin rho = " << num(sweep.argmin) << ", min T_max = " << num(sweep.min) << '\n';
  return 0;
}

void print_summary(const RunSummary& s) {
  std::cout << s.name << " (" << to_string(s.system) << ")\n";
  for (const auto& r : s.runs) {
    std::cout << "  x0[" << r.index << "] = " << num(r.x0[0]);
    if (s.system == SystemKind::second_order) std::cout << ", " << num(r.x0[1]);
    std::cout << "  settled_at = " << (r.settled_at ? num(*r.settled_at) : std::string("none"));
    if (r.sliding_reached_at) std::cout << "  sigma band at " << num(*r.sliding_reached_at);
    std::cout << "  steps = " << r.steps_taken << '\n';
  }
  if (s.sweep) std::cout << "  argmin rho = " << num(s.sweep->argmin) << ", min T_max = " << num(s.sweep->min) << '\n';
  std::cout << "  bound: gamma " << num(s.bounds.gamma) << ", T_max " << num(s.bounds.t_max_classical) << ", ratio "
            << num(s.bounds.conservatism_ratio) << '\n';
  std::cout << "  wrote " << s.files.size() << " files\n";
  print_checks(std::cout, s.checks);
}

int cmd_run(ExperimentConfig config, std::optional<double> tol, const std::string& output_dir) {
  if (tol) config.tol = *tol;
  if (!output_dir.empty()) config.output_dir = output_dir;
  const RunSummary s = run_experiment(config, resolve_output_dir(config));
  print_summary(s);
  return s.checks_pass() ? 0 : kExitVerify;
}

int cmd_verify(double tol) {
  const VerifyReport report = run_verify(tol);
  print_checks(std::cout, report.lines);
  std::cout << (report.ok() ? "verify: all oracle gates passed\n" : "verify: FAILED\n");
  return report.ok() ? 0 : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pretime: settling-time bounds and simulations of predefined-time systems"};
  app.require_subcommand(1);

  double tol = kSettlingTolerance;
  std::optional<double> run_tol;
  std::string output_dir;

  SystemFlags bounds_flags;
  auto* bounds = app.add_subcommand("bounds", "least upper bound vs classical estimate");
  bounds_flags.add_to(bounds);
  double bounds_tol = kOracleTolerance;
  bounds->add_option("--tol", bounds_tol, "quadrature tolerance for the cross-check");

  SystemFlags settle_flags;
  double x0 = 0.0;
  auto* settle = app.add_subcommand("settle", "settling time T(x0) by quadrature");
  settle_flags.add_to(settle);
  settle->add_option("--x0", x0, "initial condition")->required();
  settle->add_option("--tol", tol, "quadrature tolerance");

  double sp = 0.5, sq = 3.0, sk = 1.5, st_c = 1.0, rho_min = 1e-2, rho_max = 1e2;
  std::size_t points = 201;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep-rho", "classical estimate along alpha = rho, beta = 1/rho");
  sweep->add_option("--p", sp, "lower exponent");
  sweep->add_option("--q", sq, "upper exponent");
  sweep->add_option("--k", sk, "outer exponent");
  sweep->add_option("--t-c", st_c, "predefined time T_c");
  sweep->add_option("--rho-min", rho_min, "smallest rho");
  sweep->add_option("--rho-max", rho_max, "largest rho");
  sweep->add_option("--points", points, "number of log-spaced points");
  sweep->add_option("--output", sweep_out, "CSV file (default: standard output)");
  sweep->add_option("--tol", tol, "accepted for uniformity; the sweep is closed-form");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "run an experiment config");
  simulate->add_option("config", config_path, "key = value config file")->required();
  simulate->add_option("--tol", run_tol, "quadrature tolerance");
  simulate->add_option("--output-dir", output_dir, "output directory (PRETIME_OUT takes precedence)");

  std::string figure;
  auto* reproduce = app.add_subcommand("reproduce", "run a compiled-in figure preset");
  reproduce->add_option("figure", figure, "fig1, fig2, fig3 or fig4")->required();
  reproduce->add_option("--tol", run_tol, "quadrature tolerance");
  reproduce->add_option("--output-dir", output_dir, "output directory (PRETIME_OUT takes precedence)");

  double verify_tol = kOracleTolerance;
  auto* verify = app.add_subcommand("verify", "run the oracle suite");
  verify->add_option("--tol", verify_tol, "quadrature tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*bounds) return cmd_bounds(bounds_flags, bounds_tol);
    if (*settle) return cmd_settle(settle_flags, x0, tol);
    if (*sweep) return cmd_sweep(sp, sq, sk, st_c, rho_min, rho_max, points, sweep_out);
    if (*simulate) return cmd_run(load_config(config_path), run_tol, output_dir);
    if (*reproduce) return cmd_run(preset(figure), run_tol, output_dir);
    if (*verify) return cmd_verify(verify_tol);
  } catch (const ToleranceNotMet& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const StepCollapse& e) {
    std::cerr << "error: " << e.what() << " (partial outputs written with .partial suffix)\n";
    return kExitCollapse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return 0;
}
