// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pretime/bounds.hpp"
#include "pretime/dynamics.hpp"
#include "pretime/experiment.hpp"
#include "pretime/quadrature.hpp"

using namespace pretime;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

const SystemParams kFig = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);

// p, q uniform on (0.05, 6), k uniform on (0.2, 4), alpha, beta log-uniform
// on (1e-3, 1e3); resampled until p < q, kp < 1 < kq.
SystemParams random_valid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> expo(0.05, 6.0);
  std::uniform_real_distribution<double> kdist(0.2, 4.0);
  std::uniform_real_distribution<double> log_gain(std::log(1e-3), std::log(1e3));
  for (;;) {
    const double p = expo(rng), q = expo(rng), k = kdist(rng);
    if (p < q && k * p < 1.0 && k * q > 1.0)
      return SystemParams::validate(std::exp(log_gain(rng)), std::exp(log_gain(rng)), p, q, k);
  }
}

std::string run_cli(const std::string& args, int& code) {
  const std::string cmd = std::string("'") + PRETIME_CLI + "' " + args + " 2>&1";
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) {
    code = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const SystemParams sp = random_valid(rng);
    const double g = gamma_bound(sp);
    worst = std::max(worst, std::abs(g - integrate_full(sp).value) / g);
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-8 && elapsed <= 60.0,
          "200 sets, max rel error " + fmt("%.2e", worst) + " (<= 1e-8), " + fmt("%.2f", elapsed) + " s (<= 60 s)"};
}

Outcome s_family() {
  std::mt19937_64 rng(20240102);
  std::uniform_real_distribution<double> sdist(0.05, 0.95);
  std::uniform_real_distribution<double> log_gain(std::log(1e-3), std::log(1e3));
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double s = sdist(rng), a = std::exp(log_gain(rng)), b = std::exp(log_gain(rng));
    const double closed = std::numbers::pi / (2.0 * s * std::sqrt(a * b));
    worst = std::max(worst, std::abs(gamma_bound(SystemParams::validate(a, b, 1.0 - s, 1.0 + s, 1.0)) - closed) / closed);
  }
  return {worst <= 1e-10, "50 sets, max rel error " + fmt("%.2e", worst) + " (<= 1e-10)"};
}

Outcome fig1_caption() {
  const double v = t_max_predefined(PredefinedParams::make(kFig, 1.0));
  return {std::abs(v - 4.4331) <= 1e-3, "t_max_predefined = " + fmt("%.6f", v) + " (4.4331 +- 1e-3)"};
}

Outcome fig2_caption() {
  const RhoSweep s = sweep_rho(0.5, 3.0, 1.5, 1.0, 1e-2, 1e2, 201);
  const bool at_one = s.argmin == 1.0;
  const bool value = std::abs(s.min - 1.1249) <= 1e-3;
  const double low = s.rows.front().t_max / s.min;
  const double high = s.rows.back().t_max / s.min;
  const bool diverges = low > 10.0 && high > 10.0;
  return {at_one && value && diverges,
          "argmin " + fmt("%.6g", s.argmin) + (at_one ? " (ok)" : " (expected 1)") + ", min " + fmt("%.5f", s.min) +
              (value ? " (ok)" : " (expected 1.1249 +- 1e-3)") + ", endpoints " + fmt("%.3g", low) + "x and " +
              fmt("%.3g", high) + "x min" + (diverges ? " (both > 10x)" : " (both must exceed 10x; rho = 1e-2 does not)")};
}

Outcome normalization() {
  std::mt19937_64 rng(20240105);
  std::uniform_real_distribution<double> tdist(0.1, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const SystemParams sp = random_valid(rng);
    const auto pp = PredefinedParams::make(sp, tdist(rng));
    const double sup = integrate_full(sp.scaled(std::pow(pp.gain(), 1.0 / sp.k()))).value;
    worst = std::max(worst, std::abs(sup - pp.t_c()) / pp.t_c());
  }
  return {worst <= 1e-8, "50 sets, max rel error " + fmt("%.2e", worst) + " (<= 1e-8)"};
}

Outcome fig1_simulation() {
  const auto start = std::chrono::steady_clock::now();
  const auto pp = PredefinedParams::make(kFig, 1.0);
  std::vector<double> settled;
  for (double x0 : {0.1, 1.0, 1e20}) {
    const Trajectory tr = simulate(PredefinedSystem{pp}, {x0, 0.0}, default_horizon(PredefinedSystem{pp}));
    if (!tr.settled_at) return {false, "x0 = " + fmt("%g", x0) + " did not settle"};
    settled.push_back(*tr.settled_at);
  }
  const double elapsed = seconds_since(start);
  const bool increasing = settled[0] < settled[1] && settled[1] < settled[2];
  const bool bounded = settled[2] <= 1.01 && settled[1] <= 1.01 && settled[0] <= 1.01;
  const bool tight = settled[2] >= 0.99;
  return {increasing && bounded && tight && elapsed <= 30.0,
          "settled_at " + fmt("%.6f", settled[0]) + ", " + fmt("%.6f", settled[1]) + ", " + fmt("%.6f", settled[2]) +
              (increasing ? " increasing" : " NOT increasing") + ", max <= 1.01: " + (bounded ? "yes" : "no") +
              ", last >= 0.99: " + (tight ? "yes" : "no") + ", " + fmt("%.2f", elapsed) + " s (<= 30 s)"};
}

Outcome simulation_vs_quadrature() {
  const auto pp = PredefinedParams::make(kFig, 1.0);
  const SimOptions opts;
  const double allowed = std::max(1e-3 * pp.t_c(), 2.0 * opts.max_step);
  double worst = 0.0;
  for (double x0 : {1e-3, 0.1, 1.0, 1e3, 1e10}) {
    const Trajectory tr = simulate(PredefinedSystem{pp}, {x0, 0.0}, default_horizon(PredefinedSystem{pp}), opts);
    if (!tr.settled_at) return {false, "x0 = " + fmt("%g", x0) + " did not settle"};
    worst = std::max(worst, std::abs(*tr.settled_at - settling_time(pp, x0).value));
  }
  return {worst <= allowed, "max |settled_at - T(x0)| = " + fmt("%.2e", worst) + " (<= " + fmt("%.0e", allowed) + ")"};
}

Outcome fig3_robustness() {
  const auto pp = PredefinedParams::make(kFig, 1.0);
  const FirstOrderSystem sys{FirstOrderControlParams::make(pp, 1.0, 1.0), Disturbance::sinusoid(1.0, 5.0, 1.0)};
  double latest = 0.0;
  double worst_fraction = 1.0;
  for (double x0 : {0.1, 1.0, 1e20}) {
    const Trajectory tr = simulate(sys, {x0, 0.0}, default_horizon(sys));
    if (!tr.settled_at) return {false, "x0 = " + fmt("%g", x0) + " did not settle"};
    latest = std::max(latest, *tr.settled_at);
    worst_fraction = std::min(worst_fraction, check_lyapunov_decrease(tr, pp, 0.05).fraction());
  }
  return {latest <= 1.01 && worst_fraction >= 0.99,
          "latest settled_at " + fmt("%.6f", latest) + " (<= 1.01), Lyapunov quotient holds at " +
              fmt("%.2f", 100.0 * worst_fraction) + "% (>= 99%)"};
}

Outcome fig4_two_phase() {
  const auto start = std::chrono::steady_clock::now();
  const auto sop = SecondOrderParams::make(4.0, 0.25, kFig, 0.5, 0.5, 1.0, 1.0);
  const SecondOrderSystem sys{sop, Disturbance::sinusoid(1.0, 5.0, 1.0)};
  double sigma_latest = 0.0;
  double state_latest = 0.0;
  for (double x0 : {0.1, 1.0, 100.0}) {
    const Trajectory tr = simulate(sys, {x0, x0}, default_horizon(sys));
    if (!tr.sliding_reached_at || !tr.settled_at) return {false, "x0 = " + fmt("%g", x0) + " did not converge"};
    sigma_latest = std::max(sigma_latest, *tr.sliding_reached_at);
    state_latest = std::max(state_latest, *tr.settled_at);
  }
  const double elapsed = seconds_since(start);
  const double sigma_limit = 1.05 * sop.t_c2();
  const double state_limit = 1.05 * (sop.t_c1() + sop.t_c2());
  return {sigma_latest <= sigma_limit && state_latest <= state_limit && elapsed <= 120.0,
          "sigma band by " + fmt("%.4f", sigma_latest) + " (<= " + fmt("%.3f", sigma_limit) + "), state band by " +
              fmt("%.4f", state_latest) + " (<= " + fmt("%.3f", state_limit) + "), " + fmt("%.2f", elapsed) +
              " s (<= 120 s)"};
}

Outcome discrepancy_notes() {
  int code = 0;
  const std::string out = run_cli("verify", code);
  const std::string printed = fmt("%.5g", t_max_of_rho_as_printed(4.0, 0.5, 3.0, 1.5, 1.0));
  const std::string direct = fmt("%.5g", t_max_of_rho(4.0, 0.5, 3.0, 1.5, 1.0));
  const auto outer = kFig;
  const std::string formula =
      fmt("%.5g", t_max_second_order(SecondOrderParams::make(4.0, 0.25, outer, 0.5, 0.5, 1.0, 1.0)));

  auto note_line = [&](const std::string& label) -> std::string {
    const auto at = out.find("NOTE  " + label);
    if (at == std::string::npos) return {};
    return out.substr(at, out.find('\n', at) - at);
  };
  const std::string a = note_line("T_max(rho) at rho = 4");
  const std::string b = note_line("second-order two-term estimate");
  const bool a_ok = !a.empty() && a.find(printed) != std::string::npos && a.find(direct) != std::string::npos;
  const bool b_ok = !b.empty() && b.find(formula) != std::string::npos && b.find("5.1073") != std::string::npos;
  return {code == 0 && a_ok && b_ok,
          std::string("rho = 4 note ") + (a_ok ? "present" : "MISSING") + " (printed exponent " + printed +
              ", criterion quotes about 4.65; substitution " + direct + "), second-order note " +
              (b_ok ? "present" : "MISSING") + " (formula " + formula + " vs caption 5.1073), verify exit " +
              std::to_string(code)};
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "pretime_acceptance_determinism";
  fs::remove_all(base);
  int code_a = 0, code_b = 0;
  run_cli("reproduce fig1 --output-dir '" + (base / "a").string() + "'", code_a);
  run_cli("reproduce fig1 --output-dir '" + (base / "b").string() + "'", code_b);
  bool same = code_a == 0 && code_b == 0;
  std::size_t bytes = 0;
  for (int i = 0; i < 3 && same; ++i) {
    const std::string name = "fig1_x0_" + std::to_string(i) + ".csv";
    const std::string ca = slurp(base / "a" / name);
    same = !ca.empty() && ca == slurp(base / "b" / name);
    bytes += ca.size();
  }
  fs::remove_all(base);
  return {same, same ? "3 CSVs, " + std::to_string(bytes) + " bytes, identical" : "CSV outputs differ or are missing"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"s-family closed form", s_family},
      {"fig1 classical estimate", fig1_caption},
      {"fig2 rho sweep", fig2_caption},
      {"gained-system normalization", normalization},
      {"fig1 simulation", fig1_simulation},
      {"simulation vs quadrature", simulation_vs_quadrature},
      {"fig3 robustness", fig3_robustness},
      {"fig4 two-phase convergence", fig4_two_phase},
      {"discrepancy notes", discrepancy_notes},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
