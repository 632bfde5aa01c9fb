// Right-hand sides of the predefined-time systems and controllers, and a
// simulator for them.
//
// All four systems share one shape: a switching variable sigma(x) (x itself
// for the scalar systems) and a switched input -K(x) * s with s = sign(sigma).
// The simulator is an explicit RK4 whose step is limited by the relative
// change of the state. The sign selection s is held fixed over a step; when
// a step of the second-order system would carry sigma through zero and the
// field points at the manifold from both sides, s is solved for inside
// [-1, 1] so that the step lands on sigma = 0 (the set-valued sign of the
// discontinuous law, no smoothing). Once the state is inside the settling
// band and its local time-to-go is negligible it is pinned to the origin.
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "pretime/error.hpp"
#include "pretime/params.hpp"

namespace pretime {

/// |x|^r sign(x). sign(0) = 0, so signed_pow(0, r) = 0 for r > 0; r <= 0 at
/// x = 0 throws DomainError.
double signed_pow(double x, double r);

/// sign(x) with sign(0) = 0.
double sign0(double x) noexcept;

/// -(alpha|x|^p + beta|x|^q)^k sign(x). Evaluated in log space; throws
/// OverflowError if the magnitude is not representable.
double rhs_fixed_time(const SystemParams& sp, double x);

/// (gamma/T_c) * rhs_fixed_time(base, x).
double rhs_predefined(const PredefinedParams& pp, double x);

/// u = -[(gamma/T_c)(alpha|x|^p + beta|x|^q)^k + zeta] sign(x).
double control_first_order(const FirstOrderControlParams& fp, double x);

/// sigma = x2 + [ [x2]^2 + (gamma1/T_c1)^2 (alpha1 [x1]^1 + beta1 [x1]^3) ]^(1/2),
/// with [.]^r the signed power.
double sliding_sigma(const SecondOrderParams& sop, double x1, double x2);

/// u = -[(gamma2/T_c2)(alpha2|s|^p + beta2|s|^q)^k
///       + gamma1^2/(2 T_c1^2)(alpha1 + 3 beta1 x1^2) + zeta] sign(s),  s = sigma.
double control_second_order(const SecondOrderParams& sop, double x1, double x2);

/// Matched disturbance Delta(t) with a declared bound |Delta(t)| <= delta.
class Disturbance {
 public:
  enum class Kind { zero, sinusoid, table };

  static Disturbance zero();
  /// amplitude * sin(2 pi t / period); requires |amplitude| <= delta.
  static Disturbance sinusoid(double amplitude, double period, double delta);
  /// Piecewise-linear through (t, value) points sorted by t, held constant
  /// outside the table; requires max |value| <= delta.
  static Disturbance table(std::vector<std::pair<double, double>> points, double delta);

  double operator()(double t) const;
  double bound() const noexcept { return delta_; }
  Kind kind() const noexcept { return kind_; }
  bool is_zero() const noexcept { return kind_ == Kind::zero; }
  double amplitude() const noexcept { return amplitude_; }
  double period() const noexcept { return period_; }
  const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

 private:
  Disturbance() = default;

  Kind kind_ = Kind::zero;
  double delta_ = 0.0;
  double amplitude_ = 0.0;
  double period_ = 1.0;
  std::vector<std::pair<double, double>> points_;
};

struct FixedSystem {
  SystemParams params;
};

struct PredefinedSystem {
  PredefinedParams params;
};

struct FirstOrderSystem {
  FirstOrderControlParams params;
  Disturbance disturbance;
};

struct SecondOrderSystem {
  SecondOrderParams params;
  Disturbance disturbance;
};

using System = std::variant<FixedSystem, PredefinedSystem, FirstOrderSystem, SecondOrderSystem>;

/// x1 (and x2 for the second-order system; ignored otherwise).
using State = std::array<double, 2>;

std::size_t state_dim(const System& system) noexcept;
bool is_perturbed(const System& system) noexcept;

inline constexpr double kUnperturbedBand = 1e-9;
inline constexpr double kPerturbedBand = 1e-6;

struct SimOptions {
  /// Per-step change of every state component is kept below
  /// max(rel_step * max_j |x_j|, abs_step_floor). Relative to the whole state
  /// so that one component can cross zero while another is still large.
  double rel_step = 0.05;
  double abs_step_floor = 0.0;
  double max_step = 1e-3;
  /// Defaults to kUnperturbedBand / kPerturbedBand.
  std::optional<double> settle_band;
  /// The state is pinned at the origin once inside the band with a local
  /// time-to-go |x_i| / |x_i'| below freeze_time * horizon. The same
  /// test on sigma (inside the band) triggers a step onto sigma = 0.
  double freeze_time = 1e-8;
  /// A step may also land on sigma = 0 when it would cross it, or once
  /// |sigma| <= landing_rel * max|x_i|.
  double landing_rel = 1e-9;
  std::size_t max_samples = 20000;
  std::size_t max_steps = 20'000'000;
};

struct Trajectory {
  std::size_t dim = 1;
  std::vector<double> times;
  std::vector<State> states;
  std::vector<double> controls;
  std::vector<double> disturbances;
  std::vector<double> sliding;  // sigma per sample; empty for scalar systems
  /// Time from which the state is exactly zero (or, for runs that never
  /// pin, the first band entry that persists to the horizon).
  std::optional<double> settled_at;
  /// First internal step with |sigma| <= settle_band (second order only).
  std::optional<double> sliding_reached_at;
  double settle_band = kUnperturbedBand;
  std::size_t steps_taken = 0;

  std::size_t size() const noexcept { return times.size(); }
};

/// Adaptive stepping shrank below the floating-point resolution of t (or the
/// step budget ran out) before the run finished.
class StepCollapse : public Error {
 public:
  StepCollapse(const std::string& what, Trajectory partial)
      : Error(what), partial_(std::move(partial)) {}

  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

Trajectory simulate(const System& system, const State& x0, double horizon, const SimOptions& opts = {});

/// Default reproduction horizon: 1.2 T_c (scalar predefined / first order),
/// 1.2 gamma (fixed-time), 1.2 (T_c1 + T_c2) (second order).
double default_horizon(const System& system);

/// Counts of the backward difference quotient check
///   (V_i - V_{i-1}) / (t_i - t_{i-1}) <= -(gamma/T_c)(alpha V_i^p + beta V_i^q)^k + slack * |rhs|
/// over consecutive samples with V = |x1| above the trajectory's band.
struct LyapunovCheck {
  std::size_t checked = 0;
  std::size_t satisfied = 0;
  double fraction() const noexcept { return checked ? static_cast<double>(satisfied) / checked : 1.0; }
};

LyapunovCheck check_lyapunov_decrease(const Trajectory& traj, const PredefinedParams& pp, double slack = 0.05);

}  // namespace pretime
