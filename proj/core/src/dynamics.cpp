#include "pretime/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/toms748_solve.hpp>

#include "pretime/bounds.hpp"

namespace pretime {

namespace {

constexpr double kMaxLog = 709.782712893384;

// (alpha|x|^p + beta|x|^q)^k for x != 0, scaled by exp(ln_gain).
double field_magnitude(const SystemParams& sp, double ln_gain, double x) {
  if (x == 0.0) return 0.0;
  const double ln_x = std::log(std::abs(x));
  const double a = std::log(sp.alpha()) + sp.p() * ln_x;
  const double b = std::log(sp.beta()) + sp.q() * ln_x;
  const double hi = std::max(a, b);
  const double ln_mag = ln_gain + sp.k() * (hi + std::log1p(std::exp(std::min(a, b) - hi)));
  if (!(ln_mag < kMaxLog)) throw OverflowError("field magnitude not representable at x = " + std::to_string(x));
  return std::exp(ln_mag);
}

double second_order_magnitude(const SecondOrderParams& sop, double x1, double sigma) {
  const double reaching = field_magnitude(sop.outer(), std::log(sop.gamma2() / sop.t_c2()), sigma);
  const double c = sop.gamma1() / sop.t_c1();
  const double equivalent = 0.5 * c * c * (sop.alpha1() + 3.0 * sop.beta1() * x1 * x1);
  return reaching + equivalent + sop.zeta();
}

// Uniform view of the four systems as  x' = F(t, x) - K(x) s,  s = sign(sigma(x)).
class Model {
 public:
  explicit Model(const System& system) : system_(system) {}

  std::size_t dim() const { return system_.index() == 3 ? 2 : 1; }
  bool controlled() const { return system_.index() >= 2; }

  double disturbance(double t) const {
    if (const auto* f = std::get_if<FirstOrderSystem>(&system_)) return f->disturbance(t);
    if (const auto* s = std::get_if<SecondOrderSystem>(&system_)) return s->disturbance(t);
    return 0.0;
  }

  double sigma(const State& x) const {
    if (const auto* s = std::get_if<SecondOrderSystem>(&system_)) return sliding_sigma(s->params, x[0], x[1]);
    return x[0];
  }

  double magnitude(const State& x) const {
    switch (system_.index()) {
      case 0:
        return field_magnitude(std::get<FixedSystem>(system_).params, 0.0, x[0]);
      case 1: {
        const auto& pp = std::get<PredefinedSystem>(system_).params;
        return field_magnitude(pp.base(), std::log(pp.gain()), x[0]);
      }
      case 2: {
        const auto& fp = std::get<FirstOrderSystem>(system_).params;
        return field_magnitude(fp.pre().base(), std::log(fp.pre().gain()), x[0]) + fp.zeta();
      }
      default: {
        const auto& sop = std::get<SecondOrderSystem>(system_).params;
        return second_order_magnitude(sop, x[0], sigma(x));
      }
    }
  }

  // Switched input -K(x) s.
  double input(const State& x, double s) const { return s == 0.0 ? 0.0 : -magnitude(x) * s; }

  State rhs(double t, const State& x, double s) const {
    if (dim() == 1) return {input(x, s) + disturbance(t), 0.0};
    return {x[1], input(x, s) + disturbance(t)};
  }

 private:
  const System& system_;
};

State axpy(const State& x, double h, const State& f) { return {x[0] + h * f[0], x[1] + h * f[1]}; }

State rk4(const Model& m, double t, const State& x, double h, double s) {
  const State k1 = m.rhs(t, x, s);
  const State k2 = m.rhs(t + 0.5 * h, axpy(x, 0.5 * h, k1), s);
  const State k3 = m.rhs(t + 0.5 * h, axpy(x, 0.5 * h, k2), s);
  const State k4 = m.rhs(t + h, axpy(x, h, k3), s);
  return {x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
          x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])};
}

double inf_norm(const State& x, std::size_t dim) {
  return dim == 1 ? std::abs(x[0]) : std::max(std::abs(x[0]), std::abs(x[1]));
}

// Sign selection s in [-1, 1] for which the step ends on sigma = 0, if the
// field points at the surface from both sides over this step.
std::optional<double> landing_selection(const Model& m, double t, const State& x, double h) {
  auto sigma_after = [&](double s) { return m.sigma(rk4(m, t, x, h, s)); };
  const double lo = sigma_after(-1.0);
  const double hi = sigma_after(1.0);
  if (!(lo >= 0.0 && hi <= 0.0)) return std::nullopt;
  if (lo == 0.0) return -1.0;
  if (hi == 0.0) return 1.0;
  std::uintmax_t iterations = 100;
  const auto bracket = boost::math::tools::toms748_solve(sigma_after, -1.0, 1.0, lo, hi,
                                                         boost::math::tools::eps_tolerance<double>(50), iterations);
  return 0.5 * (bracket.first + bracket.second);
}

void validate_system(const System& system) {
  if (const auto* f = std::get_if<FirstOrderSystem>(&system)) {
    if (!(f->disturbance.bound() <= f->params.delta())) throw ConstraintViolation({"|Delta|<=delta"});
  } else if (const auto* s = std::get_if<SecondOrderSystem>(&system)) {
    if (!(s->disturbance.bound() <= s->params.delta())) throw ConstraintViolation({"|Delta|<=delta"});
  }
}

}  // namespace

double sign0(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double signed_pow(double x, double r) {
  if (x == 0.0) {
    if (!(r > 0.0)) throw DomainError("signed_pow: 0 raised to a non-positive power");
    return 0.0;
  }
  return std::copysign(std::pow(std::abs(x), r), x);
}

double rhs_fixed_time(const SystemParams& sp, double x) { return -field_magnitude(sp, 0.0, x) * sign0(x); }

double rhs_predefined(const PredefinedParams& pp, double x) {
  return -field_magnitude(pp.base(), std::log(pp.gain()), x) * sign0(x);
}

double control_first_order(const FirstOrderControlParams& fp, double x) {
  if (x == 0.0) return 0.0;
  return -(field_magnitude(fp.pre().base(), std::log(fp.pre().gain()), x) + fp.zeta()) * sign0(x);
}

double sliding_sigma(const SecondOrderParams& sop, double x1, double x2) {
  const double c = sop.gamma1() / sop.t_c1();
  const double inner = x2 * std::abs(x2) + c * c * (sop.alpha1() * x1 + sop.beta1() * x1 * x1 * x1);
  return x2 + signed_pow(inner, 0.5);
}

double control_second_order(const SecondOrderParams& sop, double x1, double x2) {
  const double sigma = sliding_sigma(sop, x1, x2);
  if (sigma == 0.0) return 0.0;
  return -second_order_magnitude(sop, x1, sigma) * sign0(sigma);
}

Disturbance Disturbance::zero() { return Disturbance(); }

Disturbance Disturbance::sinusoid(double amplitude, double period, double delta) {
  std::vector<std::string> failed;
  if (!(delta >= 0.0) || !std::isfinite(delta)) failed.emplace_back("delta>=0");
  if (!(period > 0.0) || !std::isfinite(period)) failed.emplace_back("period>0");
  if (!std::isfinite(amplitude) || !(std::abs(amplitude) <= delta)) failed.emplace_back("|amplitude|<=delta");
  if (!failed.empty()) throw ConstraintViolation(failed);
  Disturbance d;
  d.kind_ = Kind::sinusoid;
  d.amplitude_ = amplitude;
  d.period_ = period;
  d.delta_ = delta;
  return d;
}

Disturbance Disturbance::table(std::vector<std::pair<double, double>> points, double delta) {
  std::vector<std::string> failed;
  if (!(delta >= 0.0) || !std::isfinite(delta)) failed.emplace_back("delta>=0");
  if (points.empty()) failed.emplace_back("table nonempty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto [t, v] = points[i];
    if (!std::isfinite(t) || (i > 0 && !(t > points[i - 1].first))) {
      failed.emplace_back("table times increasing");
      break;
    }
  }
  for (const auto& [t, v] : points) {
    if (!std::isfinite(v) || !(std::abs(v) <= delta)) {
      failed.emplace_back("|value|<=delta");
      break;
    }
  }
  if (!failed.empty()) throw ConstraintViolation(failed);
  Disturbance d;
  d.kind_ = Kind::table;
  d.points_ = std::move(points);
  d.delta_ = delta;
  return d;
}

double Disturbance::operator()(double t) const {
  switch (kind_) {
    case Kind::zero:
      return 0.0;
    case Kind::sinusoid:
      return amplitude_ * std::sin(2.0 * std::numbers::pi * t / period_);
    case Kind::table: {
      if (t <= points_.front().first) return points_.front().second;
      if (t >= points_.back().first) return points_.back().second;
      const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                       [](double v, const auto& pt) { return v < pt.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::size_t state_dim(const System& system) noexcept { return system.index() == 3 ? 2 : 1; }

bool is_perturbed(const System& system) noexcept {
  if (const auto* f = std::get_if<FirstOrderSystem>(&system)) return !f->disturbance.is_zero();
  if (const auto* s = std::get_if<SecondOrderSystem>(&system)) return !s->disturbance.is_zero();
  return false;
}

double default_horizon(const System& system) {
  switch (system.index()) {
    case 0:
      return 1.2 * gamma_bound(std::get<FixedSystem>(system).params);
    case 1:
      return 1.2 * std::get<PredefinedSystem>(system).params.t_c();
    case 2:
      return 1.2 * std::get<FirstOrderSystem>(system).params.pre().t_c();
    default: {
      const auto& sop = std::get<SecondOrderSystem>(system).params;
      return 1.2 * (sop.t_c1() + sop.t_c2());
    }
  }
}

Trajectory simulate(const System& system, const State& x0_in, double horizon, const SimOptions& opts) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("simulate: horizon must be positive and finite");
  if (opts.max_samples < 2) throw DomainError("simulate: max_samples must be at least 2");
  validate_system(system);

  const Model m(system);
  const std::size_t dim = m.dim();
  State x = x0_in;
  if (dim == 1) x[1] = 0.0;
  if (!std::isfinite(x[0]) || !std::isfinite(x[1])) throw DomainError("simulate: x0 must be finite");

  const double band = opts.settle_band.value_or(is_perturbed(system) ? kPerturbedBand : kUnperturbedBand);
  const double freeze_time = opts.freeze_time * horizon;
  const std::size_t intervals = opts.max_samples - 1;
  const double dt_out = horizon / static_cast<double>(intervals);

  Trajectory traj;
  traj.dim = dim;
  traj.settle_band = band;
  traj.times.reserve(opts.max_samples);
  traj.states.reserve(opts.max_samples);

  double t = 0.0;
  bool frozen = false;
  bool sliding = false;
  double s_last = sign0(m.sigma(x));
  double sigma_rate = 0.0;
  std::optional<double> in_band_since;

  auto record = [&](double time) {
    double u = 0.0;
    if (frozen) {
      u = m.controlled() ? -m.disturbance(time) : 0.0;
    } else {
      u = m.input(x, s_last);
    }
    traj.times.push_back(time);
    traj.states.push_back(x);
    traj.controls.push_back(u);
    traj.disturbances.push_back(m.disturbance(time));
    if (dim == 2) traj.sliding.push_back(frozen ? 0.0 : m.sigma(x));
  };

  auto collapse = [&](const std::string& why) {
    traj.settled_at.reset();
    return StepCollapse("simulate: " + why + " at t = " + std::to_string(t) + ", |x| = " +
                            std::to_string(inf_norm(x, dim)),
                        traj);
  };

  auto freeze = [&](double time) {
    x = {0.0, 0.0};
    frozen = true;
    traj.settled_at = time;
    if (dim == 2 && !traj.sliding_reached_at) traj.sliding_reached_at = time;
  };

  if (x[0] == 0.0 && x[1] == 0.0) freeze(0.0);
  if (dim == 2 && !frozen && std::abs(m.sigma(x)) <= band) traj.sliding_reached_at = 0.0;
  record(0.0);

  for (std::size_t out = 1; out <= intervals; ++out) {
    const double t_target = out == intervals ? horizon : dt_out * static_cast<double>(out);
    while (!frozen && t < t_target) {
      if (traj.steps_taken >= opts.max_steps) throw collapse("step budget exhausted");

      const double sigma_n = m.sigma(x);
      const double s_nat = sign0(sigma_n);
      const State f = m.rhs(t, x, sliding ? s_last : s_nat);
      const double norm_n = inf_norm(x, dim);
      const double allowed = std::max(opts.rel_step * norm_n, opts.abs_step_floor);
      double h = std::min(opts.max_step, t_target - t);
      for (std::size_t i = 0; i < dim; ++i)
        if (f[i] != 0.0) h = std::min(h, allowed / std::abs(f[i]));

      bool try_landing = sliding || std::abs(sigma_n) <= opts.landing_rel * norm_n;
      if (std::abs(sigma_n) <= band && std::abs(sigma_n) <= freeze_time * sigma_rate) {
        h = std::min({opts.max_step, t_target - t, std::max(h, 2.0 * std::abs(sigma_n) / sigma_rate)});
        try_landing = true;
      }

      auto within = [&](const State& y) {
        for (std::size_t i = 0; i < dim; ++i)
          if (!(std::abs(y[i] - x[i]) <= 2.0 * allowed)) return false;
        return true;
      };

      State next{};
      double s_used = s_nat;
      bool landed = false;
      for (;;) {
        if (!(h > 0.0) || t + h == t) throw collapse("step size underflow");

        if (try_landing) {
          if (const auto s = landing_selection(m, t, x, h)) {
            next = rk4(m, t, x, h, *s);
            if (dim == 1 || within(next)) {
              s_used = *s;
              landed = true;
              break;
            }
            h *= 0.25;
            continue;
          }
        }

        next = rk4(m, t, x, h, s_nat);
        const double sigma_next = m.sigma(next);
        const bool crossed = sigma_n != 0.0 && sigma_next != 0.0 && std::signbit(sigma_n) != std::signbit(sigma_next);
        if (crossed) {
          if (const auto s = landing_selection(m, t, x, h)) {
            next = rk4(m, t, x, h, *s);
            if (dim == 1 || within(next)) {
              s_used = *s;
              landed = true;
              break;
            }
          }
          h *= 0.25;
          continue;
        }
        if (within(next) && std::isfinite(next[0]) && std::isfinite(next[1])) break;
        h *= 0.25;
      }

      const State prev = x;
      const double h_taken = h;
      t = (h == t_target - t) ? t_target : t + h;
      x = next;
      s_last = s_used;
      sliding = landed;
      ++traj.steps_taken;
      sigma_rate = std::abs(m.sigma(x) - sigma_n) / h_taken;

      if (landed && dim == 1) x[0] = 0.0;
      if (dim == 2 && !traj.sliding_reached_at && std::abs(m.sigma(x)) <= band) traj.sliding_reached_at = t;

      const double norm = inf_norm(x, dim);
      if (norm <= band) {
        if (!in_band_since) in_band_since = t;
      } else {
        in_band_since.reset();
      }

      if (norm == 0.0) {
        freeze(t);
      } else if (norm <= band) {
        double time_to_go = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
          const double rate = std::abs(x[i] - prev[i]) / h_taken;
          const double ttg = x[i] == 0.0 ? 0.0 : (rate > 0.0 ? std::abs(x[i]) / rate : std::numeric_limits<double>::infinity());
          time_to_go = std::max(time_to_go, ttg);
        }
        if (time_to_go <= freeze_time) freeze(t);
      }
    }
    if (frozen) t = t_target;
    record(t_target);
  }

  if (!traj.settled_at && in_band_since) traj.settled_at = in_band_since;
  return traj;
}

LyapunovCheck check_lyapunov_decrease(const Trajectory& traj, const PredefinedParams& pp, double slack) {
  LyapunovCheck result;
  const double ln_gain = std::log(pp.gain());
  for (std::size_t i = 1; i < traj.size(); ++i) {
    const double v0 = std::abs(traj.states[i - 1][0]);
    const double v1 = std::abs(traj.states[i][0]);
    if (!(v0 > traj.settle_band && v1 > traj.settle_band)) continue;
    const double quotient = (v1 - v0) / (traj.times[i] - traj.times[i - 1]);
    const double bound = -field_magnitude(pp.base(), ln_gain, v1);
    ++result.checked;
    if (quotient <= bound + slack * std::abs(bound)) ++result.satisfied;
  }
  return result;
}

}  // namespace pretime
