#include "pretime/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "pretime/error.hpp"

namespace pretime {

namespace detail {

namespace {

// Abscissae beyond |t| = 4 sit within ~1e-37 of the endpoints with weights
// below 1e-35, far under any tolerance we accept.
constexpr double kTanhSinhSpan = 4.0;
constexpr double kFirstStep = 0.5;
constexpr int kMinLevel = 3;

}  // namespace

QuadratureResult tanh_sinh(const std::function<double(double, double, double)>& f, double a,
                           double b, double tol, int max_level) {
  const double len = b - a;
  if (!(len > 0.0)) return {0.0, 0.0, 1};

  const double half_len = 0.5 * len;
  std::size_t nodes = 0;

  auto weighted = [&](double t) {
    const double u = 0.5 * std::numbers::pi * std::sinh(t);
    const double ch = std::cosh(u);
    const double w = half_len * 0.5 * std::numbers::pi * std::cosh(t) / (ch * ch);
    const double dl = len / (1.0 + std::exp(-2.0 * u));
    const double dr = len / (1.0 + std::exp(2.0 * u));
    const double x = t < 0.0 ? a + dl : b - dr;
    ++nodes;
    const double fx = f(x, dl, dr);
    if (!std::isfinite(fx)) throw OverflowError("tanh_sinh: non-finite integrand value");
    return w * fx;
  };

  double h = kFirstStep;
  const int n0 = static_cast<int>(kTanhSinhSpan / h);
  double sum = weighted(0.0);
  for (int j = 1; j <= n0; ++j) sum += weighted(-j * h) + weighted(j * h);

  double estimate = h * sum;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    const int n = static_cast<int>(kTanhSinhSpan / h);
    double fresh = 0.0;
    for (int j = 1; j <= n; j += 2) fresh += weighted(-j * h) + weighted(j * h);
    sum += fresh;
    const double next = h * sum;
    err = std::abs(next - estimate);
    estimate = next;
    if (level >= kMinLevel && err <= tol * std::max(1.0, std::abs(estimate)))
      return {estimate, err, nodes};
  }
  throw ToleranceNotMet("tanh_sinh: error estimate " + std::to_string(err) + " above tolerance after " +
                            std::to_string(max_level) + " levels",
                        err, tol);
}

}  // namespace detail

namespace {

double log_sum_exp(double x, double y) {
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  return hi + std::log1p(std::exp(lo - hi));
}

struct LogParams {
  double ln_alpha;
  double ln_beta;
  double p;
  double q;
  double k;
  double head;  // 1 - k p
  double tail;  // k q - 1
  double ln_knee;
};

LogParams log_params(const SystemParams& sp) {
  const double ln_alpha = std::log(sp.alpha());
  const double ln_beta = std::log(sp.beta());
  return {ln_alpha,
          ln_beta,
          sp.p(),
          sp.q(),
          sp.k(),
          1.0 - sp.k() * sp.p(),
          sp.k() * sp.q() - 1.0,
          (ln_alpha - ln_beta) / (sp.q() - sp.p())};
}

// -k ln(alpha z^p + beta z^q)
double log_integrand(const LogParams& lp, double ln_z) {
  return -lp.k * log_sum_exp(lp.ln_alpha + lp.p * ln_z, lp.ln_beta + lp.q * ln_z);
}

// int_0^{Z} with z = Z v^(1/(1-kp)), v in (0, 1]. The Jacobian cancels the
// z^(-kp) behaviour at the origin.
QuadratureResult integrate_head(const LogParams& lp, double ln_upper, double tol) {
  const double ln_jac0 = ln_upper - std::log(lp.head);
  const double jac_power = (1.0 - lp.head) / lp.head;  // kp / (1 - kp)
  auto f = [&](double, double v, double) {
    const double ln_v = std::log(v);
    const double ln_z = ln_upper + ln_v / lp.head;
    return std::exp(log_integrand(lp, ln_z) + ln_jac0 + jac_power * ln_v);
  };
  return detail::tanh_sinh(f, 0.0, 1.0, tol);
}

// int_{z*}^{Z} with z = z* v^(-1/(kq-1)), v in [v_lo, 1], v_lo = (z*/Z)^(kq-1).
// The Jacobian cancels the z^(-kq) decay at infinity.
QuadratureResult integrate_tail(const LogParams& lp, double v_lo, double tol) {
  const double ln_jac0 = lp.ln_knee - std::log(lp.tail);
  const double jac_power = -(1.0 + lp.tail) / lp.tail;  // -kq / (kq - 1)
  auto f = [&](double v, double, double) {
    const double ln_v = std::log(v);
    const double ln_z = lp.ln_knee - ln_v / lp.tail;
    return std::exp(log_integrand(lp, ln_z) + ln_jac0 + jac_power * ln_v);
  };
  return detail::tanh_sinh(f, v_lo, 1.0, tol);
}

QuadratureResult combine(const QuadratureResult& a, const QuadratureResult& b) {
  return {a.value + b.value, a.abs_error_estimate + b.abs_error_estimate, a.nodes_used + b.nodes_used};
}

}  // namespace

QuadratureResult integrate_settling(const SystemParams& sp, double x0_abs, double tol) {
  if (!(tol > 0.0 && tol <= 1e-3))
    throw DomainError("integrate_settling: tol must lie in (0, 1e-3], got " + std::to_string(tol));
  if (!(x0_abs >= 0.0)) throw DomainError("integrate_settling: x0_abs must be >= 0");
  if (x0_abs == 0.0) return {0.0, 0.0, 1};

  const LogParams lp = log_params(sp);
  const double ln_x0 = std::log(x0_abs);
  const double piece_tol = 0.5 * tol;

  if (ln_x0 <= lp.ln_knee) return integrate_head(lp, ln_x0, tol);

  const QuadratureResult head = integrate_head(lp, lp.ln_knee, piece_tol);
  // v_lo underflows to 0 once x0 is so large that the missing tail is below
  // the smallest double; the full tail is then the same number.
  const double v_lo = std::isinf(x0_abs) ? 0.0 : std::exp(lp.tail * (lp.ln_knee - ln_x0));
  const QuadratureResult tail = integrate_tail(lp, v_lo, piece_tol);
  QuadratureResult total = combine(head, tail);
  if (!std::isfinite(total.value)) throw OverflowError("integrate_settling: integral not representable");
  return total;
}

QuadratureResult integrate_full(const SystemParams& sp, double tol) {
  return integrate_settling(sp, std::numeric_limits<double>::infinity(), tol);
}

}  // namespace pretime
