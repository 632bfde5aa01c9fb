#include "pretime/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pretime/error.hpp"
#include "pretime/specfun.hpp"

namespace pretime {

namespace {

// Inputs of exp() above this overflow; below the lower bound they underflow
// past the smallest subnormal.
constexpr double kMaxLog = 709.782712893384;
constexpr double kMinLog = -745.1332191019411;

double checked_exp(double log_value, const char* what) {
  if (!(log_value < kMaxLog) || !(log_value > kMinLog))
    throw OverflowError(std::string(what) + ": result not representable (log value " +
                        std::to_string(log_value) + ")");
  return std::exp(log_value);
}

// ln K = ln Gamma(m_p) + ln Gamma(m_q) - ln Gamma(k) - ln(q - p)
double ln_shape_constant(const SystemParams& sp) {
  const auto [m_p, m_q] = derive_exponents(sp);
  return ln_gamma(m_p) + ln_gamma(m_q) - ln_gamma(sp.k()) - std::log(sp.q() - sp.p());
}

double rho_formula(double rho, double p, double q, double k, double t_c, double tail_exponent_of_mp) {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConstraintViolation({"rho>0"});
  if (!(t_c > 0.0) || !std::isfinite(t_c)) throw ConstraintViolation({"t_c>0"});
  const SystemParams unit = SystemParams::validate(1.0, 1.0, p, q, k);
  const double m_p = derive_exponents(unit).m_p;
  const double ln_k = ln_shape_constant(unit);
  const double ln_rho = std::log(rho);
  const double head = -2.0 * m_p * ln_rho - std::log(1.0 - k * p);
  const double tail = 2.0 * (k - tail_exponent_of_mp * m_p) * ln_rho - std::log(k * q - 1.0);
  const double hi = std::max(head, tail);
  const double ln_sum = hi + std::log1p(std::exp(std::min(head, tail) - hi));
  return checked_exp(std::log(t_c) - ln_k + ln_sum, "t_max_of_rho");
}

}  // namespace

double gamma_bound(const SystemParams& sp) {
  const double m_p = derive_exponents(sp).m_p;
  const double ln_alpha = std::log(sp.alpha());
  const double ln_beta = std::log(sp.beta());
  const double ln_gamma_value = ln_shape_constant(sp) - sp.k() * ln_alpha + m_p * (ln_alpha - ln_beta);
  return checked_exp(ln_gamma_value, "gamma_bound");
}

double t_max_classical(const SystemParams& sp) {
  const double k = sp.k();
  return std::exp(-k * std::log(sp.alpha())) / (1.0 - k * sp.p()) +
         std::exp(-k * std::log(sp.beta())) / (k * sp.q() - 1.0);
}

double t_max_predefined(const PredefinedParams& pp) {
  return pp.t_c() / pp.gamma() * t_max_classical(pp.base());
}

double t_max_of_rho(double rho, double p, double q, double k, double t_c) {
  return rho_formula(rho, p, q, k, t_c, 1.0);
}

double t_max_of_rho_as_printed(double rho, double p, double q, double k, double t_c) {
  return rho_formula(rho, p, q, k, t_c, 2.0);
}

double t_max_second_order(const SecondOrderParams& sop) {
  const double reaching = sop.t_c2() / sop.gamma2() * t_max_classical(sop.outer());
  const double sliding =
      2.0 * sop.t_c1() / sop.gamma1() * (1.0 / std::sqrt(sop.alpha1()) + 1.0 / std::sqrt(sop.beta1()));
  return reaching + sliding;
}

QuadratureResult settling_time(const SystemParams& sp, double x0, double tol) {
  if (std::isnan(x0)) throw DomainError("settling_time: x0 is NaN");
  return integrate_settling(sp, std::abs(x0), tol);
}

QuadratureResult settling_time(const PredefinedParams& pp, double x0, double tol) {
  QuadratureResult r = settling_time(pp.base(), x0, tol);
  const double scale = 1.0 / pp.gain();
  r.value *= scale;
  r.abs_error_estimate *= scale;
  return r;
}

BoundReport conservatism_report(const SystemParams& sp) {
  BoundReport report;
  report.gamma = gamma_bound(sp);
  report.t_max_classical = t_max_classical(sp);
  report.overflow = !std::isfinite(report.t_max_classical);
  report.conservatism_ratio = report.t_max_classical / report.gamma;
  return report;
}

BoundReport conservatism_report(const PredefinedParams& pp) {
  BoundReport report;
  report.gamma = pp.t_c();
  report.t_max_classical = t_max_predefined(pp);
  report.overflow = !std::isfinite(report.t_max_classical);
  report.conservatism_ratio = report.t_max_classical / report.gamma;
  return report;
}

}  // namespace pretime
