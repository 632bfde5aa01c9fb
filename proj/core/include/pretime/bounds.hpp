// Closed-form settling-time bounds and the conservatism of the classical
// two-term estimate.
#pragma once

#include "pretime/params.hpp"
#include "pretime/quadrature.hpp"

namespace pretime {

/// Least upper bound of the settling time of x' = -(a|x|^p + b|x|^q)^k sign x:
///
///   gamma = Gamma(m_p) Gamma(m_q) / (alpha^k Gamma(k) (q - p)) * (alpha/beta)^m_p
///
/// Evaluated in log space. Throws OverflowError when the result is not a
/// finite positive double.
double gamma_bound(const SystemParams& sp);

/// Classical estimate 1/(alpha^k (1 - kp)) + 1/(beta^k (kq - 1)).
double t_max_classical(const SystemParams& sp);

/// Classical estimate for the gained system: (T_c / gamma) * t_max_classical.
double t_max_predefined(const PredefinedParams& pp);

/// t_max_predefined with alpha = rho, beta = 1/rho, written out as
///   T_c/K * ( rho^(-2 m_p)/(1 - kp) + rho^(2(k - m_p))/(kq - 1) ),
///   K = Gamma(m_p) Gamma(m_q) / (Gamma(k) (q - p)).
double t_max_of_rho(double rho, double p, double q, double k, double t_c);

/// The same expression with the second exponent written 2(k - 2 m_p), as it
/// appears in some printed derivations. Only used to report the difference.
double t_max_of_rho_as_printed(double rho, double p, double q, double k, double t_c);

/// Classical two-term estimate for the second-order controller:
///   T_c2/gamma2 * t_max_classical(outer) + 2 T_c1/gamma1 (1/sqrt(alpha1) + 1/sqrt(beta1))
double t_max_second_order(const SecondOrderParams& sop);

/// T(x0) of the fixed-time system via quadrature.
QuadratureResult settling_time(const SystemParams& sp, double x0, double tol = kSettlingTolerance);

/// T(x0) of the gained system: (T_c / gamma) * int_0^{|x0|} ... ; sup over x0 is T_c.
QuadratureResult settling_time(const PredefinedParams& pp, double x0, double tol = kSettlingTolerance);

struct BoundReport {
  double gamma = 0.0;            // least upper bound of T(x0)
  double t_max_classical = 0.0;  // classical estimate for the same system
  double conservatism_ratio = 0.0;
  bool overflow = false;  // set when the classical estimate is not finite
};

/// For the fixed-time system itself: gamma = gamma_bound(sp).
BoundReport conservatism_report(const SystemParams& sp);

/// For the gained system: gamma = T_c, classical estimate = t_max_predefined.
BoundReport conservatism_report(const PredefinedParams& pp);

}  // namespace pretime
