// Settling-time integrals
//
//   T(x0)  = int_0^{|x0|} dz / (alpha z^p + beta z^q)^k
//   T(inf) = int_0^{inf}  dz / (alpha z^p + beta z^q)^k
//
// evaluated with tanh-sinh quadrature. The range is split at the knee
// z* = (alpha/beta)^(1/(q-p)). Each side is mapped onto (0, 1] by a power
// change of variables that removes the algebraic endpoint behaviour
// (z^(-pk) at the origin, z^(-qk) at infinity), so both pieces are bounded
// integrands. All integrand evaluations happen in log space.
#pragma once

#include <cstddef>
#include <functional>

#include "pretime/params.hpp"

namespace pretime {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t nodes_used = 1;
};

inline constexpr double kOracleTolerance = 1e-10;
inline constexpr double kSettlingTolerance = 1e-8;
/// Refinement levels of the tanh-sinh ladder before ToleranceNotMet.
inline constexpr int kMaxQuadratureLevel = 12;

/// int_0^{x0_abs} dz / (alpha z^p + beta z^q)^k. `x0_abs` may be +infinity.
/// Requires tol in (0, 1e-3]. The error estimate satisfies
/// abs_error_estimate <= tol * max(1, value) or ToleranceNotMet is thrown.
QuadratureResult integrate_settling(const SystemParams& sp, double x0_abs,
                                    double tol = kSettlingTolerance);

/// int_0^inf dz / (alpha z^p + beta z^q)^k.
QuadratureResult integrate_full(const SystemParams& sp, double tol = kOracleTolerance);

namespace detail {

/// Tanh-sinh rule on [a, b]. The integrand receives (x, x - a, b - x) with
/// both endpoint distances computed without cancellation. Levels are refined
/// until successive estimates differ by at most tol * max(1, |value|).
QuadratureResult tanh_sinh(const std::function<double(double, double, double)>& f, double a,
                           double b, double tol, int max_level = kMaxQuadratureLevel);

}  // namespace detail

}  // namespace pretime
