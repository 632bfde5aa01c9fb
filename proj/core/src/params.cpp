#include "pretime/params.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "pretime/bounds.hpp"
#include "pretime/error.hpp"

namespace pretime {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::ostringstream os;
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : "") << items[i];
  return os.str();
}

void require_positive(std::vector<std::string>& failed, double value, const char* name) {
  if (!std::isfinite(value) && !std::isnan(value)) {
    failed.push_back(std::string(name) + " finite");
  } else if (!(value > 0.0)) {
    failed.push_back(std::string(name) + ">0");
  }
}

void require_time(std::vector<std::string>& failed, double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) failed.push_back(std::string(name) + ">0");
}

void require_margin(std::vector<std::string>& failed, double zeta, double delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) failed.emplace_back("delta>=0");
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) failed.emplace_back("zeta>=0");
  if (!(zeta >= delta)) failed.emplace_back("zeta>=delta");
}

}  // namespace

ConstraintViolation::ConstraintViolation(std::vector<std::string> violated)
    : Error("constraint violation: " + join(violated)), violated_(std::move(violated)) {}

bool ConstraintViolation::names(const std::string& constraint) const {
  for (const auto& v : violated_)
    if (v == constraint) return true;
  return false;
}

SystemParams SystemParams::validate(double alpha, double beta, double p, double q, double k) {
  std::vector<std::string> failed;
  require_positive(failed, alpha, "alpha");
  require_positive(failed, beta, "beta");
  require_positive(failed, p, "p");
  require_positive(failed, q, "q");
  require_positive(failed, k, "k");
  // The exponent constraints are only meaningful on finite numbers; NaN
  // comparisons are false so they are reported as violations as well.
  if (!(p < q)) failed.emplace_back("p<q");
  if (!(k * p < 1.0)) failed.emplace_back("kp<1");
  if (!(k * q > 1.0)) failed.emplace_back("kq>1");
  if (!failed.empty()) throw ConstraintViolation(std::move(failed));
  return SystemParams(alpha, beta, p, q, k);
}

SystemParams SystemParams::scaled(double factor) const {
  return validate(alpha_ * factor, beta_ * factor, p_, q_, k_);
}

DerivedExponents derive_exponents(const SystemParams& sp) noexcept {
  const double span = sp.q() - sp.p();
  return {(1.0 - sp.k() * sp.p()) / span, (sp.k() * sp.q() - 1.0) / span};
}

PredefinedParams PredefinedParams::make(const SystemParams& base, double t_c) {
  std::vector<std::string> failed;
  require_time(failed, t_c, "t_c");
  if (!failed.empty()) throw ConstraintViolation(std::move(failed));
  return PredefinedParams(base, t_c, gamma_bound(base));
}

FirstOrderControlParams FirstOrderControlParams::make(const PredefinedParams& pre, double zeta,
                                                      double delta) {
  std::vector<std::string> failed;
  require_margin(failed, zeta, delta);
  if (!failed.empty()) throw ConstraintViolation(std::move(failed));
  return FirstOrderControlParams(pre, zeta, delta);
}

SecondOrderParams SecondOrderParams::make(double alpha1, double beta1, const SystemParams& outer,
                                          double t_c1, double t_c2, double zeta, double delta) {
  std::vector<std::string> failed;
  require_positive(failed, alpha1, "alpha1");
  require_positive(failed, beta1, "beta1");
  require_time(failed, t_c1, "t_c1");
  require_time(failed, t_c2, "t_c2");
  require_margin(failed, zeta, delta);
  if (!failed.empty()) throw ConstraintViolation(std::move(failed));

  SecondOrderParams sop;
  sop.inner_ = SystemParams::validate(alpha1, beta1, 1.0, 3.0, 0.5);
  sop.outer_ = outer;
  sop.t_c1_ = t_c1;
  sop.t_c2_ = t_c2;
  sop.zeta_ = zeta;
  sop.delta_ = delta;
  sop.gamma1_ = gamma_bound(sop.inner_);
  sop.gamma2_ = gamma_bound(outer);
  return sop;
}

}  // namespace pretime
