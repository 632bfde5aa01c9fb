// Parameter vectors of the fixed-time / predefined-time system family
//
//   x' = -(alpha |x|^p + beta |x|^q)^k sign(x),   k p < 1 < k q
//
// and of the first- and second-order controllers built on it. Every type is
// an immutable value; construction goes through a validating factory.
#pragma once

namespace pretime {

/// Exponents m_p = (1 - k p)/(q - p) and m_q = (k q - 1)/(q - p).
/// m_p + m_q = k.
struct DerivedExponents {
  double m_p;
  double m_q;
};

class SystemParams {
 public:
  /// Checks positivity, finiteness, p < q, k p < 1 and k q > 1 (all strict).
  /// Throws ConstraintViolation naming every failed constraint.
  static SystemParams validate(double alpha, double beta, double p, double q, double k);

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return q_; }
  double k() const noexcept { return k_; }

  /// Same exponents, both gains multiplied by `factor` (> 0).
  SystemParams scaled(double factor) const;

  bool operator==(const SystemParams&) const = default;

 private:
  SystemParams(double alpha, double beta, double p, double q, double k)
      : alpha_(alpha), beta_(beta), p_(p), q_(q), k_(k) {}

  double alpha_;
  double beta_;
  double p_;
  double q_;
  double k_;
};

DerivedExponents derive_exponents(const SystemParams& sp) noexcept;

/// The system scaled by gamma(base)/t_c so that its settling-time supremum is
/// exactly t_c.
class PredefinedParams {
 public:
  static PredefinedParams make(const SystemParams& base, double t_c);

  const SystemParams& base() const noexcept { return base_; }
  double t_c() const noexcept { return t_c_; }
  double gain() const noexcept { return gain_; }
  /// gamma(base), cached at construction.
  double gamma() const noexcept { return gamma_; }

 private:
  PredefinedParams(SystemParams base, double t_c, double gamma)
      : base_(base), t_c_(t_c), gain_(gamma / t_c), gamma_(gamma) {}

  SystemParams base_;
  double t_c_;
  double gain_;
  double gamma_;
};

class FirstOrderControlParams {
 public:
  /// Requires zeta >= delta >= 0.
  static FirstOrderControlParams make(const PredefinedParams& pre, double zeta, double delta);

  const PredefinedParams& pre() const noexcept { return pre_; }
  double zeta() const noexcept { return zeta_; }
  double delta() const noexcept { return delta_; }

 private:
  FirstOrderControlParams(PredefinedParams pre, double zeta, double delta)
      : pre_(pre), zeta_(zeta), delta_(delta) {}

  PredefinedParams pre_;
  double zeta_;
  double delta_;
};

/// Second-order controller. The reduced-order surface uses (alpha1, beta1)
/// with exponents fixed at p = 1, q = 3, k = 1/2; the reaching law uses
/// `outer`.
class SecondOrderParams {
 public:
  static SecondOrderParams make(double alpha1, double beta1, const SystemParams& outer,
                                double t_c1, double t_c2, double zeta, double delta);

  double alpha1() const noexcept { return inner_.alpha(); }
  double beta1() const noexcept { return inner_.beta(); }
  /// (alpha1, beta1, 1, 3, 1/2)
  const SystemParams& inner() const noexcept { return inner_; }
  const SystemParams& outer() const noexcept { return outer_; }
  double t_c1() const noexcept { return t_c1_; }
  double t_c2() const noexcept { return t_c2_; }
  double zeta() const noexcept { return zeta_; }
  double delta() const noexcept { return delta_; }
  double gamma1() const noexcept { return gamma1_; }
  double gamma2() const noexcept { return gamma2_; }

 private:
  SecondOrderParams() = default;

  SystemParams inner_ = SystemParams::validate(1.0, 1.0, 1.0, 3.0, 0.5);
  SystemParams outer_ = inner_;
  double t_c1_ = 0.0;
  double t_c2_ = 0.0;
  double zeta_ = 0.0;
  double delta_ = 0.0;
  double gamma1_ = 0.0;
  double gamma2_ = 0.0;
};

}  // namespace pretime
