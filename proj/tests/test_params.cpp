#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "pretime/bounds.hpp"
#include "pretime/error.hpp"
#include "pretime/params.hpp"

using namespace pretime;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Returns the violation list, or an empty list if the tuple validated.
std::vector<std::string> violations(double a, double b, double p, double q, double k) {
  try {
    SystemParams::validate(a, b, p, q, k);
  } catch (const ConstraintViolation& e) {
    return e.violated();
  }
  return {};
}

bool has(const std::vector<std::string>& v, const std::string& name) {
  return std::find(v.begin(), v.end(), name) != v.end();
}

}  // namespace

TEST_CASE("validate accepts the reference parameter set") {
  const auto sp = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);
  CHECK(sp.alpha() == 4.0);
  CHECK(sp.beta() == 0.25);
  CHECK(sp.p() == 0.5);
  CHECK(sp.q() == 3.0);
  CHECK(sp.k() == 1.5);
  const auto m = derive_exponents(sp);
  CHECK(m.m_p == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(m.m_q == doctest::Approx(1.4).epsilon(1e-15));
}

TEST_CASE("validate names each violated constraint") {
  CHECK(has(violations(0.0, 1.0, 0.5, 3.0, 1.5), "alpha>0"));
  CHECK(has(violations(1.0, -1.0, 0.5, 3.0, 1.5), "beta>0"));
  CHECK(has(violations(1.0, 1.0, 3.0, 0.5, 1.5), "p<q"));
  CHECK(has(violations(1.0, 1.0, 0.5, 3.0, 2.0), "kp<1"));
  CHECK(has(violations(1.0, 1.0, 0.1, 0.5, 1.0), "kq>1"));
  CHECK(has(violations(1.0, 1.0, 0.5, 3.0, 0.0), "k>0"));
  CHECK(has(violations(1.0, 1.0, 0.0, 3.0, 1.0), "p>0"));
}

TEST_CASE("boundary cases are strict") {
  // kp == 1 and kq == 1 are rejected.
  CHECK(has(violations(1.0, 1.0, 0.5, 3.0, 2.0), "kp<1"));
  CHECK(has(violations(1.0, 1.0, 0.25, 0.5, 2.0), "kq>1"));
  CHECK(has(violations(1.0, 1.0, 0.5, 0.5, 1.0), "p<q"));
}

TEST_CASE("every failure is reported in one exception") {
  const auto v = violations(-1.0, -1.0, 3.0, 0.5, 1.5);
  CHECK(has(v, "alpha>0"));
  CHECK(has(v, "beta>0"));
  CHECK(has(v, "p<q"));
  CHECK(has(v, "kp<1"));
  try {
    SystemParams::validate(-1.0, 1.0, 0.5, 3.0, 1.5);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.names("alpha>0"));
    CHECK_FALSE(e.names("beta>0"));
    CHECK(std::string(e.what()).find("alpha>0") != std::string::npos);
  }
}

TEST_CASE("non-finite inputs are rejected") {
  CHECK(has(violations(kNaN, 1.0, 0.5, 3.0, 1.5), "alpha>0"));
  CHECK(has(violations(kInf, 1.0, 0.5, 3.0, 1.5), "alpha finite"));
  CHECK(has(violations(1.0, kInf, 0.5, 3.0, 1.5), "beta finite"));
  CHECK_FALSE(violations(1.0, 1.0, 0.5, kNaN, 1.5).empty());
  CHECK_FALSE(violations(1.0, 1.0, 0.5, 3.0, kNaN).empty());
  CHECK_FALSE(violations(1.0, 1.0, 0.5, kInf, 1.5).empty());
}

TEST_CASE("property: random valid tuples validate and round trip") {
  oracle::ParamGen gen(0xa11ce);
  for (int i = 0; i < 1000; ++i) {
    const auto sp = gen();
    const auto again = SystemParams::validate(sp.alpha(), sp.beta(), sp.p(), sp.q(), sp.k());
    CHECK(again == sp);
    const auto m = derive_exponents(sp);
    CHECK(m.m_p > 0.0);
    CHECK(m.m_q > 0.0);
    // m_p + m_q = k up to a few ulp.
    CHECK(std::abs(m.m_p + m.m_q - sp.k()) <= 4.0 * std::numeric_limits<double>::epsilon() * sp.k());
  }
}

TEST_CASE("property: random violated tuples name the broken constraint") {
  std::mt19937_64 rng(0xbad5eed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  oracle::ParamGen gen(0xbad5eed + 1);
  for (int i = 0; i < 1000; ++i) {
    const auto sp = gen();
    double a = sp.alpha(), b = sp.beta(), p = sp.p(), q = sp.q(), k = sp.k();
    std::string broken;
    switch (i % 5) {
      case 0:
        a = -a * u(rng);
        broken = "alpha>0";
        break;
      case 1:
        b = -b * u(rng);
        broken = "beta>0";
        break;
      case 2:
        std::swap(p, q);
        broken = "p<q";
        break;
      case 3:
        // Push kp to or past 1.
        p = (1.0 + u(rng)) / k;
        q = p + 1.0;
        broken = "kp<1";
        break;
      default:
        // Pull kq to or below 1.
        q = (1.0 - 0.5 * u(rng)) / k;
        p = 0.5 * q;
        broken = "kq>1";
        break;
    }
    const auto v = violations(a, b, p, q, k);
    INFO("tuple ", a, " ", b, " ", p, " ", q, " ", k);
    CHECK(has(v, broken));
  }
}

TEST_CASE("scaled multiplies both gains") {
  const auto sp = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);
  const auto s = sp.scaled(2.0);
  CHECK(s.alpha() == 8.0);
  CHECK(s.beta() == 0.5);
  CHECK(s.p() == sp.p());
  CHECK_THROWS_AS(sp.scaled(0.0), ConstraintViolation);
}

TEST_CASE("predefined parameters cache gamma and the gain") {
  const auto sp = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);
  const auto pp = PredefinedParams::make(sp, 2.0);
  CHECK(pp.t_c() == 2.0);
  CHECK(pp.gamma() == doctest::Approx(0.628391797213864326).epsilon(1e-13));
  CHECK(pp.gain() == doctest::Approx(0.628391797213864326 / 2.0).epsilon(1e-13));
  CHECK(pp.base() == sp);
  for (double bad : {0.0, -1.0, kNaN, kInf}) {
    try {
      PredefinedParams::make(sp, bad);
      FAIL("expected ConstraintViolation");
    } catch (const ConstraintViolation& e) {
      CHECK(e.names("t_c>0"));
    }
  }
}

TEST_CASE("first-order controller margin") {
  const auto pp = PredefinedParams::make(SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5), 1.0);
  const auto fp = FirstOrderControlParams::make(pp, 1.0, 1.0);
  CHECK(fp.zeta() == 1.0);
  CHECK(fp.delta() == 1.0);
  CHECK_NOTHROW(FirstOrderControlParams::make(pp, 0.0, 0.0));
  try {
    FirstOrderControlParams::make(pp, 0.5, 1.0);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.names("zeta>=delta"));
  }
  try {
    FirstOrderControlParams::make(pp, 1.0, -0.1);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.names("delta>=0"));
  }
}

TEST_CASE("second-order parameters") {
  const auto outer = SystemParams::validate(4.0, 0.25, 0.5, 3.0, 1.5);
  const auto sop = SecondOrderParams::make(4.0, 0.25, outer, 0.5, 0.5, 1.0, 1.0);
  CHECK(sop.alpha1() == 4.0);
  CHECK(sop.beta1() == 0.25);
  CHECK(sop.inner().p() == 1.0);
  CHECK(sop.inner().q() == 3.0);
  CHECK(sop.inner().k() == 0.5);
  CHECK(sop.gamma2() == doctest::Approx(0.628391797213864326).epsilon(1e-13));
  // gamma1 for p = 1, q = 3, k = 1/2: m_p = m_q = 1/4.
  const double gamma1 = oracle::gamma_closed_form(4.0, 0.25, 1.0, 3.0, 0.5);
  CHECK(sop.gamma1() == doctest::Approx(gamma1).epsilon(1e-13));
  CHECK(sop.gamma1() == doctest::Approx(3.70814935460274).epsilon(1e-13));

  try {
    SecondOrderParams::make(-4.0, 0.25, outer, 0.0, 0.5, 0.5, 1.0);
    FAIL("expected ConstraintViolation");
  } catch (const ConstraintViolation& e) {
    CHECK(e.names("alpha1>0"));
    CHECK(e.names("t_c1>0"));
    CHECK(e.names("zeta>=delta"));
    CHECK_FALSE(e.names("t_c2>0"));
  }
}
