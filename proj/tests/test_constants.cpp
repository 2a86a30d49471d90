#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>

#include <toric/constants.hpp>

using namespace toric;

TEST_CASE("scalar helper functions and their limits") {
  using namespace scalar;
  CHECK(psi(0.0) == 1.0);
  CHECK(psi(0.1) == doctest::Approx(0.62).epsilon(1e-15));
  // small-argument limits r0 -> 1, r1 -> a (series fallback must agree with
  // the closed form just above its cutoff)
  CHECK(r0(0.0) == 1.0);
  CHECK(r1(0.0) == 0.0);
  CHECK(r0(2e-9) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r1(2e-9) == doctest::Approx(2e-9).epsilon(1e-6));
  CHECK(r0(1e-4) == doctest::Approx(1.0).epsilon(1e-3));
  // r0(a) is the small root of 2a r^2 - (1+a) r + 1
  for (double a : {0.01, 0.05, 0.08}) {
    const double q0 = 2.0 * a * r0(a) * r0(a) - (1.0 + a) * r0(a) + 1.0;
    CHECK(std::abs(q0) < 1e-14);
    CHECK(r1(a) < r0(a));
  }
  CHECK(R(0.0) == 0.0);
  CHECK(R(0.05) == doctest::Approx(0.1).epsilon(1e-12));  // sqrt(1-1)=0 branch

  CHECK(bisect([](double x) { return x * x - 2.0; }, 0.0, 2.0) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK_THROWS_AS(bisect([](double x) { return x * x + 1.0; }, 0.0, 1.0),
                  NumericalError);
}

TEST_CASE("derived constants match the frozen reference values") {
  const auto start = std::chrono::steady_clock::now();
  const ConstantsTable t = derive_constants();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  CHECK(secs < 1.0);

  CHECK(t.u0 == doctest::Approx(0.090994609726695678).epsilon(1e-12));
  CHECK(t.alpha1 == doctest::Approx(0.08123948395294414).epsilon(1e-12));
  CHECK(t.u1 == doctest::Approx(0.039745185807801183).epsilon(1e-12));
  CHECK(t.deltaA == doctest::Approx(0.0373918296894).epsilon(1e-10));
  CHECK(t.deltaB == doctest::Approx(0.0242103424031).epsilon(1e-10));
  CHECK(t.alpha0 ==
        doctest::Approx((13.0 - 3.0 * std::sqrt(17.0)) / 4.0).epsilon(1e-15));
  CHECK(t.alpha0 == doctest::Approx(0.15767078078675459).epsilon(1e-15));
  CHECK_FALSE(t.provenance.empty());
}

TEST_CASE("defining-equation residuals are at machine precision") {
  const ConstantsTable t = derive_constants();
  CHECK(constants_residual(t) < 1e-12);

  // the residual detects tampering
  ConstantsTable bad = t;
  bad.u0 *= 1.0 + 1e-6;
  CHECK(constants_residual(bad) > 1e-8);
}

TEST_CASE("ordering and sanity of the constants") {
  const ConstantsTable t = derive_constants();
  // the certification threshold sits strictly below the classical one
  CHECK(t.alpha1 < t.alpha0);
  CHECK(t.u1 < t.u0);
  CHECK(t.deltaB < t.deltaA);
  CHECK(t.u0 > 0.0);
  CHECK(t.deltaB > 0.0);
  // u0 sits below the target value it certifies against
  CHECK(t.u0 < (3.0 - std::sqrt(7.0)) / 2.0);
  // alpha1 lies below the pole of the monitor 1 - 10 a r0(a)
  CHECK(10.0 * t.alpha1 * scalar::r0(t.alpha1) < 1.0);
}
