#pragma once

// Scalar helper functions and the numerically derived certification constants.
// Every constant is the root of an explicit scalar equation, found by
// safeguarded bisection; nothing here is hard-coded beyond bracket endpoints.

#include <cmath>
#include <functional>
#include <string>

#include "supports.hpp"  // error types

namespace toric {

namespace scalar {

inline double psi(double u) { return 1.0 - 4.0 * u + 2.0 * u * u; }

// Radii of the attraction/uniqueness balls, r0(a)*beta and r1(a)*beta.
// Series fallbacks keep the a -> 0 limits exact (r0 -> 1, r1 -> a).
inline double r0(double a) {
  if (a < 1e-9) return 1.0;
  return (1.0 + a - std::sqrt(1.0 - 6.0 * a + a * a)) / (4.0 * a);
}
inline double r1(double a) {
  if (a < 1e-9) return a;
  return (1.0 - 3.0 * a - std::sqrt(1.0 - 6.0 * a + a * a)) / (4.0 * a);
}

inline double R(double d) { return (1.0 - std::sqrt(1.0 - 20.0 * d)) / 10.0; }

// Safeguarded bisection: requires a sign change on [lo, hi].
inline double bisect(const std::function<double(double)>& f, double lo,
                     double hi, double tol = 1e-14) {
  double flo = f(lo), fhi = f(hi);
  if (!(flo * fhi < 0.0))
    throw NumericalError("bisection bracket failure (formula regression?)");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (flo * fm < 0.0) {
      hi = mid;
      fhi = fm;
    } else {
      lo = mid;
      flo = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace scalar

struct ConstantsTable {
  double u0;      // gamma-theorem radius constant
  double alpha0;  // classical alpha-test constant, (13 - 3 sqrt(17)) / 4
  double alpha1;  // alpha threshold used by certification and step control
  double u1;      // tracker induction constant
  double deltaA;  // mesh constant from the non-effective step bound
  double deltaB;  // mesh constant from the effective step bound
  std::string provenance;
};

// All defining equations, in dependency order:
//   u0:     u + 2u(e^{4u}-1) e^{e^{4u}-1-4u} = (3-sqrt(7))/2
//   alpha1: a r1(a) / (1 - 10 a r0(a)) = u0   (smallest positive root)
//   u1:     u e^{2u} (1-u) / (psi(u)(1-10u)) = alpha1
//   delta:  e^{R(d)} / (1-5d) * (u/2 + R(d)/2) = u, with u = u0 resp. u1
inline ConstantsTable derive_constants() {
  using namespace scalar;
  ConstantsTable t;
  const double target = (3.0 - std::sqrt(7.0)) / 2.0;
  auto fu0 = [&](double u) {
    const double e = std::expm1(4.0 * u);
    return u + 2.0 * u * e * std::exp(e - 4.0 * u) - target;
  };
  t.u0 = bisect(fu0, 0.01, 0.2);

  // The monitor a r1 / (1 - 10 a r0) has a pole where 10 a r0(a) = 1; the
  // smallest positive root of interest lies below it.
  const double pole =
      bisect([](double a) { return 10.0 * a * r0(a) - 1.0; }, 0.05, 0.0999);
  auto fa1 = [&](double a) { return a * r1(a) / (1.0 - 10.0 * a * r0(a)) - t.u0; };
  t.alpha1 = bisect(fa1, 1e-4, pole * (1.0 - 1e-9));

  auto fu1 = [&](double u) {
    return u * std::exp(2.0 * u) * (1.0 - u) / (psi(u) * (1.0 - 10.0 * u)) -
           t.alpha1;
  };
  t.u1 = bisect(fu1, 1e-4, 0.0999);

  auto fdelta = [&](double u) {
    return [u](double d) {
      return std::exp(R(d)) / (1.0 - 5.0 * d) * (u / 2.0 + R(d) / 2.0) - u;
    };
  };
  t.deltaA = bisect(fdelta(t.u0), 1e-9, 0.05 - 1e-12);
  t.deltaB = bisect(fdelta(t.u1), 1e-9, 0.05 - 1e-12);

  t.alpha0 = (13.0 - 3.0 * std::sqrt(17.0)) / 4.0;
  t.provenance =
      "safeguarded bisection to 1e-14 on the defining scalar equations";
  return t;
}

// Residuals of the defining equations at the tabulated values; all should be
// at machine-precision level for a healthy build.
inline double constants_residual(const ConstantsTable& t) {
  using namespace scalar;
  const double target = (3.0 - std::sqrt(7.0)) / 2.0;
  const double e = std::expm1(4.0 * t.u0);
  double r = std::abs(t.u0 + 2.0 * t.u0 * e * std::exp(e - 4.0 * t.u0) - target);
  r = std::max(r, std::abs(t.alpha1 * r1(t.alpha1) /
                               (1.0 - 10.0 * t.alpha1 * r0(t.alpha1)) -
                           t.u0));
  r = std::max(r, std::abs(t.u1 * std::exp(2.0 * t.u1) * (1.0 - t.u1) /
                               (psi(t.u1) * (1.0 - 10.0 * t.u1)) -
                           t.alpha1));
  auto fd = [](double u, double d) {
    return std::exp(R(d)) / (1.0 - 5.0 * d) * (u / 2.0 + R(d) / 2.0) - u;
  };
  r = std::max(r, std::abs(fd(t.u0, t.deltaA)));
  r = std::max(r, std::abs(fd(t.u1, t.deltaB)));
  return r;
}

}  // namespace toric
