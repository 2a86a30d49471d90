#pragma once

// The built-in worked example: the system t X - t X Y + Y^2 - t^2 Y^3,
// X + X Y - Y^2 - Y^3 over the shared support {(1,0),(1,1),(0,2),(0,3)},
// its homotopy in t, both analytic root curves, and the homogenized
// projective counterparts.

#include <cmath>

#include "projective.hpp"
#include "supports.hpp"
#include "tracker.hpp"

namespace toric {

inline SupportSet example_support() {
  SupportSet s;
  s.exponents.resize(4, 2);
  s.exponents << 1, 0, 1, 1, 0, 2, 0, 3;
  return s;
}

// Coefficients at parameter t: (t, -t, 1, -t^2) and (1, 1, -1, -1).
inline FewnomialSystem running_example(double t) {
  FewnomialSystem f;
  for (int i = 0; i < 2; ++i) {
    ExponentialSum eq;
    eq.support = example_support();
    eq.weights = VectorXd::Ones(4);
    eq.coefficients.resize(4);
    if (i == 0)
      eq.coefficients << Complex(t), Complex(-t), Complex(1.0), Complex(-t * t);
    else
      eq.coefficients << Complex(1.0), Complex(1.0), Complex(-1.0),
          Complex(-1.0);
    f.equations.push_back(std::move(eq));
  }
  return f;
}

inline CoefficientPath running_example_path(double tStart, double tEnd) {
  CoefficientPath path;
  path.shape = running_example(1.0);
  path.tStart = tStart;
  path.tEnd = tEnd;
  using T = CoefficientPath::Term;
  path.terms = {
      {{T{1.0, 1.0}}, {T{1.0, -1.0}}, {T{0.0, 1.0}}, {T{2.0, -1.0}}},
      {{T{0.0, 1.0}}, {T{0.0, 1.0}}, {T{0.0, -1.0}}, {T{0.0, -1.0}}},
  };
  return path;
}

// Homogenized example (degree 3 in X, Y, Z) with exact coefficient
// derivatives, for the dense baseline.
inline ProjectivePath projective_example_path() {
  ProjectivePath p;
  p.system = [](double t) { return homogenize(running_example(t)); };
  p.coefficientDot = [](double t) {
    // d/dt of (t, -t, 1, -t^2) mapped through the same homogenization
    FewnomialSystem df = running_example(t);
    df.equations[0].coefficients << Complex(1.0), Complex(-1.0), Complex(0.0),
        Complex(-2.0 * t);
    df.equations[1].coefficients.setZero();
    const HomogeneousSystem hd = homogenize(df);
    return hd.coeffs;
  };
  return p;
}

// Exact homogeneous parametrizations of the two root curves.
inline ProjectiveCurve projective_example_curve(int which) {
  ProjectiveCurve c;
  if (which == 1) {
    c.point = [](double t) {
      VectorXcd X(3);
      X << Complex(1.0 / (t * t)), Complex(1.0 / t), Complex(1.0);
      return X;
    };
    c.velocity = [](double t) {
      VectorXcd V(3);
      V << Complex(-2.0 / (t * t * t)), Complex(-1.0 / (t * t)), Complex(0.0);
      return V;
    };
  } else {
    c.point = [](double t) {
      VectorXcd X(3);
      X << Complex(-(1.0 + t * t) / (2.0 * t)), Complex(-1.0), Complex(1.0);
      return X;
    };
    c.velocity = [](double t) {
      VectorXcd V(3);
      V << Complex((1.0 - t * t) / (2.0 * t * t)), Complex(0.0), Complex(0.0);
      return V;
    };
  }
  return c;
}

}  // namespace toric
