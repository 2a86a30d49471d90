#pragma once

// Independent brute-force and finite-difference validators.  These ship in
// the library (not only in tests) so the CLI can run them as a field
// self-check.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "metric.hpp"
#include "supports.hpp"

namespace toric {
namespace oracles {

inline VectorXd fd_gradient(const std::function<double(const VectorXd&)>& field,
                            const VectorXd& x, double h) {
  if (h <= 0.0) throw InputError("finite-difference step must be positive");
  VectorXd g(x.size());
  for (int k = 0; k < x.size(); ++k) {
    VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    g[k] = (field(xp) - field(xm)) / (2.0 * h);
  }
  return g;
}

// Operator norm of B from the sourceGram norm to the targetGram norm, by
// random sampling followed by power iteration on the generalized eigenproblem
// sourceGram^{-1} B* targetGram B.  Deliberately avoids the dense eigensolver
// used by the main code path.
inline double brute_opnorm(const MatrixXcd& B, const MatrixXd& sourceGram,
                           const MatrixXd& targetGram, int samples,
                           unsigned seed = 12345) {
  const int n = static_cast<int>(B.cols());
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::LLT<MatrixXd> llt(sourceGram);
  if (llt.info() != Eigen::Success)
    throw InputError("source Gram must be positive definite");
  auto rayleigh = [&](const VectorXcd& v) {
    const VectorXcd Bv = B * v;
    const double num = std::real(Bv.dot(targetGram * Bv));
    const double den = std::real(v.dot(sourceGram * v));
    return den > 0.0 ? num / den : 0.0;
  };
  VectorXcd best = VectorXcd::Zero(n);
  double bestVal = -1.0;
  for (int s = 0; s < samples; ++s) {
    VectorXcd v(n);
    for (int k = 0; k < n; ++k) v[k] = Complex(gauss(rng), gauss(rng));
    const double val = rayleigh(v);
    if (val > bestVal) {
      bestVal = val;
      best = v;
    }
  }
  // power iteration: v <- S^{-1} B* T B v
  for (int it = 0; it < 2000; ++it) {
    VectorXcd w = B.adjoint() * (targetGram * (B * best));
    w = llt.solve(w.real()).cast<Complex>() +
        Complex(0, 1) * llt.solve(w.imag()).cast<Complex>();
    const double nw = w.norm();
    if (nw == 0.0) break;
    w /= nw;
    const double val = rayleigh(w);
    if (std::abs(val - bestVal) < 1e-14 * std::max(1.0, val)) {
      bestVal = val;
      break;
    }
    bestVal = val;
    best = w;
  }
  return std::sqrt(std::max(0.0, bestVal));
}

// The two analytic root curves of the worked example, in log coordinates:
// (-2 log t, -log t) and (log((1+t^2)/(2t)) + i pi, i pi).
inline std::pair<ToricPoint, ToricPoint> analytic_roots(double t) {
  if (t <= 0.0) throw InputError("analytic_roots requires t > 0");
  ToricPoint z1(2), z2(2);
  z1 << Complex(-2.0 * std::log(t)), Complex(-std::log(t));
  z2 << Complex(std::log((1.0 + t * t) / (2.0 * t)), M_PI), Complex(0.0, M_PI);
  return {z1, z2};
}

struct DecayReport {
  enum class Verdict { Quadratic, Linear, Diverging };
  std::vector<double> ratios;  // ||D_{i+1}|| / ||D_i||^2
  Verdict verdict;
};

// Ratio test on consecutive differences of an iterate sequence.  The sequence
// is quadratically convergent when every ratio stays below the supplied
// constant (2 * gamma bound in the certified regime).
inline DecayReport quadratic_decay_check(const std::vector<ToricPoint>& points,
                                         double C) {
  if (points.size() < 3)
    throw InputError("quadratic_decay_check needs at least 3 points");
  std::vector<double> deltas;
  for (size_t i = 0; i + 1 < points.size(); ++i)
    deltas.push_back((points[i + 1] - points[i]).norm());
  DecayReport rep;
  bool quad = true, div = false;
  for (size_t i = 0; i + 1 < deltas.size(); ++i) {
    // at the noise floor the ratios are meaningless
    if (deltas[i] < 1e-14 || deltas[i + 1] < 1e-14) break;
    rep.ratios.push_back(deltas[i + 1] / (deltas[i] * deltas[i]));
    if (rep.ratios.back() > C) quad = false;
    if (deltas[i + 1] > deltas[i]) div = true;
  }
  rep.verdict = div       ? DecayReport::Verdict::Diverging
                : quad    ? DecayReport::Verdict::Quadratic
                          : DecayReport::Verdict::Linear;
  return rep;
}

}  // namespace oracles
}  // namespace toric
