#pragma once

// Dense homogeneous baseline: Weyl metric, projective Newton via the bordered
// system, the projective condition number, and condition-length quadrature
// along explicitly parametrized root curves.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "supports.hpp"

namespace toric {

using Eigen::VectorXi;

// Graded-lex multi-indices of total degree d in `nvars` variables.
inline std::vector<VectorXi> multi_indices(int d, int nvars) {
  std::vector<VectorXi> out;
  VectorXi idx(nvars);
  std::function<void(int, int)> rec = [&](int pos, int rem) {
    if (pos == nvars - 1) {
      idx[pos] = rem;
      out.push_back(idx);
      return;
    }
    for (int e = rem; e >= 0; --e) {
      idx[pos] = e;
      rec(pos + 1, rem - e);
    }
  };
  rec(0, d);
  return out;
}

struct HomogeneousSystem {
  int n;                           // number of affine variables; n+1 homogeneous
  std::vector<int> degrees;
  std::vector<VectorXcd> coeffs;   // per equation, graded-lex order
};

namespace detail {

inline double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

// Weyl weight of the monomial x^alpha: alpha! / d!  (inverse multinomial).
inline double weyl_weight(const VectorXi& alpha) {
  double num = 1.0;
  int d = 0;
  for (int k = 0; k < alpha.size(); ++k) {
    num *= factorial(alpha[k]);
    d += alpha[k];
  }
  return num / factorial(d);
}

inline Complex pow_mono(const VectorXcd& X, const VectorXi& alpha) {
  Complex r = 1.0;
  for (int k = 0; k < alpha.size(); ++k)
    for (int e = 0; e < alpha[k]; ++e) r *= X[k];
  return r;
}

}  // namespace detail

inline double weyl_norm2_equation(const VectorXcd& c, int d, int nvars) {
  const auto idx = multi_indices(d, nvars);
  double s = 0.0;
  for (size_t k = 0; k < idx.size(); ++k)
    s += std::norm(c[static_cast<int>(k)]) * detail::weyl_weight(idx[k]);
  return s;
}

inline VectorXd weyl_norm(const HomogeneousSystem& h) {
  VectorXd out(static_cast<int>(h.coeffs.size()));
  for (size_t i = 0; i < h.coeffs.size(); ++i)
    out[static_cast<int>(i)] = std::sqrt(
        weyl_norm2_equation(h.coeffs[i], h.degrees[i], h.n + 1));
  return out;
}

inline Complex eval_equation(const HomogeneousSystem& h, int i,
                             const VectorXcd& X) {
  const auto idx = multi_indices(h.degrees[i], h.n + 1);
  Complex s = 0.0;
  for (size_t k = 0; k < idx.size(); ++k) {
    const Complex c = h.coeffs[static_cast<size_t>(i)][static_cast<int>(k)];
    if (c != Complex(0.0)) s += c * detail::pow_mono(X, idx[k]);
  }
  return s;
}

inline VectorXcd grad_equation(const HomogeneousSystem& h, int i,
                               const VectorXcd& X) {
  const auto idx = multi_indices(h.degrees[i], h.n + 1);
  VectorXcd g = VectorXcd::Zero(h.n + 1);
  for (size_t k = 0; k < idx.size(); ++k) {
    const Complex c = h.coeffs[static_cast<size_t>(i)][static_cast<int>(k)];
    if (c == Complex(0.0)) continue;
    for (int v = 0; v <= h.n; ++v) {
      if (idx[k][v] == 0) continue;
      VectorXi e = idx[k];
      e[v] -= 1;
      g[v] += c * static_cast<double>(idx[k][v]) * detail::pow_mono(X, e);
    }
  }
  return g;
}

// One projective Newton step through the bordered system [Dh(X); X*].
inline VectorXcd proj_newton_step(const HomogeneousSystem& h,
                                  const VectorXcd& X) {
  const int n = h.n;
  MatrixXcd M(n + 1, n + 1);
  VectorXcd rhs(n + 1);
  for (int i = 0; i < n; ++i) {
    M.row(i) = grad_equation(h, i, X).transpose();
    rhs[i] = eval_equation(h, i, X);
  }
  M.row(n) = X.adjoint();
  rhs[n] = 0.0;
  Eigen::FullPivLU<MatrixXcd> lu(M);
  if (!lu.isInvertible())
    throw SingularJacobian("bordered projective system singular");
  return X - lu.solve(rhs);
}

// mu = ||h|| * || (Dh(X)|_{X-perp})^{-1} diag(sqrt(d_i) ||X||^{d_i - 1}) ||.
inline double proj_mu(const HomogeneousSystem& h, const VectorXcd& X) {
  const int n = h.n;
  // orthonormal basis of X-perp from a full QR of [X | I]
  MatrixXcd A(n + 1, n + 2);
  A.col(0) = X;
  A.rightCols(n + 1) = MatrixXcd::Identity(n + 1, n + 1);
  Eigen::HouseholderQR<MatrixXcd> qr(A);
  const MatrixXcd Q =
      MatrixXcd(qr.householderQ()).block(0, 1, n + 1, n);
  MatrixXcd Dh(n, n + 1);
  for (int i = 0; i < n; ++i) Dh.row(i) = grad_equation(h, i, X).transpose();
  const MatrixXcd restricted = Dh * Q;
  Eigen::FullPivLU<MatrixXcd> lu(restricted);
  if (!lu.isInvertible()) throw SingularJacobian("restricted Jacobian singular");
  const double nX = X.norm();
  VectorXd scale(n);
  for (int i = 0; i < n; ++i)
    scale[i] = std::sqrt(static_cast<double>(h.degrees[i])) *
               std::pow(nX, h.degrees[i] - 1);
  const MatrixXcd inv = lu.solve(MatrixXcd(scale.asDiagonal()));
  const double normF = weyl_norm(h).norm();  // tuple Weyl norm
  Eigen::JacobiSVD<MatrixXcd> svd(inv);
  return normF * svd.singularValues()[0];
}

// Smale alpha bound with the classical higher-derivative estimate
// gamma <= mu * D^{3/2} / 2, D = max degree; beta is the sine step length.
inline double proj_alpha(const HomogeneousSystem& h, const VectorXcd& X) {
  const VectorXcd Y = proj_newton_step(h, X);
  const VectorXcd Pstep = Y - X.dot(Y) / X.squaredNorm() * X;
  const double beta = Pstep.norm() / X.norm();
  const int D = *std::max_element(h.degrees.begin(), h.degrees.end());
  const double gamma = 0.5 * proj_mu(h, X) * std::pow(D, 1.5);
  return beta * gamma;
}

// Sparse-to-dense conversion by padding with a homogenizing variable (n = 2,
// integer exponents, total degree <= 4).
inline HomogeneousSystem homogenize(const FewnomialSystem& f) {
  if (f.dim() != 2) throw InputError("homogenize supports n = 2 only");
  HomogeneousSystem h;
  h.n = 2;
  for (const auto& eq : f.equations) {
    int deg = 0;
    for (int a = 0; a < eq.size(); ++a) {
      double total = 0.0;
      for (int k = 0; k < 2; ++k) {
        const double e = eq.support.exponents(a, k);
        if (e < 0.0 || std::abs(e - std::round(e)) > 1e-12)
          throw InputError("homogenize requires nonnegative integer exponents");
        total += e;
      }
      deg = std::max(deg, static_cast<int>(std::round(total)));
    }
    if (deg > 4) throw InputError("homogenize limited to total degree <= 4");
    const auto idx = multi_indices(deg, 3);
    VectorXcd c = VectorXcd::Zero(static_cast<int>(idx.size()));
    for (int a = 0; a < eq.size(); ++a) {
      const int e0 = static_cast<int>(std::round(eq.support.exponents(a, 0)));
      const int e1 = static_cast<int>(std::round(eq.support.exponents(a, 1)));
      VectorXi alpha(3);
      alpha << e0, e1, deg - e0 - e1;
      const auto it = std::find(idx.begin(), idx.end(), alpha);
      c[static_cast<int>(it - idx.begin())] +=
          eq.coefficients[a] * eq.weights[a];
    }
    h.degrees.push_back(deg);
    h.coeffs.push_back(std::move(c));
  }
  return h;
}

struct ProjectivePath {
  std::function<HomogeneousSystem(double)> system;
  std::function<std::vector<VectorXcd>(double)> coefficientDot;
};

struct ProjectiveCurve {
  std::function<VectorXcd(double)> point;
  std::function<VectorXcd(double)> velocity;
};

namespace detail {

inline double proj_speed2(const HomogeneousSystem& h,
                          const std::vector<VectorXcd>& dc,
                          const VectorXcd& X, const VectorXcd& dX) {
  // coefficient speed in the tuple Weyl metric, Fubini-Study style
  double nf2 = 0.0, nd2 = 0.0;
  Complex ip = 0.0;
  for (size_t i = 0; i < h.coeffs.size(); ++i) {
    const auto idx = multi_indices(h.degrees[i], h.n + 1);
    for (size_t k = 0; k < idx.size(); ++k) {
      const double w = weyl_weight(idx[k]);
      nf2 += w * std::norm(h.coeffs[i][static_cast<int>(k)]);
      nd2 += w * std::norm(dc[i][static_cast<int>(k)]);
      ip += w * std::conj(h.coeffs[i][static_cast<int>(k)]) *
            dc[i][static_cast<int>(k)];
    }
  }
  const double fsp2 = (nd2 - std::norm(ip) / nf2) / nf2;
  const double nX2 = X.squaredNorm();
  const double zsp2 =
      (dX.squaredNorm() - std::norm(X.dot(dX)) / nX2) / nX2;
  return std::max(0.0, fsp2) + std::max(0.0, zsp2);
}

}  // namespace detail

inline double proj_condition_length(const ProjectivePath& path,
                                    const ProjectiveCurve& curve, double t0,
                                    double t1, double quadTol = 1e-4) {
  if (t0 == t1) return 0.0;
  auto integrand = [&](double t) {
    const HomogeneousSystem h = path.system(t);
    const auto dc = path.coefficientDot(t);
    const VectorXcd X = curve.point(t);
    const VectorXcd dX = curve.velocity(t);
    return proj_mu(h, X) * std::sqrt(detail::proj_speed2(h, dc, X, dX));
  };
  std::function<double(double, double, double, double, double, double, int)>
      rec = [&](double a, double b, double fa, double fm, double fb,
                double tol, int depth) {
        const double m = 0.5 * (a + b);
        const double fl = integrand(0.5 * (a + m));
        const double fr = integrand(0.5 * (m + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
        if (depth <= 0 ||
            std::abs(left + right - whole) <= 15.0 * tol * std::abs(left + right))
          return left + right + (left + right - whole) / 15.0;
        return rec(a, m, fa, fl, fm, tol / 1.4, depth - 1) +
               rec(m, b, fm, fr, fb, tol / 1.4, depth - 1);
      };
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  return rec(lo, hi, integrand(lo), integrand(0.5 * (lo + hi)), integrand(hi),
             quadTol, 32);
}

}  // namespace toric
