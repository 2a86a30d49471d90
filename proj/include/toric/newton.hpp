#pragma once

// The normalized local section, its Jacobian, the toric Newton step, and the
// invariants beta, mu, nu, alpha with alpha-certification.

#include <cmath>
#include <vector>

#include "constants.hpp"
#include "metric.hpp"
#include "supports.hpp"

namespace toric {

// Component i of the local section at the base point: f_i.V_i(x) / ||V_i(x)||.
inline VectorXcd local_residual(const FewnomialSystem& f, const ToricPoint& x) {
  VectorXcd r(f.size());
  for (int i = 0; i < f.size(); ++i) {
    const auto& eq = f.equations[i];
    double c;
    const VectorXcd u = scaled_basis(eq, x, c);
    // ||V_i|| e^{-c} = sqrt(K~); both numerator and denominator carry e^{-c}
    const double Kn = u.cwiseAbs2().sum();
    r[i] = (eq.coefficients.array() * u.array()).sum() / std::sqrt(Kn);
  }
  return r;
}

// Row i: ||V_i||^{-1} (f_i . DV_i(x) - (f_i . V_i(x)) m_i(x)).  The momentum
// subtraction is the normalized-coordinate change that makes the section's
// derivative orthogonal to the base direction.
inline MatrixXcd local_jacobian(const FewnomialSystem& f, const ToricPoint& x) {
  const int n = f.dim();
  MatrixXcd B(n, n);
  for (int i = 0; i < n; ++i) {
    const auto& eq = f.equations[i];
    const MatrixXd& A = eq.support.exponents;
    double c;
    const VectorXcd u = scaled_basis(eq, x, c);
    const VectorXd s = u.cwiseAbs2();
    const double K = s.sum();
    const VectorXd m = A.transpose() * s / K;
    const VectorXcd fu = eq.coefficients.cwiseProduct(u);
    const Complex val = fu.sum();
    B.row(i) = (fu.transpose() * A - val * m.transpose()) / std::sqrt(K);
  }
  return B;
}

namespace detail {

// Solve B w = rhs with a singularity guard (sigma_min < 1e-14 sigma_max).
inline VectorXcd guarded_solve(const MatrixXcd& B, const VectorXcd& rhs) {
  Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv[0] > 0.0) || sv[sv.size() - 1] < 1e-14 * sv[0])
    throw SingularJacobian("local Jacobian numerically singular");
  return svd.solve(rhs);
}

}  // namespace detail

inline ToricPoint newton_step(const FewnomialSystem& f, const ToricPoint& x) {
  return x - detail::guarded_solve(local_jacobian(f, x), local_residual(f, x));
}

// Toric condition number: operator norm of B^{-1} D from the canonical norm
// on C^n (D = diag of coefficient norms) to the local metric.
inline double mu(const FewnomialSystem& f, const ToricPoint& x,
                 MetricMode mode = MetricMode::Hermitian) {
  const int n = f.dim();
  const MatrixXcd B = local_jacobian(f, x);
  Eigen::JacobiSVD<MatrixXcd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv[sv.size() - 1] < 1e-14 * sv[0])
    throw SingularJacobian("local Jacobian numerically singular");
  VectorXd D(n);
  for (int i = 0; i < n; ++i) D[i] = f.equations[i].coefficients.norm();
  const MatrixXcd BinvD = svd.solve(MatrixXcd(D.asDiagonal()));
  const MetricData md = metric_data(f, x);

  if (mode == MetricMode::Hermitian) {
    const MatrixXcd H = BinvD.adjoint() * md.totalGram * BinvD;
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }

  // Finsler: maximize max_i || B^{-1} D v ||_{i,x} over unit-modulus phase
  // vectors v (the product-torus boundary of the per-equation relative source
  // ball).  Phase grid then coordinate-wise local ascent; the first phase is
  // fixed by projective invariance.
  auto objective = [&](const VectorXd& theta) {
    VectorXcd v(n);
    v[0] = 1.0;
    for (int k = 1; k < n; ++k)
      v[k] = Complex(std::cos(theta[k - 1]), std::sin(theta[k - 1]));
    const VectorXcd w = BinvD * v;
    double best = 0.0;
    for (const auto& em : md.eq)
      best = std::max(best, std::real(w.dot(em.gram * w)));
    return std::sqrt(std::max(0.0, best));
  };
  const int free = n - 1;
  if (free == 0) return objective(VectorXd());
  const int grid = 64;
  VectorXd bestTheta = VectorXd::Zero(free);
  double best = -1.0;
  VectorXd theta(free);
  const long total = static_cast<long>(std::pow(grid, free));
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int k = 0; k < free; ++k) {
      theta[k] = 2.0 * M_PI * (rem % grid) / grid;
      rem /= grid;
    }
    const double val = objective(theta);
    if (val > best) {
      best = val;
      bestTheta = theta;
    }
  }
  // coordinate-wise ternary refinement around the grid winner
  double h = 2.0 * M_PI / grid;
  for (int round = 0; round < 40 && h > 1e-6; ++round) {
    for (int k = 0; k < free; ++k) {
      for (const double cand : {bestTheta[k] - h, bestTheta[k] + h}) {
        VectorXd tt = bestTheta;
        tt[k] = cand;
        const double val = objective(tt);
        if (val > best) {
          best = val;
          bestTheta = tt;
        }
      }
    }
    h *= 0.5;
  }
  return best;
}

inline double beta(const FewnomialSystem& f, const ToricPoint& x,
                   MetricMode mode = MetricMode::Hermitian) {
  const VectorXcd step =
      -detail::guarded_solve(local_jacobian(f, x), local_residual(f, x));
  return local_norm(metric_data(f, x), step, mode);
}

// The higher-derivative estimate: gamma(f,x) <= mu(f,x) nu(x) / 2.
inline double gamma_bound(const FewnomialSystem& f, const ToricPoint& x,
                          MetricMode mode = MetricMode::Hermitian) {
  return 0.5 * mu(f, x, mode) * nu(metric_data(f, x)).value;
}

struct NewtonReport {
  VectorXcd step;
  double beta;
  double mu;
  double nu;
  double alphaHalf;  // beta * mu * nu / 2
  bool jacobianConditionOK;
};

inline NewtonReport newton_report(const FewnomialSystem& f, const ToricPoint& x,
                                  MetricMode mode = MetricMode::Hermitian) {
  NewtonReport r;
  const MetricData md = metric_data(f, x);
  r.nu = nu(md).value;
  try {
    r.step = -detail::guarded_solve(local_jacobian(f, x), local_residual(f, x));
    r.beta = local_norm(md, r.step, mode);
    r.mu = mu(f, x, mode);
    r.jacobianConditionOK = true;
  } catch (const SingularJacobian&) {
    r.step = VectorXcd::Zero(f.dim());
    r.beta = r.mu = std::numeric_limits<double>::infinity();
    r.jacobianConditionOK = false;
  }
  r.alphaHalf = 0.5 * r.beta * r.mu * r.nu;
  return r;
}

struct Certificate {
  bool certified;
  double alphaHalf;
  double radius0;  // r0(alpha) * beta: a true zero lies within this radius
  double radius1;  // r1(alpha) * beta: and is unique within this one
  double beta;
  double mu;
  double nu;
};

inline Certificate alpha_certificate(const FewnomialSystem& f,
                                     const ToricPoint& x, MetricMode mode,
                                     const ConstantsTable& constants) {
  const NewtonReport r = newton_report(f, x, mode);
  Certificate c;
  c.alphaHalf = r.alphaHalf;
  c.beta = r.beta;
  c.mu = r.mu;
  c.nu = r.nu;
  c.certified = r.jacobianConditionOK && r.alphaHalf <= constants.alpha1;
  c.radius0 = scalar::r0(r.alphaHalf) * r.beta;
  c.radius1 = scalar::r1(r.alphaHalf) * r.beta;
  return c;
}

struct RefineResult {
  std::vector<ToricPoint> points;   // x, N(x), N^2(x), ...
  std::vector<double> stepNorms;    // ||x_{k+1} - x_k|| in the active mode
  bool converged;
};

// Iterate the Newton operator until stagnation.  Divergence (the step norm
// growing twice in a row) raises NumericalError.
inline RefineResult refine(const FewnomialSystem& f, const ToricPoint& x0,
                           int maxIters = 30,
                           MetricMode mode = MetricMode::Hermitian) {
  RefineResult r;
  r.points.push_back(x0);
  r.converged = false;
  int grows = 0;
  for (int k = 0; k < maxIters; ++k) {
    const ToricPoint& x = r.points.back();
    const ToricPoint y = newton_step(f, x);
    const double d = local_norm(metric_data(f, x), y - x, mode);
    if (!r.stepNorms.empty() && d > r.stepNorms.back()) {
      if (++grows >= 2)
        throw NumericalError("Newton refinement diverging");
    } else {
      grows = 0;
    }
    r.stepNorms.push_back(d);
    r.points.push_back(y);
    if (d < 1e-15 * (1.0 + y.norm())) {
      r.converged = true;
      break;
    }
  }
  return r;
}

}  // namespace toric
