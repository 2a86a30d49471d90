#pragma once

// Evaluation geometry on the chart: reproducing-kernel norms, the momentum
// map, per-equation Gram matrices of the pulled-back Fubini-Study metric,
// the circumscribed radius nu, multiprojective distances, and the computable
// distortion/drift bound functions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "supports.hpp"

namespace toric {

enum class MetricMode { Hermitian, Finsler };

struct EquationMetric {
  double logKernel;   // log ||V_i(x)|| (includes the scale factor c_i)
  VectorXd momentum;  // m_i(x), a convex combination of the support
  MatrixXd gram;      // G_i(x), real symmetric PSD, acts Hermitian-bilinearly
  MatrixXd centered;  // rows a - m_i(x); kept for nu and hull checks
};

struct MetricData {
  std::vector<EquationMetric> eq;
  MatrixXd totalGram;  // sum_i G_i

  int dim() const { return static_cast<int>(totalGram.rows()); }
  // Mean Gram (1/n) sum_i G_i; the point-motion speed in path integrals is
  // measured here (this is the normalization that reproduces the published
  // asymptotics of the worked example).
  MatrixXd meanGram() const { return totalGram / static_cast<double>(eq.size()); }
};

inline MetricData metric_data(const FewnomialSystem& f, const ToricPoint& x) {
  const int n = f.dim();
  MetricData md;
  md.totalGram = MatrixXd::Zero(n, n);
  for (const auto& eqn : f.equations) {
    const MatrixXd& A = eqn.support.exponents;
    const VectorXd logmag =
        A * x.real() + eqn.weights.array().log().matrix();
    const double c = logmag.maxCoeff();
    // s_a = rho_a^2 e^{2 a.Re x - 2c}
    const VectorXd s = (2.0 * (logmag.array() - c)).exp();
    const double K = s.sum();
    EquationMetric em;
    em.logKernel = 0.5 * std::log(K) + c;
    em.momentum = A.transpose() * s / K;
    em.centered = A.rowwise() - em.momentum.transpose();
    em.gram = em.centered.transpose() * s.asDiagonal() * em.centered / K;
    md.totalGram += em.gram;
    md.eq.push_back(std::move(em));
  }
  return md;
}

inline double local_norm(const MetricData& md, const VectorXcd& w,
                         MetricMode mode) {
  if (w.size() != md.dim()) throw InputError("vector dimension mismatch");
  auto qform = [&](const MatrixXd& G) {
    return std::sqrt(std::max(0.0, std::real(w.dot(G * w))));
  };
  if (mode == MetricMode::Hermitian) return qform(md.totalGram);
  double m = 0.0;
  for (const auto& em : md.eq) m = std::max(m, qform(em.gram));
  return m;
}

struct NuReport {
  double value;          // max_i nu_i, always >= 1
  VectorXd perEquation;  // nu_i
};

// Circumscribed radius of conv(A_i - m_i) in the dual norm of G_i, with the
// pseudo-inverse restricted to the span of the centered support.
inline NuReport nu(const MetricData& md) {
  NuReport r;
  r.perEquation.resize(static_cast<int>(md.eq.size()));
  r.value = 0.0;
  for (size_t i = 0; i < md.eq.size(); ++i) {
    const auto& em = md.eq[i];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(em.gram);
    const VectorXd ev = es.eigenvalues();
    const double tol = 1e-12 * std::max(ev.maxCoeff(), 0.0);
    VectorXd inv = VectorXd::Zero(ev.size());
    for (int k = 0; k < ev.size(); ++k)
      if (ev[k] > tol) inv[k] = 1.0 / ev[k];
    const MatrixXd pinv =
        es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    double best = 0.0;
    for (int a = 0; a < em.centered.rows(); ++a) {
      const VectorXd d = em.centered.row(a).transpose();
      best = std::max(best, d.dot(pinv * d));
    }
    r.perEquation[static_cast<int>(i)] = std::sqrt(best);
    r.value = std::max(r.value, r.perEquation[static_cast<int>(i)]);
  }
  return r;
}

// Multiprojective sine distance between coefficient tuples on shared supports.
inline double multiproj_distance(const FewnomialSystem& f,
                                 const FewnomialSystem& g, MetricMode mode) {
  if (f.size() != g.size()) throw InputError("system size mismatch");
  double sum = 0.0, mx = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const VectorXcd& a = f.equations[i].coefficients;
    const VectorXcd& b = g.equations[i].coefficients;
    if (a.size() != b.size() ||
        (f.equations[i].support.exponents - g.equations[i].support.exponents)
                .cwiseAbs()
                .maxCoeff() > 0.0)
      throw InputError("support mismatch");
    // sin of the angle: || P_{b-perp} a || / ||a||
    const Complex lam = b.dot(a) / b.squaredNorm();
    const double s2 = (a - lam * b).squaredNorm() / a.squaredNorm();
    sum += s2;
    mx = std::max(mx, s2);
  }
  return mode == MetricMode::Hermitian ? std::sqrt(sum) : std::sqrt(mx);
}

// --- closed-form bound functions -------------------------------------------

// (2 - e^s) ||u||_x <= ||u||_y <= e^s ||u||_x  for s = nu(x) ||y-x||_x.
inline std::pair<double, double> distortion_bounds(double s) {
  return {2.0 - std::exp(s), std::exp(s)};
}

// Momentum drift: B(s) = (e^{2s}-1) e^{e^{2s}-1-2s}.
inline double momentum_drift_bound(double s) {
  const double e = std::expm1(2.0 * s);
  return e * std::exp(e - 2.0 * s);
}

// (nu - B(s)) e^{-s} <= nu(y) <= (nu + B(s)) / (2 - e^s), finite for s < log 2.
inline std::pair<double, double> nu_drift_bounds(double nuVal, double s) {
  const double B = momentum_drift_bound(s);
  const double lo = (nuVal - B) * std::exp(-s);
  const double denom = 2.0 - std::exp(s);
  const double hi = denom > 0.0 ? (nuVal + B) / denom
                                : std::numeric_limits<double>::infinity();
  return {lo, hi};
}

// mu nu sandwich factors (1-5theta, 1/(1-5theta)) for theta < 1/5.
inline std::pair<double, double> munu_drift_factor(double theta) {
  if (theta >= 0.2) throw InputError("munu_drift_factor requires theta < 1/5");
  return {1.0 - 5.0 * theta, 1.0 / (1.0 - 5.0 * theta)};
}

namespace detail {

// Brute-force facet enumeration inside the affine span of a small point set.
// Returns the projected points (rows), the projection of q, and the facets as
// (unit normal, offset) with inside being normal.p <= offset.
struct HullGeometry {
  MatrixXd pts;                                  // points in span coordinates
  VectorXd q;                                    // query point, same frame
  std::vector<std::pair<VectorXd, double>> facets;
  double diameter = 0.0;
};

inline HullGeometry hull_geometry(const MatrixXd& points, const VectorXd& query) {
  const int m = static_cast<int>(points.rows());
  const VectorXd centroid = points.colwise().mean().transpose();
  const MatrixXd centered = points.rowwise() - centroid.transpose();
  Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  const double tol = 1e-10 * std::max(1.0, svd.singularValues().maxCoeff());
  int rank = 0;
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > tol) ++rank;
  if (rank > 4)
    throw InputError("convex hull geometry limited to affine dimension <= 4");
  HullGeometry hg;
  const MatrixXd basis = svd.matrixV().leftCols(rank);
  hg.pts = centered * basis;
  hg.q = basis.transpose() * (query - centroid);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      hg.diameter =
          std::max(hg.diameter, (hg.pts.row(i) - hg.pts.row(j)).norm());
  if (rank == 0) return hg;

  // all subsets of size `rank` spanning a candidate facet hyperplane
  std::vector<int> idx(rank);
  std::vector<int> comb(rank);
  for (int k = 0; k < rank; ++k) comb[k] = k;
  auto next_comb = [&]() {
    int k = rank - 1;
    while (k >= 0 && comb[k] == m - rank + k) --k;
    if (k < 0) return false;
    ++comb[k];
    for (int j = k + 1; j < rank; ++j) comb[j] = comb[j - 1] + 1;
    return true;
  };
  do {
    MatrixXd diffs(rank - 1, rank);
    for (int k = 1; k < rank; ++k)
      diffs.row(k - 1) = hg.pts.row(comb[k]) - hg.pts.row(comb[0]);
    Eigen::FullPivLU<MatrixXd> lu(diffs);
    if (lu.dimensionOfKernel() != 1) continue;
    VectorXd normal = lu.kernel().col(0);
    normal.normalize();
    double offset = normal.dot(hg.pts.row(comb[0]).transpose());
    double lo = 0.0, hi = 0.0;
    for (int p = 0; p < m; ++p) {
      const double sgn = normal.dot(hg.pts.row(p).transpose()) - offset;
      lo = std::min(lo, sgn);
      hi = std::max(hi, sgn);
    }
    const double side = 1e-9 * std::max(1.0, hg.diameter);
    if (lo >= -side) {  // all points on the + side: flip so inside is <=
      normal = -normal;
      offset = -offset;
    } else if (hi > side) {
      continue;  // not a facet
    }
    hg.facets.emplace_back(normal, offset);
  } while (next_comb());
  return hg;
}

inline bool hull_contains(const MatrixXd& points, const VectorXd& query,
                          double tol) {
  const HullGeometry hg = hull_geometry(points, query);
  for (const auto& [normal, offset] : hg.facets)
    if (normal.dot(hg.q) - offset > tol) return false;
  return true;
}

}  // namespace detail

// Half the normalized distance from the momentum to the hull boundary; a
// multiprojective ball of this radius around [V(x)] avoids toric infinity.
inline double infinity_margin(const FewnomialSystem& f, const ToricPoint& x) {
  const MetricData md = metric_data(f, x);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < f.size(); ++i) {
    const auto hg = detail::hull_geometry(f.equations[i].support.exponents,
                                          md.eq[static_cast<size_t>(i)].momentum);
    if (hg.diameter == 0.0) return 0.0;
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& [normal, offset] : hg.facets)
      dist = std::min(dist, offset - normal.dot(hg.q));
    if (hg.facets.empty()) dist = 0.0;  // degenerate: no boundary structure
    margin = std::min(margin, std::max(0.0, dist) / hg.diameter);
  }
  return margin / 2.0;
}

}  // namespace toric
