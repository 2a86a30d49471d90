#pragma once

// Coefficient homotopies, path speeds, condition-length quadrature, and the
// adaptive step-size tracker (Newton plus threshold step control, no
// predictor).

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include "constants.hpp"
#include "metric.hpp"
#include "newton.hpp"
#include "supports.hpp"

namespace toric {

// A homotopy f_t whose coefficients are polynomials in the real parameter t
// (real powers allowed), over a fixed shape of supports and weights.
struct CoefficientPath {
  struct Term {
    double pow;
    Complex val;
  };
  FewnomialSystem shape;  // supports and weights; coefficients ignored
  // terms[eq][monomial] is the list of (power, value) pairs
  std::vector<std::vector<std::vector<Term>>> terms;
  double tStart = 0.0;
  double tEnd = 1.0;

  bool inDomain(double t) const {
    const double lo = std::min(tStart, tEnd), hi = std::max(tStart, tEnd);
    return t >= lo - 1e-12 && t <= hi + 1e-12;
  }
};

// System and exact coefficient derivative at parameter t.
inline std::pair<FewnomialSystem, std::vector<VectorXcd>> path_eval(
    const CoefficientPath& path, double t) {
  if (!path.inDomain(t)) throw InputError("parameter outside homotopy domain");
  FewnomialSystem f = path.shape;
  std::vector<VectorXcd> df;
  for (size_t i = 0; i < path.terms.size(); ++i) {
    auto& eq = f.equations[i];
    VectorXcd d = VectorXcd::Zero(eq.size());
    for (int a = 0; a < eq.size(); ++a) {
      Complex c = 0.0, dc = 0.0;
      for (const auto& term : path.terms[i][a]) {
        const double tp = term.pow == 0.0 ? 1.0 : std::pow(t, term.pow);
        c += term.val * tp;
        if (term.pow != 0.0)
          dc += term.val * term.pow * std::pow(t, term.pow - 1.0);
      }
      eq.coefficients[a] = c;
      d[a] = dc;
    }
    if (eq.coefficients.norm() == 0.0)
      throw NumericalError("equation vanishes along the path");
    df.push_back(std::move(d));
  }
  return {std::move(f), std::move(df)};
}

// Coefficient speed (per-equation sine speed, combined by the mode) and root
// speed z' = -B^{-1} (f'.V/||V||), the latter measured in the mean Gram.
inline std::pair<double, double> path_speed(
    const CoefficientPath& path, double t, const ToricPoint& x,
    MetricMode mode = MetricMode::Hermitian) {
  const auto [f, df] = path_eval(path, t);
  double sum = 0.0, mx = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const VectorXcd& c = f.equations[i].coefficients;
    const VectorXcd& d = df[static_cast<size_t>(i)];
    const Complex lam = c.dot(d) / c.squaredNorm();
    const double s2 = (d - lam * c).squaredNorm() / c.squaredNorm();
    sum += s2;
    mx = std::max(mx, s2);
  }
  const double fdot =
      mode == MetricMode::Hermitian ? std::sqrt(sum) : std::sqrt(mx);

  VectorXcd rhs(f.size());
  for (int i = 0; i < f.size(); ++i) {
    double c;
    const VectorXcd u = scaled_basis(f.equations[i], x, c);
    rhs[i] = (df[static_cast<size_t>(i)].array() * u.array()).sum() /
             std::sqrt(u.cwiseAbs2().sum());
  }
  const VectorXcd zdot = -detail::guarded_solve(local_jacobian(f, x), rhs);
  const MetricData md = metric_data(f, x);
  const MatrixXd Gbar = md.meanGram();
  const double zspeed = std::sqrt(std::max(0.0, std::real(zdot.dot(Gbar * zdot))));
  return {fdot, zspeed};
}

namespace detail {

// Root continuation helper for quadrature: refines the root of f_t from the
// nearest previously solved parameter and certifies it.
class RootCache {
 public:
  RootCache(const CoefficientPath& path, const ConstantsTable& constants,
            MetricMode mode)
      : path_(path), constants_(constants), mode_(mode) {}

  void seed(double t, const ToricPoint& x) { cache_[t] = x; }

  ToricPoint at(double t, int depth = 0) {
    auto it = cache_.lower_bound(t);
    // nearest cached parameter as warm start
    if (it == cache_.end()) {
      --it;
    } else if (it != cache_.begin()) {
      auto prev = std::prev(it);
      if (std::abs(prev->first - t) < std::abs(it->first - t)) it = prev;
    }
    const double tNear = it->first;
    ToricPoint x = it->second;
    const FewnomialSystem f = path_eval(path_, t).first;
    bool ok = true;
    try {
      for (int k = 0; k < 50; ++k) {
        const ToricPoint y = newton_step(f, x);
        const double d = (y - x).norm();
        x = y;
        if (d < 1e-14 * (1.0 + x.norm())) break;
      }
      ok = alpha_certificate(f, x, mode_, constants_).certified;
    } catch (const SingularJacobian&) {
      ok = false;
    } catch (const NumericalError&) {
      ok = false;
    }
    if (!ok) {
      // warm start too far: continue through the midpoint first
      if (depth > 60 || std::abs(t - tNear) < 1e-15 * (1.0 + std::abs(t)))
        throw NumericalError("lost certification during quadrature at t=" +
                             std::to_string(t));
      at(0.5 * (t + tNear), depth + 1);
      return at(t, depth + 1);
    }
    cache_[t] = x;
    return x;
  }

 private:
  const CoefficientPath& path_;
  const ConstantsTable& constants_;
  MetricMode mode_;
  std::map<double, ToricPoint> cache_;
};

// Adaptive Simpson on a pair of integrands sharing their nodes; the first
// component drives the refinement.
struct PairIntegrand {
  std::function<std::pair<double, double>(double)> f;

  std::pair<double, double> integrate(double a, double b, double tol,
                                      int maxDepth = 32) const {
    const auto fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
    return recurse(a, b, fa, fm, fb, tol, maxDepth);
  }

 private:
  static std::pair<double, double> simpson(double a, double b,
                                           const std::pair<double, double>& fa,
                                           const std::pair<double, double>& fm,
                                           const std::pair<double, double>& fb) {
    const double h = (b - a) / 6.0;
    return {h * (fa.first + 4.0 * fm.first + fb.first),
            h * (fa.second + 4.0 * fm.second + fb.second)};
  }

  std::pair<double, double> recurse(double a, double b,
                                    const std::pair<double, double>& fa,
                                    const std::pair<double, double>& fm,
                                    const std::pair<double, double>& fb,
                                    double tol, int depth) const {
    const double m = 0.5 * (a + b);
    const auto fl = f(0.5 * (a + m)), fr = f(0.5 * (m + b));
    const auto whole = simpson(a, b, fa, fm, fb);
    const auto left = simpson(a, m, fa, fl, fm);
    const auto right = simpson(m, b, fm, fr, fb);
    const double err = std::abs(left.first + right.first - whole.first);
    if (depth <= 0 || err <= 15.0 * tol * std::abs(left.first + right.first)) {
      return {left.first + right.first +
                  (left.first + right.first - whole.first) / 15.0,
              left.second + right.second +
                  (left.second + right.second - whole.second) / 15.0};
    }
    const auto L = recurse(a, m, fa, fl, fm, tol / 1.4, depth - 1);
    const auto R = recurse(m, b, fm, fr, fb, tol / 1.4, depth - 1);
    return {L.first + R.first, L.second + R.second};
  }
};

}  // namespace detail

struct CondLength {
  double L;   // integral of mu sqrt(||f'||^2 + nu^2 ||z'||^2)
  double L1;  // integral of mu (||f'|| + nu ||z'||);  L <= L1 <= sqrt(2) L
};

// Condition length of the lifted path, with the root re-refined at every
// quadrature node.  The circumscribed radius multiplies the point-motion
// term only; this is the normalization consistent with the mesh analysis
// and with the published asymptotics of the worked example.
inline CondLength condition_length(const CoefficientPath& path,
                                   const ToricPoint& seedRoot, double t0,
                                   double t1,
                                   MetricMode mode = MetricMode::Hermitian,
                                   double quadTol = 1e-4) {
  if (t0 == t1) return {0.0, 0.0};
  const ConstantsTable constants = derive_constants();
  {
    const FewnomialSystem f0 = path_eval(path, t0).first;
    if (!alpha_certificate(f0, seedRoot, mode, constants).certified)
      throw NumericalError("seed root not certified at t0");
  }
  detail::RootCache roots(path, constants, mode);
  roots.seed(t0, seedRoot);
  detail::PairIntegrand integrand{[&](double t) -> std::pair<double, double> {
    const ToricPoint x = roots.at(t);
    const FewnomialSystem f = path_eval(path, t).first;
    const MetricData md = metric_data(f, x);
    const double muv = mu(f, x, mode);
    const double nuv = nu(md).value;
    const auto [fdot, zdot] = path_speed(path, t, x, mode);
    const double L = muv * std::sqrt(fdot * fdot + nuv * nuv * zdot * zdot);
    const double L1 = muv * (fdot + nuv * zdot);
    return {L, L1};
  }};
  const double lo = std::min(t0, t1), hi = std::max(t0, t1);
  auto [L, L1] = integrand.integrate(lo, hi, quadTol);
  return {L, L1};
}

// Threshold step: the next parameter is the farthest t (toward tEnd) at which
// x remains strictly below the alpha_1 monitor, located by bracketed
// expansion and bisection on the crossing.
inline double step_size(const CoefficientPath& path, double ti,
                        const ToricPoint& x, const ConstantsTable& constants,
                        MetricMode mode = MetricMode::Hermitian,
                        double initialProbe = 0.0, double bisectTol = 1e-10) {
  if (!(bisectTol > 0.0)) throw InputError("step bisection tolerance must be positive");
  auto monitor = [&](double t) {
    const FewnomialSystem f = path_eval(path, t).first;
    try {
      return newton_report(f, x, mode).alphaHalf;
    } catch (const SingularJacobian&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  if (monitor(ti) >= constants.alpha1)
    throw InputError("step_size requires the monitor below alpha1 at t_i");
  const double tEnd = path.tEnd;
  const double span = std::abs(tEnd - path.tStart);
  const double dir = tEnd > ti ? 1.0 : -1.0;
  double dt = initialProbe > 0.0 ? initialProbe : span / 100.0;
  dt = std::max(dt, 1e-12 * span);
  double lo = ti;
  double hi;
  for (;;) {
    const double cand = lo + dir * dt;
    if ((dir > 0 && cand >= tEnd) || (dir < 0 && cand <= tEnd)) {
      if (monitor(tEnd) < constants.alpha1) return tEnd;
      hi = tEnd;
      break;
    }
    if (monitor(cand) >= constants.alpha1) {
      hi = cand;
      break;
    }
    lo = cand;
    dt *= 2.0;
  }
  while (std::abs(hi - lo) > bisectTol * span) {
    const double mid = 0.5 * (lo + hi);
    if (monitor(mid) >= constants.alpha1)
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

struct TrackStep {
  double t;
  ToricPoint x;
  double beta, mu, nu, alphaHalf;
  bool stepAccepted;
};

struct TrackLog {
  std::vector<TrackStep> steps;
  Certificate finalCertificate;
  ToricPoint endPoint;
  int stepCount = 0;
  double conditionLengthEstimate = 0.0;
  double wallSeconds = 0.0;
  std::vector<double> refineStepNorms;  // endgame diagnostics
};

// Main tracking loop: x_{i+1} = N(f_{t_i}, x_i), then advance t as far as the
// new point stays below the alpha_1 threshold.  Ends with full refinement.
inline TrackLog track(const CoefficientPath& path, const ToricPoint& x0,
                      const ConstantsTable& constants,
                      MetricMode mode = MetricMode::Hermitian,
                      double bisectTol = 1e-10) {
  const auto t_begin = std::chrono::steady_clock::now();
  TrackLog log;
  const double span = std::abs(path.tEnd - path.tStart);
  double t = path.tStart;
  ToricPoint x = x0;
  {
    const FewnomialSystem f = path_eval(path, t).first;
    const Certificate c0 = alpha_certificate(f, x, mode, constants);
    if (!c0.certified) throw InputError("start point not certified at t_start");
    log.steps.push_back({t, x, c0.beta, c0.mu, c0.nu, c0.alphaHalf, true});
  }
  if (span == 0.0) {
    log.endPoint = x;
    log.finalCertificate = alpha_certificate(path_eval(path, t).first, x, mode,
                                             constants);
    return log;
  }
  double prevStep = 0.0;
  int stallCount = 0;
  while (t != path.tEnd) {
    const FewnomialSystem ft = path_eval(path, t).first;
    x = newton_step(ft, x);
    const double probe = prevStep > 0.0 ? 0.1 * prevStep : 0.0;
    const double tn = step_size(path, t, x, constants, mode, probe, bisectTol);
    if (std::abs(tn - t) < 1e-14 * span) {
      if (++stallCount >= 3)
        throw NumericalError("step stall: path too close to the discriminant");
    } else {
      stallCount = 0;
    }
    prevStep = std::abs(tn - t);
    t = tn;
    ++log.stepCount;
    const FewnomialSystem fn = path_eval(path, t).first;
    const NewtonReport rep = newton_report(fn, x, mode);
    log.steps.push_back(
        {t, x, rep.beta, rep.mu, rep.nu, rep.alphaHalf, true});
  }
  // quadratic endgame at the target system
  const FewnomialSystem fT = path_eval(path, path.tEnd).first;
  const RefineResult rr = refine(fT, x, 30, mode);
  log.refineStepNorms = rr.stepNorms;
  log.endPoint = rr.points.back();
  log.finalCertificate =
      alpha_certificate(fT, log.endPoint, mode, constants);
  log.wallSeconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t_begin)
                        .count();
  return log;
}

// --- serialization ----------------------------------------------------------

inline nlohmann::json to_json(const Certificate& c) {
  return {{"certified", c.certified}, {"alphaHalf", c.alphaHalf},
          {"radius0", c.radius0},     {"radius1", c.radius1},
          {"beta", c.beta},           {"mu", c.mu},
          {"nu", c.nu}};
}

inline nlohmann::json to_json(const ConstantsTable& t) {
  return {{"u0", t.u0},         {"alpha0", t.alpha0}, {"alpha1", t.alpha1},
          {"u1", t.u1},         {"deltaA", t.deltaA}, {"deltaB", t.deltaB},
          {"provenance", t.provenance}};
}

inline nlohmann::json to_json(const TrackLog& log) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : log.steps) {
    std::vector<double> re(s.x.size()), im(s.x.size());
    for (int k = 0; k < s.x.size(); ++k) {
      re[k] = s.x[k].real();
      im[k] = s.x[k].imag();
    }
    steps.push_back({{"t", s.t},
                     {"re", re},
                     {"im", im},
                     {"beta", s.beta},
                     {"mu", s.mu},
                     {"nu", s.nu},
                     {"alphaHalf", s.alphaHalf},
                     {"stepAccepted", s.stepAccepted}});
  }
  std::vector<double> endRe(log.endPoint.size()), endIm(log.endPoint.size());
  for (int k = 0; k < log.endPoint.size(); ++k) {
    endRe[k] = log.endPoint[k].real();
    endIm[k] = log.endPoint[k].imag();
  }
  return {{"steps", steps},
          {"stepCount", log.stepCount},
          {"endPoint", {{"re", endRe}, {"im", endIm}}},
          {"finalCertificate", to_json(log.finalCertificate)},
          {"conditionLengthEstimate", log.conditionLengthEstimate},
          {"wallSeconds", log.wallSeconds},
          {"refineStepNorms", log.refineStepNorms}};
}

inline std::string track_csv(const TrackLog& log) {
  std::ostringstream os;
  os.precision(17);
  const int n = log.steps.empty() ? 0 : static_cast<int>(log.steps[0].x.size());
  os << "t";
  for (int k = 0; k < n; ++k) os << ",re_x" << k + 1;
  for (int k = 0; k < n; ++k) os << ",im_x" << k + 1;
  os << ",beta,mu,nu,alphaHalf\n";
  for (const auto& s : log.steps) {
    os << s.t;
    for (int k = 0; k < n; ++k) os << "," << s.x[k].real();
    for (int k = 0; k < n; ++k) os << "," << s.x[k].imag();
    os << "," << s.beta << "," << s.mu << "," << s.nu << "," << s.alphaHalf
       << "\n";
  }
  return os.str();
}

inline CoefficientPath parse_homotopy(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed homotopy document: ") + e.what());
  }
  CoefficientPath path;
  try {
    const int n = j.at("n").get<int>();
    path.tStart = j.at("t_start").get<double>();
    path.tEnd = j.at("t_end").get<double>();
    for (const auto& je : j.at("equations")) {
      ExponentialSum eq;
      const auto& sup = je.at("support");
      eq.support.exponents.resize(static_cast<int>(sup.size()), n);
      for (int a = 0; a < static_cast<int>(sup.size()); ++a)
        for (int k = 0; k < n; ++k)
          eq.support.exponents(a, k) = sup[a][k].get<double>();
      const int m = eq.support.size();
      eq.weights = VectorXd::Ones(m);
      if (je.contains("weights"))
        for (int a = 0; a < m; ++a)
          eq.weights[a] = je.at("weights")[a].get<double>();
      eq.coefficients = VectorXcd::Zero(m);
      std::vector<std::vector<CoefficientPath::Term>> eqTerms;
      const auto& cs = je.at("coefficients");
      if (static_cast<int>(cs.size()) != m)
        throw InputError("coefficient polynomial count must match support");
      for (int a = 0; a < m; ++a) {
        std::vector<CoefficientPath::Term> terms;
        for (const auto& jt : cs[a])
          terms.push_back({jt.at("pow").get<double>(),
                           Complex(jt.at("re").get<double>(),
                                   jt.at("im").get<double>())});
        eqTerms.push_back(std::move(terms));
      }
      path.shape.equations.push_back(std::move(eq));
      path.terms.push_back(std::move(eqTerms));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed homotopy document: ") + e.what());
  }
  // validate the shape with midpoint coefficients
  validate(path_eval(path, 0.5 * (path.tStart + path.tEnd)).first);
  return path;
}

inline std::string serialize_homotopy(const CoefficientPath& path) {
  nlohmann::json j;
  j["n"] = path.shape.dim();
  j["t_start"] = path.tStart;
  j["t_end"] = path.tEnd;
  j["equations"] = nlohmann::json::array();
  for (size_t i = 0; i < path.terms.size(); ++i) {
    const auto& eq = path.shape.equations[i];
    nlohmann::json je;
    for (int a = 0; a < eq.size(); ++a) {
      std::vector<double> row(eq.support.dim());
      for (int k = 0; k < eq.support.dim(); ++k)
        row[k] = eq.support.exponents(a, k);
      je["support"].push_back(row);
      je["weights"].push_back(eq.weights[a]);
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& term : path.terms[i][a])
        terms.push_back({{"pow", term.pow},
                         {"re", term.val.real()},
                         {"im", term.val.imag()}});
      je["coefficients"].push_back(terms);
    }
    j["equations"].push_back(je);
  }
  return j.dump(2);
}

}  // namespace toric
