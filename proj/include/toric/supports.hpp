#pragma once

// Exponential-sum systems: supports, weights, coefficients, and evaluation
// in logarithmic coordinates.  An equation is f_i(x) = sum_a f_{i,a} rho_a e^{a.x}
// with a running over a finite support A_i in R^n.

#include <Eigen/Dense>
#include <complex>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace toric {

using Complex = std::complex<double>;
using Eigen::MatrixXd;
using Eigen::MatrixXcd;
using Eigen::VectorXd;
using Eigen::VectorXcd;

// Error taxonomy mapped to CLI exit codes: InputError -> 2, the others -> 3.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularJacobian : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SupportSet {
  MatrixXd exponents;  // one row per exponent vector a

  int dim() const { return static_cast<int>(exponents.cols()); }
  int size() const { return static_cast<int>(exponents.rows()); }
};

struct ExponentialSum {
  SupportSet support;
  VectorXd weights;        // rho_a > 0
  VectorXcd coefficients;  // f_{i,a}

  int size() const { return support.size(); }
};

struct FewnomialSystem {
  std::vector<ExponentialSum> equations;

  int dim() const {
    return equations.empty() ? 0 : equations.front().support.dim();
  }
  int size() const { return static_cast<int>(equations.size()); }
};

using ToricPoint = VectorXcd;

// A number too large or small for double, kept as mantissa * e^logScale.
struct ScaledValue {
  Complex mantissa;
  double logScale = 0.0;

  Complex value() const { return mantissa * std::exp(logScale); }
};

inline void validate(const FewnomialSystem& f) {
  if (f.equations.empty()) throw InputError("system has no equations");
  const int n = f.dim();
  if (f.size() != n)
    throw InputError("system is not square: " + std::to_string(f.size()) +
                     " equations in dimension " + std::to_string(n));
  for (const auto& eq : f.equations) {
    if (eq.support.dim() != n) throw InputError("support dimension mismatch");
    if (eq.support.size() < 1) throw InputError("empty support");
    if (eq.weights.size() != eq.support.size() ||
        eq.coefficients.size() != eq.support.size())
      throw InputError("weights/coefficients length must match support size");
    if ((eq.weights.array() <= 0.0).any())
      throw InputError("non-positive weight");
    for (int i = 0; i < eq.support.size(); ++i)
      for (int j = i + 1; j < eq.support.size(); ++j)
        if ((eq.support.exponents.row(i) - eq.support.exponents.row(j))
                .cwiseAbs()
                .maxCoeff() == 0.0)
          throw InputError("duplicate exponent in support");
  }
}

// Scaled basis vector u_a = rho_a e^{a.x - c} with c = max_a (a.Re x + log rho_a),
// so that max_a |u_a| = 1.  All normalized quantities downstream are invariant
// under the choice of c; raw values carry it as a log-scale.
inline VectorXcd scaled_basis(const ExponentialSum& eq, const ToricPoint& x,
                              double& logScale) {
  const VectorXd re = eq.support.exponents * x.real();
  const VectorXd logmag = re + eq.weights.array().log().matrix();
  logScale = logmag.maxCoeff();
  const VectorXd im = eq.support.exponents * x.imag();
  VectorXcd u(eq.size());
  for (int a = 0; a < eq.size(); ++a)
    u[a] = std::exp(logmag[a] - logScale) *
           Complex(std::cos(im[a]), std::sin(im[a]));
  return u;
}

inline std::vector<ScaledValue> evaluate(const FewnomialSystem& f,
                                         const ToricPoint& x) {
  if (x.size() != f.dim()) throw InputError("point dimension mismatch");
  std::vector<ScaledValue> out;
  out.reserve(f.equations.size());
  for (const auto& eq : f.equations) {
    double c;
    const VectorXcd u = scaled_basis(eq, x, c);
    out.push_back({(eq.coefficients.array() * u.array()).sum(), c});
  }
  return out;
}

// The (R^n)* action A_i -> A_i - g_i; coefficients and weights are untouched,
// values pick up the factor e^{-g_i.x}.
inline FewnomialSystem shift_action(const FewnomialSystem& f,
                                    const std::vector<VectorXd>& shifts) {
  if (static_cast<int>(shifts.size()) != f.size())
    throw InputError("one shift vector per equation required");
  FewnomialSystem g = f;
  for (int i = 0; i < f.size(); ++i) {
    if (shifts[i].size() != f.dim()) throw InputError("shift dimension mismatch");
    g.equations[i].support.exponents.rowwise() -= shifts[i].transpose();
  }
  return g;
}

inline FewnomialSystem parse_system(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed system document: ") + e.what());
  }
  FewnomialSystem f;
  try {
    const int n = j.at("n").get<int>();
    for (const auto& je : j.at("equations")) {
      ExponentialSum eq;
      const auto& sup = je.at("support");
      eq.support.exponents.resize(static_cast<int>(sup.size()), n);
      for (int a = 0; a < static_cast<int>(sup.size()); ++a) {
        if (static_cast<int>(sup[a].size()) != n)
          throw InputError("exponent vector of wrong dimension");
        for (int k = 0; k < n; ++k)
          eq.support.exponents(a, k) = sup[a][k].get<double>();
      }
      const int m = eq.support.size();
      eq.weights = VectorXd::Ones(m);
      if (je.contains("weights"))
        for (int a = 0; a < m; ++a)
          eq.weights[a] = je.at("weights")[a].get<double>();
      const auto& cs = je.at("coefficients");
      if (static_cast<int>(cs.size()) != m)
        throw InputError("coefficient count must match support size");
      eq.coefficients.resize(m);
      for (int a = 0; a < m; ++a)
        eq.coefficients[a] = Complex(cs[a][0].get<double>(), cs[a][1].get<double>());
      f.equations.push_back(std::move(eq));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed system document: ") + e.what());
  }
  validate(f);
  return f;
}

inline std::string serialize_system(const FewnomialSystem& f) {
  nlohmann::json j;
  j["n"] = f.dim();
  j["equations"] = nlohmann::json::array();
  for (const auto& eq : f.equations) {
    nlohmann::json je;
    for (int a = 0; a < eq.size(); ++a) {
      std::vector<double> row(eq.support.dim());
      for (int k = 0; k < eq.support.dim(); ++k)
        row[k] = eq.support.exponents(a, k);
      je["support"].push_back(row);
      je["weights"].push_back(eq.weights[a]);
      je["coefficients"].push_back(
          {eq.coefficients[a].real(), eq.coefficients[a].imag()});
    }
    j["equations"].push_back(je);
  }
  return j.dump(2);
}

}  // namespace toric
