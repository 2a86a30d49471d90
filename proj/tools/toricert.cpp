// toricert: certify roots, track homotopies, and tabulate condition lengths
// for sparse polynomial systems written as exponential sums.
//
// Exit codes: 0 success/certified, 1 uncertified, 2 input error, 3 numerical
// failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <toric/toric.hpp>

using namespace toric;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// atomic-ish write: temp file in the same directory, then rename
void spill(const std::string& path, const std::string& text) {
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InputError("cannot write file: " + path);
    out << text;
  }
  fs::rename(tmp, target);
}

// point spec: either "re1,im1,re2,im2,..." inline or @file with
// {"re": [...], "im": [...]}
ToricPoint parse_point(const std::string& spec, int n) {
  ToricPoint x(n);
  if (!spec.empty() && spec[0] == '@') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(slurp(spec.substr(1)));
      for (int k = 0; k < n; ++k)
        x[k] = Complex(j.at("re").at(k).get<double>(),
                       j.at("im").at(k).get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed point file: ") + e.what());
    }
    return x;
  }
  std::vector<double> vals;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError("malformed point component: " + item);
    }
  }
  if (static_cast<int>(vals.size()) != 2 * n)
    throw InputError("point needs " + std::to_string(2 * n) +
                     " comma-separated values (re,im per coordinate)");
  for (int k = 0; k < n; ++k) x[k] = Complex(vals[2 * k], vals[2 * k + 1]);
  return x;
}

std::string point_json(const ToricPoint& x) {
  nlohmann::json j;
  for (int k = 0; k < x.size(); ++k) {
    j["re"].push_back(x[k].real());
    j["im"].push_back(x[k].imag());
  }
  return j.dump(2) + "\n";
}

MetricMode parse_mode(const std::string& mode) {
  if (mode == "hermitian") return MetricMode::Hermitian;
  if (mode == "finsler") return MetricMode::Finsler;
  throw InputError("mode must be hermitian or finsler");
}

// homogenized view of a coefficient homotopy, with the root curve continued
// by certified refinement (generic lift Z = (e^{z1}, e^{z2}, 1))
struct LiftedCurve {
  const CoefficientPath& path;
  detail::RootCache cache;

  LiftedCurve(const CoefficientPath& p, const ConstantsTable& c, MetricMode m)
      : path(p), cache(p, c, m) {}

  ProjectivePath projective_path() const {
    const CoefficientPath& p = path;
    ProjectivePath pp;
    pp.system = [&p](double t) { return homogenize(path_eval(p, t).first); };
    pp.coefficientDot = [&p](double t) {
      auto [f, df] = path_eval(p, t);
      for (size_t i = 0; i < df.size(); ++i)
        f.equations[i].coefficients = df[i];
      return homogenize(f).coeffs;
    };
    return pp;
  }

  ProjectiveCurve curve() {
    ProjectiveCurve c;
    c.point = [this](double t) {
      const ToricPoint z = cache.at(t);
      VectorXcd X(3);
      X << std::exp(z[0]), std::exp(z[1]), Complex(1.0);
      return X;
    };
    c.velocity = [this](double t) {
      const ToricPoint z = cache.at(t);
      const auto [f, df] = path_eval(path, t);
      VectorXcd rhs(f.size());
      for (int i = 0; i < f.size(); ++i) {
        double csc;
        const VectorXcd u = scaled_basis(f.equations[i], z, csc);
        rhs[i] = (df[static_cast<size_t>(i)].array() * u.array()).sum() /
                 std::sqrt(u.cwiseAbs2().sum());
      }
      const VectorXcd zdot = -detail::guarded_solve(local_jacobian(f, z), rhs);
      VectorXcd V(3);
      V << std::exp(z[0]) * zdot[0], std::exp(z[1]) * zdot[1], Complex(0.0);
      return V;
    };
    return c;
  }
};

int run_self_check() {
  const ConstantsTable constants = derive_constants();
  bool ok = constants_residual(constants) < 1e-10;
  std::printf("constants residual: %s\n", ok ? "ok" : "FAIL");

  const FewnomialSystem f = running_example(1.0);
  const auto [z1, z2] = oracles::analytic_roots(1.0);
  const bool roots = local_residual(f, z1).norm() < 1e-12 &&
                     local_residual(f, z2).norm() < 1e-12;
  std::printf("worked-example roots: %s\n", roots ? "ok" : "FAIL");
  ok = ok && roots;

  const bool cond =
      std::abs(mu(f, ToricPoint::Zero(2)) - std::sqrt(2.0)) < 1e-9 &&
      std::abs(nu(metric_data(f, ToricPoint::Zero(2))).value - std::sqrt(2.0)) <
          1e-9;
  std::printf("condition invariants at the base root: %s\n",
              cond ? "ok" : "FAIL");
  ok = ok && cond;

  const TrackLog log =
      track(running_example_path(1.0, 0.5), z1, constants);
  const bool tracked = log.finalCertificate.certified &&
                       (log.endPoint - oracles::analytic_roots(0.5).first)
                               .norm() < 1e-10;
  std::printf("short tracking run: %s\n", tracked ? "ok" : "FAIL");
  ok = ok && tracked;

  MatrixXcd B = MatrixXcd::Identity(2, 2) * 2.0;
  const MatrixXd I = MatrixXd::Identity(2, 2);
  const bool oracle =
      std::abs(oracles::brute_opnorm(B, I, I, 100) - 2.0) < 1e-10;
  std::printf("brute-force oracle: %s\n", oracle ? "ok" : "FAIL");
  ok = ok && oracle;

  std::printf("self-check: %s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certified toric Newton / homotopy toolkit"};
  app.require_subcommand(0, 1);

  bool selfCheck = false;
  app.add_flag("--self-check", selfCheck, "run the built-in sanity suite");

  std::string mode = "hermitian";
  std::string out;
  double tolT = 1e-10, tolQuad = 1e-4;

  // certify
  auto* cCertify = app.add_subcommand("certify", "alpha-certify a point");
  std::string certifySystem, certifyPoint;
  cCertify->add_option("system", certifySystem, "system JSON file")->required();
  cCertify->add_option("--point", certifyPoint, "point spec (re,im,... or @file)")
      ->required();
  cCertify->add_option("--mode", mode, "hermitian|finsler");
  cCertify->add_option("--out", out, "write the certificate JSON here");

  // track
  auto* cTrack = app.add_subcommand("track", "track a homotopy");
  std::string trackHomotopy;
  std::vector<std::string> trackStarts;
  cTrack->add_option("homotopy", trackHomotopy, "homotopy JSON file")->required();
  cTrack->add_option("--start", trackStarts, "start point spec (repeatable)")
      ->required();
  cTrack->add_option("--mode", mode, "hermitian|finsler");
  cTrack->add_option("--tol-t", tolT, "relative step bisection tolerance");
  cTrack->add_option("--out", out, "output prefix (<out>_k.json / .csv)");

  // condlength
  auto* cCond = app.add_subcommand("condlength", "condition-length table");
  std::string condHomotopy, condStart;
  std::vector<double> epsList;
  bool projective = false;
  cCond->add_option("homotopy", condHomotopy, "homotopy JSON file")->required();
  cCond->add_option("--start", condStart, "certified root at t_start")->required();
  cCond->add_option("--eps", epsList, "target parameters (repeatable)");
  cCond->add_flag("--projective", projective,
                  "add the dense homogeneous baseline column");
  cCond->add_option("--mode", mode, "hermitian|finsler");
  cCond->add_option("--tol-quadrature", tolQuad, "quadrature tolerance");
  cCond->add_option("--out", out, "write the CSV here");

  // constants
  auto* cConst = app.add_subcommand("constants", "print the derived constants");
  bool check = false;
  cConst->add_flag("--check", check, "exit nonzero on residual > 1e-10");

  // example
  auto* cExample = app.add_subcommand("example", "materialize the worked example");
  std::string outDir = ".";
  cExample->add_option("--out-dir", outDir, "directory for the files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (selfCheck) return run_self_check();
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return 2;
    }

    if (*cCertify) {
      const FewnomialSystem f = parse_system(slurp(certifySystem));
      const ToricPoint x = parse_point(certifyPoint, f.dim());
      const ConstantsTable constants = derive_constants();
      Certificate cert;
      try {
        cert = alpha_certificate(f, x, parse_mode(mode), constants);
      } catch (const SingularJacobian& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
      }
      const std::string text = to_json(cert).dump(2) + "\n";
      if (!out.empty()) spill(out, text);
      std::cout << text;
      return cert.certified ? 0 : 1;
    }

    if (*cTrack) {
      if (!(tolT > 0.0)) throw InputError("--tol-t must be positive");
      const CoefficientPath path = parse_homotopy(slurp(trackHomotopy));
      const ConstantsTable constants = derive_constants();
      const MetricMode mm = parse_mode(mode);
      int job = 0;
      for (const auto& spec : trackStarts) {
        ++job;
        const ToricPoint x0 = parse_point(spec, path.shape.dim());
        const TrackLog log = track(path, x0, constants, mm, tolT);
        const std::string text = to_json(log).dump(2) + "\n";
        if (!out.empty()) {
          spill(out + "_" + std::to_string(job) + ".json", text);
          spill(out + "_" + std::to_string(job) + ".csv", track_csv(log));
        } else {
          std::cout << text;
        }
        if (!log.finalCertificate.certified) return 1;
      }
      return 0;
    }

    if (*cCond) {
      if (!(tolQuad > 0.0)) throw InputError("--tol-quadrature must be positive");
      const CoefficientPath path = parse_homotopy(slurp(condHomotopy));
      const ConstantsTable constants = derive_constants();
      const MetricMode mm = parse_mode(mode);
      const ToricPoint x0 = parse_point(condStart, path.shape.dim());
      std::ostringstream csv;
      csv.precision(17);
      csv << "eps,L,L1" << (projective ? ",L_projective" : "") << "\n";
      for (double eps : epsList) {
        csv << eps;
        try {
          const CondLength cl =
              condition_length(path, x0, path.tStart, eps, mm, tolQuad);
          csv << "," << cl.L << "," << cl.L1;
        } catch (const NumericalError& e) {
          std::cerr << "eps=" << eps << ": " << e.what() << "\n";
          csv << ",nan,nan";
        }
        if (projective) {
          try {
            LiftedCurve lift(path, constants, mm);
            lift.cache.seed(path.tStart, x0);
            const double L = proj_condition_length(
                lift.projective_path(), lift.curve(), path.tStart, eps, tolQuad);
            csv << "," << L;
          } catch (const NumericalError& e) {
            std::cerr << "eps=" << eps << " (projective): " << e.what() << "\n";
            csv << ",nan";
          }
        }
        csv << "\n";
      }
      if (!out.empty()) spill(out, csv.str());
      std::cout << csv.str();
      return 0;
    }

    if (*cConst) {
      const ConstantsTable t = derive_constants();
      std::cout << to_json(t).dump(2) << "\n";
      if (check && constants_residual(t) > 1e-10) {
        std::cerr << "constants residual above 1e-10\n";
        return 3;
      }
      return 0;
    }

    if (*cExample) {
      fs::create_directories(outDir);
      const fs::path dir(outDir);
      spill((dir / "system.json").string(),
            serialize_system(running_example(1.0)));
      spill((dir / "homotopy.json").string(),
            serialize_homotopy(running_example_path(1.0, 0.01)));
      const auto [z1, z2] = oracles::analytic_roots(1.0);
      spill((dir / "start1.json").string(), point_json(z1));
      spill((dir / "start2.json").string(), point_json(z2));
      std::cout << "wrote system.json homotopy.json start1.json start2.json to "
                << outDir << "\n";
      return 0;
    }
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const SingularJacobian& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
