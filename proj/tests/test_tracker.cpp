#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <toric/example.hpp>
#include <toric/oracles.hpp>
#include <toric/tracker.hpp>

using namespace toric;

namespace {

// distance with imaginary parts wrapped mod 2 pi (integer supports)
double wrapped_distance(const ToricPoint& a, const ToricPoint& b) {
  double s = 0.0;
  for (int k = 0; k < a.size(); ++k) {
    const double dr = a[k].real() - b[k].real();
    double di = std::fmod(a[k].imag() - b[k].imag(), 2.0 * M_PI);
    if (di > M_PI) di -= 2.0 * M_PI;
    if (di < -M_PI) di += 2.0 * M_PI;
    s += dr * dr + di * di;
  }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("path evaluation and exact coefficient derivatives") {
  const CoefficientPath path = running_example_path(1.0, 0.01);
  const auto [f, df] = path_eval(path, 1.0);
  CHECK(f.equations[0].coefficients.isApprox(
      running_example(1.0).equations[0].coefficients, 1e-15));
  VectorXcd d1(4), d2(4);
  d1 << Complex(1), Complex(-1), Complex(0), Complex(-2);
  d2 << Complex(0), Complex(0), Complex(0), Complex(0);
  CHECK((df[0] - d1).norm() < 1e-15);
  CHECK((df[1] - d2).norm() < 1e-15);

  const auto [fh, dfh] = path_eval(path, 0.5);
  CHECK(fh.equations[0].coefficients[3] == Complex(-0.25));
  CHECK(dfh[0][3] == Complex(-1.0));

  CHECK_THROWS_AS(path_eval(path, 2.0), InputError);
  CHECK_THROWS_AS(path_eval(path, -0.1), InputError);
}

TEST_CASE("a path with a vanishing equation is rejected at evaluation") {
  CoefficientPath path = running_example_path(1.0, 0.0);
  // strip the constant monomial so equation 1 dies at t=0
  path.terms[0][2] = {CoefficientPath::Term{1.0, Complex(1.0)}};
  CHECK_THROWS_AS(path_eval(path, 0.0), NumericalError);
}

TEST_CASE("homotopy parse/serialize round trip") {
  const CoefficientPath path = running_example_path(1.0, 0.01);
  const CoefficientPath back = parse_homotopy(serialize_homotopy(path));
  CHECK(back.tStart == path.tStart);
  CHECK(back.tEnd == path.tEnd);
  for (double t : {1.0, 0.37, 0.01}) {
    const auto a = path_eval(path, t), b = path_eval(back, t);
    for (int i = 0; i < 2; ++i) {
      CHECK(a.first.equations[i].coefficients.isApprox(
          b.first.equations[i].coefficients, 1e-15));
      CHECK((a.second[static_cast<size_t>(i)] - b.second[static_cast<size_t>(i)])
                .norm() < 1e-15);
    }
  }
  CHECK_THROWS_AS(parse_homotopy("nope"), InputError);
  CHECK_THROWS_AS(parse_homotopy(R"({"n":1,"t_start":0})"), InputError);
}

TEST_CASE("root speed matches the analytic velocity of curve 1") {
  const CoefficientPath path = running_example_path(1.0, 0.001);
  for (double t : {1.0, 0.5, 0.1, 0.01}) {
    const auto [z1, z2] = oracles::analytic_roots(t);
    const auto [fdot, zspeed] = path_speed(path, t, z1);
    // analytic velocity (-2/t, -1/t) measured in the mean Gram
    VectorXcd v(2);
    v << Complex(-2.0 / t), Complex(-1.0 / t);
    const MetricData md = metric_data(path_eval(path, t).first, z1);
    const double expect =
        std::sqrt(std::real(v.dot(md.meanGram() * v.eval())));
    CHECK(zspeed == doctest::Approx(expect).epsilon(1e-10));
    CHECK(fdot > 0.0);
    (void)z2;
  }
  // published asymptotic: speed^2 -> 1 + O(t^2) along curve 1
  const auto [fd0, zs0] =
      path_speed(path, 0.01, oracles::analytic_roots(0.01).first);
  CHECK(std::abs(zs0 * zs0 - 1.0) < 5e-3);
  (void)fd0;
}

TEST_CASE("coefficient speed matches finite differences of the distance") {
  const CoefficientPath path = running_example_path(1.0, 0.01);
  const double h = 1e-6;
  for (double t : {0.9, 0.5, 0.2}) {
    const auto [z1, z2] = oracles::analytic_roots(t);
    const auto [fdot, zspeed] = path_speed(path, t, z1);
    const double fd = multiproj_distance(path_eval(path, t + h).first,
                                         path_eval(path, t - h).first,
                                         MetricMode::Hermitian) /
                      (2.0 * h);
    CHECK(fdot == doctest::Approx(fd).epsilon(1e-5));
    (void)zspeed;
    (void)z2;
  }
}

TEST_CASE("condition length over a mild stretch and its two variants") {
  const CoefficientPath path = running_example_path(1.0, 0.5);
  const auto [z1, z2] = oracles::analytic_roots(1.0);
  const CondLength cl = condition_length(path, z1, 1.0, 0.5);
  CHECK(cl.L > 0.0);
  CHECK(cl.L1 >= cl.L * (1.0 - 1e-9));
  CHECK(cl.L1 <= cl.L * std::sqrt(2.0) * (1.0 + 1e-9));

  CHECK(condition_length(path, z1, 1.0, 1.0).L == 0.0);

  ToricPoint bad(2);
  bad << Complex(2.0), Complex(2.0);
  CHECK_THROWS_AS(condition_length(path, bad, 1.0, 0.5), NumericalError);
  (void)z2;
}

TEST_CASE("condition length grows like 2 log(1/eps) toward degeneration") {
  const double eps = 1e-4;
  const CoefficientPath path = running_example_path(1.0, eps);
  const auto [z1, z2] = oracles::analytic_roots(1.0);
  const double denom = std::log(1.0 / eps);
  for (const auto& z : {z1, z2}) {
    const CondLength cl = condition_length(path, z, 1.0, eps);
    CHECK(cl.L / denom > 1.7);
    CHECK(cl.L / denom < 2.4);
    CHECK(cl.L1 >= cl.L * (1.0 - 1e-9));
    CHECK(cl.L1 <= cl.L * std::sqrt(2.0) * (1.0 + 1e-9));
  }
}

TEST_CASE("threshold step control brackets the alpha_1 crossing") {
  const ConstantsTable constants = derive_constants();
  const CoefficientPath path = running_example_path(1.0, 0.01);
  const ToricPoint z = ToricPoint::Zero(2);
  const double tn = step_size(path, 1.0, z, constants);
  CHECK(tn < 1.0);
  CHECK(tn > 0.01);
  // the accepted parameter stays strictly below the threshold...
  const auto repLo = newton_report(path_eval(path, tn).first, z);
  CHECK(repLo.alphaHalf < constants.alpha1);
  // ...and the threshold is genuinely active a hair beyond it
  const double beyond = tn - 2e-9 * (1.0 - 0.01);
  const auto repHi = newton_report(path_eval(path, beyond).first, z);
  CHECK(repHi.alphaHalf >= constants.alpha1 * (1.0 - 1e-6));

  ToricPoint far(2);
  far << Complex(2.0), Complex(2.0);
  CHECK_THROWS_AS(step_size(path, 1.0, far, constants), InputError);
}

TEST_CASE("tracking both root curves down to t=0.01") {
  const ConstantsTable constants = derive_constants();
  const CoefficientPath path = running_example_path(1.0, 0.01);
  const auto [z1, z2] = oracles::analytic_roots(1.0);
  const auto [w1, w2] = oracles::analytic_roots(0.01);

  int which = 0;
  for (const auto& [start, target] :
       {std::pair{z1, w1}, std::pair{z2, w2}}) {
    ++which;
    const TrackLog log = track(path, start, constants);
    CHECK(log.finalCertificate.certified);
    CHECK(wrapped_distance(log.endPoint, target) < 1e-8);
    CHECK(log.stepCount > 0);
    CHECK(log.stepCount <= 525);  // ceil(59 L) with L about 8.9
    for (const auto& s : log.steps)
      CHECK(s.alphaHalf <= constants.alpha1 + 1e-12);
    CHECK(log.wallSeconds < 30.0);
  }
  CHECK(which == 2);
}

TEST_CASE("tracking is reversible along the same homotopy") {
  const ConstantsTable constants = derive_constants();
  const CoefficientPath down = running_example_path(1.0, 0.1);
  const auto z1 = oracles::analytic_roots(1.0).first;
  const TrackLog logDown = track(down, z1, constants);
  REQUIRE(logDown.finalCertificate.certified);

  const CoefficientPath up = running_example_path(0.1, 1.0);
  const TrackLog logUp = track(up, logDown.endPoint, constants);
  CHECK(logUp.finalCertificate.certified);
  CHECK(wrapped_distance(logUp.endPoint, z1) < 1e-10);
}

TEST_CASE("uncertified start points are refused") {
  const ConstantsTable constants = derive_constants();
  const CoefficientPath path = running_example_path(1.0, 0.01);
  ToricPoint far(2);
  far << Complex(2.0), Complex(2.0);
  CHECK_THROWS_AS(track(path, far, constants), InputError);
}

TEST_CASE("track logs serialize to JSON and CSV") {
  const ConstantsTable constants = derive_constants();
  const CoefficientPath path = running_example_path(1.0, 0.5);
  const TrackLog log = track(path, ToricPoint::Zero(2), constants);
  const auto j = to_json(log);
  CHECK(j.at("stepCount").get<int>() == log.stepCount);
  CHECK(j.at("finalCertificate").at("certified").get<bool>());
  CHECK(j.at("steps").size() == log.steps.size());

  const std::string csv = track_csv(log);
  CHECK(csv.rfind("t,re_x1,re_x2,im_x1,im_x2,beta,mu,nu,alphaHalf\n", 0) == 0);
  const size_t lines = std::count(csv.begin(), csv.end(), '\n');
  CHECK(lines == log.steps.size() + 1);
}
