#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <toric/example.hpp>
#include <toric/metric.hpp>
#include <toric/oracles.hpp>

using namespace toric;

TEST_CASE("momentum and Gram of the worked example at the origin") {
  const FewnomialSystem f = running_example(1.0);
  const MetricData md = metric_data(f, ToricPoint::Zero(2));

  VectorXd m(2);
  m << 0.5, 1.5;
  MatrixXd G(2, 2);
  G << 0.25, -0.5, -0.5, 1.25;

  for (const auto& em : md.eq) {
    CHECK(em.momentum.isApprox(m, 1e-14));
    CHECK(em.gram.isApprox(G, 1e-14));
    CHECK(em.logKernel == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  }
  CHECK(md.totalGram.isApprox(2.0 * G, 1e-14));
  CHECK(md.meanGram().isApprox(G, 1e-14));
}

TEST_CASE("metric depends only on the real part of the point") {
  const FewnomialSystem f = running_example(0.3);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    ToricPoint x(2), y(2);
    for (int k = 0; k < 2; ++k) {
      const double re = dist(rng);
      x[k] = Complex(re, dist(rng));
      y[k] = Complex(re, dist(rng));
    }
    const MetricData a = metric_data(f, x), b = metric_data(f, y);
    for (size_t i = 0; i < a.eq.size(); ++i) {
      CHECK(a.eq[i].momentum.isApprox(b.eq[i].momentum, 1e-14));
      CHECK(a.eq[i].gram.isApprox(b.eq[i].gram, 1e-14));
    }
  }
}

TEST_CASE("momentum is the gradient of the log kernel") {
  const FewnomialSystem f = running_example(0.7);
  ToricPoint x(2);
  x << Complex(0.3, 1.1), Complex(-0.2, -0.4);
  const MetricData md = metric_data(f, x);
  for (int i = 0; i < f.size(); ++i) {
    auto field = [&](const VectorXd& re) {
      ToricPoint y(2);
      for (int k = 0; k < 2; ++k) y[k] = Complex(re[k], x[k].imag());
      return metric_data(f, y).eq[static_cast<size_t>(i)].logKernel;
    };
    const VectorXd g = oracles::fd_gradient(field, x.real(), 1e-6);
    CHECK((g - md.eq[static_cast<size_t>(i)].momentum).norm() < 1e-8);
  }
}

TEST_CASE("local norms of (1,0) at the origin") {
  const MetricData md = metric_data(running_example(1.0), ToricPoint::Zero(2));
  VectorXcd w(2);
  w << Complex(1.0), Complex(0.0);
  CHECK(local_norm(md, w, MetricMode::Hermitian) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(local_norm(md, w, MetricMode::Finsler) ==
        doctest::Approx(0.5).epsilon(1e-14));
  VectorXcd bad(3);
  CHECK_THROWS_AS(local_norm(md, bad, MetricMode::Hermitian), InputError);
}

TEST_CASE("circumscribed radius at the origin is sqrt(2)") {
  const NuReport r = nu(metric_data(running_example(1.0), ToricPoint::Zero(2)));
  CHECK(r.value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // all four support points lie on the circumscribed sphere here
  CHECK(r.perEquation.isApproxToConstant(std::sqrt(2.0), 1e-12));
}

TEST_CASE("nu along the two root curves matches the closed forms") {
  const FewnomialSystem shape = running_example(1.0);  // metric ignores coeffs
  for (double t : {1.0, 0.5, 0.1, 0.01}) {
    const auto [z1, z2] = oracles::analytic_roots(t);
    const double nu1 = nu(metric_data(shape, z1)).value;
    const double nu2 = nu(metric_data(shape, z2)).value;
    CHECK(nu1 * nu1 == doctest::Approx(1.0 / (t * t) + 1.0).epsilon(1e-9));
    CHECK(nu2 * nu2 ==
          doctest::Approx(0.25 / (t * t) + 1.5 + 0.25 * t * t).epsilon(1e-9));
  }
}

TEST_CASE("nu of the univariate binomial support is 1") {
  const FewnomialSystem f =
      parse_system(R"({"n":1,"equations":[{"support":[[0],[1]],
                      "coefficients":[[1,0],[1,0]]}]})");
  ToricPoint x = ToricPoint::Zero(1);
  CHECK(nu(metric_data(f, x)).value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("multiprojective distance: scaling, orthogonality, rotations") {
  const FewnomialSystem f = running_example(0.4);
  FewnomialSystem g = f;
  for (auto& eq : g.equations) eq.coefficients *= Complex(2.0, -3.0);
  CHECK(multiproj_distance(f, g, MetricMode::Hermitian) < 1e-12);
  CHECK(multiproj_distance(f, g, MetricMode::Finsler) < 1e-12);
  CHECK(multiproj_distance(f, f, MetricMode::Hermitian) < 1e-12);

  // orthogonal coefficient vectors are at distance 1 per equation
  FewnomialSystem a = f, b = f;
  for (int i = 0; i < 2; ++i) {
    a.equations[i].coefficients << Complex(1), Complex(0), Complex(0), Complex(0);
    b.equations[i].coefficients << Complex(0), Complex(1), Complex(0), Complex(0);
  }
  CHECK(multiproj_distance(a, b, MetricMode::Finsler) ==
        doctest::Approx(1.0).epsilon(1e-14));
  CHECK(multiproj_distance(a, b, MetricMode::Hermitian) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

  // rotating each coefficient vector in-plane by angle atan(eps) moves it by
  // sin = eps / sqrt(1 + eps^2)
  for (double eps : {1e-3, 1e-2, 0.1, 1.0}) {
    FewnomialSystem rot = f;
    for (auto& eq : rot.equations) {
      VectorXcd perp(4);
      perp << -std::conj(eq.coefficients[1]), std::conj(eq.coefficients[0]),
          Complex(0), Complex(0);
      perp *= eq.coefficients.norm() / perp.norm();
      eq.coefficients += eps * perp;
    }
    const double expect = eps / std::sqrt(1.0 + eps * eps);
    CHECK(multiproj_distance(f, rot, MetricMode::Finsler) ==
          doctest::Approx(expect).epsilon(1e-10));
    CHECK(multiproj_distance(f, rot, MetricMode::Hermitian) ==
          doctest::Approx(std::sqrt(2.0) * expect).epsilon(1e-10));
  }

  FewnomialSystem skew = f;
  skew.equations[0].support.exponents(0, 0) += 1.0;
  CHECK_THROWS_AS(multiproj_distance(f, skew, MetricMode::Hermitian),
                  InputError);  // mismatched supports are rejected
}

TEST_CASE("distortion and drift bound functions") {
  // distortion brackets around 1, tight at s=0
  CHECK(distortion_bounds(0.0).first == doctest::Approx(1.0));
  CHECK(distortion_bounds(0.0).second == doctest::Approx(1.0));
  const auto [dlo, dhi] = distortion_bounds(0.1);
  CHECK(dlo == doctest::Approx(0.89482908192435238).epsilon(1e-15));
  CHECK(dhi == doctest::Approx(1.1051709180756476).epsilon(1e-15));
  CHECK(dlo * dhi <= 1.0 + 1e-15);

  CHECK(momentum_drift_bound(0.0) == 0.0);
  CHECK(momentum_drift_bound(0.05) ==
        doctest::Approx(0.10571615675432701).epsilon(1e-14));
  double prev = 0.0;
  for (double s = 0.01; s < 0.51; s += 0.01) {  // increasing in s
    const double cur = momentum_drift_bound(s);
    CHECK(cur > prev);
    prev = cur;
  }

  const auto [nlo, nhi] = nu_drift_bounds(1.0, 0.05);
  CHECK(nlo == doctest::Approx(0.85066910555086826).epsilon(1e-14));
  CHECK(nhi == doctest::Approx(1.1654711398911613).epsilon(1e-14));
  CHECK(nlo <= 1.0);
  CHECK(nhi >= 1.0);
  // past s = log 2 the upper bound degenerates
  CHECK(std::isinf(nu_drift_bounds(1.0, 0.75).second));

  const auto [mlo, mhi] = munu_drift_factor(0.1);
  CHECK(mlo == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mhi == doctest::Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(munu_drift_factor(0.2), InputError);
  CHECK_THROWS_AS(munu_drift_factor(0.5), InputError);
}

TEST_CASE("infinity margin of the worked example at the origin") {
  const double m = infinity_margin(running_example(1.0), ToricPoint::Zero(2));
  // momentum (1/2,3/2); nearest edge of the hull at distance 1/(2 sqrt 5),
  // diameter sqrt 10, then halve: 1/(20 sqrt 2)
  CHECK(m == doctest::Approx(1.0 / (20.0 * std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("infinity margin of the binomial and the vertex limit") {
  const FewnomialSystem f =
      parse_system(R"({"n":1,"equations":[{"support":[[0],[1]],
                      "coefficients":[[1,0],[1,0]]}]})");
  CHECK(infinity_margin(f, ToricPoint::Zero(1)) ==
        doctest::Approx(0.25).epsilon(1e-12));
  // pushing the momentum onto a vertex kills the margin
  ToricPoint far(1);
  far << Complex(-30.0);
  CHECK(infinity_margin(f, far) < 1e-10);
  double prev = 0.25;
  for (double re : {-1.0, -2.0, -4.0, -8.0}) {
    ToricPoint x(1);
    x << Complex(re);
    const double cur = infinity_margin(f, x);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("hull membership helper agrees with the momentum map") {
  const FewnomialSystem f = running_example(0.8);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    ToricPoint x(2);
    x << Complex(dist(rng), dist(rng)), Complex(dist(rng), dist(rng));
    const MetricData md = metric_data(f, x);
    for (int i = 0; i < 2; ++i)
      CHECK(detail::hull_contains(f.equations[i].support.exponents,
                                  md.eq[static_cast<size_t>(i)].momentum, 1e-9));
    // a point well outside the hull is rejected
    VectorXd out(2);
    out << 5.0, 5.0;
    CHECK_FALSE(
        detail::hull_contains(f.equations[0].support.exponents, out, 1e-9));
  }
}
