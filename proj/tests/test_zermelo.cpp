#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rheoflame/zermelo.hpp"

using namespace rheoflame;

namespace {

ZermeloData constant_data(double a, double b, double c1, double c2, double theta) {
  ZermeloData zd;
  zd.a = ScalarField3::constant(a);
  zd.b = ScalarField3::constant(b);
  zd.c1 = ScalarField3::constant(c1);
  zd.c2 = ScalarField3::constant(c2);
  zd.theta = ScalarField3::constant(theta);
  return zd;
}

ZermeloData wavy_data() {
  ZermeloData zd;
  zd.a = ScalarField3(parse("1 + 0.2*sin(u) + 0.1*t"));
  zd.b = ScalarField3(parse("2 + 0.3*cos(v*u/3) + t/5"));
  zd.c1 = ScalarField3(parse("0.3*cos(t + v)"));
  zd.c2 = ScalarField3(parse("0.2*sin(u - t)"));
  zd.theta = ScalarField3(parse("((t+5)+u-v)/20"));
  return zd;
}

}  // namespace

TEST_CASE("zermelo: Randers values") {
  CHECK(randers_f(constant_data(1, 1, 0, 0, 0), 0, 0, 0, 3, 4) == doctest::Approx(5.0));
  CHECK(randers_f(constant_data(2, 1, 0, 0, 0), 0, 0, 0, 1, 0) == doctest::Approx(0.5));
  CHECK(randers_f(constant_data(2, 1, 0, 0, 0), 0, 0, 0, 0, 1) == doctest::Approx(1.0));

  // Rotating the ellipse a quarter turn swaps the axes.
  const ZermeloData quarter = constant_data(2, 1, 0, 0, std::numbers::pi / 2);
  CHECK(randers_f(quarter, 0, 0, 0, 1, 0) == doctest::Approx(1.0));
  CHECK(randers_f(quarter, 0, 0, 0, 0, 1) == doctest::Approx(0.5));

  // A drift of 1/2 along u: downstream is faster, upstream slower.
  const ZermeloData drift = constant_data(1, 1, 0.5, 0, 0);
  CHECK(randers_f(drift, 0, 0, 0, 1, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(randers_f(drift, 0, 0, 0, -1, 0) == doctest::Approx(2.0));
  CHECK(randers_f(drift, 0, 0, 0, 1.5, 0) == doctest::Approx(1.0));
  CHECK(randers_f(drift, 0, 0, 0, 0.5, 1.0) == doctest::Approx(1.0));
}

TEST_CASE("zermelo: rotation and tensor helpers") {
  const Mat2 r = clockwise_rotation(std::numbers::pi / 2);
  CHECK((r * Vec2(1, 0) - Vec2(0, -1)).norm() < 1e-15);
  const Mat2 h = h_matrix(2, 1, 0);
  CHECK(h(0, 0) == doctest::Approx(0.25));
  CHECK(h(1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(h_matrix(0, 1, 0), MetricError);
  CHECK_THROWS_AS(h_matrix(1, -1, 0), MetricError);

  const RandersNorm n(ZermeloSample{1, 1, 0.5, 0, std::numbers::pi / 2});
  CHECK((n.drift() - Vec2(0, -0.5)).norm() < 1e-15);
  CHECK(n.lambda() == doctest::Approx(0.75));
}

TEST_CASE("zermelo: strong wind is rejected") {
  const ZermeloData zd = constant_data(1, 1, 1.0, 0, 0);
  try {
    (void)randers_f(zd, 0.5, 1.0, 2.0, 1, 0);
    FAIL("expected MetricError");
  } catch (const MetricError& e) {
    const std::string what = e.what();
    CHECK(what.find("0.5") != std::string::npos);
  }
  const ValidationReport bad = validate(constant_data(1, 1, 1.2, 0, 0), Domain{-1, 1, -1, 1, 0, 1});
  CHECK_FALSE(bad.pass);
  CHECK(bad.min_lambda < 0);

  const ValidationReport good = validate(wavy_data(), Domain{-3, 3, -3, 3, 0, 2});
  CHECK(good.pass);
  CHECK(good.min_lambda > 0);
  CHECK(good.min_a > 0);

  ZermeloData broken = wavy_data();
  broken.a = ScalarField3(parse("sqrt(u)"));
  const ValidationReport failed = validate(broken, Domain{-1, 1, -1, 1, 0, 1});
  CHECK_FALSE(failed.pass);
  CHECK_FALSE(failed.error.empty());
}

TEST_CASE("zermelo properties: indicatrix, reduction, rotation equivariance") {
  const ZermeloData zd = wavy_data();
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  std::uniform_real_distribution<double> time(0.0, 2.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);

  for (int i = 0; i < 500; ++i) {
    const double t = time(rng), u = coord(rng), v = coord(rng);
    const Vec2 e = indicatrix_point(zd, t, u, v, angle(rng));
    CHECK(std::abs(randers_f(zd, t, u, v, e.x(), e.y()) - 1.0) <= 1e-12);
  }

  for (int i = 0; i < 200; ++i) {
    const double a = 0.5 + time(rng), b = 0.5 + time(rng), th = angle(rng);
    const Vec2 y(coord(rng), coord(rng));
    const double riemann = std::sqrt(y.dot(h_matrix(a, b, th) * y));
    CHECK(std::abs(randers_f(constant_data(a, b, 0, 0, th), 0, 0, 0, y.x(), y.y()) - riemann) <=
          1e-14 * std::max(1.0, riemann));
  }

  for (int i = 0; i < 200; ++i) {
    const ZermeloSample s{0.5 + time(rng), 0.5 + time(rng), 0.2 * coord(rng) / 3, 0.2 * coord(rng) / 3,
                          angle(rng)};
    const double phi = angle(rng);
    const Vec2 y(coord(rng), coord(rng));
    ZermeloSample turned = s;
    turned.theta += phi;
    const double f0 = RandersNorm(s)(y);
    CHECK(std::abs(RandersNorm(turned)(clockwise_rotation(phi) * y) - f0) <= 1e-12 * std::max(1.0, f0));
  }
}

TEST_CASE("zermelo: metric wrapper") {
  const ZermeloMetric m(wavy_data());
  const Vec2 p(0.4, -1.1);
  const std::array<Vec2, 3> vs{Vec2(1, 0), Vec2(0.3, -2), Vec2(-1, 1)};
  std::array<double, 3> out{};
  m.f_batch(0.7, p, vs, out);
  for (std::size_t k = 0; k < vs.size(); ++k) {
    CHECK(out[k] == doctest::Approx(m.f(0.7, p, vs[k])).epsilon(1e-15));
    CHECK(out[k] == doctest::Approx(randers_f(wavy_data(), 0.7, p.x(), p.y(), vs[k].x(), vs[k].y())));
  }
}
