#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "rheoflame/richards.hpp"

using namespace rheoflame;

namespace {

ZermeloData growing_ellipse() {
  ZermeloData zd;
  zd.a = ScalarField3(parse("1+t"));
  zd.b = ScalarField3(parse("2+2*t"));
  zd.c1 = ScalarField3::constant(0);
  zd.c2 = ScalarField3::constant(0);
  zd.theta = ScalarField3::constant(0);
  return zd;
}

ZermeloData turning_time_only() {
  ZermeloData zd;
  zd.a = ScalarField3::constant(1);
  zd.b = ScalarField3(parse("2+t/5"));
  zd.c1 = ScalarField3::constant(0);
  zd.c2 = ScalarField3::constant(0);
  zd.theta = ScalarField3(parse("(t+5)/20"));
  return zd;
}

ZermeloData turning_in_space() {
  ZermeloData zd = turning_time_only();
  zd.theta = ScalarField3(parse("((t+5)+u-v)/20"));
  return zd;
}

ZermeloData windy_time_only() {
  ZermeloData zd = turning_time_only();
  zd.c1 = ScalarField3(parse("0.3*cos(t)"));
  zd.c2 = ScalarField3(parse("0.2 + 0.1*sin(t/2)"));
  return zd;
}

double angle_gap(double a, double b) {
  const double d = std::remainder(a - b, 2 * std::numbers::pi);
  return std::abs(d);
}

}  // namespace

TEST_CASE("richards: rhs examples") {
  const ZermeloData zd = [] {
    ZermeloData d = growing_ellipse();
    d.a = ScalarField3::constant(1);
    d.b = ScalarField3::constant(2);
    return d;
  }();
  CHECK((richards_rhs(zd, 0, 0, 0, 0, 1).vec() - Vec2(1, 0)).norm() < 1e-15);
  CHECK((richards_rhs(zd, 0, 0, 0, 1, 0).vec() - Vec2(0, -2)).norm() < 1e-15);
  CHECK_THROWS_AS(richards_rhs(zd, 0, 0, 0, 0, 0), std::invalid_argument);

  ZermeloData round = zd;
  round.b = ScalarField3::constant(1);
  round.theta = ScalarField3::constant(0.7);
  for (double alpha : {0.0, 0.4, 2.0, 4.5}) {
    const Vec2 out = richards_rhs(round, 0, 0, 0, std::cos(alpha), std::sin(alpha)).vec();
    CHECK((out - Vec2(std::sin(alpha), -std::cos(alpha))).norm() < 1e-14);
  }
}

TEST_CASE("richards: rhs is unit speed and Hamilton orthogonal") {
  ZermeloData zd;
  zd.a = ScalarField3(parse("1 + 0.3*sin(u+t)"));
  zd.b = ScalarField3(parse("2 + t/5"));
  zd.c1 = ScalarField3(parse("0.4*cos(v)"));
  zd.c2 = ScalarField3(parse("0.3*sin(t*u)"));
  zd.theta = ScalarField3(parse("((t+5)+u-v)/20"));
  const ZermeloMetric m(zd);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> coord(-5, 5);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
  for (int i = 0; i < 1000; ++i) {
    const double t = std::abs(coord(rng)), u = coord(rng), v = coord(rng), al = angle(rng);
    const Vec2 tangent(std::cos(al), std::sin(al));
    const Vec2 out = richards_rhs(zd, t, u, v, tangent.x(), tangent.y()).vec();
    CHECK(std::abs(m.f(t, Vec2(u, v), out) - 1.0) <= 1e-9);
    if (i % 10 == 0) CHECK(std::abs(f_inner(m, t, Vec2(u, v), out, out, tangent)) <= 1e-8);
  }
}

TEST_CASE("richards: analytic examples") {
  const ZermeloData zd = growing_ellipse();
  CHECK((richards_analytic(zd, 0.0, 1.0, Vec2::Zero()) - Vec2(1.5, 0)).norm() < 1e-12);
  CHECK((richards_analytic(zd, std::numbers::pi / 2, 1.0, Vec2::Zero()) - Vec2(0, 3)).norm() < 1e-12);
  // Closed form with normal angle s~.
  for (double st : {0.3, 1.9, 3.5, 5.0}) {
    const double t = 1.7;
    const double k = std::sqrt(4 - 3 * std::cos(st) * std::cos(st));
    const Vec2 expected((t * t / 2 + t) * std::cos(st) / k, (2 * t * t + 4 * t) * std::sin(st) / k);
    CHECK((richards_analytic(zd, st, t, Vec2::Zero()) - expected).norm() < 1e-12);
  }

  ZermeloData unit = growing_ellipse();
  unit.a = ScalarField3::constant(1);
  unit.b = ScalarField3::constant(1);
  for (double s : {0.0, 1.0, 2.5}) {
    CHECK((richards_analytic(unit, s, 3.0, Vec2(1, 1)) - Vec2(1 + 3 * std::cos(s), 1 + 3 * std::sin(s))).norm() <
          1e-12);
  }
  CHECK((richards_analytic(unit, 0.4, 2.0, Vec2(1, 1), 2.0) - Vec2(1, 1)).norm() == 0.0);
}

TEST_CASE("richards: reparametrization") {
  CHECK(s_reparametrization(0.0) == doctest::Approx(0.0));
  CHECK(s_reparametrization(std::numbers::pi / 2) == doctest::Approx(std::numbers::pi / 2));
  const double st = std::numbers::pi / 4;
  const double s = s_reparametrization(st);
  const double ks = std::sqrt(4 - 3 * std::cos(st) * std::cos(st));
  const double k = std::sqrt(1 + 3 * std::cos(s) * std::cos(s));
  CHECK(std::abs(std::cos(st) / ks - 2 * std::cos(s) / k) < 1e-10);
  CHECK(std::abs(2 * std::sin(st) / ks - std::sin(s) / k) < 1e-10);

  double previous = -1.0;
  for (int i = 0; i < 400; ++i) {
    const double x = 2 * std::numbers::pi * i / 400.0;
    const double y = s_reparametrization(x);
    CHECK(y > previous);
    CHECK(y == doctest::Approx(s_reparametrization(growing_ellipse(), 0.0, Vec2::Zero(), x)).epsilon(1e-12));
    previous = y;
  }

  const GrowingEllipseMetric ex;
  for (double x : {0.2, 1.3, 2.9, 4.4, 6.0}) {
    const double dir = s_reparametrization(x);
    const Vec2 v0 = unit_vector(ex, 0, Vec2::Zero(), Vec2(std::cos(dir), std::sin(dir)));
    CHECK(normal_angle(ex, 0, Vec2::Zero(), v0) == doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("richards: integrated rays match the quadrature solution") {
  for (const ZermeloData& zd : {turning_time_only(), windy_time_only()}) {
    const ZermeloMetric m(zd);
    const WfNet net = build_net(m, Ignition::at_point(Vec2::Zero()), 0.0, 6.0, 16);
    double worst = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
      const double st = normal_angle(m, 0.0, Vec2::Zero(), net.rays[i].samples.front().v);
      CHECK(angle_gap(s_reparametrization(zd, 0.0, Vec2::Zero(), st), net.s[i]) < 1e-8);
      for (double t : {1.0, 3.5, 6.0}) {
        const Vec2 expected = richards_analytic(zd, st, t, Vec2::Zero());
        worst = std::max(worst, (net.position(i, t) - expected).norm() / expected.norm());
      }
    }
    CHECK(worst < 1e-6);
  }

  // Later ignition.
  const ZermeloData zd = windy_time_only();
  const ZermeloMetric m(zd);
  const Vec2 p0(1, -2);
  const Vec2 v0 = unit_vector(m, 2.0, p0, Vec2(-0.3, 1.0));
  const Ray ray = integrate_ray(m, 2.0, p0, v0, 5.0);
  const double st = normal_angle(m, 2.0, p0, v0);
  CHECK((ray.samples.back().p - richards_analytic(zd, st, 5.0, p0, 2.0)).norm() < 1e-6);
}

TEST_CASE("richards: the PDE singles out pre-extremal rays") {
  const ZermeloData zd = turning_time_only();
  const ZermeloMetric m(zd);
  const Vec2 v0 = unit_vector(m, 0.0, Vec2::Zero(), Vec2(1.0, 0.3));
  const double st = normal_angle(m, 0.0, Vec2::Zero(), v0);
  const Ray pre = integrate_ray(m, 0.0, Vec2::Zero(), v0, 8.0);
  IntegratorOptions opts;
  opts.equation = RayEquation::energy_extremal;
  const Ray free = integrate_ray(m, 0.0, Vec2::Zero(), v0, 8.0, opts);
  const Vec2 tangent(-std::sin(st), std::cos(st));
  for (double t : {2.0, 5.0, 8.0}) {
    const RayState a = pre.at(t);
    const RayState b = free.at(t);
    const Vec2 field = richards_rhs(zd, t, a.p.x(), a.p.y(), tangent.x(), tangent.y()).vec();
    CHECK((a.v - field).norm() < 1e-6);
    CHECK((b.v - field).norm() > 1e-2);
  }
}

TEST_CASE("richards: residual on nets") {
  ZermeloData round = growing_ellipse();
  round.a = ScalarField3::constant(1);
  round.b = ScalarField3::constant(1);
  const ZermeloMetric euclid(round);
  const WfNet circle = build_net(euclid, Ignition::at_point(Vec2::Zero()), 0.0, 2.0, 32);
  CHECK(richards_residual(round, circle, 8, SDerivative::spectral).max < 1e-8);

  const WfNet line = build_net(euclid, Ignition::along({Vec2(-1, 0), Vec2(1, 0)}, Side::left), 0.0, 2.0, 9);
  CHECK(richards_residual(round, line, 8).max < 1e-8);
  const WfNet below = build_net(euclid, Ignition::along({Vec2(-1, 0), Vec2(1, 0)}, Side::right), 0.0, 2.0, 9);
  CHECK(richards_residual(round, below, 8).max < 1e-8);

  const ZermeloData zd = turning_in_space();
  const ZermeloMetric m(zd);
  double previous = 0.0;
  for (std::size_t n : {32u, 64u}) {
    const WfNet net = build_net(m, Ignition::at_point(Vec2::Zero()), 0.0, 4.0, n);
    const double r = richards_residual(zd, net, 8).max;
    if (previous > 0.0) CHECK(previous / r == doctest::Approx(4.0).epsilon(0.1));
    previous = r;
  }
}

TEST_CASE("richards: time-only spot check") {
  const Domain d{-10, 10, -10, 10, 0, 16};
  CHECK(check_time_only(turning_time_only(), d).pass);
  const TimeOnlyReport bad = check_time_only(turning_in_space(), d);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_spatial_derivative == doctest::Approx(0.05).epsilon(1e-6));
}
