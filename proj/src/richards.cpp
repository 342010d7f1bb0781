#include "rheoflame/richards.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rheoflame/parallel.hpp"

namespace rheoflame {

namespace {

double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a >= two_pi ? 0.0 : a;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  double error = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-13, &error);
  if (!(error <= 1e-10) || !std::isfinite(value)) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b << "] (error estimate " << error << ")";
    throw QuadratureError(os.str());
  }
  return value;
}

// Finite window used where the domain is unbounded.
double lower(double x, double fallback) { return std::isfinite(x) ? x : fallback; }
double upper(double x, double fallback) { return std::isfinite(x) ? x : fallback; }

}  // namespace

RichardsVelocity richards_rhs(const ZermeloData& zd, double t, double u, double v, double us, double vs) {
  if (us == 0.0 && vs == 0.0) throw std::invalid_argument("richards_rhs: zero frontal tangent");
  const ZermeloSample z = sample(zd, t, u, v);
  const double c = std::cos(z.theta);
  const double s = std::sin(z.theta);
  const double a2 = z.a * z.a;
  const double b2 = z.b * z.b;
  const double along = us * s + vs * c;
  const double across = us * c - vs * s;
  const double d = std::sqrt(a2 * along * along + b2 * across * across);
  if (!(d > 0.0)) throw MetricError("richards_rhs: vanishing denominator");
  RichardsVelocity out;
  out.udot_t = (a2 * c * along - b2 * s * across) / d + z.c1 * c + z.c2 * s;
  out.vdot_t = (-a2 * s * along - b2 * c * across) / d - z.c1 * s + z.c2 * c;
  return out;
}

Vec2 richards_analytic(const ZermeloData& zd, double s, double t, const Vec2& p0, double t0) {
  if (t == t0) return p0;
  auto coeffs = [&](double r) { return sample(zd, r, p0.x(), p0.y()); };
  auto fu = [&](double r) {
    const ZermeloSample z = coeffs(r);
    const double c = std::cos(z.theta), sn = std::sin(z.theta);
    const double cs = std::cos(z.theta + s), ss = std::sin(z.theta + s);
    const double a2 = z.a * z.a, b2 = z.b * z.b;
    const double d = std::sqrt(a2 * cs * cs + b2 * ss * ss);
    return (a2 * c * cs + b2 * sn * ss) / d + z.c2 * sn + z.c1 * c;
  };
  auto fv = [&](double r) {
    const ZermeloSample z = coeffs(r);
    const double c = std::cos(z.theta), sn = std::sin(z.theta);
    const double cs = std::cos(z.theta + s), ss = std::sin(z.theta + s);
    const double a2 = z.a * z.a, b2 = z.b * z.b;
    const double d = std::sqrt(a2 * cs * cs + b2 * ss * ss);
    return (-a2 * sn * cs + b2 * c * ss) / d + z.c2 * c - z.c1 * sn;
  };
  return p0 + Vec2(integrate(fu, t0, t), integrate(fv, t0, t));
}

RichardsResidual richards_residual(const ZermeloData& zd, const WfNet& net, std::size_t time_count,
                                   SDerivative scheme) {
  RichardsResidual out;
  out.times = residual_times(net, time_count);
  out.values.assign(net.size(), std::vector<double>(out.times.size(), std::numeric_limits<double>::quiet_NaN()));
  // The PDE advances to the right of the tangent; left-side polyline nets run the other way.
  const double orientation = (!net.periodic() && net.ignition.side == Side::left) ? -1.0 : 1.0;
  const std::size_t first = net.periodic() ? 0 : 1;
  const std::size_t last = net.periodic() ? net.size() : net.size() - 1;
  parallel_for(net.size(), [&](std::size_t i) {
    if (i < first || i >= last) return;
    for (std::size_t k = 0; k < out.times.size(); ++k) {
      const double t = out.times[k];
      const RayState st = net.rays[i].at(t);
      const Vec2 w = orientation * net.d_ds(i, t, scheme);
      const Vec2 expected = richards_rhs(zd, t, st.p.x(), st.p.y(), w.x(), w.y()).vec();
      out.values[i][k] = (st.v - expected).norm();
    }
  });
  for (const auto& row : out.values) {
    for (double r : row) {
      if (!std::isnan(r)) out.max = std::max(out.max, r);
    }
  }
  return out;
}

double s_reparametrization(double s_tilde) {
  // The support point of the ellipse with semi-axes (1, 2) for normal angle s~
  // lies along (cos s~, 4 sin s~).
  return wrap_angle(std::atan2(4.0 * std::sin(s_tilde), std::cos(s_tilde)));
}

double s_reparametrization(const ZermeloData& zd, double t0, const Vec2& p0, double s_tilde) {
  const Vec2 v = richards_rhs(zd, t0, p0.x(), p0.y(), -std::sin(s_tilde), std::cos(s_tilde)).vec();
  return wrap_angle(std::atan2(v.y(), v.x()));
}

double normal_angle(const MetricField& m, double t0, const Vec2& p0, const Vec2& v0) {
  const Vec2 n = jet(m, t0, p0, v0).dy;
  return wrap_angle(std::atan2(n.y(), n.x()));
}

TimeOnlyReport check_time_only(const ZermeloData& zd, const Domain& domain, std::size_t samples,
                               std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> tu(lower(domain.u_min, -10.0), upper(domain.u_max, 10.0));
  std::uniform_real_distribution<double> tv(lower(domain.v_min, -10.0), upper(domain.v_max, 10.0));
  std::uniform_real_distribution<double> tt(lower(domain.t_min, 0.0), upper(domain.t_max, 10.0));
  constexpr double h = 1e-3;
  const ScalarField3* fields[] = {&zd.a, &zd.b, &zd.c1, &zd.c2, &zd.theta};

  TimeOnlyReport report;
  for (std::size_t n = 0; n < samples; ++n) {
    const double t = tt(rng), u = tu(rng), v = tv(rng);
    for (const ScalarField3* f : fields) {
      const double du = std::abs((*f)(t, u + h, v) - (*f)(t, u - h, v)) / (2 * h);
      const double dv = std::abs((*f)(t, u, v + h) - (*f)(t, u, v - h)) / (2 * h);
      const double worst = std::max(du, dv);
      if (worst > report.max_spatial_derivative) {
        report.max_spatial_derivative = worst;
        report.t = t;
        report.u = u;
        report.v = v;
      }
    }
  }
  report.pass = report.max_spatial_derivative <= 1e-12;
  return report;
}

}  // namespace rheoflame
