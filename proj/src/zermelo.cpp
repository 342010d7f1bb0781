#include "rheoflame/zermelo.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rheoflame {

ScalarField3::ScalarField3() : ScalarField3(constant(0.0)) {}

ScalarField3::ScalarField3(Fn fn, std::string description)
    : fn_(std::move(fn)), description_(std::move(description)) {}

ScalarField3::ScalarField3(Expr expr)
    : fn_([e = expr](double t, double u, double v) { return e.eval(t, u, v); }),
      description_(expr.to_string()) {}

ScalarField3 ScalarField3::constant(double value) {
  std::ostringstream os;
  os << value;
  return ScalarField3([value](double, double, double) { return value; }, os.str());
}

ZermeloSample sample(const ZermeloData& zd, double t, double u, double v) {
  return {zd.a(t, u, v), zd.b(t, u, v), zd.c1(t, u, v), zd.c2(t, u, v), zd.theta(t, u, v)};
}

Mat2 clockwise_rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Mat2 r;
  r << c, s, -s, c;
  return r;
}

Mat2 h_matrix(double a, double b, double theta) {
  if (!(a > 0.0) || !(b > 0.0)) {
    std::ostringstream os;
    os << "Zermelo semi-axes must be positive (a=" << a << ", b=" << b << ")";
    throw MetricError(os.str());
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double a2 = a * a;
  const double b2 = b * b;
  const double off = (a2 - b2) * s * c;
  Mat2 h;
  h << a2 * s * s + b2 * c * c, off, off, a2 * c * c + b2 * s * s;
  return h / (a2 * b2);
}

RandersNorm::RandersNorm(const ZermeloSample& s)
    : h_(h_matrix(s.a, s.b, s.theta)),
      drift_(clockwise_rotation(s.theta) * Vec2(s.c1, s.c2)),
      lambda_(1.0 - drift_.dot(h_ * drift_)) {}

double RandersNorm::operator()(const Vec2& v) const {
  const Vec2 hv = h_ * v;
  const double vv = v.dot(hv);
  const double vw = drift_.dot(hv);
  return (std::sqrt(lambda_ * vv + vw * vw) - vw) / lambda_;
}

namespace {

RandersNorm checked_norm(const ZermeloData& zd, double t, double u, double v) {
  RandersNorm norm(sample(zd, t, u, v));
  if (!(norm.lambda() > 0.0)) {
    std::ostringstream os;
    os << "invalid Zermelo data: lambda = 1 - h(C,C) = " << norm.lambda() << " <= 0 at (t,u,v)=(" << t
       << ", " << u << ", " << v << ")";
    throw MetricError(os.str());
  }
  return norm;
}

}  // namespace

double randers_f(const ZermeloData& zd, double t, double u, double v, double x, double y) {
  return checked_norm(zd, t, u, v)(Vec2(x, y));
}

Vec2 indicatrix_point(const ZermeloData& zd, double t, double u, double v, double psi) {
  const ZermeloSample s = sample(zd, t, u, v);
  return clockwise_rotation(s.theta) * Vec2(s.a * std::cos(psi) + s.c1, s.b * std::sin(psi) + s.c2);
}

ValidationReport validate(const ZermeloData& zd, const Domain& domain, ValidationSampling sampling) {
  ValidationReport report;
  report.min_lambda = std::numeric_limits<double>::infinity();
  report.min_a = std::numeric_limits<double>::infinity();
  report.min_b = std::numeric_limits<double>::infinity();
  auto grid = [](double lo, double hi, int n, int i) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return 0.0;
    return n <= 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  };
  try {
    for (int k = 0; k < sampling.nt; ++k) {
      const double t = grid(domain.t_min, domain.t_max, sampling.nt, k);
      for (int i = 0; i < sampling.nu; ++i) {
        const double u = grid(domain.u_min, domain.u_max, sampling.nu, i);
        for (int j = 0; j < sampling.nv; ++j) {
          const double v = grid(domain.v_min, domain.v_max, sampling.nv, j);
          const ZermeloSample s = sample(zd, t, u, v);
          report.min_a = std::min(report.min_a, s.a);
          report.min_b = std::min(report.min_b, s.b);
          if (s.a <= 0.0 || s.b <= 0.0) continue;
          const double lambda = RandersNorm(s).lambda();
          if (lambda < report.min_lambda) {
            report.min_lambda = lambda;
            report.t = t;
            report.u = u;
            report.v = v;
          }
        }
      }
    }
  } catch (const std::exception& e) {
    report.error = e.what();
    report.pass = false;
    return report;
  }
  report.pass = report.min_a > 0.0 && report.min_b > 0.0 && report.min_lambda > 0.0;
  return report;
}

ZermeloMetric::ZermeloMetric(ZermeloData data, Domain domain)
    : data_(std::move(data)), domain_(domain) {}

RandersNorm ZermeloMetric::norm_at(double t, const Vec2& p) const {
  return checked_norm(data_, t, p.x(), p.y());
}

double ZermeloMetric::f(double t, const Vec2& p, const Vec2& v) const { return norm_at(t, p)(v); }

void ZermeloMetric::f_batch(double t, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const {
  const RandersNorm norm = norm_at(t, p);
  for (std::size_t i = 0; i < vs.size(); ++i) out[i] = norm(vs[i]);
}

}  // namespace rheoflame
