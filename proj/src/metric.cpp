#include "rheoflame/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/tools/roots.hpp>

namespace rheoflame {

void MetricField::f_batch(double t, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const {
  for (std::size_t i = 0; i < vs.size(); ++i) out[i] = f(t, p, vs[i]);
}

std::optional<JetF2> MetricField::analytic_jet(double, const Vec2&, const Vec2&) const {
  return std::nullopt;
}

namespace {

constexpr double kMinVelocity = 1e-12;
constexpr double kRelativeStep = 1e-4;

struct Stencil {
  std::vector<double> offsets;  // in units of h
  std::vector<double> weights;  // first derivative, divide by h
};

const Stencil& first_derivative_stencil(int order) {
  static const Stencil second{{-1.0, 1.0}, {-0.5, 0.5}};
  static const Stencil fourth{{-2.0, -1.0, 1.0, 2.0}, {1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0}};
  if (order == 2) return second;
  if (order == 4) return fourth;
  throw std::invalid_argument("finite-difference order must be 2 or 4");
}

// Second derivative from the first-derivative stencil's points plus the centre.
double second_derivative(int order, double centre, std::span<const double> values, double h) {
  if (order == 2) return (values[0] - 2.0 * centre + values[1]) / (h * h);
  // values ordered as offsets {-2, -1, 1, 2}
  return (-values[0] + 16.0 * values[1] - 30.0 * centre + 16.0 * values[2] - values[3]) / (12.0 * h * h);
}

void require_velocity(const Vec2& v) {
  if (!(v.norm() >= kMinVelocity)) {
    throw MetricError("degenerate velocity: |V| < 1e-12");
  }
}

// Velocities {V, V + o h e_1 ..., V + o h e_2 ...} used for a dy stencil.
std::vector<Vec2> dy_velocities(const Vec2& v, const Stencil& st, double hv) {
  std::vector<Vec2> out;
  out.reserve(1 + 2 * st.offsets.size());
  out.push_back(v);
  for (int l = 0; l < 2; ++l) {
    for (double o : st.offsets) {
      Vec2 w = v;
      w[l] += o * hv;
      out.push_back(w);
    }
  }
  return out;
}

// dy from squared values laid out as dy_velocities produced them.
Vec2 dy_from(std::span<const double> sq, const Stencil& st, double hv) {
  const std::size_t n = st.offsets.size();
  Vec2 dy = Vec2::Zero();
  for (int l = 0; l < 2; ++l) {
    for (std::size_t k = 0; k < n; ++k) dy[l] += st.weights[k] * sq[1 + l * n + k];
    dy[l] /= hv;
  }
  return dy;
}

// 1/2 d/dlambda F^2(V + lambda W) at lambda = 0.
double half_directional_derivative(const MetricField& m, double t, const Vec2& p, const Vec2& v,
                                   const Vec2& w) {
  const double wn = w.norm();
  if (wn == 0.0) return 0.0;
  const double h = kRelativeStep * std::max(1.0, v.norm()) / wn;
  const std::array<Vec2, 4> vs{v - 2.0 * h * w, v - h * w, v + h * w, v + 2.0 * h * w};
  std::array<double, 4> f{};
  m.f_batch(t, p, vs, f);
  const double d = (f[0] * f[0] - 8.0 * f[1] * f[1] + 8.0 * f[2] * f[2] - f[3] * f[3]) / (12.0 * h);
  return 0.5 * d;
}

}  // namespace

JetF2 fd_jet(const MetricField& m, double t, const Vec2& p, const Vec2& v, int order) {
  require_velocity(v);
  const Stencil& st = first_derivative_stencil(order);
  const std::size_t n = st.offsets.size();
  const double hv = kRelativeStep * std::max(1.0, v.norm());

  JetF2 jet;

  // Centre position: value, dy, dydy.
  {
    std::vector<Vec2> vs = dy_velocities(v, st, hv);
    for (double a : st.offsets) {
      for (double b : st.offsets) vs.push_back(v + Vec2(a * hv, b * hv));
    }
    std::vector<double> f(vs.size());
    m.f_batch(t, p, vs, f);
    for (double& x : f) x *= x;
    jet.value = f[0];
    jet.dy = dy_from(f, st, hv);
    for (int l = 0; l < 2; ++l) {
      jet.dydy(l, l) = second_derivative(order, f[0], std::span(f).subspan(1 + l * n, n), hv);
    }
    double mixed = 0.0;
    const std::size_t base = 1 + 2 * n;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) mixed += st.weights[i] * st.weights[j] * f[base + i * n + j];
    }
    mixed /= hv * hv;
    jet.dydy(0, 1) = jet.dydy(1, 0) = mixed;
  }

  // Offset positions in t, u, v: first derivatives and nested mixed partials.
  const std::vector<Vec2> vs = dy_velocities(v, st, hv);
  std::vector<double> f(vs.size());
  for (int coord = 0; coord < 3; ++coord) {
    const double x0 = coord == 0 ? t : p[coord - 1];
    const double hs = kRelativeStep * std::max(1.0, std::abs(x0));
    double d_value = 0.0;
    Vec2 d_dy = Vec2::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      double tk = t;
      Vec2 pk = p;
      if (coord == 0) {
        tk += st.offsets[k] * hs;
      } else {
        pk[coord - 1] += st.offsets[k] * hs;
      }
      m.f_batch(tk, pk, vs, f);
      for (double& x : f) x *= x;
      d_value += st.weights[k] * f[0];
      d_dy += st.weights[k] * dy_from(f, st, hv);
    }
    d_value /= hs;
    d_dy /= hs;
    if (coord == 0) {
      jet.dt = d_value;
      jet.dtdy = d_dy;
    } else {
      jet.du[coord - 1] = d_value;
      jet.dxdy.row(coord - 1) = d_dy.transpose();
    }
  }
  return jet;
}

JetF2 jet(const MetricField& m, double t, const Vec2& p, const Vec2& v, JetMode mode) {
  require_velocity(v);
  if (!m.domain().contains(t, p)) {
    std::ostringstream os;
    os << "metric domain exit at t=" << t << ", p=(" << p.x() << ", " << p.y() << ")";
    throw DomainExitError(os.str());
  }
  if (mode == JetMode::automatic) {
    if (auto exact = m.analytic_jet(t, p, v)) return *exact;
  }
  return fd_jet(m, t, p, v, 4);
}

double f_squared(const MetricField& m, double t, const Vec2& p, const Vec2& v) {
  const double f = m.f(t, p, v);
  return f * f;
}

Mat2 fundamental_tensor(const JetF2& jet) {
  Mat2 g = 0.25 * (jet.dydy + jet.dydy.transpose());
  Eigen::SelfAdjointEigenSolver<Mat2> eig(g, Eigen::EigenvaluesOnly);
  const Vec2 ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) {
    std::ostringstream os;
    os << "fundamental tensor is not positive definite (eigenvalues " << ev[0] << ", " << ev[1] << ")";
    throw MetricError(os.str());
  }
  return g;
}

Mat2 fundamental_tensor(const MetricField& m, double t, const Vec2& p, const Vec2& v) {
  return fundamental_tensor(jet(m, t, p, v));
}

Mat2 inverse_tensor(const Mat2& g) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(g, Eigen::EigenvaluesOnly);
  const Vec2 ev = eig.eigenvalues().cwiseAbs();
  if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() / ev.minCoeff() > 1e12) {
    std::ostringstream os;
    os << "singular fundamental tensor (eigenvalues " << eig.eigenvalues()[0] << ", "
       << eig.eigenvalues()[1] << ")";
    throw MetricError(os.str());
  }
  return g.llt().solve(Mat2::Identity());
}

SprayTerms spray_terms(const JetF2& jet, const Vec2& v) {
  SprayTerms s;
  s.jet = jet;
  s.g = fundamental_tensor(jet);
  s.g_inv = inverse_tensor(s.g);
  s.spray = 0.25 * s.g_inv * (jet.dxdy.transpose() * v - jet.du);
  s.drift = 0.5 * s.g_inv * jet.dtdy;
  return s;
}

SprayTerms spray_terms(const MetricField& m, double t, const Vec2& p, const Vec2& v, JetMode mode) {
  return spray_terms(jet(m, t, p, v, mode), v);
}

Vec2 spray_g(const MetricField& m, double t, const Vec2& p, const Vec2& v) {
  return spray_terms(m, t, p, v).spray;
}

Vec2 time_drift_n0(const MetricField& m, double t, const Vec2& p, const Vec2& v) {
  return spray_terms(m, t, p, v).drift;
}

double f_inner(const MetricField& m, double t, const Vec2& p, const Vec2& v, const Vec2& a, const Vec2& b) {
  require_velocity(v);
  // Split a into its component along V, where g_V(V, b) is a first
  // derivative of F^2, and a Euclidean-orthogonal remainder.
  const double alpha = a.dot(v) / v.squaredNorm();
  const Vec2 rest = a - alpha * v;
  double result = alpha * half_directional_derivative(m, t, p, v, b);
  if (rest.norm() > 1e-14 * std::max(1.0, a.norm())) {
    const Mat2 g = fundamental_tensor(m, t, p, v);
    result += rest.dot(g * b);
  }
  return result;
}

Vec2 unit_vector(const MetricField& m, double t, const Vec2& p, const Vec2& d) {
  if (!(d.norm() >= kMinVelocity)) throw MetricError("unit_vector: zero direction");
  const double f = m.f(t, p, d);
  if (!(f > 0.0)) throw MetricError("unit_vector: non-positive metric value");
  return d / f;
}

Vec2 hamilton_normal(const MetricField& m, double t, const Vec2& p, const Vec2& tangent, Side side) {
  if (!(tangent.norm() >= kMinVelocity)) throw MetricError("hamilton_normal: zero tangent");
  const Vec2 tn = tangent.normalized();
  auto point = [&](double psi) { return unit_vector(m, t, p, Vec2(std::cos(psi), std::sin(psi))); };
  auto residual = [&](double psi) { return half_directional_derivative(m, t, p, point(psi), tn); };
  auto on_side = [&](const Vec2& w) {
    const double cross = tn.x() * w.y() - tn.y() * w.x();
    return side == Side::left ? cross > 0.0 : cross < 0.0;
  };

  constexpr int kSamples = 72;
  std::array<double, kSamples + 1> psi{};
  std::array<double, kSamples + 1> r{};
  for (int i = 0; i <= kSamples; ++i) {
    psi[i] = 2.0 * std::numbers::pi * i / kSamples;
    r[i] = residual(psi[i]);
  }
  for (int i = 0; i < kSamples; ++i) {
    if (r[i] == 0.0 && on_side(point(psi[i]))) return point(psi[i]);
    if ((r[i] < 0.0) == (r[i + 1] < 0.0)) continue;
    boost::uintmax_t iterations = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    const auto bracket = boost::math::tools::toms748_solve(residual, psi[i], psi[i + 1], r[i], r[i + 1], tol, iterations);
    const double root = 0.5 * (bracket.first + bracket.second);
    const Vec2 v = point(root);
    if (on_side(v)) return v;
  }
  std::ostringstream os;
  os << "hamilton_normal: no F-orthogonal direction found; residual profile min/max "
     << *std::min_element(r.begin(), r.end()) << "/" << *std::max_element(r.begin(), r.end());
  throw MetricError(os.str());
}

double EuclideanMetric::f(double, const Vec2&, const Vec2& v) const { return v.norm(); }

std::optional<JetF2> EuclideanMetric::analytic_jet(double, const Vec2&, const Vec2& v) const {
  JetF2 j;
  j.value = v.squaredNorm();
  j.dy = 2.0 * v;
  j.dydy = 2.0 * Mat2::Identity();
  return j;
}

double GrowingEllipseMetric::f(double t, const Vec2&, const Vec2& v) const {
  return std::sqrt(v.x() * v.x() + 0.25 * v.y() * v.y()) / (1.0 + t);
}

std::optional<JetF2> GrowingEllipseMetric::analytic_jet(double t, const Vec2&, const Vec2& v) const {
  const double q = v.x() * v.x() + 0.25 * v.y() * v.y();
  const double s = 1.0 / ((1.0 + t) * (1.0 + t));
  const double c = 1.0 / ((1.0 + t) * (1.0 + t) * (1.0 + t));
  const Vec2 dq(2.0 * v.x(), 0.5 * v.y());
  JetF2 j;
  j.value = q * s;
  j.dt = -2.0 * q * c;
  j.dy = dq * s;
  j.dydy = Vec2(2.0, 0.5).asDiagonal();
  j.dydy *= s;
  j.dtdy = -2.0 * c * dq;
  return j;
}

Domain GrowingEllipseMetric::domain() const {
  Domain d;
  d.t_min = -1.0 + 1e-9;
  return d;
}

}  // namespace rheoflame
