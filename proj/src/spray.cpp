#include "rheoflame/spray.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "rheoflame/parallel.hpp"

namespace rheoflame {

NetError::NetError(std::size_t index, const std::string& what)
    : std::runtime_error("ray " + std::to_string(index) + ": " + what), index_(index) {}

namespace {

// Cubic Hermite basis on [0, 1].
struct Hermite {
  double h00, h10, h01, h11;
  explicit Hermite(double x) {
    const double x2 = x * x;
    const double x3 = x2 * x;
    h00 = 2 * x3 - 3 * x2 + 1;
    h10 = x3 - 2 * x2 + x;
    h01 = -2 * x3 + 3 * x2;
    h11 = x3 - x2;
  }
};

std::string describe(const RayState& s) {
  std::ostringstream os;
  os << "t=" << s.t << ", p=(" << s.p.x() << ", " << s.p.y() << "), v=(" << s.v.x() << ", " << s.v.y()
     << ")";
  return os.str();
}

}  // namespace

RayState Ray::at(double t) const {
  if (samples.empty() || t < t_begin() || t > t_end()) {
    throw std::out_of_range("ray dense output queried outside its time range");
  }
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double x, const RayState& s) { return x < s.t; });
  if (it == samples.end()) return samples.back();
  const std::size_t k = static_cast<std::size_t>(it - samples.begin()) - 1;
  const RayState& a = samples[k];
  const RayState& b = samples[k + 1];
  const double h = b.t - a.t;
  const double x = (t - a.t) / h;
  if (x == 0.0) return a;
  const Hermite w(x);
  RayState out;
  out.t = t;
  out.p = w.h00 * a.p + w.h10 * h * a.v + w.h01 * b.p + w.h11 * h * b.v;
  out.v = w.h00 * a.v + w.h10 * h * accelerations[k] + w.h01 * b.v + w.h11 * h * accelerations[k + 1];
  out.rho = (1.0 - x) * a.rho + x * b.rho;
  return out;
}

double rho_closed_form(const JetF2& jet, const Vec2& v, const Vec2& spray, const Vec2& drift) {
  return -(jet.dt + jet.du.dot(v) - jet.dy.dot(2.0 * spray + drift)) / (2.0 * jet.value);
}

RayDerivative preextremal_rhs(const MetricField& m, const RayState& state, JetMode mode) {
  try {
    const SprayTerms terms = spray_terms(m, state.t, state.p, state.v, mode);
    RayDerivative d;
    d.rho = rho_closed_form(terms.jet, state.v, terms.spray, terms.drift);
    d.dp = state.v;
    d.dv = d.rho * state.v - 2.0 * terms.spray - terms.drift;
    return d;
  } catch (const DomainExitError&) {
    throw;
  } catch (const MetricError& e) {
    throw MetricError(std::string(e.what()) + " at " + describe(state));
  }
}

RayDerivative energy_extremal_rhs(const MetricField& m, const RayState& state, JetMode mode) {
  try {
    const SprayTerms terms = spray_terms(m, state.t, state.p, state.v, mode);
    RayDerivative d;
    d.dp = state.v;
    d.dv = -2.0 * terms.spray - terms.drift;
    return d;
  } catch (const DomainExitError&) {
    throw;
  } catch (const MetricError& e) {
    throw MetricError(std::string(e.what()) + " at " + describe(state));
  }
}

Ray integrate_ray(const MetricField& m, double t0, const Vec2& p0, const Vec2& v0, double T,
                  const IntegratorOptions& opts) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 4>;

  if (!(T > t0)) throw std::invalid_argument("integrate_ray: T must exceed t0");
  const bool pre = opts.equation == RayEquation::pre_extremal;
  if (pre) {
    const double f0 = m.f(t0, p0, v0);
    if (!(std::abs(f0 - 1.0) <= 1e-9)) {
      std::ostringstream os;
      os << "integrate_ray: initial velocity is not F-unit (F = " << f0 << ")";
      throw std::invalid_argument(os.str());
    }
  }

  auto to_state = [](double t, const State& x) {
    RayState s;
    s.t = t;
    s.p = Vec2(x[0], x[1]);
    s.v = Vec2(x[2], x[3]);
    return s;
  };
  auto derivative = [&](const RayState& s) {
    return pre ? preextremal_rhs(m, s, opts.jet_mode) : energy_extremal_rhs(m, s, opts.jet_mode);
  };
  auto system = [&](const State& x, State& dxdt, double t) {
    const RayDerivative d = derivative(to_state(t, x));
    dxdt = {d.dp.x(), d.dp.y(), d.dv.x(), d.dv.y()};
  };

  const double span = T - t0;
  const double max_step = opts.max_step > 0.0 ? opts.max_step : span / 64.0;
  const double min_step = 1e-12 * std::max(1.0, span);

  Ray ray;
  State x{p0.x(), p0.y(), v0.x(), v0.y()};
  State dxdt{};
  double t = t0;

  auto record = [&]() {
    RayState s = to_state(t, x);
    const RayDerivative d = derivative(s);
    s.rho = d.rho;
    dxdt = {d.dp.x(), d.dp.y(), d.dv.x(), d.dv.y()};
    ray.samples.push_back(s);
    ray.accelerations.push_back(d.dv);
  };
  record();

  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  double dt = std::min(max_step, span) / 16.0;
  std::size_t steps = 0;
  while (t < T) {
    if (++steps > opts.max_steps) {
      throw IntegrationError("integrate_ray: step budget exhausted at " + describe(to_state(t, x)));
    }
    const bool last = t + dt >= T;
    double step = last ? T - t : std::min(dt, max_step);
    const double t_before = t;
    const odeint::controlled_step_result result = stepper.try_step(system, x, dxdt, t, step);
    if (result == odeint::fail) {
      dt = step;
      if (dt < min_step) {
        std::ostringstream os;
        os << "integrate_ray: step size underflow (dt=" << dt << ") at " << describe(to_state(t, x));
        throw IntegrationError(os.str());
      }
      continue;
    }
    if (last && t - t_before >= T - t_before - 1e-15 * std::max(1.0, std::abs(T))) t = T;
    dt = step;
    if (pre && opts.project) {
      const RayState s = to_state(t, x);
      const double f = m.f(t, s.p, s.v);
      x[2] /= f;
      x[3] /= f;
    }
    record();
  }
  return ray;
}

Ignition Ignition::at_point(const Vec2& p) {
  Ignition ig;
  ig.kind = Kind::point;
  ig.point = p;
  return ig;
}

Ignition Ignition::along(std::vector<Vec2> polyline, Side side) {
  Ignition ig;
  ig.kind = Kind::polyline;
  ig.polyline = std::move(polyline);
  ig.side = side;
  return ig;
}

double WfNet::ds() const {
  const double n = static_cast<double>(rays.size());
  return periodic() ? 2.0 * std::numbers::pi / n : 1.0 / (n - 1.0);
}

std::vector<std::pair<std::size_t, double>> WfNet::s_weights(std::size_t i, SDerivative scheme) const {
  const std::size_t n = rays.size();
  const double h = ds();
  std::vector<std::pair<std::size_t, double>> w;
  auto wrap = [n](long k) { return static_cast<std::size_t>(((k % static_cast<long>(n)) + n) % n); };
  const long ii = static_cast<long>(i);

  if (scheme == SDerivative::spectral) {
    if (!periodic()) throw std::invalid_argument("spectral s-derivative requires a periodic net");
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const long d = ii - static_cast<long>(j);
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      const double half = 0.5 * static_cast<double>(d) * h;
      const double c = (n % 2 == 0) ? std::cos(half) / std::sin(half) : 1.0 / std::sin(half);
      // D_ij acts on f_j; the entry is 1/2 (-1)^(i-j) cot((i-j) h / 2).
      w.emplace_back(j, 0.5 * sign * c);
    }
    return w;
  }

  const bool fourth = scheme == SDerivative::central4;
  if (periodic() || (fourth ? (i >= 2 && i + 2 < n) : (i >= 1 && i + 1 < n))) {
    if (fourth) {
      w = {{wrap(ii - 2), 1.0 / 12.0}, {wrap(ii - 1), -8.0 / 12.0}, {wrap(ii + 1), 8.0 / 12.0}, {wrap(ii + 2), -1.0 / 12.0}};
    } else {
      w = {{wrap(ii - 1), -0.5}, {wrap(ii + 1), 0.5}};
    }
  } else if (!fourth) {
    if (n < 3) throw std::invalid_argument("open net needs at least 3 rays for s-derivatives");
    if (i == 0) {
      w = {{0, -1.5}, {1, 2.0}, {2, -0.5}};
    } else {
      w = {{n - 1, 1.5}, {n - 2, -2.0}, {n - 3, 0.5}};
    }
  } else {
    if (n < 5) throw std::invalid_argument("open net needs at least 5 rays for 4th-order s-derivatives");
    // One-sided 4th-order stencils, mirrored at the right end.
    static constexpr std::array<double, 5> edge{-25.0 / 12.0, 48.0 / 12.0, -36.0 / 12.0, 16.0 / 12.0, -3.0 / 12.0};
    static constexpr std::array<double, 5> next{-3.0 / 12.0, -10.0 / 12.0, 18.0 / 12.0, -6.0 / 12.0, 1.0 / 12.0};
    const bool left = i < 2;
    const auto& c = (i == 0 || i == n - 1) ? edge : next;
    for (std::size_t k = 0; k < 5; ++k) {
      if (left) {
        w.emplace_back(k, c[k]);
      } else {
        w.emplace_back(n - 1 - k, -c[k]);
      }
    }
  }
  for (auto& [j, weight] : w) weight /= h;
  return w;
}

Vec2 WfNet::d_ds(std::size_t i, double t, SDerivative scheme) const {
  Vec2 d = Vec2::Zero();
  for (const auto& [j, w] : s_weights(i, scheme)) d += w * position(j, t);
  return d;
}

Vec2 WfNet::d_ds_velocity(std::size_t i, double t, SDerivative scheme) const {
  Vec2 d = Vec2::Zero();
  for (const auto& [j, w] : s_weights(i, scheme)) d += w * velocity(j, t);
  return d;
}

namespace {

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& poly, std::size_t count) {
  if (poly.size() < 2) throw std::invalid_argument("polyline ignition needs at least two points");
  std::vector<double> cumulative{0.0};
  for (std::size_t k = 1; k < poly.size(); ++k) {
    cumulative.push_back(cumulative.back() + (poly[k] - poly[k - 1]).norm());
  }
  const double total = cumulative.back();
  if (!(total > 0.0)) throw std::invalid_argument("polyline ignition has zero length");
  std::vector<Vec2> out;
  out.reserve(count);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double target = total * static_cast<double>(i) / static_cast<double>(count - 1);
    while (seg + 2 < cumulative.size() && cumulative[seg + 1] < target) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double x = len > 0.0 ? std::clamp((target - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back((1.0 - x) * poly[seg] + x * poly[seg + 1]);
  }
  return out;
}

}  // namespace

WfNet build_net(const MetricField& m, const Ignition& ignition, double t0, double T, std::size_t m_rays,
                const IntegratorOptions& opts) {
  if (!(T > t0)) throw std::invalid_argument("build_net: T must exceed t0");
  if (m_rays < 3) throw std::invalid_argument("build_net: at least 3 rays required");

  WfNet net;
  net.ignition = ignition;
  net.t0 = t0;
  net.T = T;
  net.rays.resize(m_rays);
  net.s.resize(m_rays);

  std::vector<Vec2> starts(m_rays);
  std::vector<Vec2> velocities(m_rays);
  if (ignition.kind == Ignition::Kind::point) {
    for (std::size_t i = 0; i < m_rays; ++i) {
      net.s[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m_rays);
      starts[i] = ignition.point;
      velocities[i] = unit_vector(m, t0, ignition.point, Vec2(std::cos(net.s[i]), std::sin(net.s[i])));
    }
  } else {
    starts = resample_polyline(ignition.polyline, m_rays);
    for (std::size_t i = 0; i < m_rays; ++i) {
      net.s[i] = static_cast<double>(i) / static_cast<double>(m_rays - 1);
      const std::size_t a = i == 0 ? 0 : i - 1;
      const std::size_t b = i + 1 == m_rays ? i : i + 1;
      velocities[i] = hamilton_normal(m, t0, starts[i], starts[b] - starts[a], ignition.side);
    }
  }

  parallel_for(m_rays, [&](std::size_t i) {
    try {
      net.rays[i] = integrate_ray(m, t0, starts[i], velocities[i], T, opts);
      net.rays[i].s = net.s[i];
    } catch (const std::exception& e) {
      throw NetError(i, e.what());
    }
  });
  return net;
}

Frontal frontal(const WfNet& net, double t1) {
  const double slack = 1e-12 * std::max(1.0, std::abs(net.T));
  if (t1 < net.t0 - slack || t1 > net.T + slack) {
    std::ostringstream os;
    os << "frontal: t1=" << t1 << " outside [" << net.t0 << ", " << net.T << "]";
    throw std::out_of_range(os.str());
  }
  t1 = std::clamp(t1, net.t0, net.T);
  Frontal f;
  f.t = t1;
  f.closed = net.periodic();
  f.points.reserve(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) f.points.push_back(net.position(i, t1));
  return f;
}

std::vector<double> residual_times(const WfNet& net, std::size_t count) {
  std::vector<double> times;
  times.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    times.push_back(k == count ? net.T : net.t0 + (net.T - net.t0) * static_cast<double>(k) / count);
  }
  return times;
}

ResidualField orthogonality_residual(const MetricField& m, const WfNet& net, std::size_t time_count,
                                     SDerivative scheme) {
  ResidualField field;
  field.times = residual_times(net, time_count);
  field.values.assign(net.size(), std::vector<double>(field.times.size(), 0.0));
  parallel_for(net.size(), [&](std::size_t i) {
    for (std::size_t k = 0; k < field.times.size(); ++k) {
      const double t = field.times[k];
      const RayState st = net.rays[i].at(t);
      const Vec2 w = net.d_ds(i, t, scheme);
      if (w.norm() <= 1e-10 * std::max(1.0, st.p.norm())) {
        field.values[i][k] = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      const JetF2 j = jet(m, t, st.p, st.v);
      const Mat2 g = fundamental_tensor(j);
      const double num = std::abs(0.5 * j.dy.dot(w));
      field.values[i][k] = num / (std::sqrt(j.value) * std::sqrt(w.dot(g * w)));
    }
  });
  for (const auto& row : field.values) {
    for (double r : row) {
      if (std::isnan(r)) {
        ++field.flagged;
      } else {
        field.max = std::max(field.max, r);
      }
    }
  }
  return field;
}

double unit_speed_residual(const MetricField& m, const Ray& ray) {
  double worst = 0.0;
  for (const RayState& s : ray.samples) worst = std::max(worst, std::abs(m.f(s.t, s.p, s.v) - 1.0));
  return worst;
}

SpeedResidual unit_speed_residual(const MetricField& m, const WfNet& net) {
  SpeedResidual out;
  out.values.resize(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const RayState& s : net.rays[i].samples) {
      const double r = std::abs(m.f(s.t, s.p, s.v) - 1.0);
      out.values[i].push_back(r);
      out.max = std::max(out.max, r);
    }
  }
  return out;
}

}  // namespace rheoflame
