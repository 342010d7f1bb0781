#include "rheoflame/frozen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rheoflame/format.hpp"
#include "rheoflame/parallel.hpp"

namespace rheoflame {

namespace {

// Cubic Hermite weights on a cell of width h at local coordinate x, for the
// coefficient order (value left, derivative left, value right, derivative right),
// and their derivatives with respect to the unscaled coordinate.
struct HermiteWeights {
  std::array<double, 4> w;
  std::array<double, 4> dw;

  HermiteWeights(double x, double h) {
    const double x2 = x * x, x3 = x2 * x;
    w = {2 * x3 - 3 * x2 + 1, h * (x3 - 2 * x2 + x), -2 * x3 + 3 * x2, h * (x3 - x2)};
    dw = {(6 * x2 - 6 * x) / h, 3 * x2 - 4 * x + 1, (-6 * x2 + 6 * x) / h, 3 * x2 - 2 * x};
  }
};

// Quintic Hermite weights, coefficient order (value, first, second derivative)
// at the left end, then the same at the right end.
struct QuinticWeights {
  std::array<double, 6> w;
  std::array<double, 6> dw;

  QuinticWeights(double x, double h) {
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    const double h2 = h * h;
    w = {1 - 10 * x3 + 15 * x4 - 6 * x5,
         h * (x - 6 * x3 + 8 * x4 - 3 * x5),
         h2 * (0.5 * x2 - 1.5 * x3 + 1.5 * x4 - 0.5 * x5),
         10 * x3 - 15 * x4 + 6 * x5,
         h * (-4 * x3 + 7 * x4 - 3 * x5),
         h2 * (0.5 * x3 - x4 + 0.5 * x5)};
    dw = {(-30 * x2 + 60 * x3 - 30 * x4) / h,
          1 - 18 * x2 + 32 * x3 - 15 * x4,
          h * (x - 4.5 * x2 + 6 * x3 - 2.5 * x4),
          (30 * x2 - 60 * x3 + 30 * x4) / h,
          -12 * x2 + 28 * x3 - 15 * x4,
          h * (1.5 * x2 - 4 * x3 + 2.5 * x4)};
  }
};

std::string where(const Vec2& p) {
  return "(u, v) = (" + format_number(p.x()) + ", " + format_number(p.y()) + ")";
}

}  // namespace

std::shared_ptr<const AnalyticTimeField> growing_ellipse_time_field(double t0) {
  const double c = (1 + t0) * (1 + t0);
  auto t = [c](const Vec2& p) {
    return -1.0 + std::sqrt(c + std::sqrt(4 * p.x() * p.x() + p.y() * p.y()));
  };
  auto grad = [c](const Vec2& p) {
    const double r = std::sqrt(4 * p.x() * p.x() + p.y() * p.y());
    if (r == 0.0) return Vec2(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN());
    const double k = 1.0 / (2.0 * std::sqrt(c + r) * r);
    return Vec2(4 * p.x() * k, p.y() * k);
  };
  return std::make_shared<AnalyticTimeField>(t, grad, t0);
}

NetTimeField::NetTimeField(const WfNet& net, TimeFieldOptions opts)
    : periodic_(net.periodic()),
      t0_(net.t0),
      t_end_(net.T),
      ignition_(net.ignition.point),
      s_(net.s),
      ds_(net.ds()) {
  const std::size_t n = net.size();
  const std::size_t k_count = std::max<std::size_t>(opts.time_knots, 2);
  times_.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    times_[k] = k + 1 == k_count ? net.T : net.t0 + (net.T - net.t0) * static_cast<double>(k) / (k_count - 1);
  }

  nodes_.resize(n * k_count);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const RayState st = net.rays[i].at(times_[k]);
      nodes_[i * k_count + k].p = st.p;
      nodes_[i * k_count + k].pt = st.v;
    }
  });
  const SDerivative scheme = periodic_ ? SDerivative::spectral : SDerivative::central4;
  std::vector<std::vector<std::pair<std::size_t, double>>> weights(n);
  for (std::size_t i = 0; i < n; ++i) weights[i] = net.s_weights(i, scheme);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      Vec2 ps = Vec2::Zero(), pst = Vec2::Zero();
      for (const auto& [j, w] : weights[i]) {
        ps += w * nodes_[j * k_count + k].p;
        pst += w * nodes_[j * k_count + k].pt;
      }
      nodes_[i * k_count + k].ps = ps;
      nodes_[i * k_count + k].pst = pst;
    }
  });
  // Second s-derivatives by applying the same differentiation again.
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      Vec2 pss = Vec2::Zero(), psst = Vec2::Zero();
      for (const auto& [j, w] : weights[i]) {
        pss += w * nodes_[j * k_count + k].ps;
        psst += w * nodes_[j * k_count + k].pst;
      }
      nodes_[i * k_count + k].pss = pss;
      nodes_[i * k_count + k].psst = psst;
    }
  });

  // Bounding box and spacing.
  Vec2 lo = nodes_.front().p, hi = lo;
  double spacing = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const Vec2& p = node(i, k).p;
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
      if (i + 1 < n || periodic_) spacing = std::max(spacing, (node((i + 1) % n, k).p - p).norm());
      if (k + 1 < k_count) spacing = std::max(spacing, (node(i, k + 1).p - p).norm());
    }
  }
  scale_ = std::max(1.0, (hi - lo).norm());

  // Orientation must not flip anywhere on the net.
  const std::size_t k_first = periodic_ ? 1 : 0;
  int positive = 0, negative = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = k_first; k < k_count; ++k) {
      const Node& nd = node(i, k);
      const double det = nd.ps.x() * nd.pt.y() - nd.ps.y() * nd.pt.x();
      if (det > 0) ++positive;
      if (det < 0) ++negative;
    }
  }
  const bool majority_positive = positive >= negative;
  for (std::size_t i = 0; i < n && std::min(positive, negative) > 0; ++i) {
    for (std::size_t k = k_first; k < k_count; ++k) {
      const Node& nd = node(i, k);
      const double det = nd.ps.x() * nd.pt.y() - nd.ps.y() * nd.pt.x();
      if (det != 0.0 && (det > 0) != majority_positive) {
        std::ostringstream os;
        os << "net folds: Jacobian changes sign at ray " << i << " (s = " << s_[i] << "), t = " << times_[k]
           << ", " << where(nd.p);
        throw NetFoldError(os.str());
      }
    }
  }

  // Buckets of seed nodes; the degenerate first knot of a point net is left out.
  lo_ = lo - Vec2::Constant(spacing);
  const Vec2 extent = hi - lo + Vec2::Constant(2 * spacing);
  const double count = static_cast<double>(n * (k_count - k_first));
  cell_ = std::max(std::sqrt(extent.x() * extent.y() / count) * 2.0, 1e-9 * scale_);
  nx_ = std::clamp<std::size_t>(static_cast<std::size_t>(extent.x() / cell_) + 1, 1, 4096);
  ny_ = std::clamp<std::size_t>(static_cast<std::size_t>(extent.y() / cell_) + 1, 1, 4096);
  cell_ = std::max(extent.x() / static_cast<double>(nx_), extent.y() / static_cast<double>(ny_));
  cell_ = std::max(cell_, 1e-9 * scale_);
  buckets_.assign(nx_ * ny_, {});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = k_first; k < k_count; ++k) {
      const Vec2 q = (node(i, k).p - lo_) / cell_;
      const std::size_t bx = std::min(nx_ - 1, static_cast<std::size_t>(std::max(0.0, q.x())));
      const std::size_t by = std::min(ny_ - 1, static_cast<std::size_t>(std::max(0.0, q.y())));
      buckets_[by * nx_ + bx].push_back(i * k_count + k);
    }
  }
}

std::size_t NetTimeField::cell_of(double s) const {
  const std::size_t n = s_.size();
  const double x = std::floor(s / ds_);
  if (periodic_) {
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((static_cast<long>(x) % m) + m) % m);
  }
  return static_cast<std::size_t>(std::clamp(x, 0.0, static_cast<double>(n - 2)));
}

Vec2 NetTimeField::model(double s, double t, Mat2* jacobian) const {
  const std::size_t n = s_.size();
  const std::size_t i = cell_of(s);
  const std::size_t j = periodic_ ? (i + 1) % n : i + 1;
  const double sigma = periodic_ ? s / ds_ - std::floor(s / ds_) : s / ds_ - static_cast<double>(i);

  const std::size_t k_count = times_.size();
  const double ht = times_[1] - times_[0];
  const double y = (t - t0_) / ht;
  const std::size_t k = static_cast<std::size_t>(std::clamp(std::floor(y), 0.0, static_cast<double>(k_count - 2)));
  const double tau = y - static_cast<double>(k);

  const QuinticWeights ws(sigma, ds_);
  const HermiteWeights wt(tau, ht);
  const Node* corner[2][2] = {{&node(i, k), &node(i, k + 1)}, {&node(j, k), &node(j, k + 1)}};
  auto coefficient = [&](int a, int b) -> const Vec2& {
    const Node& nd = *corner[a / 3][b / 2];
    const bool dt = b % 2 == 1;
    switch (a % 3) {
      case 0: return dt ? nd.pt : nd.p;
      case 1: return dt ? nd.pst : nd.ps;
      default: return dt ? nd.psst : nd.pss;
    }
  };

  Vec2 g = Vec2::Zero(), gs = Vec2::Zero(), gt = Vec2::Zero();
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 4; ++b) {
      const Vec2& c = coefficient(a, b);
      g += ws.w[a] * wt.w[b] * c;
      gs += ws.dw[a] * wt.w[b] * c;
      gt += ws.w[a] * wt.dw[b] * c;
    }
  }
  if (jacobian) {
    jacobian->col(0) = gs;
    jacobian->col(1) = gt;
  }
  return g;
}

std::size_t NetTimeField::nearest_node(const Vec2& p) const {
  const Vec2 q = (p - lo_) / cell_;
  const long cx = std::clamp(static_cast<long>(std::floor(q.x())), 0L, static_cast<long>(nx_) - 1);
  const long cy = std::clamp(static_cast<long>(std::floor(q.y())), 0L, static_cast<long>(ny_) - 1);
  std::size_t best = nodes_.size();
  double best_d = std::numeric_limits<double>::infinity();
  const long reach = static_cast<long>(std::max(nx_, ny_));
  for (long r = 0; r <= reach; ++r) {
    for (long by = cy - r; by <= cy + r; ++by) {
      if (by < 0 || by >= static_cast<long>(ny_)) continue;
      for (long bx = cx - r; bx <= cx + r; ++bx) {
        if (bx < 0 || bx >= static_cast<long>(nx_)) continue;
        if (std::max(std::abs(bx - cx), std::abs(by - cy)) != r) continue;
        for (std::size_t idx : buckets_[static_cast<std::size_t>(by) * nx_ + static_cast<std::size_t>(bx)]) {
          const double d = (nodes_[idx].p - p).norm();
          if (d < best_d) {
            best_d = d;
            best = idx;
          }
        }
      }
    }
    if (best < nodes_.size() && best_d <= static_cast<double>(r) * cell_) break;
  }
  return best;
}

bool NetTimeField::newton(const Vec2& target, Vec2& x) const {
  Mat2 jac;
  Vec2 r = model(x.x(), x.y(), &jac) - target;
  double rn = r.norm();
  const double span = t_end_ - t0_;
  for (int it = 0; it < 50; ++it) {
    if (rn <= 1e-14 * scale_) return true;
    const double det = jac.determinant();
    if (!(std::abs(det) > 0.0) || !std::isfinite(det)) return false;
    const Vec2 step = jac.partialPivLu().solve(r);
    double lambda = 1.0;
    Vec2 xn;
    Mat2 jn;
    Vec2 rn_vec;
    bool improved = false;
    for (int half = 0; half < 30; ++half) {
      xn = x - lambda * step;
      xn.y() = std::clamp(xn.y(), t0_ - 0.5 * span, t_end_ + 0.5 * span);
      rn_vec = model(xn.x(), xn.y(), &jn) - target;
      if (rn_vec.norm() < rn) {
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    const double moved_s = std::abs(xn.x() - x.x());
    const double moved_t = std::abs(xn.y() - x.y());
    if (!improved) return rn <= 1e-9 * scale_;
    x = xn;
    jac = jn;
    r = rn_vec;
    rn = r.norm();
    if (moved_s <= 1e-13 * std::max(1.0, std::abs(x.x())) && moved_t <= 1e-13 * std::max(1.0, std::abs(x.y()))) {
      return rn <= 1e-9 * scale_;
    }
  }
  return rn <= 1e-9 * scale_;
}

Vec2 NetTimeField::parameters(const Vec2& p) const {
  if (periodic_ && (p - ignition_).norm() <= 1e-13 * scale_) return Vec2(0.0, t0_);
  const Vec2 rel = (p - lo_) / cell_;
  if (rel.x() < 0 || rel.y() < 0 || rel.x() > static_cast<double>(nx_) || rel.y() > static_cast<double>(ny_)) {
    throw OutsideImageError("time field: point outside the net image at " + where(p));
  }
  const std::size_t seed = nearest_node(p);
  if (seed >= nodes_.size()) throw OutsideImageError("time field: no net sample near " + where(p));
  const std::size_t k_count = times_.size();
  const std::size_t ray = seed / k_count;
  Vec2 x(s_[ray], times_[seed % k_count]);

  bool ok = newton(p, x);
  if (!ok) {
    // Golden-section search along the seed ray for a better start.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = t0_, b = t_end_;
    auto gap = [&](double t) { return (model(s_[ray], t) - p).norm(); };
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = gap(c), fd = gap(d);
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - g * (b - a);
        fc = gap(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + g * (b - a);
        fd = gap(d);
      }
    }
    x = Vec2(s_[ray], 0.5 * (a + b));
    ok = newton(p, x);
  }
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end_));
  if (!ok || x.y() < t0_ - slack || x.y() > t_end_ + slack ||
      (!periodic_ && (x.x() < -1e-9 || x.x() > 1.0 + 1e-9))) {
    throw OutsideImageError("time field: point outside the net image at " + where(p));
  }
  x.y() = std::clamp(x.y(), t0_, t_end_);
  return x;
}

TimeSample NetTimeField::at(const Vec2& p) const {
  const Vec2 x = parameters(p);
  TimeSample out;
  out.t = x.y();
  if (periodic_ && x.y() == t0_) {
    out.grad = Vec2::Constant(std::numeric_limits<double>::quiet_NaN());
    return out;
  }
  Mat2 jac;
  model(x.x(), x.y(), &jac);
  const double det = jac.determinant();
  out.grad = Vec2(-jac(1, 0), jac(0, 0)) / det;
  return out;
}

std::shared_ptr<const NetTimeField> time_field(const WfNet& net, TimeFieldOptions opts) {
  return std::make_shared<NetTimeField>(net, opts);
}

double FrozenMetric::f(double, const Vec2& p, const Vec2& v) const { return m_->f(tf_->at(p).t, p, v); }

void FrozenMetric::f_batch(double, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const {
  m_->f_batch(tf_->at(p).t, p, vs, out);
}

std::optional<JetF2> FrozenMetric::analytic_jet(double, const Vec2& p, const Vec2& v) const {
  const TimeSample ts = tf_->at(p);
  const JetF2 j = jet(*m_, ts.t, p, v);
  JetF2 out = j;
  out.dt = 0.0;
  out.dtdy = Vec2::Zero();
  out.du = j.du + j.dt * ts.grad;
  out.dxdy = j.dxdy + ts.grad * j.dtdy.transpose();
  return out;
}

Domain FrozenMetric::domain() const {
  Domain d = m_->domain();
  d.t_min = -std::numeric_limits<double>::infinity();
  d.t_max = std::numeric_limits<double>::infinity();
  return d;
}

FrozenMetric freeze(std::shared_ptr<const MetricField> m, std::shared_ptr<const TimeField> tf) {
  return FrozenMetric(std::move(m), std::move(tf));
}

Ray frozen_geodesic(const FrozenMetric& fm, const Vec2& p0, const Vec2& v0, double arc, double start,
                    const IntegratorOptions& opts) {
  const double f0 = fm.f(start, p0, v0);
  if (!(std::abs(f0 - 1.0) <= 1e-3)) {
    throw std::invalid_argument("frozen_geodesic: initial velocity is not unit (F = " + format_number(f0) + ")");
  }
  IntegratorOptions o = opts;
  o.equation = RayEquation::energy_extremal;
  o.project = false;
  return integrate_ray(fm, start, p0, v0, start + arc, o);
}

FrozenReport verify_frozen(const WfNet& net, const FrozenMetric& fm, const FrozenCheckOptions& opts) {
  FrozenReport report;
  report.t_start = net.t0 + opts.start_offset;
  report.t_stop = net.T - opts.end_margin;
  if (!(report.t_start < report.t_stop)) throw std::invalid_argument("verify_frozen: empty comparison range");
  report.deviation.assign(net.size(), 0.0);
  report.speed_drift.assign(net.size(), 0.0);
  parallel_for(net.size(), [&](std::size_t i) {
    try {
      const Ray& ray = net.rays[i];
      const RayState st = ray.at(report.t_start);
      const Ray geo =
          frozen_geodesic(fm, st.p, st.v, report.t_stop - report.t_start, report.t_start, opts.integrator);
      double dev = 0.0, drift = 0.0;
      for (const RayState& g : geo.samples) {
        dev = std::max(dev, (g.p - ray.at(std::min(g.t, report.t_stop)).p).norm());
        drift = std::max(drift, std::abs(fm.f(g.t, g.p, g.v) - 1.0));
      }
      for (const RayState& r : ray.samples) {
        if (r.t < geo.t_begin() || r.t > geo.t_end()) continue;
        dev = std::max(dev, (r.p - geo.at(r.t).p).norm());
      }
      report.deviation[i] = dev;
      report.speed_drift[i] = drift;
    } catch (const std::exception& e) {
      throw NetError(i, e.what());
    }
  });
  for (std::size_t i = 0; i < net.size(); ++i) {
    report.max_deviation = std::max(report.max_deviation, report.deviation[i]);
    report.max_speed_drift = std::max(report.max_speed_drift, report.speed_drift[i]);
  }
  return report;
}

void write_time_field_csv(std::ostream& os, const TimeField& tf, double u_min, double u_max, double v_min,
                          double v_max, std::size_t nu, std::size_t nv) {
  os << "u,v,t\n";
  for (std::size_t b = 0; b < nv; ++b) {
    const double v = nv == 1 ? v_min : v_min + (v_max - v_min) * static_cast<double>(b) / (nv - 1);
    for (std::size_t a = 0; a < nu; ++a) {
      const double u = nu == 1 ? u_min : u_min + (u_max - u_min) * static_cast<double>(a) / (nu - 1);
      os << format_number(u) << ',' << format_number(v) << ',';
      try {
        os << format_number(tf.at(Vec2(u, v)).t);
      } catch (const OutsideImageError&) {
      }
      os << '\n';
    }
  }
}

}  // namespace rheoflame
