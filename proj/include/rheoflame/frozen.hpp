#pragma once

// Time functions of WF-nets, the scleronomic metrics they freeze out of a
// rheonomic one, and the comparison of frozen geodesics with the net's rays.

#include <cstddef>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "rheoflame/spray.hpp"

namespace rheoflame {

/// A query point the net never reaches within [t0, T].
class OutsideImageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The net folds over itself: the (s, t) -> (u, v) Jacobian changes sign.
class NetFoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TimeSample {
  double t = 0.0;
  Vec2 grad = Vec2::Zero();  // NaN at a point ignition, where t is not differentiable
};

class TimeField {
 public:
  virtual ~TimeField() = default;
  virtual TimeSample at(const Vec2& p) const = 0;
  virtual double t0() const = 0;
  double operator()(const Vec2& p) const { return at(p).t; }
};

/// A time field given in closed form.
class AnalyticTimeField final : public TimeField {
 public:
  AnalyticTimeField(std::function<double(const Vec2&)> t, std::function<Vec2(const Vec2&)> grad, double t0)
      : t_(std::move(t)), grad_(std::move(grad)), t0_(t0) {}

  TimeSample at(const Vec2& p) const override { return {t_(p), grad_(p)}; }
  double t0() const override { return t0_; }

 private:
  std::function<double(const Vec2&)> t_;
  std::function<Vec2(const Vec2&)> grad_;
  double t0_;
};

/// t(u, v) = -1 + sqrt((1 + t0)^2 + sqrt(4u^2 + v^2)) for the growing-ellipse
/// metric ignited at the origin at time t0.
std::shared_ptr<const AnalyticTimeField> growing_ellipse_time_field(double t0);

struct TimeFieldOptions {
  std::size_t time_knots = 257;  // common time grid on [t0, T]
};

/// The time function of a WF-net. The net is resampled on a common time grid
/// and modelled by Hermite patches, quintic in s and cubic in t, with
/// s-derivatives from spectral differentiation (point nets) or 4th-order
/// stencils (polyline nets). Queries invert the model by Newton iteration from
/// the nearest node.
class NetTimeField final : public TimeField {
 public:
  explicit NetTimeField(const WfNet& net, TimeFieldOptions opts = {});

  TimeSample at(const Vec2& p) const override;
  double t0() const override { return t0_; }
  double t_end() const { return t_end_; }

  /// The net parameters (s, t) of p; throws OutsideImageError.
  Vec2 parameters(const Vec2& p) const;

  /// The Hermite model gamma(s, t) and its Jacobian [gamma_s gamma_t].
  Vec2 model(double s, double t, Mat2* jacobian = nullptr) const;

 private:
  struct Node {
    Vec2 p, ps, pss, pt, pst, psst;
  };
  const Node& node(std::size_t ray, std::size_t knot) const { return nodes_[ray * times_.size() + knot]; }
  std::size_t cell_of(double s) const;
  bool newton(const Vec2& target, Vec2& x) const;
  std::size_t nearest_node(const Vec2& p) const;

  bool periodic_;
  double t0_;
  double t_end_;
  Vec2 ignition_;
  std::vector<double> s_;
  double ds_;
  std::vector<double> times_;
  std::vector<Node> nodes_;
  double scale_;

  // Uniform bucket grid over the node positions for seeding Newton.
  Vec2 lo_;
  double cell_;
  std::size_t nx_, ny_;
  std::vector<std::vector<std::size_t>> buckets_;
};

std::shared_ptr<const NetTimeField> time_field(const WfNet& net, TimeFieldOptions opts = {});

/// F^(u, v, x, y) = F(t(u, v), u, v, x, y). Jets are assembled from the
/// rheonomic jet by the chain rule and carry no time dependence.
class FrozenMetric final : public MetricField {
 public:
  FrozenMetric(std::shared_ptr<const MetricField> m, std::shared_ptr<const TimeField> tf)
      : m_(std::move(m)), tf_(std::move(tf)) {}

  double f(double t, const Vec2& p, const Vec2& v) const override;
  void f_batch(double t, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const override;
  std::optional<JetF2> analytic_jet(double t, const Vec2& p, const Vec2& v) const override;
  Domain domain() const override;

  const MetricField& rheonomic() const { return *m_; }
  const TimeField& time() const { return *tf_; }

 private:
  std::shared_ptr<const MetricField> m_;
  std::shared_ptr<const TimeField> tf_;
};

FrozenMetric freeze(std::shared_ptr<const MetricField> m, std::shared_ptr<const TimeField> tf);

/// Geodesic of the frozen metric, gamma'' + 2G^ = 0, parametrized on
/// [start, start + arc]. Unit speed is monitored, not enforced.
Ray frozen_geodesic(const FrozenMetric& fm, const Vec2& p0, const Vec2& v0, double arc, double start = 0.0,
                    const IntegratorOptions& opts = {});

struct FrozenReport {
  double t_start = 0.0;
  double t_stop = 0.0;
  std::vector<double> deviation;    // per ray, max position gap
  std::vector<double> speed_drift;  // per ray, max |F^ - 1| along the geodesic
  double max_deviation = 0.0;
  double max_speed_drift = 0.0;
};

struct FrozenCheckOptions {
  // Point nets need a positive start offset: t is not differentiable at the
  // ignition point. The end margin keeps geodesics inside the open image.
  double start_offset = 0.0;
  double end_margin = 0.0;
  IntegratorOptions integrator;
};

/// Restarts every ray as a frozen geodesic from its own state at
/// t0 + start_offset and compares positions up to T - end_margin.
FrozenReport verify_frozen(const WfNet& net, const FrozenMetric& fm, const FrozenCheckOptions& opts = {});

/// Gridded CSV with header u,v,t; t is empty where the point is off the image.
void write_time_field_csv(std::ostream& os, const TimeField& tf, double u_min, double u_max, double v_min,
                          double v_max, std::size_t nu, std::size_t nv);

}  // namespace rheoflame
