#pragma once

// Energy pre-extremal rays, WF-nets and their diagnostics.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "rheoflame/metric.hpp"

namespace rheoflame {

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A failure while integrating ray `index` of a net.
class NetError : public std::runtime_error {
 public:
  NetError(std::size_t index, const std::string& what);
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

struct RayState {
  double t = 0.0;
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();
  double rho = 0.0;
};

struct RayDerivative {
  Vec2 dp;
  Vec2 dv;
  double rho = 0.0;
};

/// Accepted integration steps of one ray plus a cubic Hermite interpolant
/// (positions from (p, v), velocities from (v, dv/dt)) between them.
class Ray {
 public:
  double s = 0.0;
  std::vector<RayState> samples;
  std::vector<Vec2> accelerations;

  double t_begin() const { return samples.front().t; }
  double t_end() const { return samples.back().t; }

  /// Dense output; throws std::out_of_range outside [t_begin, t_end].
  RayState at(double t) const;
};

enum class RayEquation {
  pre_extremal,     // v' = rho v - 2G - N0, unit speed kept
  energy_extremal,  // v' = -2G - N0
};

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = 0.0;  // 0: (T - t0) / 64
  std::size_t max_steps = 2'000'000;
  RayEquation equation = RayEquation::pre_extremal;
  bool project = true;  // rescale v onto the indicatrix after each step
  JetMode jet_mode = JetMode::automatic;
};

/// The unique rho keeping d/dt F^2 = 0 along the pre-extremal system:
/// rho = -([F^2]_t + [F^2]_{u^k} v^k - [F^2]_{y^k}(2G^k + N0^k)) / (2 F^2).
double rho_closed_form(const JetF2& jet, const Vec2& v, const Vec2& spray, const Vec2& drift);

RayDerivative preextremal_rhs(const MetricField& m, const RayState& state,
                              JetMode mode = JetMode::automatic);
RayDerivative energy_extremal_rhs(const MetricField& m, const RayState& state,
                                  JetMode mode = JetMode::automatic);

/// Adaptive Dormand-Prince 5(4) integration of one ray on [t0, T].
/// The pre-extremal system requires F(t0, p0, v0) = 1 within 1e-9.
Ray integrate_ray(const MetricField& m, double t0, const Vec2& p0, const Vec2& v0, double T,
                  const IntegratorOptions& opts = {});

struct Ignition {
  enum class Kind { point, polyline };
  Kind kind = Kind::point;
  Vec2 point = Vec2::Zero();
  std::vector<Vec2> polyline;
  Side side = Side::left;

  static Ignition at_point(const Vec2& p);
  static Ignition along(std::vector<Vec2> polyline, Side side);
};

enum class SDerivative { central2, central4, spectral };

/// A discretized net gamma(s, t): one ray per s-grid value, all on [t0, T].
class WfNet {
 public:
  Ignition ignition;
  double t0 = 0.0;
  double T = 0.0;
  std::vector<double> s;
  std::vector<Ray> rays;

  bool periodic() const { return ignition.kind == Ignition::Kind::point; }
  std::size_t size() const { return rays.size(); }
  double ds() const;

  Vec2 position(std::size_t i, double t) const { return rays[i].at(t).p; }
  Vec2 velocity(std::size_t i, double t) const { return rays[i].at(t).v; }

  /// d gamma / ds at ray i, by differences over the s-grid. Periodic nets wrap
  /// around; open nets use one-sided stencils at the ends. Spectral
  /// differentiation is only available for periodic nets.
  Vec2 d_ds(std::size_t i, double t, SDerivative scheme = SDerivative::central2) const;

  /// Same stencils applied to the ray velocities: d^2 gamma / ds dt.
  Vec2 d_ds_velocity(std::size_t i, double t, SDerivative scheme = SDerivative::central2) const;

  /// s-derivative weights at ray i: pairs (ray index, weight / ds).
  std::vector<std::pair<std::size_t, double>> s_weights(std::size_t i, SDerivative scheme) const;
};

/// Point ignition sweeps unit_vector(cos s, sin s) over s uniform on [0, 2pi);
/// polyline ignition resamples the polyline uniformly in arc length and starts
/// along the Hamilton normal on the chosen side. Rays run concurrently; the
/// result does not depend on scheduling.
WfNet build_net(const MetricField& m, const Ignition& ignition, double t0, double T, std::size_t m_rays,
                const IntegratorOptions& opts = {});

struct Frontal {
  double t = 0.0;
  std::vector<Vec2> points;
  bool closed = false;
};

Frontal frontal(const WfNet& net, double t1);

/// Uniform sample times in (t0, T], `count` of them.
std::vector<double> residual_times(const WfNet& net, std::size_t count);

struct ResidualField {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [ray][time]; NaN where flagged
  double max = 0.0;
  std::size_t flagged = 0;
};

/// |g_V(V, gamma_s)| / (|V|_g |gamma_s|_g) with V = gamma_t, at every ray and
/// sample time. Samples with coincident neighbouring rays are flagged.
ResidualField orthogonality_residual(const MetricField& m, const WfNet& net, std::size_t time_count = 64,
                                     SDerivative scheme = SDerivative::central2);

struct SpeedResidual {
  std::vector<std::vector<double>> values;  // [ray][stored sample]
  double max = 0.0;
};

/// |F(t, gamma, gamma_t) - 1| at every stored sample.
SpeedResidual unit_speed_residual(const MetricField& m, const WfNet& net);
double unit_speed_residual(const MetricField& m, const Ray& ray);

}  // namespace rheoflame
