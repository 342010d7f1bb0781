#pragma once

// Independent oracles for Zermelo nets: the Hamilton-orthogonality PDE that
// prescribes the ray velocity from the frontal tangent, and the quadrature
// solution for coefficients that depend on time only.

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "rheoflame/spray.hpp"
#include "rheoflame/zermelo.hpp"

namespace rheoflame {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RichardsVelocity {
  double udot_t = 0.0;
  double vdot_t = 0.0;

  Vec2 vec() const { return {udot_t, vdot_t}; }
};

/// Ray velocity for a frontal with tangent (us, vs) at (t, u, v). The frontal
/// advances to the right of its tangent, so counter-clockwise point nets move
/// outward.
RichardsVelocity richards_rhs(const ZermeloData& zd, double t, double u, double v, double us, double vs);

/// The point reached at time t by the ray whose frontal normal has Euclidean
/// angle s, started from p0 at t0. Coefficients must not depend on (u, v).
Vec2 richards_analytic(const ZermeloData& zd, double s, double t, const Vec2& p0, double t0 = 0.0);

struct RichardsResidual {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // [ray][time]; NaN on skipped rays
  double max = 0.0;
};

/// |gamma_t - richards_rhs(gamma_s)| in the Euclidean norm over the net's
/// residual sample times. Open nets skip their two end rays.
RichardsResidual richards_residual(const ZermeloData& zd, const WfNet& net, std::size_t time_count = 64,
                                   SDerivative scheme = SDerivative::central2);

/// Initial direction angle s of the growing-ellipse metric's ray whose frontal
/// normal has angle s_tilde. Continuous and increasing on [0, 2pi).
double s_reparametrization(double s_tilde);

/// The same map for any time-only Zermelo data: the direction angle of the
/// initial ray velocity for frontal normal angle s_tilde at (t0, p0).
double s_reparametrization(const ZermeloData& zd, double t0, const Vec2& p0, double s_tilde);

/// Inverse map: the frontal normal angle of a ray started with velocity v0,
/// i.e. the direction of [F^2]_y at v0. Result in [0, 2pi).
double normal_angle(const MetricField& m, double t0, const Vec2& p0, const Vec2& v0);

struct TimeOnlyReport {
  bool pass = false;
  double max_spatial_derivative = 0.0;
  double t = 0.0;  // location of the largest derivative
  double u = 0.0;
  double v = 0.0;
};

/// Spot check that no coefficient varies in space: central differences of
/// a, b, c1, c2, theta at random samples of the domain must not exceed 1e-12.
TimeOnlyReport check_time_only(const ZermeloData& zd, const Domain& domain, std::size_t samples = 200,
                               std::uint32_t seed = 1);

}  // namespace rheoflame
