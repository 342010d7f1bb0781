#pragma once

// Time-dependent Finsler metrics F(t, u, v, x, y) on a planar domain and the
// partial derivatives of F^2 that drive the ray equations.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rheoflame {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

class MetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a query leaves the metric's validity domain.
class DomainExitError : public MetricError {
 public:
  using MetricError::MetricError;
};

struct Domain {
  double u_min = -std::numeric_limits<double>::infinity();
  double u_max = std::numeric_limits<double>::infinity();
  double v_min = -std::numeric_limits<double>::infinity();
  double v_max = std::numeric_limits<double>::infinity();
  double t_min = -std::numeric_limits<double>::infinity();
  double t_max = std::numeric_limits<double>::infinity();

  bool contains(double t, const Vec2& p) const {
    return t >= t_min && t <= t_max && p.x() >= u_min && p.x() <= u_max && p.y() >= v_min &&
           p.y() <= v_max;
  }
};

/// Partial derivatives of F^2 at one (t, p, V). Index k of a spatial slot
/// refers to u^k, index l of a velocity slot to y^l.
struct JetF2 {
  double value = 0.0;
  double dt = 0.0;
  Vec2 du = Vec2::Zero();
  Vec2 dy = Vec2::Zero();
  Mat2 dydy = Mat2::Zero();
  Mat2 dxdy = Mat2::Zero();  // (k, l) = d^2/du^k dy^l
  Vec2 dtdy = Vec2::Zero();
};

/// A Finsler metric on the plane, possibly time-dependent. Implementations are
/// immutable and all queries are safe to issue concurrently.
class MetricField {
 public:
  virtual ~MetricField() = default;

  virtual double f(double t, const Vec2& p, const Vec2& v) const = 0;

  /// F at several velocities over one base point. Metrics whose coefficients
  /// are expensive override this to evaluate them once.
  virtual void f_batch(double t, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const;

  /// Closed-form jet where one exists; finite differences are used otherwise.
  virtual std::optional<JetF2> analytic_jet(double t, const Vec2& p, const Vec2& v) const;

  virtual Domain domain() const { return {}; }
};

enum class JetMode { automatic, finite_difference };

/// Finite-difference jet of F^2 with central stencils of the given order (2 or 4).
JetF2 fd_jet(const MetricField& m, double t, const Vec2& p, const Vec2& v, int order = 4);

/// Analytic jet when the metric provides one, 4th-order finite differences otherwise.
/// Throws DomainExitError outside the metric's domain and MetricError for |V| < 1e-12.
JetF2 jet(const MetricField& m, double t, const Vec2& p, const Vec2& v,
          JetMode mode = JetMode::automatic);

double f_squared(const MetricField& m, double t, const Vec2& p, const Vec2& v);

/// g_ij = 1/2 [F^2]_{y^i y^j}; throws MetricError unless positive definite.
Mat2 fundamental_tensor(const MetricField& m, double t, const Vec2& p, const Vec2& v);
Mat2 fundamental_tensor(const JetF2& jet);

/// Inverse of a symmetric positive definite 2x2 tensor; throws when the
/// condition number exceeds 1e12.
Mat2 inverse_tensor(const Mat2& g);

/// Everything the spray equations need at one (t, p, V), computed from a single jet.
struct SprayTerms {
  JetF2 jet;
  Mat2 g;
  Mat2 g_inv;
  Vec2 spray;  // G^i
  Vec2 drift;  // N0^i
};

SprayTerms spray_terms(const MetricField& m, double t, const Vec2& p, const Vec2& v,
                       JetMode mode = JetMode::automatic);
SprayTerms spray_terms(const JetF2& jet, const Vec2& v);

/// G^i = 1/4 g^il ([F^2]_{u^k y^l} y^k - [F^2]_{u^l}).
Vec2 spray_g(const MetricField& m, double t, const Vec2& p, const Vec2& v);

/// N0^i = 1/2 g^il [F^2]_{t y^l}.
Vec2 time_drift_n0(const MetricField& m, double t, const Vec2& p, const Vec2& v);

/// g_V(U, W).
double f_inner(const MetricField& m, double t, const Vec2& p, const Vec2& v, const Vec2& a,
               const Vec2& b);

/// d / F(t, p, d): the point of the indicatrix in direction d.
Vec2 unit_vector(const MetricField& m, double t, const Vec2& p, const Vec2& d);

enum class Side { left, right };

/// The F-unit vector V with g_V(V, T) = 0 lying on the requested side of T.
Vec2 hamilton_normal(const MetricField& m, double t, const Vec2& p, const Vec2& tangent, Side side);

// Builtin metrics with closed-form jets.

class EuclideanMetric final : public MetricField {
 public:
  double f(double t, const Vec2& p, const Vec2& v) const override;
  std::optional<JetF2> analytic_jet(double t, const Vec2& p, const Vec2& v) const override;
};

/// F = sqrt(x^2 + (y/2)^2) / (1 + t): a spatially constant indicatrix with
/// semi-axes (1 + t, 2 + 2t). Valid for t > -1.
class GrowingEllipseMetric final : public MetricField {
 public:
  double f(double t, const Vec2& p, const Vec2& v) const override;
  std::optional<JetF2> analytic_jet(double t, const Vec2& p, const Vec2& v) const override;
  Domain domain() const override;
};

/// A metric given only by its value; jets come from finite differences.
class FunctionMetric final : public MetricField {
 public:
  using Fn = std::function<double(double t, const Vec2& p, const Vec2& v)>;
  explicit FunctionMetric(Fn fn, Domain domain = {}) : fn_(std::move(fn)), domain_(domain) {}

  double f(double t, const Vec2& p, const Vec2& v) const override { return fn_(t, p, v); }
  Domain domain() const override { return domain_; }

 private:
  Fn fn_;
  Domain domain_;
};

}  // namespace rheoflame
