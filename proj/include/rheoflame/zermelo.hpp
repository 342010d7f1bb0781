#pragma once

// Rheonomic Randers metrics built from elliptic Zermelo data (a, b, C, theta).

#include <functional>
#include <string>

#include "rheoflame/expr.hpp"
#include "rheoflame/metric.hpp"

namespace rheoflame {

/// A real function of (t, u, v): a parsed expression or a builtin closure.
class ScalarField3 {
 public:
  using Fn = std::function<double(double, double, double)>;

  ScalarField3();
  ScalarField3(Fn fn, std::string description);
  explicit ScalarField3(Expr expr);

  static ScalarField3 constant(double value);

  double operator()(double t, double u, double v) const { return fn_(t, u, v); }
  const std::string& description() const { return description_; }

 private:
  Fn fn_;
  std::string description_;
};

struct ZermeloData {
  ScalarField3 a;
  ScalarField3 b;
  ScalarField3 c1;
  ScalarField3 c2;
  ScalarField3 theta;  // clockwise rotation, radians
};

/// Coefficients of a ZermeloData at one (t, u, v).
struct ZermeloSample {
  double a;
  double b;
  double c1;
  double c2;
  double theta;
};

ZermeloSample sample(const ZermeloData& zd, double t, double u, double v);

/// Clockwise rotation by theta.
Mat2 clockwise_rotation(double theta);

/// Riemannian metric whose unit circle is the rotated ellipse with semi-axes a, b.
Mat2 h_matrix(double a, double b, double theta);

/// The Randers norm at one base point: F(V) = (sqrt(lambda h(V,V) + h(V,W)^2) - h(V,W)) / lambda
/// with drift W = R_theta C and lambda = 1 - h(W, W).
class RandersNorm {
 public:
  explicit RandersNorm(const ZermeloSample& s);

  double operator()(const Vec2& v) const;
  double lambda() const { return lambda_; }
  const Mat2& h() const { return h_; }
  const Vec2& drift() const { return drift_; }

 private:
  Mat2 h_;
  Vec2 drift_;
  double lambda_;
};

/// Throws MetricError when lambda <= 0 at (t, u, v).
double randers_f(const ZermeloData& zd, double t, double u, double v, double x, double y);

/// E(psi) = R_theta([a cos psi, b sin psi] + C).
Vec2 indicatrix_point(const ZermeloData& zd, double t, double u, double v, double psi);

struct ValidationSampling {
  int nu = 65;
  int nv = 65;
  int nt = 33;
};

struct ValidationReport {
  bool pass = false;
  double min_lambda = 0.0;
  double min_a = 0.0;
  double min_b = 0.0;
  double t = 0.0;  // location of the smallest lambda
  double u = 0.0;
  double v = 0.0;
  std::string error;  // set when a coefficient could not be evaluated
};

/// Samples the domain rectangle and time interval on a regular grid.
ValidationReport validate(const ZermeloData& zd, const Domain& domain, ValidationSampling sampling = {});

class ZermeloMetric final : public MetricField {
 public:
  ZermeloMetric(ZermeloData data, Domain domain = {});

  double f(double t, const Vec2& p, const Vec2& v) const override;
  void f_batch(double t, const Vec2& p, std::span<const Vec2> vs, std::span<double> out) const override;
  Domain domain() const override { return domain_; }

  const ZermeloData& data() const { return data_; }
  RandersNorm norm_at(double t, const Vec2& p) const;

 private:
  ZermeloData data_;
  Domain domain_;
};

}  // namespace rheoflame
