#include "rheoflame/huyghens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rheoflame {

namespace {

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  double cross = 0.0;  // side of p relative to the nearest segment
};

Nearest nearest_segment(const Vec2& p, const std::vector<Vec2>& pts, bool closed) {
  Nearest best;
  if (pts.size() == 1) {
    best.distance = (p - pts[0]).norm();
    return best;
  }
  const std::size_t segments = closed ? pts.size() : pts.size() - 1;
  for (std::size_t k = 0; k < segments; ++k) {
    const Vec2& a = pts[k];
    const Vec2& b = pts[(k + 1) % pts.size()];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double x = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    const double d = (p - (a + x * ab)).norm();
    if (d < best.distance) {
      best.distance = d;
      best.cross = ab.x() * (p - a).y() - ab.y() * (p - a).x();
    }
  }
  return best;
}

}  // namespace

Frontal droplet(const MetricField& m, const Vec2& p, double t1, double delta, std::size_t m_rays,
                const IntegratorOptions& opts) {
  if (!(delta > 0.0)) throw std::invalid_argument("droplet: delta must be positive");
  const WfNet net = build_net(m, Ignition::at_point(p), t1, t1 + delta, m_rays, opts);
  return frontal(net, t1 + delta);
}

std::vector<Droplet> make_droplets(const MetricField& m, const WfNet& net, double t1, double delta,
                                   std::size_t m_rays, std::size_t stride, const IntegratorOptions& opts) {
  if (stride == 0) throw std::invalid_argument("make_droplets: stride must be positive");
  const Frontal source = frontal(net, t1);
  std::vector<Droplet> out;
  for (std::size_t i = 0; i < source.points.size(); i += stride) {
    Droplet d;
    d.source = i;
    d.origin = source.points[i];
    d.frontal = droplet(m, d.origin, source.t, delta, m_rays, opts);
    out.push_back(std::move(d));
  }
  return out;
}

double polyline_distance(const Vec2& p, const std::vector<Vec2>& points, bool closed) {
  return nearest_segment(p, points, closed).distance;
}

int winding_number(const Vec2& p, const std::vector<Vec2>& pts) {
  int wn = 0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec2& a = pts[k];
    const Vec2& b = pts[(k + 1) % pts.size()];
    const double side = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
    if (a.y() <= p.y()) {
      if (b.y() > p.y() && side > 0) ++wn;
    } else if (b.y() <= p.y() && side < 0) {
      --wn;
    }
  }
  return wn;
}

EnvelopeReport envelope_check(const std::vector<Droplet>& droplets, const Frontal& target, Side ahead) {
  EnvelopeReport report;
  report.target_t = target.t;
  for (std::size_t a = 0; a < target.points.size(); ++a) {
    for (std::size_t b = a + 1; b < target.points.size(); ++b) {
      report.diameter = std::max(report.diameter, (target.points[a] - target.points[b]).norm());
    }
  }
  for (const Droplet& d : droplets) {
    double outermost = -std::numeric_limits<double>::infinity();
    for (const Vec2& p : d.frontal.points) {
      const Nearest n = nearest_segment(p, target.points, target.closed);
      bool outside;
      if (target.closed) {
        outside = winding_number(p, target.points) == 0;
      } else {
        outside = ahead == Side::left ? n.cross > 0 : n.cross < 0;
      }
      outermost = std::max(outermost, outside ? n.distance : -n.distance);
    }
    DropletReport r;
    r.source = d.source;
    r.origin = d.origin;
    r.gap = -outermost;
    r.excursion = std::max(0.0, outermost);
    report.max_abs_gap = std::max(report.max_abs_gap, std::abs(r.gap));
    report.max_excursion = std::max(report.max_excursion, r.excursion);
    report.droplets.push_back(r);
  }
  return report;
}

}  // namespace rheoflame
