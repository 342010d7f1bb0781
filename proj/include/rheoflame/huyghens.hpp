#pragma once

// Huyghens droplets and an empirical check that they envelope a later frontal.

#include <cstddef>
#include <vector>

#include "rheoflame/spray.hpp"

namespace rheoflame {

/// The frontal at t1 + delta of a point-ignited net started from (p, t1).
Frontal droplet(const MetricField& m, const Vec2& p, double t1, double delta, std::size_t m_rays,
                const IntegratorOptions& opts = {});

struct Droplet {
  std::size_t source = 0;  // ray index on the source frontal
  Vec2 origin = Vec2::Zero();
  Frontal frontal;
};

/// Droplets from every `stride`-th ray of the net's frontal at t1.
std::vector<Droplet> make_droplets(const MetricField& m, const WfNet& net, double t1, double delta,
                                   std::size_t m_rays, std::size_t stride = 8, const IntegratorOptions& opts = {});

/// Euclidean distance from p to a polyline, by projection onto each segment.
double polyline_distance(const Vec2& p, const std::vector<Vec2>& points, bool closed);

/// Winding number of a closed polyline around p.
int winding_number(const Vec2& p, const std::vector<Vec2>& points);

struct DropletReport {
  std::size_t source = 0;
  Vec2 origin = Vec2::Zero();
  // Signed distance from the target to the droplet's outermost point:
  // positive while the droplet stays behind the target, negative once it
  // crosses. A perfect envelope gives 0.
  double gap = 0.0;
  double excursion = 0.0;  // max(0, -gap)
};

struct EnvelopeReport {
  double target_t = 0.0;
  double diameter = 0.0;
  std::vector<DropletReport> droplets;
  double max_abs_gap = 0.0;
  double max_excursion = 0.0;

  double relative_gap() const { return diameter > 0 ? max_abs_gap / diameter : 0.0; }
  double relative_excursion() const { return diameter > 0 ? max_excursion / diameter : 0.0; }
};

/// Compares droplets against the target frontal. Closed targets decide
/// inside from outside by winding number; open targets advance towards
/// `ahead` relative to their point order.
EnvelopeReport envelope_check(const std::vector<Droplet>& droplets, const Frontal& target,
                              Side ahead = Side::left);

}  // namespace rheoflame
