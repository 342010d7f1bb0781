#pragma once

// Minimal SVG plotter for nets, frontals and droplets: y axis up, equal aspect.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rheoflame/spray.hpp"

namespace rheoflame::cli {

class SvgPlot {
 public:
  void frontal(const Frontal& f, const std::string& cls, const std::string& stroke, double width);
  void polyline(const std::vector<Vec2>& pts, const std::string& cls, const std::string& stroke, double width,
                const std::string& attrs = "");
  void marker(const Vec2& p, const std::string& fill);
  void metadata(std::string text) { metadata_ = std::move(text); }

  void write(std::ostream& os, double width_px = 800) const;

 private:
  void extend(const Vec2& p);

  std::vector<std::string> items_;
  std::vector<std::pair<Vec2, std::string>> markers_;
  std::string metadata_;
  double x_min_ = 1e300, x_max_ = -1e300, y_min_ = 1e300, y_max_ = -1e300;
};

/// Ray i sampled at `count` uniform times.
std::vector<Vec2> ray_path(const Ray& ray, std::size_t count = 65);

}  // namespace rheoflame::cli
