#include "svg.hpp"

#include <algorithm>
#include <cstdio>

#include "rheoflame/format.hpp"

namespace rheoflame::cli {

namespace {

std::string coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5f", x);
  std::string s(buf);
  // Trim trailing zeros; keep "-0" out of the output.
  s.erase(s.find_last_not_of('0') + 1);
  if (s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::string path_data(const std::vector<Vec2>& pts, bool closed) {
  std::string d;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    d += k == 0 ? "M" : " L";
    d += coord(pts[k].x()) + "," + coord(-pts[k].y());
  }
  if (closed) d += " Z";
  return d;
}

}  // namespace

void SvgPlot::extend(const Vec2& p) {
  x_min_ = std::min(x_min_, p.x());
  x_max_ = std::max(x_max_, p.x());
  y_min_ = std::min(y_min_, p.y());
  y_max_ = std::max(y_max_, p.y());
}

void SvgPlot::frontal(const Frontal& f, const std::string& cls, const std::string& stroke, double width) {
  for (const Vec2& p : f.points) extend(p);
  items_.push_back("<path class=\"" + cls + "\" data-t=\"" + format_number(f.t) + "\" d=\"" +
                   path_data(f.points, f.closed) + "\" fill=\"none\" stroke=\"" + stroke +
                   "\" stroke-width=\"" + coord(width) + "\" vector-effect=\"non-scaling-stroke\"/>");
}

void SvgPlot::polyline(const std::vector<Vec2>& pts, const std::string& cls, const std::string& stroke,
                       double width, const std::string& attrs) {
  for (const Vec2& p : pts) extend(p);
  items_.push_back("<path class=\"" + cls + "\"" + (attrs.empty() ? "" : " " + attrs) + " d=\"" +
                   path_data(pts, false) + "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
                   coord(width) + "\" vector-effect=\"non-scaling-stroke\"/>");
}

void SvgPlot::marker(const Vec2& p, const std::string& fill) {
  extend(p);
  markers_.push_back({p, fill});
}

void SvgPlot::write(std::ostream& os, double width_px) const {
  double w = x_max_ - x_min_, h = y_max_ - y_min_;
  if (!(w > 0)) w = 1;
  if (!(h > 0)) h = 1;
  const double pad = 0.03 * std::max(w, h);
  const double vx = x_min_ - pad, vy = -y_max_ - pad, vw = w + 2 * pad, vh = h + 2 * pad;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width_px) << "\" height=\""
     << coord(width_px * vh / vw) << "\" viewBox=\"" << coord(vx) << ' ' << coord(vy) << ' ' << coord(vw) << ' '
     << coord(vh) << "\" preserveAspectRatio=\"xMidYMid meet\">\n";
  if (!metadata_.empty()) os << "<metadata>" << metadata_ << "</metadata>\n";
  os << "<rect x=\"" << coord(vx) << "\" y=\"" << coord(vy) << "\" width=\"" << coord(vw) << "\" height=\""
     << coord(vh) << "\" fill=\"white\"/>\n";
  for (const std::string& item : items_) os << item << '\n';
  const double r = 0.004 * std::max(vw, vh);
  for (const auto& [p, fill] : markers_) {
    os << "<circle class=\"marker\" cx=\"" << coord(p.x()) << "\" cy=\"" << coord(-p.y()) << "\" r=\"" << coord(r)
       << "\" fill=\"" << fill << "\"/>\n";
  }
  os << "</svg>\n";
}

std::vector<Vec2> ray_path(const Ray& ray, std::size_t count) {
  std::vector<Vec2> out;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = ray.t_begin() + (ray.t_end() - ray.t_begin()) * static_cast<double>(k) / (count - 1);
    out.push_back(ray.at(t).p);
  }
  return out;
}

}  // namespace rheoflame::cli
