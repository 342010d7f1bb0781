#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "rheoflame/format.hpp"
#include "rheoflame/richards.hpp"
#include "svg.hpp"

namespace rheoflame::cli {

namespace {

using nlohmann::json;

constexpr std::size_t ray_stride = 8;
constexpr std::size_t droplet_rays = 128;
constexpr double envelope_gap = 0.005;
constexpr double envelope_excursion = 0.01;

std::ofstream open_file(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::string num(double x) { return std::isfinite(x) ? format_number(x) : std::string(); }

json scenario_summary(const Scenario& sc) {
  json j;
  j["t0"] = sc.t0;
  j["T"] = sc.T;
  j["rays"] = sc.rays;
  j["levels"] = sc.levels;
  j["abs_tol"] = sc.integrator.abs_tol;
  j["rel_tol"] = sc.integrator.rel_tol;
  switch (sc.kind) {
    case Scenario::MetricKind::euclidean: j["metric"] = "euclidean"; break;
    case Scenario::MetricKind::example84: j["metric"] = "example84"; break;
    case Scenario::MetricKind::zermelo:
      j["metric"] = {{"a", sc.zermelo.a}, {"b", sc.zermelo.b}, {"c1", sc.zermelo.c1},
                     {"c2", sc.zermelo.c2}, {"theta", sc.zermelo.theta}};
      break;
  }
  return j;
}

json checks_json(const std::vector<Check>& checks) {
  json arr = json::array();
  for (const Check& c : checks) {
    arr.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  return arr;
}

WfNet build(const Scenario& sc, const MetricField& m, double T) {
  return build_net(m, sc.ignition, sc.t0, T, sc.rays, sc.integrator);
}

/// Normalized Hamilton-orthogonality residual of one net sample.
double orthogonality_at(const MetricField& m, double t, const Vec2& p, const Vec2& v, const Vec2& gs) {
  if (gs.norm() < 1e-12 || v.norm() < 1e-12) return std::nan("");
  const Mat2 g = fundamental_tensor(m, t, p, v);
  return std::abs(v.dot(g * gs)) / std::sqrt(v.dot(g * v) * gs.dot(g * gs));
}

/// Largest distance from the closed-form rays of a spatially homogeneous
/// point net, or nullopt when the scenario has none.
std::optional<double> closed_form_error(const Scenario& sc, const WfNet& net) {
  if (sc.ignition.kind != Ignition::Kind::point || sc.kind == Scenario::MetricKind::zermelo) return std::nullopt;
  const Vec2 p0 = sc.ignition.point;
  double worst = 0.0;
  for (const Ray& ray : net.rays) {
    const double c = std::cos(ray.s), s = std::sin(ray.s);
    for (const RayState& st : ray.samples) {
      Vec2 exact;
      if (sc.kind == Scenario::MetricKind::euclidean) {
        exact = p0 + (st.t - sc.t0) * Vec2(c, s);
      } else {
        const double r = (1 + st.t) * (1 + st.t) - (1 + sc.t0) * (1 + sc.t0);
        exact = p0 + r * Vec2(c, s) / std::sqrt(1 + 3 * c * c);
      }
      worst = std::max(worst, (st.p - exact).norm());
    }
  }
  return worst;
}

double diameter(const Frontal& f) {
  double d = 0.0;
  for (std::size_t a = 0; a < f.points.size(); ++a) {
    for (std::size_t b = a + 1; b < f.points.size(); ++b) d = std::max(d, (f.points[a] - f.points[b]).norm());
  }
  return d;
}

/// Endpoint error against the quadrature solution, relative to the final
/// frontal's diameter; only for time-only Zermelo data and point ignition.
std::optional<double> richards_analytic_error(const Scenario& sc, const MetricField& m, const WfNet& net) {
  if (sc.kind != Scenario::MetricKind::zermelo || !sc.time_only() || sc.ignition.kind != Ignition::Kind::point) {
    return std::nullopt;
  }
  const ZermeloData zd = *sc.zermelo_data();
  const Vec2 p0 = sc.ignition.point;
  double worst = 0.0;
  for (const Ray& ray : net.rays) {
    const double s_tilde = normal_angle(m, sc.t0, p0, ray.samples.front().v);
    const Vec2 exact = richards_analytic(zd, s_tilde, sc.T, p0, sc.t0);
    worst = std::max(worst, (ray.samples.back().p - exact).norm());
  }
  return worst / diameter(frontal(net, sc.T));
}

FrozenCheckOptions frozen_options(const Scenario& sc) {
  FrozenCheckOptions o;
  const double span = sc.T - sc.t0;
  o.start_offset = sc.ignition.kind == Ignition::Kind::point ? 0.005 * span : 0.0;
  o.end_margin = 0.01 * span;
  o.integrator = sc.integrator;
  return o;
}

void net_layers(SvgPlot& svg, const WfNet& net, const std::vector<Frontal>& frontals) {
  for (std::size_t i = 0; i < net.size(); i += ray_stride) {
    svg.polyline(ray_path(net.rays[i]), "ray", "#888888", 0.6, "data-s=\"" + format_number(net.s[i]) + "\"");
  }
  for (const Frontal& f : frontals) svg.frontal(f, "frontal", "#c0392b", 1.4);
}

std::string levels_metadata(const std::vector<Frontal>& frontals, const std::string& kind) {
  json meta;
  meta["kind"] = kind;
  meta["levels"] = json::array();
  for (const Frontal& f : frontals) meta["levels"].push_back(f.t);
  return meta.dump();
}

}  // namespace

void apply(Scenario& sc, const Overrides& o) {
  if (o.out) sc.output = *o.out;
  if (o.rays) sc.rays = *o.rays;
  if (o.abs_tol) sc.integrator.abs_tol = *o.abs_tol;
  if (o.rel_tol) sc.integrator.rel_tol = *o.rel_tol;
  if (o.levels) sc.levels = *o.levels;
  validate_scenario(sc);
}

std::filesystem::path output_dir(const Scenario& sc) {
  std::filesystem::path dir(sc.output);
  std::filesystem::create_directories(dir);
  return dir;
}

SDerivative diagnostic_scheme(const WfNet& net) {
  return net.periodic() ? SDerivative::spectral : SDerivative::central4;
}

SimulateResult cmd_simulate(const Scenario& sc, std::ostream& log) {
  const auto m = sc.metric();
  const std::filesystem::path dir = output_dir(sc);
  SimulateResult result;
  result.net = build(sc, *m, sc.T);
  const WfNet& net = result.net;
  const SDerivative scheme = diagnostic_scheme(net);

  {
    std::ofstream os = open_file(dir / "net.csv");
    os << "s_index,s,t,u,v,udot,vdot,rho,f_residual,orth_residual\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
      for (const RayState& st : net.rays[i].samples) {
        const double fres = std::abs(m->f(st.t, st.p, st.v) - 1.0);
        const double orth = orthogonality_at(*m, st.t, st.p, st.v, net.d_ds(i, st.t, scheme));
        os << i << ',' << format_number(net.s[i]) << ',' << format_number(st.t) << ',' << format_number(st.p.x())
           << ',' << format_number(st.p.y()) << ',' << format_number(st.v.x()) << ',' << format_number(st.v.y())
           << ',' << format_number(st.rho) << ',' << format_number(fres) << ',' << num(orth) << '\n';
      }
    }
  }

  for (double t : sc.level_times()) result.frontals.push_back(frontal(net, t));
  {
    std::ofstream os = open_file(dir / "frontals.csv");
    os << "level,t,index,u,v\n";
    for (std::size_t l = 0; l < result.frontals.size(); ++l) {
      const Frontal& f = result.frontals[l];
      for (std::size_t k = 0; k < f.points.size(); ++k) {
        os << l + 1 << ',' << format_number(f.t) << ',' << k << ',' << format_number(f.points[k].x()) << ','
           << format_number(f.points[k].y()) << '\n';
      }
    }
  }
  {
    SvgPlot svg;
    svg.metadata(levels_metadata(result.frontals, "net"));
    net_layers(svg, net, result.frontals);
    std::ofstream os = open_file(dir / "net.svg");
    svg.write(os);
  }

  auto& d = result.diagnostics;
  const double speed = unit_speed_residual(*m, net).max;
  d.push_back({"unit_speed", speed, sc.thresholds.unit_speed, speed <= sc.thresholds.unit_speed});
  const double orth = orthogonality_residual(*m, net, 64, scheme).max;
  d.push_back({"orthogonality", orth, sc.thresholds.orthogonality, orth <= sc.thresholds.orthogonality});
  if (const auto zd = sc.zermelo_data()) {
    const double r = richards_residual(*zd, net, 64, scheme).max;
    d.push_back({"richards_residual", r, sc.thresholds.richards_residual, r <= sc.thresholds.richards_residual});
  }
  if (const auto e = richards_analytic_error(sc, *m, net)) {
    d.push_back({"richards_analytic", *e, sc.thresholds.richards_analytic, *e <= sc.thresholds.richards_analytic});
  }
  if (const auto e = closed_form_error(sc, net)) {
    d.push_back({"closed_form", *e, sc.thresholds.closed_form, *e <= sc.thresholds.closed_form});
  }
  log << "simulate: " << net.size() << " rays on [" << sc.t0 << ", " << sc.T << "], output " << dir.string() << '\n';
  for (const Check& c : d) log << "  max " << c.name << ' ' << c.value << '\n';
  return result;
}

FreezeResult cmd_freeze(const Scenario& sc, std::ostream& log) {
  const auto m = sc.metric();
  const std::filesystem::path dir = output_dir(sc);
  const WfNet net = build(sc, *m, sc.T);
  const auto tf = time_field(net);
  const FrozenMetric fm = freeze(m, tf);
  const FrozenCheckOptions opts = frozen_options(sc);

  FreezeResult result;
  result.report = verify_frozen(net, fm, opts);
  result.pass = result.report.max_deviation <= sc.thresholds.frozen;

  const Frontal outer = frontal(net, sc.T);
  Vec2 lo = outer.points.front(), hi = lo;
  for (const Vec2& p : outer.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  {
    std::ofstream os = open_file(dir / "timefield.csv");
    write_time_field_csv(os, *tf, lo.x(), hi.x(), lo.y(), hi.y(), 101, 101);
  }
  {
    json j;
    j["scenario"] = scenario_summary(sc);
    j["t_start"] = result.report.t_start;
    j["t_stop"] = result.report.t_stop;
    j["max_deviation"] = result.report.max_deviation;
    j["max_speed_drift"] = result.report.max_speed_drift;
    j["threshold"] = sc.thresholds.frozen;
    j["pass"] = result.pass;
    j["rays"] = json::array();
    for (std::size_t i = 0; i < net.size(); ++i) {
      j["rays"].push_back({{"index", i},
                           {"s", net.s[i]},
                           {"deviation", result.report.deviation[i]},
                           {"speed_drift", result.report.speed_drift[i]}});
    }
    std::ofstream os = open_file(dir / "frozen_report.json");
    os << j.dump(2) << '\n';
  }
  {
    std::vector<Frontal> frontals;
    for (double t : sc.level_times()) frontals.push_back(frontal(net, t));
    SvgPlot svg;
    svg.metadata(levels_metadata(frontals, "frozen overlay"));
    net_layers(svg, net, frontals);
    for (std::size_t i = 0; i < net.size(); i += ray_stride) {
      const RayState st = net.rays[i].at(result.report.t_start);
      const Ray geo = frozen_geodesic(fm, st.p, st.v, result.report.t_stop - result.report.t_start,
                                      result.report.t_start, opts.integrator);
      svg.polyline(ray_path(geo), "frozen-geodesic", "#2471a3", 1.0,
                   "stroke-dasharray=\"4 3\" data-s=\"" + format_number(net.s[i]) + "\"");
    }
    std::ofstream os = open_file(dir / "frozen_overlay.svg");
    svg.write(os);
  }
  log << "freeze: max deviation " << result.report.max_deviation << " on [" << result.report.t_start << ", "
      << result.report.t_stop << "], max speed drift " << result.report.max_speed_drift << '\n';
  return result;
}

DropletsResult cmd_droplets(const Scenario& sc, std::optional<std::size_t> level_index, std::optional<double> delta,
                            std::ostream& log) {
  const std::vector<double> levels = sc.level_times();
  const std::size_t index = level_index.value_or(levels.size() > 1 ? levels.size() - 1 : 1);
  if (index < 1 || index > levels.size()) {
    throw ScenarioError("--level-index: expected 1.." + std::to_string(levels.size()));
  }
  DropletsResult result;
  result.source_t = levels[index - 1];
  result.delta = delta.value_or((sc.T - sc.t0) / static_cast<double>(sc.levels));
  if (!(result.delta > 0)) throw ScenarioError("--delta: must be positive");
  const double target_t = result.source_t + result.delta;

  const auto m = sc.metric();
  const std::filesystem::path dir = output_dir(sc);
  const WfNet net = build(sc, *m, std::max(sc.T, target_t));
  const auto drops = make_droplets(*m, net, result.source_t, result.delta, droplet_rays, ray_stride, sc.integrator);
  const Frontal target = frontal(net, target_t);
  result.report = envelope_check(drops, target, sc.ignition.kind == Ignition::Kind::point ? Side::left : sc.ignition.side);
  result.pass = result.report.relative_gap() <= envelope_gap && result.report.relative_excursion() <= envelope_excursion;

  {
    std::ofstream os = open_file(dir / "droplets.csv");
    os << "droplet,source_index,index,t,u,v\n";
    for (std::size_t k = 0; k < drops.size(); ++k) {
      const Frontal& f = drops[k].frontal;
      for (std::size_t q = 0; q < f.points.size(); ++q) {
        os << k << ',' << drops[k].source << ',' << q << ',' << format_number(f.t) << ','
           << format_number(f.points[q].x()) << ',' << format_number(f.points[q].y()) << '\n';
      }
    }
  }
  {
    json j;
    j["scenario"] = scenario_summary(sc);
    j["source_t"] = result.source_t;
    j["delta"] = result.delta;
    j["target_t"] = target_t;
    j["droplet_rays"] = droplet_rays;
    j["diameter"] = result.report.diameter;
    j["max_abs_gap"] = result.report.max_abs_gap;
    j["max_excursion"] = result.report.max_excursion;
    j["relative_gap"] = result.report.relative_gap();
    j["relative_excursion"] = result.report.relative_excursion();
    j["thresholds"] = {{"relative_gap", envelope_gap}, {"relative_excursion", envelope_excursion}};
    j["pass"] = result.pass;
    j["droplets"] = json::array();
    for (const DropletReport& d : result.report.droplets) {
      j["droplets"].push_back({{"source_index", d.source},
                               {"origin", {d.origin.x(), d.origin.y()}},
                               {"gap", d.gap},
                               {"excursion", d.excursion}});
    }
    std::ofstream os = open_file(dir / "envelope_report.json");
    os << j.dump(2) << '\n';
  }
  {
    std::vector<Frontal> frontals;
    for (double t : levels) {
      if (t <= target_t) frontals.push_back(frontal(net, t));
    }
    SvgPlot svg;
    svg.metadata(levels_metadata(frontals, "droplets"));
    for (const Frontal& f : frontals) svg.frontal(f, "frontal", "#999999", 1.0);
    svg.frontal(frontal(net, result.source_t), "source", "#c0392b", 1.4);
    svg.frontal(target, "target", "#000000", 1.6);
    for (const Droplet& d : drops) {
      svg.frontal(d.frontal, "droplet", "#2471a3", 0.8);
      svg.marker(d.origin, "#c0392b");
    }
    std::ofstream os = open_file(dir / "droplets.svg");
    svg.write(os);
  }
  log << "droplets: " << drops.size() << " droplets from t=" << result.source_t << " with delta " << result.delta
      << ", relative gap " << result.report.relative_gap() << ", relative excursion "
      << result.report.relative_excursion() << (result.pass ? "" : " (above threshold)") << '\n';
  return result;
}

VerifyResult cmd_verify(const Scenario& sc, std::ostream& log) {
  const auto m = sc.metric();
  const std::filesystem::path dir = output_dir(sc);
  const WfNet net = build(sc, *m, sc.T);
  const SDerivative scheme = diagnostic_scheme(net);
  const Thresholds& th = sc.thresholds;
  VerifyResult result;
  auto add = [&](const std::string& name, double value, double threshold) {
    result.checks.push_back({name, value, threshold, value <= threshold});
  };

  add("unit_speed", unit_speed_residual(*m, net).max, th.unit_speed);
  add("orthogonality", orthogonality_residual(*m, net, 64, scheme).max, th.orthogonality);
  if (const auto zd = sc.zermelo_data()) add("richards_residual", richards_residual(*zd, net, 64, scheme).max, th.richards_residual);
  if (const auto e = richards_analytic_error(sc, *m, net)) add("richards_analytic", *e, th.richards_analytic);
  if (const auto e = closed_form_error(sc, net)) add("closed_form", *e, th.closed_form);
  {
    const FrozenMetric fm = freeze(m, time_field(net));
    add("frozen", verify_frozen(net, fm, frozen_options(sc)).max_deviation, th.frozen);
  }
  result.pass = std::all_of(result.checks.begin(), result.checks.end(), [](const Check& c) { return c.pass; });

  json j;
  j["scenario"] = scenario_summary(sc);
  j["s_derivative"] = scheme == SDerivative::spectral ? "spectral" : "central4";
  j["checks"] = checks_json(result.checks);
  j["pass"] = result.pass;
  std::ofstream os = open_file(dir / "verify.json");
  os << j.dump(2) << '\n';

  for (const Check& c : result.checks) {
    log << (c.pass ? "PASS " : "FAIL ") << c.name << ' ' << c.value << " (threshold " << c.threshold << ")\n";
  }
  return result;
}

}  // namespace rheoflame::cli
