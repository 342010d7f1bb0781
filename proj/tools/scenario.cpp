#include "scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

namespace rheoflame::cli {

namespace {

using nlohmann::json;

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ScenarioError(where + ": unknown field \"" + key + "\"");
    }
  }
}

const json& required(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ScenarioError(where + ": missing field \"" + key + "\"");
  return obj.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ScenarioError(where + ": expected a number");
  return j.get<double>();
}

std::size_t count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() < 0) throw ScenarioError(where + ": expected a non-negative integer");
  return j.get<std::size_t>();
}

Vec2 point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(where + ": expected [u, v]");
  return {number(j[0], where), number(j[1], where)};
}

Expr expression(const json& j, const std::string& where, std::string& text) {
  if (j.is_number()) {
    text = j.dump();
  } else if (j.is_string()) {
    text = j.get<std::string>();
  } else {
    throw ScenarioError(where + ": expected an expression string");
  }
  try {
    return parse(text);
  } catch (const ParseError& e) {
    throw ScenarioError(where + ": " + e.what());
  }
}

bool mentions_space(const Expr& e) {
  return std::any_of(e.nodes().begin(), e.nodes().end(), [](const ExprNode& n) {
    return n.kind == NodeKind::variable && n.variable != Variable::t;
  });
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  only_fields(doc, "scenario",
              {"metric", "ignition", "t0", "T", "rays", "levels", "integrator", "output", "domain", "thresholds"});
  Scenario sc;

  const json& metric = required(doc, "scenario", "metric");
  if (!metric.is_object()) throw ScenarioError("metric: expected an object");
  const json& kind = required(metric, "metric", "kind");
  if (kind == "zermelo") {
    only_fields(metric, "metric", {"kind", "a", "b", "c1", "c2", "theta"});
    ZermeloSpec& z = sc.zermelo;
    z.a_expr = expression(required(metric, "metric", "a"), "metric.a", z.a);
    z.b_expr = expression(required(metric, "metric", "b"), "metric.b", z.b);
    z.c1_expr = expression(required(metric, "metric", "c1"), "metric.c1", z.c1);
    z.c2_expr = expression(required(metric, "metric", "c2"), "metric.c2", z.c2);
    z.theta_expr = expression(required(metric, "metric", "theta"), "metric.theta", z.theta);
  } else if (kind == "builtin") {
    only_fields(metric, "metric", {"kind", "name"});
    const json& name = required(metric, "metric", "name");
    if (name == "euclidean") {
      sc.kind = Scenario::MetricKind::euclidean;
    } else if (name == "example84") {
      sc.kind = Scenario::MetricKind::example84;
    } else {
      throw ScenarioError("metric.name: expected \"euclidean\" or \"example84\"");
    }
  } else {
    throw ScenarioError("metric.kind: expected \"zermelo\" or \"builtin\"");
  }

  const json& ign = required(doc, "scenario", "ignition");
  if (!ign.is_object()) throw ScenarioError("ignition: expected an object");
  const json& type = required(ign, "ignition", "type");
  if (type == "point") {
    only_fields(ign, "ignition", {"type", "p"});
    sc.ignition = Ignition::at_point(point(required(ign, "ignition", "p"), "ignition.p"));
  } else if (type == "polyline") {
    only_fields(ign, "ignition", {"type", "points", "side"});
    const json& pts = required(ign, "ignition", "points");
    if (!pts.is_array() || pts.size() < 2) throw ScenarioError("ignition.points: expected at least two points");
    std::vector<Vec2> polyline;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      polyline.push_back(point(pts[k], "ignition.points[" + std::to_string(k) + "]"));
    }
    const json& side = required(ign, "ignition", "side");
    if (side != "left" && side != "right") throw ScenarioError("ignition.side: expected \"left\" or \"right\"");
    sc.ignition = Ignition::along(std::move(polyline), side == "left" ? Side::left : Side::right);
  } else {
    throw ScenarioError("ignition.type: expected \"point\" or \"polyline\"");
  }

  sc.t0 = number(required(doc, "scenario", "t0"), "t0");
  sc.T = number(required(doc, "scenario", "T"), "T");
  if (doc.contains("rays")) sc.rays = count(doc["rays"], "rays");
  if (doc.contains("levels")) sc.levels = count(doc["levels"], "levels");
  if (doc.contains("integrator")) {
    const json& integ = doc["integrator"];
    only_fields(integ, "integrator", {"abs_tol", "rel_tol"});
    if (integ.contains("abs_tol")) sc.integrator.abs_tol = number(integ["abs_tol"], "integrator.abs_tol");
    if (integ.contains("rel_tol")) sc.integrator.rel_tol = number(integ["rel_tol"], "integrator.rel_tol");
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ScenarioError("output: expected a directory name");
    sc.output = doc["output"].get<std::string>();
  }
  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    only_fields(d, "domain", {"u_min", "u_max", "v_min", "v_max"});
    Domain dom;
    dom.u_min = number(required(d, "domain", "u_min"), "domain.u_min");
    dom.u_max = number(required(d, "domain", "u_max"), "domain.u_max");
    dom.v_min = number(required(d, "domain", "v_min"), "domain.v_min");
    dom.v_max = number(required(d, "domain", "v_max"), "domain.v_max");
    sc.domain = dom;
  }
  if (doc.contains("thresholds")) {
    const json& th = doc["thresholds"];
    only_fields(th, "thresholds",
                {"unit_speed", "orthogonality", "richards_residual", "richards_analytic", "closed_form", "frozen"});
    Thresholds& t = sc.thresholds;
    if (th.contains("unit_speed")) t.unit_speed = number(th["unit_speed"], "thresholds.unit_speed");
    if (th.contains("orthogonality")) t.orthogonality = number(th["orthogonality"], "thresholds.orthogonality");
    if (th.contains("richards_residual"))
      t.richards_residual = number(th["richards_residual"], "thresholds.richards_residual");
    if (th.contains("richards_analytic"))
      t.richards_analytic = number(th["richards_analytic"], "thresholds.richards_analytic");
    if (th.contains("closed_form")) t.closed_form = number(th["closed_form"], "thresholds.closed_form");
    if (th.contains("frozen")) t.frozen = number(th["frozen"], "thresholds.frozen");
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  Scenario sc = parse_scenario(text.str());
  validate_scenario(sc);
  return sc;
}

Domain Scenario::region() const {
  if (domain) {
    Domain d = *domain;
    d.t_min = t0;
    d.t_max = T;
    return d;
  }
  // Largest Euclidean speed available at the ignition, integrated over time.
  double reach = 0.0;
  const std::vector<Vec2> seeds = ignition.kind == Ignition::Kind::point ? std::vector<Vec2>{ignition.point}
                                                                          : ignition.polyline;
  constexpr int steps = 64;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + (T - t0) * (k + 0.5) / steps;
    double speed = 1.0;
    if (kind == MetricKind::example84) {
      speed = 2.0 * (1.0 + t);
    } else if (kind == MetricKind::zermelo) {
      speed = 0.0;
      for (const Vec2& p : seeds) {
        const double a = std::abs(zermelo.a_expr.eval(t, p.x(), p.y()));
        const double b = std::abs(zermelo.b_expr.eval(t, p.x(), p.y()));
        const double c = std::hypot(zermelo.c1_expr.eval(t, p.x(), p.y()), zermelo.c2_expr.eval(t, p.x(), p.y()));
        speed = std::max(speed, std::max(a, b) + c);
      }
    }
    reach += speed * (T - t0) / steps;
  }
  reach = 1.25 * reach + 1.0;
  Domain d;
  d.u_min = d.v_min = std::numeric_limits<double>::infinity();
  d.u_max = d.v_max = -std::numeric_limits<double>::infinity();
  for (const Vec2& p : seeds) {
    d.u_min = std::min(d.u_min, p.x() - reach);
    d.u_max = std::max(d.u_max, p.x() + reach);
    d.v_min = std::min(d.v_min, p.y() - reach);
    d.v_max = std::max(d.v_max, p.y() + reach);
  }
  d.t_min = t0;
  d.t_max = T;
  return d;
}

std::optional<ZermeloData> Scenario::zermelo_data() const {
  if (kind != MetricKind::zermelo) return std::nullopt;
  return ZermeloData{ScalarField3(zermelo.a_expr), ScalarField3(zermelo.b_expr), ScalarField3(zermelo.c1_expr),
                     ScalarField3(zermelo.c2_expr), ScalarField3(zermelo.theta_expr)};
}

std::shared_ptr<const MetricField> Scenario::metric() const {
  switch (kind) {
    case MetricKind::euclidean:
      return std::make_shared<EuclideanMetric>();
    case MetricKind::example84:
      return std::make_shared<GrowingEllipseMetric>();
    case MetricKind::zermelo:
      break;
  }
  return std::make_shared<ZermeloMetric>(*zermelo_data(), domain.value_or(Domain{}));
}

bool Scenario::time_only() const {
  if (kind != MetricKind::zermelo) return kind == MetricKind::euclidean;
  for (const Expr* e : {&zermelo.a_expr, &zermelo.b_expr, &zermelo.c1_expr, &zermelo.c2_expr, &zermelo.theta_expr}) {
    if (mentions_space(*e)) return false;
  }
  return true;
}

std::vector<double> Scenario::level_times() const {
  std::vector<double> out;
  for (std::size_t i = 1; i <= levels; ++i) out.push_back(t0 + (T - t0) * static_cast<double>(i) / levels);
  return out;
}

void validate_scenario(const Scenario& sc) {
  if (!std::isfinite(sc.t0) || !std::isfinite(sc.T)) throw ScenarioError("t0, T: must be finite");
  if (!(sc.T > sc.t0)) throw ScenarioError("T: must exceed t0");
  if (sc.rays < 8) throw ScenarioError("rays: at least 8 required");
  if (sc.levels < 1) throw ScenarioError("levels: at least 1 required");
  if (!(sc.integrator.abs_tol > 0) || !(sc.integrator.rel_tol > 0)) {
    throw ScenarioError("integrator: tolerances must be positive");
  }
  if (sc.domain) {
    const Domain& d = *sc.domain;
    if (!(d.u_min < d.u_max) || !(d.v_min < d.v_max)) throw ScenarioError("domain: empty rectangle");
  }
  if (sc.kind == Scenario::MetricKind::example84 && sc.t0 <= -1.0) {
    throw ScenarioError("t0: the example84 metric needs t0 > -1");
  }
  if (sc.kind != Scenario::MetricKind::zermelo) return;
  const ValidationReport r = validate(*sc.zermelo_data(), sc.region());
  if (!r.error.empty()) throw ScenarioError("metric: " + r.error);
  if (!r.pass) {
    std::ostringstream msg;
    msg << "metric: Zermelo data invalid at (t, u, v) = (" << r.t << ", " << r.u << ", " << r.v
        << "): min a " << r.min_a << ", min b " << r.min_b << ", min lambda " << r.min_lambda;
    throw ScenarioError(msg.str());
  }
}

}  // namespace rheoflame::cli
