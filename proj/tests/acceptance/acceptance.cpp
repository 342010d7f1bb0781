// Acceptance run: one PASS/FAIL line per criterion, INFO lines for context.
// Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>
#include <string>

#include "../golden_expressions.hpp"
#include "commands.hpp"
#include "rheoflame/frozen.hpp"
#include "rheoflame/huyghens.hpp"
#include "rheoflame/richards.hpp"

using namespace rheoflame;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void info(const std::string& text) {
  std::printf("INFO %s\n", text.c_str());
  std::fflush(stdout);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Vec2 ellipse_ray(double s, double t0, double t) {
  const double c = std::cos(s);
  return ((1 + t) * (1 + t) - (1 + t0) * (1 + t0)) * Vec2(c, std::sin(s)) / std::sqrt(1 + 3 * c * c);
}

double ellipse_time(const Vec2& p, double t0) {
  return -1.0 + std::sqrt((1 + t0) * (1 + t0) + std::sqrt(4 * p.x() * p.x() + p.y() * p.y()));
}

double ellipse_frozen(const Vec2& p, const Vec2& v, double t0) {
  return std::sqrt(4 * v.x() * v.x() + v.y() * v.y()) /
         (2 * std::sqrt((1 + t0) * (1 + t0) + std::sqrt(4 * p.x() * p.x() + p.y() * p.y())));
}

ZermeloData zermelo_data(const char* theta) {
  return {ScalarField3(parse("1")), ScalarField3(parse("2+t/5")), ScalarField3(parse("0")),
          ScalarField3(parse("0")), ScalarField3(parse(theta))};
}

constexpr const char* kTheta1 = "((t+5)+u-v)/20";
constexpr const char* kTheta2 = "(t+5)/20";

const auto kEllipse = std::make_shared<GrowingEllipseMetric>();

WfNet ellipse_net(double t0, double T, std::size_t n) {
  return build_net(*kEllipse, Ignition::at_point(Vec2::Zero()), t0, T, n);
}

void criteria_1_to_4() {
  const auto start = Clock::now();
  const WfNet net = ellipse_net(0.0, 2.0, 32);
  const double elapsed = seconds_since(start);
  double worst = 0.0;
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (const RayState& st : net.rays[i].samples) worst = std::max(worst, (st.p - ellipse_ray(net.s[i], 0, st.t)).norm());
  }
  report(1, worst <= 1e-6 && elapsed < 5.0,
         fmt("max position error %.3e (<= 1e-6), runtime %.3f s (< 5 s)", worst, elapsed));

  const double speed = unit_speed_residual(*kEllipse, net).max;
  IntegratorOptions free;
  free.equation = RayEquation::energy_extremal;
  free.project = false;
  double control = 0.0;
  for (double s : net.s) {
    const Ray r = integrate_ray(*kEllipse, 0.0, Vec2::Zero(), unit_vector(*kEllipse, 0, Vec2::Zero(), Vec2(std::cos(s), std::sin(s))), 2.0, free);
    for (const RayState& st : r.samples) control = std::max(control, std::abs(kEllipse->f(st.t, st.p, st.v) - (1 + st.t)));
  }
  report(2, speed <= 1e-7 && control <= 1e-6,
         fmt("max |F-1| %.3e (<= 1e-7); rho-dropped |F-(1+t)| %.3e (<= 1e-6)", speed, control));

  double radial = 0.0;
  const double factor = 2.0 / 3.0 * 8 + 2 * 4 + 2 * 2;
  for (double s : net.s) {
    const double c = std::cos(s);
    const Ray r = integrate_ray(*kEllipse, 0.0, Vec2::Zero(), unit_vector(*kEllipse, 0, Vec2::Zero(), Vec2(c, std::sin(s))), 2.0, free);
    const Vec2 expected = factor * Vec2(c, std::sin(s)) / std::sqrt(1 + 3 * c * c);
    radial = std::max(radial, (r.samples.back().p - expected).norm());
  }
  report(3, radial <= 1e-6, fmt("energy-extremal endpoints vs radial factor 2t^3/3+2t^2+2t at t=2: %.3e (<= 1e-6)", radial));

  const double r32 = orthogonality_residual(*kEllipse, net, 64, SDerivative::central2).max;
  const double r64 = orthogonality_residual(*kEllipse, ellipse_net(0.0, 2.0, 64), 64, SDerivative::central2).max;
  const double r128 = orthogonality_residual(*kEllipse, ellipse_net(0.0, 2.0, 128), 64, SDerivative::central2).max;
  const double order1 = std::log2(r32 / r64), order2 = std::log2(r64 / r128);
  info(fmt("orthogonality, central differences: 32 rays %.3e, 64 rays %.3e, 128 rays %.3e", r32, r64, r128));
  info(fmt("orthogonality, spectral s-derivative on the 32-ray net: %.3e",
           orthogonality_residual(*kEllipse, net, 64, SDerivative::spectral).max));
  report(4, r32 <= 1e-4 && std::abs(order1 - 2) < 0.2 && std::abs(order2 - 2) < 0.2,
         fmt("residual %.3e on the 32-ray net (<= 1e-4); observed orders %.2f, %.2f (2)", r32, order1, order2));
}

void criterion_5() {
  const auto start = Clock::now();
  const ZermeloData zd = zermelo_data(kTheta2);
  const ZermeloMetric m(zd);
  double worst = 0.0;
  for (int k = 0; k < 64; ++k) {
    const double s_tilde = 2 * std::numbers::pi * k / 64;
    const double s = s_reparametrization(zd, 0.0, Vec2::Zero(), s_tilde);
    const Vec2 v0 = unit_vector(m, 0.0, Vec2::Zero(), Vec2(std::cos(s), std::sin(s)));
    const Ray ray = integrate_ray(m, 0.0, Vec2::Zero(), v0, 16.0);
    const Vec2 exact = richards_analytic(zd, s_tilde, 16.0, Vec2::Zero());
    worst = std::max(worst, (ray.samples.back().p - exact).norm() / exact.norm());
  }
  const double elapsed = seconds_since(start);
  report(5, worst <= 1e-4 && elapsed < 30.0,
         fmt("max relative endpoint error %.3e over 64 rays (<= 1e-4), runtime %.2f s (< 30 s)", worst, elapsed));
}

void criterion_6() {
  bool pass = true;
  std::string detail;
  for (const auto& [name, theta] : {std::pair{"zermelo1", kTheta1}, std::pair{"zermelo2", kTheta2}}) {
    const ZermeloData zd = zermelo_data(theta);
    const ZermeloMetric m(zd);
    const WfNet coarse = build_net(m, Ignition::at_point(Vec2::Zero()), 0.0, 16.0, 256);
    const WfNet fine = build_net(m, Ignition::at_point(Vec2::Zero()), 0.0, 16.0, 512);
    const double a = richards_residual(zd, coarse, 64, SDerivative::central2).max;
    const double b = richards_residual(zd, fine, 64, SDerivative::central2).max;
    const double ratio = a / b;
    info(fmt("%s Richards residual, spectral s-derivative: 256 rays %.3e, 512 rays %.3e", name,
             richards_residual(zd, coarse, 64, SDerivative::spectral).max,
             richards_residual(zd, fine, 64, SDerivative::spectral).max));
    pass = pass && a <= 1e-3 && std::abs(ratio - 4) <= 0.4;
    detail += fmt("%s %.3e at 256 rays, ratio %.2f under halving; ", name, a, ratio);
  }
  report(6, pass, detail + "required <= 1e-3 and ratio 4");
}

std::vector<Vec2> grid(double um, double vm, int n) {
  std::vector<Vec2> out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) out.emplace_back(-um + 2 * um * a / (n - 1), -vm + 2 * vm * b / (n - 1));
  }
  return out;
}

void criterion_7() {
  double field = 0.0, values = 0.0;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (double t0 : {0.0, 1.0}) {
    const WfNet net = ellipse_net(t0, t0 + 2.0, 128);
    const auto tf = time_field(net);
    const double reach = t0 == 0.0 ? 2.5 : 4.0;
    for (const Vec2& p : grid(reach, 2 * reach, 10)) field = std::max(field, std::abs((*tf)(p) - ellipse_time(p, t0)));
    const FrozenMetric fm = freeze(kEllipse, tf);
    for (int k = 0; k < 100; ++k) {
      const Vec2 p(unit(rng) * reach * 0.6, unit(rng) * reach * 1.2);
      const Vec2 v(unit(rng), unit(rng));
      const double expected = ellipse_frozen(p, v, t0);
      values = std::max(values, std::abs(fm.f(0, p, v) - expected) / std::max(1.0, expected));
    }
  }
  report(7, field <= 1e-6 && values <= 1e-6,
         fmt("time field error %.3e on 2 x 100 grid points (<= 1e-6); frozen metric error %.3e (<= 1e-6)", field, values));
}

void criterion_8() {
  FrozenCheckOptions check;
  check.start_offset = 0.01;
  check.end_margin = 0.02;
  const WfNet net = ellipse_net(0.0, 2.0, 32);
  const double exact = verify_frozen(net, freeze(kEllipse, growing_ellipse_time_field(0.0)), check).max_deviation;
  std::vector<double> numeric;
  for (std::size_t n : {32u, 64u, 128u}) {
    const WfNet fine = ellipse_net(0.0, 2.0, n);
    numeric.push_back(verify_frozen(fine, freeze(kEllipse, time_field(fine)), check).max_deviation);
  }
  const bool converging = numeric[1] < numeric[0] && numeric[2] < numeric[1];
  report(8, exact <= 1e-6 && numeric[1] <= 1e-3 && converging,
         fmt("analytic field %.3e (<= 1e-6); numeric field 64 rays %.3e (<= 1e-3); 32/64/128 rays %.2e, %.2e, %.2e",
             exact, numeric[1], numeric[0], numeric[1], numeric[2]));
}

void criterion_9() {
  const FrozenMetric fm = freeze(kEllipse, growing_ellipse_time_field(0.0));
  const double analytic = std::abs(spray_g(fm, 0, Vec2(1, 0), Vec2(1, 0)).x() + 1.0 / 6.0);
  const double fd =
      std::abs(spray_terms(fm, 0, Vec2(1, 0), Vec2(1, 0), JetMode::finite_difference).spray.x() + 1.0 / 6.0);
  report(9, analytic <= 1e-8 && fd <= 1e-5,
         fmt("|G^1 + 1/6| analytic jets %.3e (<= 1e-8), finite-difference jets %.3e (<= 1e-5)", analytic, fd));
}

void criterion_10() {
  ZermeloData steady{ScalarField3::constant(1), ScalarField3::constant(2), ScalarField3::constant(0.2),
                     ScalarField3::constant(0), ScalarField3(parse("(u-v)/20 + 0.25"))};
  const ZermeloMetric m(steady);
  std::vector<double> study;
  for (std::size_t n : {32u, 64u, 128u, 256u}) {
    const WfNet net = build_net(m, Ignition::at_point(Vec2::Zero()), 0.0, 4.0, n);
    const EnvelopeReport r = envelope_check(make_droplets(m, net, 3.2, 0.8, n, n / 8), frontal(net, 4.0));
    study.push_back(std::max(r.relative_gap(), r.relative_excursion()));
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < study.size(); ++k) decreasing = decreasing && study[k] < study[k - 1];
  info(fmt("steady-wind envelope, max(gap, excursion)/diameter at 32/64/128/256 rays: %.2e %.2e %.2e %.2e", study[0],
           study[1], study[2], study[3]));

  bool rheonomic = true;
  std::string detail;
  for (const auto& [name, theta] : {std::pair{"zermelo1", kTheta1}, std::pair{"zermelo2", kTheta2}}) {
    const ZermeloMetric z(zermelo_data(theta));
    const WfNet net = build_net(z, Ignition::at_point(Vec2::Zero()), 0.0, 16.0, 256);
    const EnvelopeReport r = envelope_check(make_droplets(z, net, 12.8, 3.2, 128, 8), frontal(net, 16.0));
    rheonomic = rheonomic && r.relative_gap() <= 0.005 && r.relative_excursion() <= 0.01;
    detail += fmt("%s gap %.2e, excursion %.2e; ", name, r.relative_gap(), r.relative_excursion());
  }
  report(10, decreasing && study.back() <= 1e-4 && rheonomic,
         fmt("scleronomic finest %.2e (<= 1e-4, decreasing); ", study.back()) + detail +
             "required gap <= 0.5% and excursion <= 1% of the diameter");
}

void criterion_11() {
  bool pass = true;
  std::string detail;
  const std::filesystem::path base = std::filesystem::temp_directory_path() / "rheoflame_acceptance";
  for (const char* name : {"zermelo1", "zermelo2"}) {
    cli::Scenario sc = cli::load_scenario(std::filesystem::path(RHEOFLAME_SOURCE_DIR) / "scenarios" / (std::string(name) + ".json"));
    sc.output = (base / name).string();
    std::ostringstream log;
    cli::cmd_simulate(sc, log);
    std::ifstream in(base / name / "net.svg");
    std::stringstream text;
    text << in.rdbuf();
    const std::string svg = text.str();
    const std::regex frontal_re("<path class=\"frontal\" data-t=\"([0-9.]+)\" d=\"(M[^\"]*)\"");
    std::vector<double> times;
    bool closed = true;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), frontal_re); it != std::sregex_iterator(); ++it) {
      times.push_back(std::stod((*it)[1]));
      closed = closed && (*it)[2].str().ends_with(" Z");
    }
    const std::regex ray_re("<path class=\"ray\"");
    const auto rays = std::distance(std::sregex_iterator(svg.begin(), svg.end(), ray_re), std::sregex_iterator());
    bool levels_ok = times.size() == 5;
    for (std::size_t i = 0; levels_ok && i < 5; ++i) levels_ok = std::abs(times[i] - 3.2 * (i + 1)) < 1e-12;
    const bool meta = svg.find("<metadata>{\"kind\":\"net\",\"levels\":[3.2,6.4,9.6,12.8,16.0]}</metadata>") != std::string::npos;
    pass = pass && levels_ok && closed && rays >= 32 && meta;
    detail += fmt("%s: %zu closed frontal paths, %ld rays%s; ", name, times.size(), static_cast<long>(rays),
                  meta ? ", level metadata present" : ", metadata missing");
  }
  report(11, pass, detail + "required 5 closed paths at t = 3.2 i with ray fans");
}

void criterion_12() {
  using namespace rheoflame::testing;
  const auto start = Clock::now();
  std::size_t values = 0, bad = 0;
  bool theta1 = false, theta2 = false;
  for (const GoldenValue& g : kGoldenValues) {
    ++values;
    const double got = parse(g.text).eval(g.t, g.u, g.v);
    if (std::abs(got - g.expected) > 1e-12 * std::max(1.0, std::abs(g.expected))) ++bad;
    theta1 = theta1 || g.text == kTheta1;
    theta2 = theta2 || g.text == kTheta2;
  }
  for (const GoldenError& e : kGoldenErrors) {
    try {
      parse(e.text);
      ++bad;
    } catch (const ParseError& err) {
      if (err.offset() != e.offset) ++bad;
    }
  }
  const std::pair<const char*, const char*> grouping[] = {
      {"t+u*v", "t+(u*v)"}, {"t^u^v", "t^(u^v)"}, {"-t^2", "-(t^2)"}, {"t-u-v", "(t-u)-v"},
      {"t/u/v", "(t/u)/v"}, {"t*u^2", "t*(u^2)"}, {"-t*u", "(-t)*u"},
  };
  for (const auto& [a, b] : grouping) {
    if (!(parse(a) == parse(b))) ++bad;
  }
  const double elapsed = seconds_since(start);
  report(12, values >= 30 && theta1 && theta2 && bad == 0 && elapsed < 1.0,
         fmt("%zu golden values, %zu error offsets, %zu precedence pairs, %zu mismatches, %.3f s (< 1 s)", values,
             std::size(kGoldenErrors), std::size(grouping), bad, elapsed));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  auto guarded = [](int id, auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  guarded(1, criteria_1_to_4);
  guarded(5, criterion_5);
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  guarded(9, criterion_9);
  guarded(10, criterion_10);
  guarded(11, criterion_11);
  guarded(12, criterion_12);
  info(fmt("%d failing criteria, total %.1f s", failures, seconds_since(start)));
  return failures == 0 ? 0 : 1;
}
