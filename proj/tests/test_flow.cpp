#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lagexp/density.hpp"
#include "lagexp/errors.hpp"
#include "lagexp/flow.hpp"
#include "lagexp/numerics.hpp"

using namespace lagexp;

namespace {

const EquivariantRayPair kNeckRays{0.0, 2.0 * kPi / 3.0};

const ProfileCurve& neck() {
  static const ProfileCurve c = [] {
    ShootingProblem p;
    p.rays = kNeckRays;
    return shoot(p);
  }();
  return c;
}

std::vector<Complex> arc(double radius, double a0, double a1, std::size_t n, double jitter) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  std::vector<Complex> p(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = static_cast<double>(i) / static_cast<double>(n - 1);
    if (i > 0 && i + 1 < n) s += u(rng) / static_cast<double>(n - 1);
    p[i] = std::polar(radius, a0 + (a1 - a0) * s);
  }
  return p;
}

double max_circle_error(const std::vector<Complex>& p, double radius) {
  double e = 0.0;
  for (const auto& z : p) e = std::max(e, std::abs(std::abs(z) - radius));
  return e;
}

}  // namespace

TEST_CASE("straight line is a fixed point") {
  const auto line = straight_line(0.7, 6.0, 0.01);
  for (double v : normal_velocity(line)) CHECK(std::abs(v) < 1e-10);
  const FlowState s{line, 0.5};
  const auto next = flow_step(s, 0.4e-4);
  CHECK(next.time == doctest::Approx(0.50004));
  const auto a = line.points(), b = next.curve.points();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("centered circle is not static") {
  const double r = 2.0;
  const auto circle = profile_from_points(arc(r, 0.0, 1.0, 201, 0.0), 0.0, 1.0 * r / 200);
  const auto v = normal_velocity(circle);
  // kappa = 1/r and sin(psi - phi) / r = 1/r.
  for (std::size_t i = 1; i + 1 < v.size(); ++i) CHECK(v[i] == doctest::Approx(2.0 / r).epsilon(1e-6));
}

TEST_CASE("arc-length resampling error is third order") {
  double prev = 0.0;
  for (std::size_t n : {101, 201, 401}) {
    const auto p = resample_uniform(arc(1.0, 0.0, 2.0, n, 0.3));
    const double e = max_circle_error(p, 1.0);
    if (prev > 0.0) CHECK(prev / e > 8.0);
    prev = e;
    const auto c = std::vector<Complex>(p);
    double lo = 1e9, hi = 0.0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      lo = std::min(lo, std::abs(c[i] - c[i - 1]));
      hi = std::max(hi, std::abs(c[i] - c[i - 1]));
    }
    CHECK(hi / lo < 1.0 + 1e-2);
  }
}

TEST_CASE("time step limits") {
  const FlowState s{neck(), 0.5};
  const double h = neck().step();
  CHECK_THROWS_AS(flow_step(s, 0.6 * h * h), StepRejected);
  CHECK_THROWS_AS(flow_step(s, 0.0), StepRejected);
  CHECK_NOTHROW(flow_step(s, 0.45 * h * h));
}

TEST_CASE("one step of the expander is a rescaling") {
  const double h = neck().step(), dt = 0.4 * h * h;
  const auto next = flow_step({neck(), 0.5}, dt);
  std::vector<Complex> scaled;
  for (const auto& z : neck().points()) scaled.push_back(std::sqrt(1.0 + 2.0 * dt) * z);
  const double moved = hausdorff_distance(next.curve.points(), neck().points(), 4.0);
  const double defect = hausdorff_distance(next.curve.points(), scaled, 4.0);
  MESSAGE("moved " << moved << " defect " << defect);
  CHECK(moved > 1e-5);
  CHECK(defect < 1e-2 * moved);
}

TEST_CASE("self-similarity of the neck and the plane") {
  const auto rep = self_similarity_check(neck(), 0.25, -1.0);
  MESSAGE("neck self-similarity defect " << rep.maxDefect);
  CHECK(rep.maxDefect < 1e-2);
  CHECK(rep.taus.size() == 5);
  const auto plane = self_similarity_check(straight_line(0.3, 6.0, 0.02), 0.25, -1.0);
  CHECK(plane.maxDefect < 1e-12);

  // A non-expander (the neck scaled by 1.2) does not move self-similarly.
  const auto bad = self_similarity_check(neck().scaled(1.2), 0.25, -1.0);
  MESSAGE("scaled neck defect " << bad.maxDefect);
  CHECK(bad.maxDefect > 1e-2);
}

TEST_CASE("flow reaching the axis reports the last state") {
  // A keyhole: in along the ray at angle 0, once around a circle of radius 0.05 and out along
  // the ray at angle -0.2. The loop shrinks with speed 2/r and has to cross the axis to unwind.
  std::vector<Complex> key;
  for (int i = 0; i <= 95; ++i) key.push_back(1.0 - 0.01 * i);
  for (const auto& z : arc(0.05, 0.0, 2.0 * kPi - 0.2, 33, 0.0)) key.push_back(z);
  for (int i = 1; i <= 95; ++i) key.push_back(std::polar(0.05 + 0.01 * i, -0.2));
  const auto pts = resample_uniform(key);
  const auto c = profile_from_points(pts, 0.0, std::abs(pts[1] - pts[0]));
  try {
    (void)run_flow({c, 0.0}, 1.0, 0.1 * c.step() * c.step());
    FAIL("expected FlowSingularity");
  } catch (const FlowSingularity& e) {
    CHECK(e.last_state().time > 0.0);
    CHECK(e.last_state().time < 1e-3);
    CHECK(distance_to_polyline(0.0, e.last_state().curve.points()) >= 1e-3);
  }
}

TEST_CASE("mollified cone") {
  const auto cone = mollified_cone(kNeckRays, 0.1, 0.01, 8.0);
  CHECK(cone.step() == doctest::Approx(0.01).epsilon(1e-2));
  CHECK(std::abs(cone[0].r - 8.0) < 1e-9);
  CHECK(std::abs(cone[cone.size() - 1].r - 8.0) < 1e-9);
  const auto angles = EquivariantRayPair{cone[0].phi, cone[cone.size() - 1].phi};
  CHECK(same_planes(angles, kNeckRays, 1e-9));
  // Canonical opening pi/3: the vertex sits at cot(pi/6) m(0) on the bisector.
  const double vertex = std::sqrt(3.0) * 0.2734375 * 0.1;
  CHECK(cone.min_radius() >= vertex);
  CHECK(cone.min_radius() < vertex + 1e-3);
  const auto line = mollified_cone({0.4, 0.4 + kPi}, 0.1, 0.01, 8.0);
  for (double v : normal_velocity(line)) CHECK(std::abs(v) < 1e-10);
  CHECK_THROWS_AS(mollified_cone(kNeckRays, 0.0, 0.01, 8.0), DomainError);
  CHECK_THROWS_AS(mollified_cone({0.0, kPi / 2}, 0.1, 0.01, 8.0), DomainError);
}

TEST_CASE("antipodal rays stay a straight line") {
  FlowOptions o;
  o.ds = 0.05;
  const auto run = run_from_cone({0.4, 0.4 + kPi}, 0.2, -1.0, 0.1, o);
  for (const auto& s : run.unscaled.curve.samples()) {
    CHECK(std::abs(std::sin(s.phi - 0.4)) * s.r < 1e-12);
  }
}

TEST_CASE("flow from the cone reaches the shooting expander") {
  const auto run = run_from_cone(kNeckRays, 0.5, -1.0, kDefaultMollification, {}, 0.1);
  const double d = hausdorff_distance(run.state.curve.points(), neck().points(), 4.0);
  MESSAGE("Hausdorff distance to the shooting profile " << d);
  CHECK(d < 5e-3);
  CHECK(run.snapshots.size() == 6);

  const auto mu = mu_conservation_check(run.snapshots);
  CHECK(mu.maxAbsMu < 1e-12);
  CHECK(mu.points > 0);

  // Rescaled to t = 1, the state approximates sqrt(2) * expander.
  const auto later = run_from_cone(kNeckRays, 0.6, -1.0, kDefaultMollification);
  CHECK(hausdorff_distance(later.state.curve.points(), neck().points(), 4.0) < 5e-3);
}

TEST_CASE("mu stays zero over 1000 steps and detects non-equivariant points") {
  FlowOptions o;
  o.ds = 0.02;
  const auto run = run_from_cone(kNeckRays, 1000 * 0.4 * 0.02 * 0.02, -1.0, 0.1, o, 0.016);
  CHECK(run.steps >= 1000);
  CHECK(mu_conservation_check(run.snapshots).maxAbsMu < 1e-12);
  CHECK(mu_check({{Complex(1.0, 0.0), Complex(0.0, 1.0)}}).maxAbsMu == doctest::Approx(1.0));
}

TEST_CASE("Gaussian density decreases along the flow") {
  FlowOptions o;
  o.ds = 0.02;
  const auto run = run_from_cone(kNeckRays, 0.5, -1.0, 0.05, o, 0.1);
  const double T = 1.0;
  const std::vector<Point> centers{{0.0, 0.0}, {Complex(0.3, 0.1), 0.0}, {Complex(0.2, 0.0), Complex(0.1, -0.2)}};
  for (const auto& x0 : centers) {
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : run.snapshots) {
      if (s.time <= 0.0) continue;
      const double theta = surface_density({make_surface(s.curve)}, {x0, T - s.time, 0.0});
      CHECK(theta <= prev + 1e-6);
      prev = theta;
    }
  }
}

TEST_CASE("manifest") {
  const auto j = flow_manifest_json(kNeckRays, 4e-5, 0.01, {0.0, 0.5});
  CHECK(j["dt"] == 4e-5);
  CHECK(j["ds"] == 0.01);
  CHECK(j["times"].size() == 2);
  CHECK(j["rays"].contains("phiPlus"));
}
