#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lagexp/errors.hpp"
#include "lagexp/geom.hpp"

using namespace lagexp;

namespace {

// Real 4x4 representation used as an independent route to omega and lambda.
std::array<double, 4> as_real(const Point& p) {
  return {p[0].real(), p[0].imag(), p[1].real(), p[1].imag()};
}

}  // namespace

TEST_CASE("lagrangian angle of coordinate planes") {
  CHECK(lagrangian_angle(plane_frame({0.0, 0.0})) == doctest::Approx(0.0));
  const double t1 = 0.7, t2 = 1.9;
  CHECK(lagrangian_angle(plane_frame({t1, t2})) == doctest::Approx(wrap_angle(t1 + t2)));
}

TEST_CASE("lagrangian angle is invariant under rotation inside the plane") {
  const auto f = plane_frame({0.3, -1.1});
  for (double a : {0.2, 1.0, 2.5}) {
    const LagrangianFrame g{std::cos(a) * f.u + std::sin(a) * f.v,
                            (-std::sin(a)) * f.u + std::cos(a) * f.v};
    CHECK(lagrangian_angle(g) == doctest::Approx(lagrangian_angle(f)).epsilon(1e-12));
  }
}

TEST_CASE("plane pair angle difference equals the angle sum") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ang(0.01, kPi - 0.01);
  for (int k = 0; k < 50; ++k) {
    const PlanePair pair(ang(rng), ang(rng));
    const double d = lagrangian_angle(plane_frame(pair.second())) -
                     lagrangian_angle(plane_frame(pair.first()));
    CHECK(std::abs(wrap_angle(d - pair.theta1() - pair.theta2())) < 1e-12);
  }
}

TEST_CASE("equivariant tangent planes have angle arg gamma' + arg gamma") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi), rad(0.1, 5.0);
  for (int k = 0; k < 100; ++k) {
    const Complex g = std::polar(rad(rng), u(rng));
    const Complex t = std::polar(1.0, u(rng));
    const double alpha = u(rng);
    // Frame built from explicit partial derivatives of (g cos a, g sin a).
    const Point xs{t * std::cos(alpha), t * std::sin(alpha)};
    const Point xa{-g * std::sin(alpha), g * std::cos(alpha)};
    const LagrangianFrame f{xs, (1.0 / std::abs(g)) * xa};
    const double expect = wrap_angle(std::arg(t) + std::arg(g));
    CHECK(std::abs(wrap_angle(lagrangian_angle(f) - expect)) < 1e-12);
    CHECK(std::abs(wrap_angle(lagrangian_angle(equivariant_frame(g, t, alpha)) - expect)) < 1e-12);
  }
}

TEST_CASE("invalid frames are rejected") {
  const LagrangianFrame notLag{{Complex(1, 0), 0.0}, {Complex(0, 1), 0.0}};
  CHECK_THROWS_AS(lagrangian_angle(notLag), InvalidFrame);
  const LagrangianFrame notUnit{{Complex(2, 0), 0.0}, {0.0, Complex(1, 0)}};
  CHECK_THROWS_AS(lagrangian_angle(notUnit), InvalidFrame);
}

TEST_CASE("liouville form") {
  CHECK(liouville_eval({0.0, 0.0}, {Complex(1, 2), Complex(3, 4)}) == 0.0);
  CHECK(liouville_eval({Complex(1, 0), 0.0}, {Complex(0, 1), 0.0}) == doctest::Approx(1.0));
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  for (int k = 0; k < 1000; ++k) {
    const Point x{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))};
    const Point v{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))};
    // <Jx, v> with J(a, b) = (-b, a) per complex coordinate.
    const auto xr = as_real(x), vr = as_real(v);
    const double jx = -xr[1] * vr[0] + xr[0] * vr[1] - xr[3] * vr[2] + xr[2] * vr[3];
    CHECK(liouville_eval(x, v) == doctest::Approx(jx).epsilon(1e-12));
  }
}

TEST_CASE("d lambda = 2 omega on constant vector fields") {
  // For linear lambda, d lambda(u, v) = u(lambda(v)) - v(lambda(u)) = lambda_u(v) - lambda_v(u).
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  for (int k = 0; k < 100; ++k) {
    const Point u{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))};
    const Point v{Complex(n(rng), n(rng)), Complex(n(rng), n(rng))};
    const double dl = liouville_eval(u, v) - liouville_eval(v, u);
    CHECK(dl == doctest::Approx(2.0 * kaehler_form(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("area-minimizing predicate") {
  CHECK(area_minimizing_pair(PlanePair(kPi / 3, 2 * kPi / 3)));
  CHECK_FALSE(area_minimizing_pair(PlanePair(kPi / 2, kPi / 4)));
  CHECK(area_minimizing_pair(PlanePair(kPi / 2, kPi / 2)));
  CHECK_THROWS_AS(PlanePair(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(PlanePair(1.0, kPi), DomainError);
}

TEST_CASE("rotation path") {
  const PlanePair p(kPi / 3, kPi / 6);
  const auto p0 = rotation_path(p, 0.0);
  CHECK(p0.theta1() == doctest::Approx(p.theta1()));
  CHECK(p0.theta2() == doctest::Approx(p.theta2()));
  const auto p1 = rotation_path(p, 1.0);
  CHECK(p1.theta1() == doctest::Approx(kPi / 4));
  CHECK(p1.theta2() == doctest::Approx(kPi / 4));
  for (double s : {0.1, 0.4, 0.77}) {
    const auto q = rotation_path(p, s);
    CHECK(q.theta1() + q.theta2() == doctest::Approx(p.theta1() + p.theta2()));
    CHECK(area_minimizing_pair(q) == area_minimizing_pair(p));
  }
  CHECK_THROWS_AS(rotation_path(PlanePair(kPi / 3, 2 * kPi / 3), 0.5), DomainError);
  CHECK_THROWS_AS(rotation_path(p, 1.5), DomainError);
}

TEST_CASE("moment map") {
  CHECK(mu({Complex(1, 0), Complex(0, 1)}) == doctest::Approx(1.0));
  CHECK(mu({Complex(0, 1), Complex(1, 0)}) == doctest::Approx(-1.0));
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-kPi, kPi), rad(0.0, 10.0);
  for (int k = 0; k < 200; ++k) {
    CHECK(std::abs(mu(equivariant_point(std::polar(rad(rng), u(rng)), u(rng)))) < 1e-12);
  }
}

TEST_CASE("ray canonicalization") {
  const auto line = canonicalize({0.3, 0.3 + kPi});
  CHECK(line.kind == RayKind::Line);
  const auto narrow = canonicalize({0.0, kPi / 3});
  CHECK(narrow.kind == RayKind::Neck);
  CHECK(narrow.opening() == doctest::Approx(kPi / 3));
  const auto wide = canonicalize({0.0, 2 * kPi / 3});
  CHECK(wide.opening() == doctest::Approx(kPi / 3));
  CHECK(same_planes(wide.rays(), {0.0, 2 * kPi / 3}, 1e-12));
  CHECK_THROWS_AS(canonicalize({0.0, kPi / 2}), DomainError);
  CHECK_THROWS_AS(canonicalize({1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(canonicalize({1.0, 1.0 + 2 * kPi}), DomainError);
}

TEST_CASE("unwrap guards against large jumps") {
  const std::vector<double> ok{3.1, -3.1, -3.0};
  const auto u = unwrap(ok);
  CHECK(u[1] == doctest::Approx(2 * kPi - 3.1));
  const std::vector<double> bad{0.0, 2.0};
  CHECK_THROWS_AS(unwrap(bad), NumericalDegeneracy);
}

TEST_CASE("plane pair json round trip") {
  const PlanePair p(0.25, 2.5);
  nlohmann::json j = p;
  const auto q = plane_pair_from_json(j);
  CHECK(q.theta1() == p.theta1());
  CHECK(q.theta2() == p.theta2());
}

TEST_CASE("distance and coordinates relative to a plane") {
  const LagrangianPlane pl{0.4, -0.9};
  const Point on{std::polar(2.0, 0.4), std::polar(-1.5, -0.9)};
  CHECK(distance_to_plane(pl, on) == doctest::Approx(0.0).epsilon(1e-14));
  const auto c = plane_coordinates(pl, on);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(-1.5));
  const Point off = on + Point{Complex(0, 1) * std::polar(0.3, 0.4), 0.0};
  CHECK(distance_to_plane(pl, off) == doctest::Approx(0.3));
}
