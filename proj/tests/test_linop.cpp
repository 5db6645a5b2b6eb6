#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lagexp/errors.hpp"
#include "lagexp/linop.hpp"

using namespace lagexp;

namespace {

// The 2pi/3 neck sampled at 0.005 out to r = 7; stride 2 gives the h = 0.01 grid.
const ProfileCurve& neck() {
  static const ProfileCurve c = [] {
    ShootingProblem p;
    p.rays = {0.0, 2.0 * kPi / 3.0};
    p.stepSize = 0.005;
    p.truncationRadius = 7.0;
    return shoot(p);
  }();
  return c;
}

Vector vec(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), v.size()); }

double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

double consistency_error(const OperatorGrid& g, const TestFunction& fn) {
  const Vector a = assemble(g) * vec(sample(fn, g.s));
  return max_abs(a - vec(apply_symbolic(g, fn)));
}

double weighted_dot(const OperatorGrid& g, const Vector& a, const Vector& b) {
  const auto w = g.weights();
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

double duality_defect(const OperatorGrid& g, const TestFunction& phi, const TestFunction& eta) {
  const Vector p = vec(sample(phi, g.s)), e = vec(sample(eta, g.s));
  const double lhs = weighted_dot(g, assemble(g) * p, e);
  const double rhs = weighted_dot(g, p, assemble_adjoint(g) * e);
  return std::abs(lhs - rhs) / std::sqrt(weighted_dot(g, p, p) * weighted_dot(g, e, e));
}

double gaussian_eigen_error(double h) {
  const auto g = make_grid(plane_base(h, 8.0), 0, 8.0);
  return std::abs(eigenvalues_nearest(g, -4.0, 1).front() + 4.0);
}

}  // namespace

TEST_CASE("flat plane Gaussian is an eigenvector with eigenvalue -4") {
  const auto g = make_grid(plane_base(0.01, 8.0), 0, 8.0);
  CHECK(g.axis);
  std::vector<double> gauss(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gauss[i] = std::exp(-0.5 * g.r[i] * g.r[i]);
  const Vector v = vec(gauss);
  CHECK(max_abs(assemble(g) * v + 4.0 * v) < 1e-3);

  const double e1 = gaussian_eigen_error(0.02), e2 = gaussian_eigen_error(0.01);
  MESSAGE("eigenvalue errors " << e1 << " " << e2 << " ratio " << e1 / e2);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));
  CHECK(e2 < 1e-3);
}

TEST_CASE("constant vectors") {
  for (const auto& base : {plane_base(0.01, 6.0), neck()}) {
    const auto g = make_grid(base, 0, 6.0);
    const Vector one = Vector::Ones(g.size());
    const Vector a = assemble(g) * one;
    for (Eigen::Index i = 1; i + 1 < a.size(); ++i) CHECK(a[i] == doctest::Approx(-2.0).epsilon(1e-10));
  }
  const auto p = make_grid(plane_base(0.01, 6.0), 0, 6.0);
  const Vector a = assemble_adjoint(p) * Vector::Ones(p.size());
  for (Eigen::Index i = 1; i + 1 < a.size(); ++i) CHECK(a[i] == doctest::Approx(-4.0).epsilon(1e-10));
}

TEST_CASE("second-order consistency on the neck") {
  const auto fn = gaussian_bump(0.5, 0.6);
  for (int k : {0, 2}) {
    const double coarse = consistency_error(make_grid(neck(), k, 6.0, 2), fn);
    const double fine = consistency_error(make_grid(neck(), k, 6.0, 1), fn);
    MESSAGE("mode " << k << " consistency " << coarse << " -> " << fine);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("discrete adjointness defect is O(h^2)") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> c(-3.0, 3.0), w(0.3, 0.8);
  for (int t = 0; t < 5; ++t) {
    const auto phi = gaussian_bump(c(rng), w(rng)), eta = gaussian_bump(c(rng), w(rng));
    const auto coarse = make_grid(neck(), 0, 6.0, 2), fine = make_grid(neck(), 0, 6.0, 1);
    const double d1 = duality_defect(coarse, phi, eta), d2 = duality_defect(fine, phi, eta);
    CHECK(d1 < 10.0 * coarse.h * coarse.h);
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.15));
  }
}

TEST_CASE("smallest singular value agrees with a dense solver") {
  const auto g = make_grid(plane_base(0.1, 6.0), 0, 6.0);
  for (auto pairing : {Pairing::H2StarToL2, Pairing::L2ToL2}) {
    CHECK(smallest_singular_value(g, pairing) ==
          doctest::Approx(smallest_singular_value_dense(g, pairing)).epsilon(1e-8));
  }
  const auto n = make_grid(neck(), 1, 6.0, 8);
  CHECK(smallest_singular_value(n) == doctest::Approx(smallest_singular_value_dense(n)).epsilon(1e-8));
}

TEST_CASE("flat plane sigma_min is positive and grid stable") {
  const double a = smallest_singular_value(make_grid(plane_base(0.02, 6.0), 0, 6.0));
  const double b = smallest_singular_value(make_grid(plane_base(0.01, 6.0), 0, 6.0));
  const double c = smallest_singular_value(make_grid(plane_base(0.02, 7.0), 0, 7.0));
  MESSAGE("plane sigma_min " << a << " " << b << " " << c);
  CHECK(a > 0.0);
  CHECK(std::abs(b - a) < 0.2 * a);
  CHECK(std::abs(c - a) < 0.2 * a);
}

TEST_CASE("coarsened plane grids stay cell centered") {
  const auto base = plane_base(0.01, 6.5);
  const auto g = make_grid(base, 0, 5.0, 2);
  CHECK(g.axis);
  CHECK(g.h == doctest::Approx(0.02));
  CHECK(g.r[0] == doctest::Approx(0.01));
  for (int k = 0; k <= 4; ++k) CHECK(invertibility_check(base, k, 5.0).witnessed());
}

TEST_CASE("neck sigma_min is positive and stable for modes 0..4") {
  for (int k = 0; k <= 4; ++k) {
    const auto rep = invertibility_check(neck(), k);
    MESSAGE("mode " << k << " sigma_min " << rep.sigma << " " << rep.sigmaRefined << " "
                    << rep.sigmaExtended);
    CHECK(rep.sigma > 0.0);
    CHECK(rep.positive);
    CHECK(rep.stable);
  }
}

TEST_CASE("sign-flipped zero-order term is detected") {
  const double good = smallest_singular_value(make_grid(plane_base(0.02, 6.0), 0, 6.0));
  const auto bad = make_grid(plane_base(0.02, 6.0), 0, 6.0, 1, 2.0);
  const double broken = smallest_singular_value(bad);
  MESSAGE("plane sigma_min " << good << " broken " << broken);
  CHECK(broken < 1e-2 * good);
  CHECK(std::abs(eigenvalues_nearest(bad, 0.0, 1).front()) < 1e-3);

  bool fired = false;
  for (int k = 0; k <= 4; ++k) {
    const auto intact = invertibility_check(neck(), k);
    const auto broken = invertibility_check(neck(), k, 6.0, 2, 2.0);
    MESSAGE("neck mode " << k << " sigma " << intact.sigma << " broken " << broken.sigma
                         << " drift " << broken.drift);
    CHECK(intact.witnessed());
    if (!broken.witnessed()) fired = true;
  }
  CHECK(fired);
}

TEST_CASE("coercivity ratio is bounded and stable") {
  const auto g = make_grid(plane_base(0.02, 6.0), 0, 6.0);
  std::vector<double> gauss(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) gauss[i] = std::exp(-0.5 * g.r[i] * g.r[i]);
  const auto nr = norms(g, vec(gauss));
  CHECK(nr.l2 <= nr.h1);
  CHECK(nr.h1 <= nr.h2star);
  CHECK(nr.drift <= nr.h2star);
  const TestFunction gaussFn{[](double s) { return std::exp(-0.5 * s * s); },
                             [](double s) { return -s * std::exp(-0.5 * s * s); },
                             [](double s) { return (s * s - 1.0) * std::exp(-0.5 * s * s); }};
  const auto single = coercivity_check(g, {gaussFn});
  CHECK(std::isfinite(single.maxRatio));
  CHECK(single.maxRatio > 0.0);

  const auto fns = random_test_functions(-2.0, 2.0, 100, 7);
  const auto coarse = coercivity_check(make_grid(neck(), 0, 6.0, 2), fns);
  const auto fine = coercivity_check(make_grid(neck(), 0, 6.0, 1), fns);
  MESSAGE("coercivity " << coarse.maxRatio << " " << fine.maxRatio);
  CHECK(coarse.trials == 100);
  CHECK(std::isfinite(coarse.maxRatio));
  CHECK(fine.maxRatio < 2.0 * coarse.maxRatio);
  CHECK(coarse.maxRatio < 2.0 * fine.maxRatio);
  const double sigma = smallest_singular_value(make_grid(neck(), 0, 6.0, 1));
  CHECK(fine.maxRatio <= 1.0 / (sigma * sigma) * (1.0 + 1e-9));

  for (const auto& fn : random_test_functions(-2.0, 2.0, 10, 8)) {
    const auto gn = make_grid(neck(), 3, 6.0, 2);
    const auto r = norms(gn, vec(sample(fn, gn.s)));
    CHECK(r.drift <= r.h2star);
    CHECK(r.l2 <= r.h1);
    CHECK(r.h1 <= r.h2star);
  }
}

TEST_CASE("Gaussian barrier") {
  const auto plane = barrier_check(plane_base(0.01, 6.0));
  CHECK(plane.holds);
  CHECK(std::abs(plane.maxClosedForm) < 1e-14);

  std::vector<ProfileSample> every2;
  for (std::size_t i = 0; i < neck().size(); i += 2) every2.push_back(neck()[i]);
  const auto coarse = barrier_check(ProfileCurve(every2));
  const auto fine = barrier_check(neck());
  CHECK(fine.holds);
  CHECK(fine.strict);
  CHECK(fine.maxClosedForm < 0.0);
  MESSAGE("barrier mismatch " << coarse.maxMismatch << " -> " << fine.maxMismatch);
  CHECK(coarse.maxMismatch / fine.maxMismatch == doctest::Approx(4.0).epsilon(0.15));
  CHECK(fine.maxMatrix < 1e-3);
}

TEST_CASE("linearization of theta + beta is L") {
  const TestFunction zero{[](double) { return 0.0; }, [](double) { return 0.0; },
                          [](double) { return 0.0; }};
  const auto z = linearization_check(neck(), zero, {1e-2, 5e-3});
  for (double d : z.defects) CHECK(d == 0.0);
  for (double v : z.slope) CHECK(v == 0.0);

  const auto rep = linearization_check(neck(), gaussian_bump(0.3, 0.5), {1e-2, 5e-3});
  MESSAGE("relative error " << rep.relativeError << " order " << rep.order << " defects "
                            << rep.defects[0] << " " << rep.defects[1]);
  CHECK(rep.relativeError < 1e-3);
  CHECK(rep.order >= 1.9);

  CHECK_THROWS_AS(linearization_check(neck(), gaussian_bump(0.0, 0.05), {5.0, 2.5}), StepRejected);
}

TEST_CASE("radial growth probe") {
  const auto zero = radial_growth_check([](double) { return 0.0; }, [](double) { return 0.0; }, 10.0);
  CHECK(zero.identicallyZero);
  CHECK(zero.holdsEverywhere);

  const auto gauss = radial_growth_check([](double r) { return std::exp(-r * r / 2); },
                                         [](double r) { return -r * std::exp(-r * r / 2); }, 10.0);
  CHECK(gauss.failsAtLargeR);

  const auto cubic = radial_growth_check([](double r) { return r * r * r; },
                                         [](double r) { return 3 * r * r; }, 10.0);
  CHECK(cubic.holdsEverywhere);
  CHECK(cubic.ratio.back() == doctest::Approx((1e8 + 3e6) / (3.0 * (1e8 / 8 + 1e6 / 2))).epsilon(1e-6));

  const auto root = radial_growth_check([](double r) { return std::sqrt(r); },
                                        [](double r) { return 0.5 / std::sqrt(std::max(r, 1e-300)); },
                                        10.0);
  // f = 2 pi (r^3/3 + r/12), so r f' / 3f = (r^3 + r/12) / (r^3 + r/4) -> 1 from below.
  CHECK(root.ratio.back() == doctest::Approx((1e3 + 10.0 / 12) / (1e3 + 2.5)).epsilon(1e-4));
  CHECK(root.ratio.back() > 0.99);
  CHECK(root.failsAtLargeR);
}

TEST_CASE("grid errors and JSON") {
  CHECK_THROWS_AS(make_grid(plane_base(0.5, 6.0), 0, 6.0), DomainError);
  CHECK_THROWS_AS(make_grid(plane_base(0.01, 6.0), 0, 3.0), DomainError);
  CHECK_THROWS_AS(make_grid(plane_base(0.01, 6.0), -1, 6.0), DomainError);
  CHECK_THROWS_AS(make_grid(half_line(0.0, 6.0, 0.01), 0, 6.0), DomainError);
  const auto g = make_grid(plane_base(0.05, 6.0), 2, 6.0);
  const auto j = spectrum_json(g, 1.5, {0.1, -0.2});
  CHECK(j["mode"] == 2);
  CHECK(j["grid"]["h"].get<double>() == doctest::Approx(0.05));
  CHECK(j["grid"]["R"] == 6.0);
  CHECK(j["eigenvalues_nearest_zero"].size() == 2);
}
