#include "lagexp/density.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "lagexp/errors.hpp"
#include "lagexp/numerics.hpp"

namespace lagexp {

namespace {

// Exponents below this contribute less than 1e-26 relative to the peak.
constexpr double kNegligibleExponent = -60.0;

double norm2(const Point& p) { return std::norm(p[0]) + std::norm(p[1]); }

void check_width(double w) {
  if (!(w > 0.0)) throw DomainError("kernel width l - t must be positive");
}

LagrangianPlane ray_plane(double phi) { return {phi, phi}; }

// Mass of the width-w kernel on the part |y| > radius of the plane.
double plane_tail_mass(const LagrangianPlane& plane, const Point& x0, double w, double radius) {
  const double d = distance_to_plane(plane, x0);
  const auto p = plane_coordinates(plane, x0);
  const double sigma2 = 2.0 * w;
  const double lambda = (p[0] * p[0] + p[1] * p[1]) / sigma2;
  const double x = radius * radius / sigma2;
  double q;
  if (lambda == 0.0) {
    q = std::exp(-0.5 * x);
  } else {
    const boost::math::non_central_chi_squared_distribution<double> dist(2.0, lambda);
    q = boost::math::cdf(boost::math::complement(dist, x));
  }
  return std::exp(-d * d / (4.0 * w)) * q;
}

struct TailEnd {
  double phi;     // tail ray
  double radius;  // along the plane, where the profile stops
  double dev;     // normal offset of the profile end from the ray
};

std::array<TailEnd, 2> tail_ends(const EquivariantSurface& s) {
  const auto& c = s.curve;
  const auto& a = c.samples().front();
  const auto& b = c.samples().back();
  return {TailEnd{s.tailRays.phiMinus, a.r * std::cos(a.phi - s.tailRays.phiMinus),
                  a.r * std::abs(std::sin(a.phi - s.tailRays.phiMinus))},
          TailEnd{s.tailRays.phiPlus, b.r * std::cos(b.phi - s.tailRays.phiPlus),
                  b.r * std::abs(std::sin(b.phi - s.tailRays.phiPlus))}};
}

// Position and speed on the cubic Hermite interpolant of the profile between samples i, i+1.
struct Node {
  Complex gamma;
  double speed;
};

Node hermite(const ProfileCurve& c, std::size_t i, double t) {
  const double h = c.step();
  const Complex p0 = c.gamma(i), p1 = c.gamma(i + 1);
  const Complex m0 = h * c.tangent(i), m1 = h * c.tangent(i + 1);
  const double t2 = t * t, t3 = t2 * t;
  const Complex pos = (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 +
                      (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
  const Complex der = (6 * t2 - 6 * t) * p0 + (3 * t2 - 4 * t + 1) * m0 +
                      (-6 * t2 + 6 * t) * p1 + (3 * t2 - 2 * t) * m1;
  return {pos, std::abs(der) / h};
}

// Profile nodes (gamma, speed) on a grid refined m times, with weights of the fourth-order
// rule applied separately on each piece between passages through the origin.
void refined_nodes(const ProfileCurve& c, int m, std::vector<Node>& nodes,
                   std::vector<double>& weights) {
  nodes.clear();
  const std::size_t n = c.size();
  if (m <= 1) {
    for (std::size_t i = 0; i < n; ++i) nodes.push_back({c.gamma(i), 1.0});
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      // A corner through the origin (cone) is not interpolated across.
      const bool corner = c[i].r == 0.0 || c[i + 1].r == 0.0;
      for (int k = 0; k < m; ++k) {
        const double t = static_cast<double>(k) / m;
        if (corner) {
          nodes.push_back({(1.0 - t) * c.gamma(i) + t * c.gamma(i + 1), 1.0});
        } else {
          nodes.push_back(hermite(c, i, t));
        }
      }
    }
    nodes.push_back({c.gamma(n - 1), 1.0});
  }
  const double h = c.step() / std::max(m, 1);
  weights.assign(nodes.size(), 0.0);
  std::size_t start = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (i + 1 < nodes.size() && std::abs(nodes[i].gamma) != 0.0) continue;
    const auto w = uniform_weights(i - start + 1, h);
    for (std::size_t k = 0; k < w.size(); ++k) weights[start + k] += w[k];
    start = i;
  }
}

double profile_density(const EquivariantSurface& surf, const Point& x0, double w,
                       int resolution) {
  const auto& c = surf.curve;
  const double sw = std::sqrt(2.0 * w);
  const int m = std::clamp(static_cast<int>(std::ceil(5.0 * c.step() / sw)), 1, 64);
  std::vector<Node> nodes;
  std::vector<double> weights;
  refined_nodes(c, m, nodes, weights);

  const double x0n = std::sqrt(norm2(x0));
  const double logPre = -std::log(4.0 * kPi * w);
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Complex g = nodes[i].gamma;
    const double r = std::abs(g);
    if (r == 0.0 || weights[i] == 0.0) continue;
    const double gap = r - x0n;
    if (-gap * gap / (4.0 * w) < kNegligibleExponent) continue;
    const double a = (std::conj(g) * x0[0]).real();
    const double b = (std::conj(g) * x0[1]).real();
    const double kappa = std::hypot(a, b) / (2.0 * w);
    int nAlpha = std::max(resolution, static_cast<int>(std::ceil(kappa + 12.0 * std::sqrt(kappa) + 16.0)));
    nAlpha += nAlpha % 2;
    const double base = -(r * r + x0n * x0n) / (4.0 * w) + logPre;
    double sum = 0.0;
    for (int j = 0; j < nAlpha; ++j) {
      const double al = 2.0 * kPi * j / nAlpha;
      sum += std::exp(base + (a * std::cos(al) + b * std::sin(al)) / (2.0 * w));
    }
    total += weights[i] * nodes[i].speed * r * sum * (2.0 * kPi / nAlpha);
  }
  for (const auto& e : tail_ends(surf)) {
    if (e.radius > 0.0) total += plane_tail_mass(ray_plane(e.phi), x0, w, e.radius);
  }
  return total / surf.multiplicity;
}

double single_plane_numeric(const LagrangianPlane& pl, const Point& x0, double w, int resolution) {
  const auto p = plane_coordinates(pl, x0);
  const double d = distance_to_plane(pl, x0);
  const double pn = std::hypot(p[0], p[1]);
  const double width = std::sqrt(4.0 * w);
  const double rhoMax = pn + 14.0 * width;
  const int panels = static_cast<int>(std::ceil(rhoMax / (0.5 * width)));
  const double kappa = pn / (2.0 * w);
  int nAlpha = std::max(resolution, static_cast<int>(std::ceil(rhoMax * kappa + 12.0 * std::sqrt(rhoMax * kappa) + 16.0)));
  nAlpha += nAlpha % 2;
  auto ring = [&](double rho) {
    double sum = 0.0;
    for (int j = 0; j < nAlpha; ++j) {
      const double al = 2.0 * kPi * j / nAlpha;
      const double y1 = rho * std::cos(al) - p[0], y2 = rho * std::sin(al) - p[1];
      sum += std::exp(-(y1 * y1 + y2 * y2 + d * d) / (4.0 * w));
    }
    return rho * sum * (2.0 * kPi / nAlpha) / (4.0 * kPi * w);
  };
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = rhoMax * k / panels, b = rhoMax * (k + 1) / panels;
    total += boost::math::quadrature::gauss<double, 20>::integrate(ring, a, b);
  }
  return total;
}

int detect_multiplicity(const ProfileCurve& c) {
  // Doubly covered iff the curve is symmetric under gamma -> -gamma (its orbit then
  // meets every circle twice).
  if (c.min_radius() > 0.0) return 1;
  const auto pts = c.points();
  const double tol = 1e-9 * (1.0 + c.max_radius());
  const std::size_t stride = std::max<std::size_t>(1, c.size() / 64);
  for (std::size_t i = 0; i < c.size(); i += stride) {
    if (distance_to_polyline(-pts[i], pts) > tol) return 1;
  }
  return 2;
}

}  // namespace

double heat_kernel(const DensityQuery& q, const Point& x) {
  const double w = q.scale - q.time;
  if (!(w > 0.0)) throw DomainError("heat kernel requires l > t");
  const double d2 = norm2(x - q.center);
  return std::exp(-d2 / (4.0 * w)) / (4.0 * kPi * w);
}

double plane_density(const LagrangianPlane& plane, const Point& x0, double l) {
  check_width(l);
  const double d = distance_to_plane(plane, x0);
  return std::exp(-d * d / (4.0 * l));
}

double plane_pair_density(const PlanePair& pair, const DensityQuery& q) {
  return plane_density(pair.first(), q.center, q.scale) +
         plane_density(pair.second(), q.center, q.scale);
}

double cone_density(const EquivariantRayPair& rays, const Point& x0, double l) {
  const double a = plane_density(ray_plane(rays.phiMinus), x0, l);
  if (std::abs(std::remainder(rays.phiPlus - rays.phiMinus, kPi)) < kAngleTolerance) return a;
  return a + plane_density(ray_plane(rays.phiPlus), x0, l);
}

EquivariantSurface EquivariantSurface::scaled(double c) const {
  return {curve.scaled(c), tailRays, multiplicity};
}

EquivariantSurface make_surface(const ProfileCurve& curve) {
  EquivariantSurface s{curve, {}, detect_multiplicity(curve)};
  const auto& a = curve.samples().front();
  const auto& b = curve.samples().back();
  if (a.r >= 3.0 && b.r >= 3.0) {
    s.tailRays = asymptotic_angles(curve);
  } else {
    s.tailRays = {a.phi, b.phi};
  }
  return s;
}

double tail_bound(const EquivariantSurface& surface, const DensityQuery& q) {
  const double w = q.scale - q.time;
  check_width(w);
  const double x0n = std::sqrt(norm2(q.center));
  double bound = 0.0;
  for (const auto& e : tail_ends(surface)) {
    if (e.radius <= 0.0) continue;  // the profile ends at the origin
    const double mass = plane_tail_mass(ray_plane(e.phi), q.center, w, e.radius);
    const double reach = x0n + e.radius + 6.0 * std::sqrt(4.0 * w);
    bound += mass * e.dev * reach / (2.0 * w);
  }
  return bound / surface.multiplicity;
}

double surface_density(const SurfaceMeasure& m, const DensityQuery& q) {
  if (m.resolution < 4) throw DomainError("surface density needs at least four angular nodes");
  const double w = q.scale - q.time;
  check_width(w);
  if (const auto* pair = std::get_if<PlanePair>(&m.surface)) {
    return single_plane_numeric(pair->first(), q.center, w, m.resolution) +
           single_plane_numeric(pair->second(), q.center, w, m.resolution);
  }
  const auto& surf = std::get<EquivariantSurface>(m.surface);
  const double tb = tail_bound(surf, q);
  if (tb > m.accuracy) {
    throw AccuracyNotMet("far-field substitution error " + std::to_string(tb) +
                             " exceeds the requested accuracy; extend the truncation radius",
                         tb);
  }
  return profile_density(surf, q.center, w, m.resolution);
}

double expander_density(const EquivariantSurface& e, const Point& x0, double l, double t,
                        int resolution) {
  if (t < 0.0) throw DomainError("time must be nonnegative");
  if (t == 0.0) return cone_density(e.tailRays, x0, l);
  SurfaceMeasure m{e.scaled(std::sqrt(2.0 * t)), resolution};
  return surface_density(m, {x0, l + t, t});
}

DensityGrid make_density_grid(int nc, int nl, int nt, double maxRadius, double lMin, double lMax,
                              double tMax, unsigned seed) {
  if (nc < 1 || nl < 1 || nt < 1) throw DomainError("grid sizes must be positive");
  DensityGrid g;
  std::mt19937 rng(seed);
  std::normal_distribution<double> n01;
  g.centers.push_back({0.0, 0.0});
  for (int k = 1; k < nc; ++k) {
    Point dir{Complex(n01(rng), n01(rng)), Complex(n01(rng), n01(rng))};
    const double len = norm(dir);
    const double rad = maxRadius * k / (nc - 1);
    g.centers.push_back((rad / len) * dir);
  }
  for (int k = 0; k < nl; ++k) {
    const double f = nl == 1 ? 0.0 : static_cast<double>(k) / (nl - 1);
    g.scales.push_back(lMin * std::pow(lMax / lMin, f));
  }
  for (int k = 0; k < nt; ++k) g.times.push_back(tMax * (k + 1) / nt);
  return g;
}

MonotonicityReport monotonicity_check(const EquivariantSurface& e, const DensityGrid& g,
                                      double tol) {
  MonotonicityReport rep;
  rep.maxViolation = -std::numeric_limits<double>::infinity();
  for (const auto& x0 : g.centers) {
    for (double l : g.scales) {
      for (double t : g.times) {
        DensitySample s{x0, l, t, expander_density(e, x0, l, t), cone_density(e.tailRays, x0, l + t)};
        rep.maxViolation = std::max(rep.maxViolation, s.theta - s.bound);
        if (s.theta > s.bound + tol) rep.violations.push_back(s);
        rep.samples.push_back(s);
      }
    }
  }
  return rep;
}

SupReport density_sup(const EquivariantSurface& e, const DensityGrid& g) {
  SupReport rep;
  for (const auto& x0 : g.centers) {
    for (double l : g.scales) {
      for (double t : g.times) {
        DensitySample s{x0, l, t, expander_density(e, x0, l, t), 2.0};
        if (s.theta > rep.sup) {
          rep.sup = s.theta;
          rep.argmax = s;
        }
        rep.samples.push_back(s);
      }
    }
  }
  rep.marginBelow2 = 2.0 - rep.sup;
  return rep;
}

namespace {

std::vector<Point> white_centers(const EquivariantSurface& e) {
  std::vector<Point> ys{{0.0, 0.0}};
  const auto& c = e.curve;
  const std::size_t stride = std::max<std::size_t>(1, c.size() / 80);
  for (std::size_t i = 0; i < c.size(); i += stride) {
    if (c[i].r <= 4.0) ys.push_back(equivariant_point(c.gamma(i), 0.0));
  }
  return ys;
}

}  // namespace

bool white_density_bound(const EquivariantSurface& e, double epsilon0, double delta) {
  if (!(epsilon0 > 0.0 && delta > 0.0)) throw DomainError("epsilon0 and delta must be positive");
  const double t = 0.5;
  for (const auto& y : white_centers(e)) {
    for (int k = 0; k < 4; ++k) {
      const double l = delta * t / std::pow(2.0, k);
      SurfaceMeasure m{e};
      if (surface_density(m, {y, l, 0.0}) > 1.0 + 0.5 * epsilon0) return false;
    }
  }
  return true;
}

double white_delta_sweep(const EquivariantSurface& e, double epsilon0, int kMax) {
  for (int k = 0; k <= kMax; ++k) {
    const double delta = std::pow(2.0, -k);
    if (white_density_bound(e, epsilon0, delta)) return delta;
  }
  return 0.0;
}

double area_ratio(const EquivariantSurface& e, const Point& x, double rho) {
  if (!(rho > 0.0)) throw DomainError("ball radius must be positive");
  const auto& c = e.curve;
  std::vector<Node> nodes;
  std::vector<double> weights;
  // The angular measure has a square-root edge where the sphere cuts the orbit; refine.
  refined_nodes(c, 8, nodes, weights);
  const double xn2 = norm2(x);
  double area = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Complex g = nodes[i].gamma;
    const double r = std::abs(g);
    const double a = (std::conj(g) * x[0]).real();
    const double b = (std::conj(g) * x[1]).real();
    const double cc = std::hypot(a, b);
    // |X - x|^2 = r^2 + |x|^2 - 2 C cos(alpha - alpha0) < rho^2
    const double lhs = r * r + xn2 - rho * rho;
    double measure;
    if (cc == 0.0) {
      measure = lhs < 0.0 ? 2.0 * kPi : 0.0;
    } else {
      measure = 2.0 * std::acos(std::clamp(lhs / (2.0 * cc), -1.0, 1.0));
    }
    area += weights[i] * nodes[i].speed * r * measure;
  }
  return area / e.multiplicity / (rho * rho);
}

AreaRatioReport area_ratio_sweep(const EquivariantSurface& e, double rhoMin, double rhoMax) {
  AreaRatioReport rep;
  auto centers = white_centers(e);
  centers.push_back({Complex(0.3, 0.1), Complex(-0.2, 0.4)});
  const std::size_t nr = 8;
  for (const auto& x : centers) {
    for (std::size_t k = 0; k < nr; ++k) {
      const double rho = rhoMin * std::pow(rhoMax / rhoMin, static_cast<double>(k) / (nr - 1));
      const double v = area_ratio(e, x, rho);
      if (v > rep.maxRatio) rep = {v, x, rho};
    }
  }
  return rep;
}

nlohmann::json point_to_json(const Point& p) {
  return nlohmann::json::array({p[0].real(), p[0].imag(), p[1].real(), p[1].imag()});
}

}  // namespace lagexp
