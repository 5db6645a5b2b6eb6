#pragma once

// Backwards heat kernel and Gaussian densities of equivariant surfaces and plane pairs.
//
// The kernel of width w centered at x0 is exp(-|x - x0|^2 / 4w) / (4 pi w); it integrates to
// 1 over every plane through x0. The density of a surface L at (x0, l) at time t is
// Theta_t(x0, l) = int over L_t = sqrt(2t) L of the kernel of width l.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "lagexp/geom.hpp"
#include "lagexp/profile.hpp"

namespace lagexp {

struct DensityQuery {
  Point center{};
  double scale = 1.0;  ///< l > 0
  double time = 0.0;   ///< t >= 0, kernel width l - t
};

/// exp(-|x - x0|^2 / (4 (l - t))) / (4 pi (l - t)). Throws DomainError if l <= t.
double heat_kernel(const DensityQuery& query, const Point& x);

/// Density at (x0, l) of a single plane: exp(-d^2 / 4l), d = dist(x0, plane).
double plane_density(const LagrangianPlane& plane, const Point& x0, double l);

/// Closed form exp(-d1^2 / 4l) + exp(-d2^2 / 4l) for the pair (P1, P2); uses query.scale.
double plane_pair_density(const PlanePair& pair, const DensityQuery& query);

/// Closed-form density of the cone over the two equivariant planes e^{i phi} R^2 generated
/// by the rays (one plane if they coincide, as for the line).
double cone_density(const EquivariantRayPair& rays, const Point& x0, double l);

/// A profile together with the asymptotic rays used to replace it beyond its ends.
struct EquivariantSurface {
  ProfileCurve curve;
  EquivariantRayPair tailRays;  ///< limiting angles at the incoming and outgoing end
  int multiplicity = 1;         ///< 2 if (s, alpha) covers the surface twice (line through 0)

  EquivariantSurface scaled(double c) const;
};

/// Builds the surface of a profile: tail rays from asymptotic_angles when both ends reach
/// r >= 3, otherwise from the end directions; detects double covers.
EquivariantSurface make_surface(const ProfileCurve& curve);

struct SurfaceMeasure {
  std::variant<EquivariantSurface, PlanePair> surface;
  int resolution = 256;     ///< minimum number of angular nodes
  double accuracy = 1e-7;   ///< admissible far-field substitution error
};

/// Gaussian density int_L kernel(query) of the measured surface (width l - t).
/// Throws AccuracyNotMet when the far-field estimate exceeds measure.accuracy.
double surface_density(const SurfaceMeasure& measure, const DensityQuery& query);

/// Estimated error of replacing the surface beyond its ends by the tail planes.
double tail_bound(const EquivariantSurface& surface, const DensityQuery& query);

/// Theta_t(x0, l) of an expander: density of sqrt(2t) L at width l.
double expander_density(const EquivariantSurface& expander, const Point& x0, double l, double t,
                        int resolution = 256);

struct DensitySample {
  Point x0{};
  double l = 0.0;
  double t = 0.0;
  double theta = 0.0;
  double bound = 0.0;  ///< comparison value where applicable
};

struct DensityGrid {
  std::vector<Point> centers;
  std::vector<double> scales;
  std::vector<double> times;
};

/// Deterministic grid of nc centers within radius maxRadius, nl scales in [lMin, lMax]
/// (log-spaced) and nt times in (0, tMax].
DensityGrid make_density_grid(int nc, int nl, int nt, double maxRadius, double lMin, double lMax,
                              double tMax, unsigned seed = 20240611);

struct MonotonicityReport {
  std::vector<DensitySample> samples;
  std::vector<DensitySample> violations;
  double maxViolation = 0.0;  ///< max(Theta_t - Theta_0(x0, l + t)), may be negative
};

/// Checks Theta_t(x0, l) <= Theta_0(x0, l + t) + tol with Theta_0 the cone density.
MonotonicityReport monotonicity_check(const EquivariantSurface& expander, const DensityGrid& grid,
                                      double tol = 1e-6);

struct SupReport {
  std::vector<DensitySample> samples;
  double sup = 0.0;
  DensitySample argmax;
  double marginBelow2 = 0.0;
};

/// sup of Theta_t(x0, l) over a grid (time t = grid.times).
SupReport density_sup(const EquivariantSurface& expander, const DensityGrid& grid);

/// True iff Theta_{1/2}(y, l) <= 1 + epsilon0 / 2 at sampled y and l <= delta / 2.
bool white_density_bound(const EquivariantSurface& expander, double epsilon0, double delta);

/// Largest delta in {2^-k : k = 0..kMax} for which white_density_bound holds; 0 if none.
double white_delta_sweep(const EquivariantSurface& expander, double epsilon0, int kMax = 10);

/// H^2(L cap B_rho(x)) / rho^2 by the same quadrature.
double area_ratio(const EquivariantSurface& surface, const Point& x, double rho);

struct AreaRatioReport {
  double maxRatio = 0.0;
  Point argCenter{};
  double argRadius = 0.0;
};

/// Max area ratio over centers on and off the surface and radii in [rhoMin, rhoMax].
AreaRatioReport area_ratio_sweep(const EquivariantSurface& surface, double rhoMin, double rhoMax);

nlohmann::json point_to_json(const Point& p);

}  // namespace lagexp
