#pragma once

// Points, Lagrangian planes and frames in C^2, and the predicates that
// classify pairs of planes.
//
// Coordinates: z_j = x_j + i y_j, J = multiplication by i, omega = sum dx_j ^ dy_j,
// Omega = dz_1 ^ dz_2, Liouville form lambda = sum (x_j dy_j - y_j dx_j).

#include <array>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include <json.hpp>

namespace lagexp {

using Complex = std::complex<double>;

/// A point (or a tangent vector) of C^2.
using Point = std::array<Complex, 2>;

inline constexpr double kPi = std::numbers::pi;

/// Relative tolerance used for transversality and angle-sum predicates.
inline constexpr double kAngleTolerance = 1e-10;

// ---- elementary operations on C^2 viewed as R^4 ----

double inner(const Point& a, const Point& b);
double norm(const Point& a);
Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point operator*(double c, const Point& a);
Point apply_j(const Point& a);

/// Kaehler form omega(u, v) = <Ju, v>.
double kaehler_form(const Point& u, const Point& v);

// ---- angles ----

/// Wraps to (-pi, pi].
double wrap_angle(double angle);

/// Representative of `angle` (mod 2 pi) nearest to `reference`.
double unwrap_near(double angle, double reference);

/// Nearest-branch continuation of a sampled angle. Throws NumericalDegeneracy when
/// two consecutive samples differ by more than pi/2 after unwrapping.
std::vector<double> unwrap(std::span<const double> angles);

// ---- planes and frames ----

/// The Lagrangian plane diag(e^{i phase1}, e^{i phase2}) R^2.
struct LagrangianPlane {
  double phase1 = 0.0;
  double phase2 = 0.0;
};

/// An ordered orthonormal real basis of a tangent plane.
struct LagrangianFrame {
  Point u{};
  Point v{};
};

/// A transverse pair in canonical form: P1 = R^2 and P2 = diag(e^{i theta1}, e^{i theta2}) R^2,
/// with both angles stored in [0, pi).
class PlanePair {
 public:
  /// Reduces the angles mod pi; throws DomainError for a non-transverse pair.
  PlanePair(double theta1, double theta2);

  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }

  LagrangianPlane first() const { return {0.0, 0.0}; }
  LagrangianPlane second() const { return {theta1_, theta2_}; }

 private:
  double theta1_;
  double theta2_;
};

void to_json(nlohmann::json& j, const PlanePair& pair);
PlanePair plane_pair_from_json(const nlohmann::json& j);

/// Asymptotic ray directions of an equivariant profile curve. The ray at angle phi
/// generates the plane e^{i phi} R^2, so the pair is transverse iff the angles differ
/// mod pi.
struct EquivariantRayPair {
  double phiMinus = 0.0;
  double phiPlus = 0.0;
};

void to_json(nlohmann::json& j, const EquivariantRayPair& rays);

enum class RayKind {
  Line,  ///< antipodal rays: the straight line through 0
  Neck,  ///< transverse, non-area-minimizing: a neck in a sector of opening < pi/2
};

/// Ray pair rewritten in the representative that an equivariant expander can realize.
/// For `Neck`, phiPlus - phiMinus lies in (0, pi/2) and the rays generate the same planes
/// as the input; for `Line`, phiPlus - phiMinus == pi.
struct CanonicalRays {
  RayKind kind;
  double phiMinus;
  double phiPlus;

  double opening() const { return phiPlus - phiMinus; }
  double bisector() const { return 0.5 * (phiPlus + phiMinus); }
  EquivariantRayPair rays() const { return {phiMinus, phiPlus}; }
};

/// Throws DomainError for non-transverse or area-minimizing configurations.
CanonicalRays canonicalize(const EquivariantRayPair& rays);

/// True if the two pairs generate the same (unordered) pair of planes within `tol`.
bool same_planes(const EquivariantRayPair& a, const EquivariantRayPair& b, double tol);

/// Rotates the pair so that the first ray generates R^2; the result is the canonical
/// PlanePair (delta, delta).
PlanePair to_plane_pair(const EquivariantRayPair& rays);

/// Arg of the complex determinant of the frame, in (-pi, pi]. Throws InvalidFrame when
/// the frame is not orthonormal or not Lagrangian within `tol`.
double lagrangian_angle(const LagrangianFrame& frame, double tol = 1e-8);

/// lambda_x(v) = sum_j (x_j v_{y_j} - y_j v_{x_j}).
double liouville_eval(const Point& point, const Point& vector);

/// True iff theta1 + theta2 is an integer multiple of pi (the pair lies in SL).
bool area_minimizing_pair(const PlanePair& pair);

/// The path (P1, P2(s)) rotating P2 to the equivariant plane of the same Lagrangian
/// angle. Throws DomainError unless the pair is transverse and not area-minimizing.
PlanePair rotation_path(const PlanePair& pair, double s);

/// Moment map of the diagonal circle action, mu = x1 y2 - x2 y1.
double mu(const Point& point);

/// (gamma cos alpha, gamma sin alpha).
Point equivariant_point(Complex gamma, double alpha);

/// Orthonormal frame (gamma'/|gamma'| (cos, sin), gamma/|gamma| (-sin, cos)).
LagrangianFrame equivariant_frame(Complex gamma, Complex tangent, double alpha);

LagrangianFrame plane_frame(const LagrangianPlane& plane);

/// Euclidean distance from `point` to the plane.
double distance_to_plane(const LagrangianPlane& plane, const Point& point);

/// Coordinates of the orthogonal projection of `point` onto the plane, in the plane's
/// basis (e^{i phase1}, 0), (0, e^{i phase2}).
std::array<double, 2> plane_coordinates(const LagrangianPlane& plane, const Point& point);

}  // namespace lagexp
