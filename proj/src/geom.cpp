#include "lagexp/geom.hpp"

#include <cmath>
#include <string>

#include "lagexp/errors.hpp"

namespace lagexp {

double inner(const Point& a, const Point& b) {
  return (std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]).real();
}

double norm(const Point& a) { return std::sqrt(std::norm(a[0]) + std::norm(a[1])); }

Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1]}; }
Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1]}; }
Point operator*(double c, const Point& a) { return {c * a[0], c * a[1]}; }

Point apply_j(const Point& a) {
  const Complex i(0.0, 1.0);
  return {i * a[0], i * a[1]};
}

double kaehler_form(const Point& u, const Point& v) { return inner(apply_j(u), v); }

double wrap_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double unwrap_near(double angle, double reference) {
  return reference + wrap_angle(angle - reference);
}

std::vector<double> unwrap(std::span<const double> angles) {
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t i = 1; i < out.size(); ++i) {
    out[i] = unwrap_near(out[i], out[i - 1]);
    if (std::abs(out[i] - out[i - 1]) >= 0.5 * kPi) {
      throw NumericalDegeneracy("angle jumps by more than pi/2 between samples " +
                                std::to_string(i - 1) + " and " + std::to_string(i));
    }
  }
  return out;
}

namespace {

// Reduces to [0, pi) and snaps values within the tolerance of pi back to 0.
double reduce_mod_pi(double angle) {
  double a = std::fmod(angle, kPi);
  if (a < 0.0) a += kPi;
  if (kPi - a < kAngleTolerance * kPi) a = 0.0;
  return a;
}

bool is_multiple_of_pi(double angle) {
  const double a = reduce_mod_pi(angle);
  return a < kAngleTolerance * kPi;
}

}  // namespace

PlanePair::PlanePair(double theta1, double theta2)
    : theta1_(reduce_mod_pi(theta1)), theta2_(reduce_mod_pi(theta2)) {
  if (is_multiple_of_pi(theta1_) || is_multiple_of_pi(theta2_)) {
    throw DomainError("plane pair is not transverse: theta1 = " + std::to_string(theta1) +
                      ", theta2 = " + std::to_string(theta2));
  }
}

void to_json(nlohmann::json& j, const PlanePair& pair) {
  j = nlohmann::json{{"theta1", pair.theta1()}, {"theta2", pair.theta2()}};
}

PlanePair plane_pair_from_json(const nlohmann::json& j) {
  return PlanePair(j.at("theta1").get<double>(), j.at("theta2").get<double>());
}

void to_json(nlohmann::json& j, const EquivariantRayPair& rays) {
  j = nlohmann::json{{"phiMinus", rays.phiMinus}, {"phiPlus", rays.phiPlus}};
}

CanonicalRays canonicalize(const EquivariantRayPair& rays) {
  const double diff = wrap_angle(rays.phiPlus - rays.phiMinus);
  if (std::abs(std::abs(diff) - kPi) < kAngleTolerance * kPi) {
    return {RayKind::Line, rays.phiMinus, rays.phiMinus + kPi};
  }
  const double delta = reduce_mod_pi(diff);
  if (delta < kAngleTolerance * kPi) {
    throw DomainError("rays generate the same plane (not transverse)");
  }
  if (std::abs(delta - 0.5 * kPi) < kAngleTolerance * kPi) {
    throw DomainError("rays at separation pi/2 generate an area-minimizing pair of planes");
  }
  if (delta < 0.5 * kPi) {
    return {RayKind::Neck, rays.phiMinus, rays.phiMinus + delta};
  }
  // The complementary sector: from the plus ray counterclockwise to the antipode of the
  // minus ray.
  return {RayKind::Neck, rays.phiMinus + delta, rays.phiMinus + kPi};
}

bool same_planes(const EquivariantRayPair& a, const EquivariantRayPair& b, double tol) {
  auto close_mod_pi = [tol](double x, double y) {
    const double d = reduce_mod_pi(x - y);
    return d < tol || kPi - d < tol;
  };
  return (close_mod_pi(a.phiMinus, b.phiMinus) && close_mod_pi(a.phiPlus, b.phiPlus)) ||
         (close_mod_pi(a.phiMinus, b.phiPlus) && close_mod_pi(a.phiPlus, b.phiMinus));
}

PlanePair to_plane_pair(const EquivariantRayPair& rays) {
  const double delta = rays.phiPlus - rays.phiMinus;
  return PlanePair(delta, delta);
}

double lagrangian_angle(const LagrangianFrame& frame, double tol) {
  const double nu = norm(frame.u);
  const double nv = norm(frame.v);
  const double uv = inner(frame.u, frame.v);
  const double w = kaehler_form(frame.u, frame.v);
  if (std::abs(nu - 1.0) > tol || std::abs(nv - 1.0) > tol || std::abs(uv) > tol) {
    throw InvalidFrame("frame is not orthonormal");
  }
  if (std::abs(w) > tol) {
    throw InvalidFrame("frame does not span a Lagrangian plane: omega(u, v) = " +
                       std::to_string(w));
  }
  const Complex det = frame.u[0] * frame.v[1] - frame.u[1] * frame.v[0];
  return wrap_angle(std::arg(det));
}

double liouville_eval(const Point& point, const Point& vector) {
  double sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    sum += point[j].real() * vector[j].imag() - point[j].imag() * vector[j].real();
  }
  return sum;
}

bool area_minimizing_pair(const PlanePair& pair) {
  return is_multiple_of_pi(pair.theta1() + pair.theta2());
}

PlanePair rotation_path(const PlanePair& pair, double s) {
  if (area_minimizing_pair(pair)) {
    throw DomainError("rotation path requires a non-area-minimizing pair");
  }
  if (s < 0.0 || s > 1.0) throw DomainError("rotation path parameter outside [0, 1]");
  const double half = 0.5 * (pair.theta1() - pair.theta2());
  return PlanePair(pair.theta1() - s * half, pair.theta2() + s * half);
}

double mu(const Point& point) {
  return point[0].real() * point[1].imag() - point[1].real() * point[0].imag();
}

Point equivariant_point(Complex gamma, double alpha) {
  return {gamma * std::cos(alpha), gamma * std::sin(alpha)};
}

LagrangianFrame equivariant_frame(Complex gamma, Complex tangent, double alpha) {
  const Complex t = tangent / std::abs(tangent);
  const Complex g = gamma / std::abs(gamma);
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  return {{t * c, t * s}, {-g * s, g * c}};
}

LagrangianFrame plane_frame(const LagrangianPlane& plane) {
  return {{std::polar(1.0, plane.phase1), Complex(0.0)},
          {Complex(0.0), std::polar(1.0, plane.phase2)}};
}

double distance_to_plane(const LagrangianPlane& plane, const Point& point) {
  const Complex a = point[0] * std::polar(1.0, -plane.phase1);
  const Complex b = point[1] * std::polar(1.0, -plane.phase2);
  return std::hypot(a.imag(), b.imag());
}

std::array<double, 2> plane_coordinates(const LagrangianPlane& plane, const Point& point) {
  return {(point[0] * std::polar(1.0, -plane.phase1)).real(),
          (point[1] * std::polar(1.0, -plane.phase2)).real()};
}

}  // namespace lagexp
