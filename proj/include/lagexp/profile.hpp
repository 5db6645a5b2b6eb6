#pragma once

// Equivariant profile curves gamma(s) in C, the surfaces (gamma cos a, gamma sin a) they
// generate, and the construction of self-expanders H = x^perp by shooting.
//
// State along a profile: arc length s, radius r = |gamma|, polar angle phi = arg gamma and
// tangent angle psi = arg gamma'. On these variables the self-expander equation reads
//
//   r'   = cos(psi - phi)
//   phi' = sin(psi - phi) / r
//   psi' = -r sin(psi - phi) - sin(psi - phi) / r
//
// (the normal component of Delta X = H against x^perp along i gamma').

#include <cstddef>
#include <string>
#include <vector>

#include "lagexp/errors.hpp"
#include "lagexp/geom.hpp"

namespace lagexp {

struct ProfileSample {
  double s = 0.0;
  double r = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

/// Uniformly arc-length sampled profile curve. Samples are ordered by s with a constant
/// spacing; radii are nonnegative (a zero radius only occurs on curves through the
/// origin such as lines and cones; accepted expanders have r > 0 everywhere).
class ProfileCurve {
 public:
  ProfileCurve() = default;
  /// Throws DomainError for fewer than two samples, non-uniform spacing or r < 0.
  explicit ProfileCurve(std::vector<ProfileSample> samples);

  const std::vector<ProfileSample>& samples() const { return samples_; }
  const ProfileSample& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  double s_min() const { return samples_.front().s; }
  double s_max() const { return samples_.back().s; }
  double step() const { return step_; }
  double min_radius() const;
  double max_radius() const;

  Complex gamma(std::size_t i) const;
  Complex tangent(std::size_t i) const;
  std::vector<Complex> points() const;

  /// c * gamma (not an expander unless c == 1).
  ProfileCurve scaled(double c) const;
  /// e^{i angle} gamma.
  ProfileCurve rotated(double angle) const;
  /// Traverses the curve backwards: s -> -s, psi -> psi + pi.
  ProfileCurve reversed() const;
  /// Complex conjugate traversed backwards, so orientation stays counterclockwise.
  ProfileCurve reflected() const;

 private:
  std::vector<ProfileSample> samples_;
  double step_ = 0.0;
};

/// Builds a uniformly sampled profile from points with (approximately) uniform chord
/// spacing; psi is taken from fourth-order central differences of the points.
ProfileCurve profile_from_points(const std::vector<Complex>& points, double s0, double step);

/// gamma(s) = s e^{i phi0}, s in [-halfLength, halfLength]; generates e^{i phi0} R^2 twice.
ProfileCurve straight_line(double phi0, double halfLength, double step);
/// gamma(s) = s e^{i phi0}, s in [0, length]; generates e^{i phi0} R^2 once.
ProfileCurve half_line(double phi0, double length, double step);
/// The cone: the incoming ray phiMinus followed by the outgoing ray phiPlus, through 0.
ProfileCurve cone_profile(const EquivariantRayPair& rays, double length, double step);

struct CurveDiagnostics {
  double maxChordDefect = 0.0;   ///< max | |gamma_{i+1} - gamma_i| - ds |
  double maxCompatibility = 0.0; ///< max |r' - cos(psi-phi)|, |r phi' - sin(psi-phi)|
};

/// Invariant diagnostics using central differences at samples with r > 0.
CurveDiagnostics diagnose(const ProfileCurve& curve);

// ---- ODE ----

struct ProfileState {
  double r = 0.0;
  double phi = 0.0;
  double psi = 0.0;
};

/// Right-hand side of the self-expander ODE. Throws DomainError for r <= 0.
ProfileState ode_rhs(const ProfileState& state);

struct IntegrationOptions {
  double stepSize = 0.01;    ///< spacing of the output samples
  double tolerance = 1e-12;  ///< adaptive error tolerance; 0 selects fixed classical RK4 steps
  double minRadius = 1e-8;
  double maxCurvature = 1e8;
};

class IntegrationFailure : public NumericalError {
 public:
  IntegrationFailure(const std::string& what, std::vector<ProfileSample> partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const std::vector<ProfileSample>& partial() const { return partial_; }

 private:
  std::vector<ProfileSample> partial_;
};

/// Integrates the ODE from `start` (placed at s = 0) over signed arc length `length`.
/// Negative lengths integrate backwards; the result is ordered by increasing s either way.
/// Throws IntegrationFailure (with the partial curve) if r drops below minRadius or the
/// curvature exceeds maxCurvature.
ProfileCurve integrate(const ProfileState& start, double length,
                       const IntegrationOptions& options);

/// Polar angle of the asymptotic ray reached from an outgoing end state, extrapolated
/// with the decaying tail of the linearized equation. Requires r >= 3.
double limiting_angle(const ProfileState& end);

// ---- shooting ----

struct ShootingProblem {
  EquivariantRayPair rays;
  double tolerance = 1e-10;  ///< on the opening-angle mismatch
  double truncationRadius = 6.0;
  double stepSize = 0.01;
  double neckMin = 1e-3;  ///< neck-radius search interval
  double neckMax = 20.0;
  int sweepSamples = 48;
};

struct SweepPoint {
  double neckRadius = 0.0;
  double mismatch = 0.0;  ///< opening(neckRadius) - requested opening
};

class ShootingNotFound : public NumericalError {
 public:
  ShootingNotFound(const std::string& what, std::vector<SweepPoint> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<SweepPoint>& trace() const { return trace_; }

 private:
  std::vector<SweepPoint> trace_;
};

/// Opening angle between the two asymptotic rays of the symmetric neck whose closest
/// point to the origin lies at distance neckRadius.
double neck_opening(double neckRadius, double tolerance = 1e-13);

/// Mismatch neck_opening(r) - opening on a log-spaced sweep of the neck interval.
std::vector<SweepPoint> mismatch_sweep(double opening, const ShootingProblem& problem);

int count_sign_changes(const std::vector<SweepPoint>& sweep);

struct ShootingResult {
  ProfileCurve curve;
  CanonicalRays rays;
  double neckRadius = 0.0;  ///< 0 for the straight line
  double mismatch = 0.0;
  std::vector<SweepPoint> sweep;
};

/// Solves for the equivariant expander asymptotic to the planes generated by
/// problem.rays. Throws DomainError for non-transverse or area-minimizing rays and
/// ShootingNotFound when the sweep shows no sign change.
ShootingResult shoot_detailed(const ShootingProblem& problem);
ProfileCurve shoot(const ShootingProblem& problem);

// ---- checks on profiles ----

/// Limiting ray angles at both ends. Throws InsufficientData when an end has r < minRadius.
EquivariantRayPair asymptotic_angles(const ProfileCurve& curve, double minRadius = 3.0);

/// max |H - x^perp| over the generated surface, with H and x^perp obtained from second-order
/// finite differences of the embedding in R^4. Samples with r below 4 ds are skipped.
double residual_selfexpander(const ProfileCurve& curve, int alphaSamples = 4);

/// theta + beta along the curve, theta = psi + phi (continued through the origin for
/// curves crossing it) and beta the primitive of the Liouville form from the left end.
std::vector<double> beta_theta_sum(const ProfileCurve& curve);

double oscillation(const std::vector<double>& values);

/// max |psi'| by central differences.
double max_curvature(const ProfileCurve& curve);

/// Acceptance threshold for residual_selfexpander: 10 ds^2 C (1 + kappa_max^3).
double residual_threshold(const ProfileCurve& curve);

struct DecayFit {
  double slope = 0.0;  ///< d log|psi| / d R^2
  double intercept = 0.0;
  double rss = 0.0;
  double slopeStdError = 0.0;
  double polySlope = 0.0;  ///< d log|psi| / d log R
  double polyRss = 0.0;
  double rMin = 0.0;
  double rMax = 0.0;
  std::size_t points = 0;
  bool exponentialPreferred() const { return rss < polyRss; }
};

/// Graph potential psi of the outgoing end over its asymptotic plane, psi' = normal offset,
/// normalized to vanish at infinity; returned as (R, psi(R)) pairs for R in [rMin, rMax].
std::vector<std::pair<double, double>> graph_potential(const ProfileCurve& curve, double rMin,
                                                       double rMax);

/// Regression of log|psi| against R^2 (and against log R for comparison). rMax <= 0 means
/// (end radius - 1).
DecayFit fit_decay(const ProfileCurve& curve, double rMin = 2.0, double rMax = 0.0);

}  // namespace lagexp
