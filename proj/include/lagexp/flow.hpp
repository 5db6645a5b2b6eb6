#pragma once

// Equivariant Lagrangian mean curvature flow on profile curves. The surface generated by
// gamma moves by its mean curvature; on the profile this is the normal velocity
//
//   V = kappa + Im(conj(gamma) T) / |gamma|^2 = kappa + sin(psi - phi) / r   along nu = i T,
//
// so an expander (kappa = -(r + 1/r) sin(psi - phi)) moves with V = -r sin(psi - phi) =
// <x, nu> and sqrt(2t) L is a solution.

#include <vector>

#include <json.hpp>

#include "lagexp/errors.hpp"
#include "lagexp/geom.hpp"
#include "lagexp/profile.hpp"

namespace lagexp {

struct FlowState {
  ProfileCurve curve;
  double time = 0.0;
};

/// Cone mollification width used by default (run_from_cone, cone_uniqueness_check callers).
inline constexpr double kDefaultMollification = 0.025;

struct FlowOptions {
  double ds = 1e-2;              ///< target arc-length spacing
  double dtFactor = 0.4;         ///< dt = dtFactor * ds^2 when no dt is given
  double radius = 8.0;           ///< far ends of the initial cone (fixed during the flow)
  double singularRadius = 1e-3;  ///< min |gamma| below which the flow is declared singular
  double compareRadius = 4.0;    ///< Hausdorff comparisons use vertices with |z| <= this
};

/// The flow reached the rotation axis (or another breakdown) before the requested time.
class FlowSingularity : public NumericalError {
 public:
  FlowSingularity(const std::string& what, FlowState last)
      : NumericalError(what), last_(std::move(last)) {}
  const FlowState& last_state() const { return last_; }

 private:
  FlowState last_;
};

/// Normal velocity at every sample; 0 at the fixed end points. At a sample on the axis
/// (|gamma| = 0 on a curve through the origin) the forcing term takes its limit -kappa/2.
std::vector<double> normal_velocity(const ProfileCurve& curve);

/// Redistributes the points to (nearly) uniform arc length by cubic interpolation in the
/// chord-length parameter, keeping the end points and the number of points.
std::vector<Complex> resample_uniform(const std::vector<Complex>& points);

/// One explicit Euler step followed by arc-length resampling. Throws StepRejected when
/// dt > ds^2 / 2 (ds the current spacing) or dt <= 0, and FlowSingularity when the distance
/// from the polyline to the origin drops below singularRadius from above.
FlowState flow_step(const FlowState& state, double dt, double singularRadius = 1e-3);

/// Cone over the rays with |y| replaced near the vertex by a C^3 mollifier of width w
/// (in the frame where the bisector is the real axis the cone is x = cot(opening/2) |y|).
/// Sampled at spacing ~ ds out to radius R. Antipodal rays give the straight line.
ProfileCurve mollified_cone(const EquivariantRayPair& rays, double w, double ds, double radius);

struct FlowRun {
  FlowState state;                  ///< at tEnd, rescaled by 1/sqrt(2 tEnd)
  FlowState unscaled;               ///< at tEnd as computed
  std::vector<FlowState> snapshots; ///< unscaled states every snapshotInterval (if > 0)
  double dt = 0.0;
  int steps = 0;
};

/// Flows the mollified cone from t = 0 to tEnd. dt <= 0 selects dtFactor * ds^2.
FlowRun run_from_cone(const EquivariantRayPair& rays, double tEnd, double dt,
                      double desingularizationRadius, const FlowOptions& options = {},
                      double snapshotInterval = 0.0);

/// Flows `start` from start.time to tEnd with the given dt (the last step is shortened).
FlowRun run_flow(const FlowState& start, double tEnd, double dt, const FlowOptions& options = {},
                 double snapshotInterval = 0.0);

struct SelfSimilarityReport {
  std::vector<double> taus;
  std::vector<double> defects;  ///< Hausdorff distance to sqrt(1 + 2 tau) * expander
  double maxDefect = 0.0;
};

/// Flows the expander (as the t = 1/2 slice) to 1/2 + tauMax and compares with the
/// rescaled expander at `checks` evenly spaced tau. dt <= 0 selects dtFactor * ds^2.
SelfSimilarityReport self_similarity_check(const ProfileCurve& expander, double tauMax, double dt,
                                           const FlowOptions& options = {}, int checks = 5);

struct UniquenessReport {
  double distanceToReference = 0.0;  ///< run (ds, w) against the reference profile
  double mollificationChange = 0.0;  ///< run (ds, w) against run (ds, w/2)
  double discretizationError = 0.0;  ///< run (ds, w) against run (ds/2, w)
  double discretizationErrorHalf = 0.0;  ///< run (ds, w/2) against run (ds/2, w/2)

  /// Estimated combined discretization error of the two runs being compared.
  double combined() const { return discretizationError + discretizationErrorHalf; }
  bool independent() const { return mollificationChange < combined(); }
};

/// Flows the cone mollified at widths w and w/2, each at ds and ds/2, to t = 1/2 and compares
/// the states (Hausdorff distance within compareRadius). The ds/2 runs only serve as the
/// Richardson estimate of the discretization error at ds.
UniquenessReport cone_uniqueness_check(const ProfileCurve& reference, const EquivariantRayPair& rays,
                                       double w, const FlowOptions& options = {});

struct MuReport {
  double maxAbsMu = 0.0;
  std::size_t points = 0;
};

/// |mu| over the embedded surface points (gamma cos a, gamma sin a) of every state.
MuReport mu_conservation_check(const std::vector<FlowState>& states, int alphaSamples = 16);

/// |mu| over an arbitrary point set.
MuReport mu_check(const std::vector<Point>& points);

nlohmann::json flow_manifest_json(const EquivariantRayPair& rays, double dt, double ds,
                                  const std::vector<double>& times);

}  // namespace lagexp
