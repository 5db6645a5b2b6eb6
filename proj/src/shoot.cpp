#include <algorithm>
#include <cmath>
#include <string>

#include "lagexp/profile.hpp"
#include "profile_internal.hpp"

namespace lagexp {

namespace {

constexpr double kExtrapolationRadius = 6.0;
constexpr double kMaxShootLength = 400.0;

// Follows the forward branch from the symmetric neck point until it is radial far out.
ProfileState outgoing_end(double neckRadius, double tolerance) {
  IntegrationOptions opt;
  opt.tolerance = tolerance;
  opt.minRadius = 1e-12;
  opt.maxCurvature = 1e12;
  detail::Advancer adv(opt);
  ProfileState x{neckRadius, 0.0, 0.5 * kPi};
  const double chunk = std::min(0.25, 0.5 * neckRadius + 0.01);
  std::string why;
  for (double s = 0.0; s < kMaxShootLength; s += chunk) {
    if (!adv.advance(x, s, chunk, why)) {
      throw NumericalError("neck radius " + std::to_string(neckRadius) + ": " + why);
    }
    if (x.r >= kExtrapolationRadius && std::abs(std::sin(x.psi - x.phi)) < 1e-6) return x;
  }
  throw NumericalError("neck radius " + std::to_string(neckRadius) +
                       ": branch did not become radial");
}

ProfileCurve symmetric_neck(double neckRadius, double radius, double step) {
  IntegrationOptions opt;
  opt.stepSize = step;
  opt.tolerance = 1e-12;
  opt.minRadius = 1e-12;
  opt.maxCurvature = 1e12;
  const auto maxSteps = static_cast<std::size_t>(std::ceil(kMaxShootLength / step));
  auto fwd = detail::sample_forward({neckRadius, 0.0, 0.5 * kPi}, step, maxSteps, opt,
                                    [radius](const ProfileState& x) {
                                      return x.r >= radius && std::cos(x.psi - x.phi) > 0.0;
                                    });
  if (fwd.back().r < radius) {
    throw NumericalError("neck branch did not reach the truncation radius");
  }
  // The backward branch is the conjugate of the forward branch traversed backwards.
  std::vector<ProfileSample> all;
  all.reserve(2 * fwd.size() - 1);
  for (std::size_t k = fwd.size() - 1; k >= 1; --k) {
    const auto& p = fwd[k];
    all.push_back({-p.s, p.r, -p.phi, kPi - p.psi});
  }
  all.insert(all.end(), fwd.begin(), fwd.end());
  return ProfileCurve(std::move(all));
}

}  // namespace

double neck_opening(double neckRadius, double tolerance) {
  if (!(neckRadius > 0.0)) throw DomainError("neck radius must be positive");
  return 2.0 * limiting_angle(outgoing_end(neckRadius, tolerance));
}

std::vector<SweepPoint> mismatch_sweep(double opening, const ShootingProblem& problem) {
  if (problem.sweepSamples < 2) throw DomainError("sweep needs at least two samples");
  if (!(problem.neckMin > 0.0 && problem.neckMax > problem.neckMin)) {
    throw DomainError("invalid neck-radius search interval");
  }
  std::vector<SweepPoint> out;
  const double a = std::log(problem.neckMin);
  const double b = std::log(problem.neckMax);
  for (int k = 0; k < problem.sweepSamples; ++k) {
    const double r = std::exp(a + (b - a) * k / (problem.sweepSamples - 1));
    out.push_back({r, neck_opening(r) - opening});
  }
  return out;
}

int count_sign_changes(const std::vector<SweepPoint>& sweep) {
  int n = 0;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if ((sweep[i - 1].mismatch < 0.0) != (sweep[i].mismatch < 0.0)) ++n;
  }
  return n;
}

ShootingResult shoot_detailed(const ShootingProblem& problem) {
  if (!(problem.tolerance > 0.0)) throw DomainError("shooting tolerance must be positive");
  if (!(problem.stepSize > 0.0)) throw DomainError("step size must be positive");
  if (problem.truncationRadius < 3.0) throw DomainError("truncation radius must be at least 3");
  const CanonicalRays rays = canonicalize(problem.rays);

  ShootingResult result;
  result.rays = rays;
  if (rays.kind == RayKind::Line) {
    result.curve = straight_line(rays.phiPlus, problem.truncationRadius, problem.stepSize);
    return result;
  }

  const double opening = rays.opening();
  result.sweep = mismatch_sweep(opening, problem);
  const auto& sw = result.sweep;
  std::size_t bracket = 0;
  for (std::size_t i = 1; i < sw.size(); ++i) {
    if ((sw[i - 1].mismatch < 0.0) != (sw[i].mismatch < 0.0)) {
      bracket = i;
      break;
    }
  }
  if (bracket == 0) {
    throw ShootingNotFound("no sign change of the opening mismatch in the neck interval [" +
                               std::to_string(problem.neckMin) + ", " +
                               std::to_string(problem.neckMax) + "]",
                           sw);
  }

  // Illinois variant of regula falsi on log(neck radius).
  double xa = std::log(sw[bracket - 1].neckRadius), fa = sw[bracket - 1].mismatch;
  double xb = std::log(sw[bracket].neckRadius), fb = sw[bracket].mismatch;
  double x = xa, fx = fa;
  int side = 0;
  for (int it = 0; it < 200; ++it) {
    x = (xa * fb - xb * fa) / (fb - fa);
    fx = neck_opening(std::exp(x)) - opening;
    if (std::abs(fx) < problem.tolerance || std::abs(xb - xa) < 1e-15) break;
    if ((fx < 0.0) == (fb < 0.0)) {
      xb = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      xa = x;
      fa = fx;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  if (!(std::abs(fx) < problem.tolerance)) {
    throw ShootingNotFound("root refinement stalled with mismatch " + std::to_string(fx), sw);
  }

  result.neckRadius = std::exp(x);
  result.mismatch = fx;
  result.curve = symmetric_neck(result.neckRadius, problem.truncationRadius, problem.stepSize)
                     .rotated(rays.bisector());
  return result;
}

ProfileCurve shoot(const ShootingProblem& problem) { return shoot_detailed(problem).curve; }

}  // namespace lagexp
