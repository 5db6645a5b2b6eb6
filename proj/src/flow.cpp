#include "lagexp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lagexp/numerics.hpp"

namespace lagexp {

namespace {

std::vector<double> chord_lengths(const std::vector<Complex>& p) {
  std::vector<double> c(p.size(), 0.0);
  for (std::size_t j = 1; j < p.size(); ++j) c[j] = c[j - 1] + std::abs(p[j] - p[j - 1]);
  return c;
}

std::vector<Complex> resample(const std::vector<Complex>& p, std::size_t count) {
  const std::size_t n = p.size();
  if (n < 4 || count < 2) throw DomainError("resampling needs at least four points");
  const auto c = chord_lengths(p);
  const double total = c.back();
  std::vector<Complex> out(count);
  out.front() = p.front();
  out.back() = p.back();
  std::size_t j = 0;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const double sigma = total * static_cast<double>(k) / static_cast<double>(count - 1);
    while (j + 2 < n && c[j + 1] < sigma) ++j;
    const std::size_t i0 = std::min(j > 0 ? j - 1 : 0, n - 4);
    Complex v = 0.0;
    for (std::size_t a = i0; a < i0 + 4; ++a) {
      double w = 1.0;
      for (std::size_t b = i0; b < i0 + 4; ++b) {
        if (b != a) w *= (sigma - c[b]) / (c[a] - c[b]);
      }
      v += w * p[a];
    }
    out[k] = v;
  }
  return out;
}

// Distance from the origin to the polyline, so that a curve sweeping across the axis between
// samples is still caught.
double min_radius(const std::vector<Complex>& p) { return distance_to_polyline(0.0, p); }

std::vector<double> velocity(const std::vector<Complex>& p, std::vector<Complex>& normal) {
  const std::size_t n = p.size();
  std::vector<double> v(n, 0.0);
  normal.assign(n, Complex(0.0, 0.0));
  const double spacing = chord_lengths(p).back() / static_cast<double>(n - 1);
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const Complex a = p[j] - p[j - 1], b = p[j + 1] - p[j], c = p[j + 1] - p[j - 1];
    const double kappa = 2.0 * (std::conj(a) * b).imag() / (std::abs(a) * std::abs(b) * std::abs(c));
    const Complex t = c / std::abs(c);
    const double r2 = std::norm(p[j]);
    const double forcing =
        std::sqrt(r2) > 1e-9 * spacing ? (std::conj(p[j]) * t).imag() / r2 : -0.5 * kappa;
    v[j] = kappa + forcing;
    normal[j] = Complex(0.0, 1.0) * t;
  }
  return v;
}

ProfileCurve to_profile(const std::vector<Complex>& p) {
  const double total = chord_lengths(p).back();
  const double h = total / static_cast<double>(p.size() - 1);
  return profile_from_points(p, -0.5 * total, h);
}

// One Euler step plus resampling on raw points; returns the new points.
std::vector<Complex> euler_step(const std::vector<Complex>& p, double dt, double singularRadius) {
  const double spacing = chord_lengths(p).back() / static_cast<double>(p.size() - 1);
  if (!(dt > 0.0)) throw StepRejected("time step must be positive");
  if (dt > 0.5 * spacing * spacing) {
    throw StepRejected("time step " + std::to_string(dt) + " exceeds the stability bound " +
                       std::to_string(0.5 * spacing * spacing));
  }
  std::vector<Complex> normal;
  const auto v = velocity(p, normal);
  std::vector<Complex> q(p);
  for (std::size_t j = 1; j + 1 < p.size(); ++j) q[j] += dt * v[j] * normal[j];
  q = resample(q, q.size());
  const double before = min_radius(p), after = min_radius(q);
  if (after < singularRadius && before >= singularRadius) {
    throw FlowSingularity("profile reached the rotation axis (min |gamma| = " +
                              std::to_string(after) + ")",
                          FlowState{to_profile(p), 0.0});
  }
  return q;
}

double mollified_abs(double y, double w) {
  const double a = std::abs(y);
  if (a >= w) return a;
  // m' = S(y/w), S(u) = (35u - 35u^3 + 21u^5 - 5u^7)/16, m(w) = w.
  const double u = a / w;
  const double u2 = u * u;
  const double integral = u2 * (35.0 / 2 - u2 * (35.0 / 4 - u2 * (21.0 / 6 - u2 * 5.0 / 8))) / 16.0;
  const double m0 = w * (1.0 - (35.0 / 2 - 35.0 / 4 + 21.0 / 6 - 5.0 / 8) / 16.0);
  return m0 + w * integral;
}

}  // namespace

std::vector<double> normal_velocity(const ProfileCurve& curve) {
  std::vector<Complex> normal;
  return velocity(curve.points(), normal);
}

std::vector<Complex> resample_uniform(const std::vector<Complex>& points) {
  return resample(points, points.size());
}

FlowState flow_step(const FlowState& state, double dt, double singularRadius) {
  try {
    return {to_profile(euler_step(state.curve.points(), dt, singularRadius)), state.time + dt};
  } catch (const FlowSingularity& e) {
    throw FlowSingularity(e.what(), state);
  }
}

ProfileCurve mollified_cone(const EquivariantRayPair& rays, double w, double ds, double radius) {
  if (!(w > 0.0) || !(ds > 0.0) || !(radius > 4.0 * ds)) {
    throw DomainError("mollified cone needs w > 0, ds > 0 and radius > 4 ds");
  }
  const auto canon = canonicalize(rays);
  if (canon.kind == RayKind::Line) return straight_line(canon.phiPlus, radius, ds);
  const double half = 0.5 * canon.opening();
  const double cot = std::cos(half) / std::sin(half);
  const double ymax = radius * std::sin(half);
  if (w >= ymax) throw DomainError("mollification width exceeds the cone");
  const Complex rot = std::polar(1.0, canon.bisector());
  const auto fine = static_cast<std::size_t>(std::ceil(2.0 * ymax / (ds / 16.0))) + 1;
  std::vector<Complex> pts(fine);
  for (std::size_t i = 0; i < fine; ++i) {
    const double y = -ymax + 2.0 * ymax * static_cast<double>(i) / static_cast<double>(fine - 1);
    pts[i] = rot * Complex(cot * mollified_abs(y, w), y);
  }
  const double total = chord_lengths(pts).back();
  const auto n = static_cast<std::size_t>(std::max(8.0, std::round(total / ds))) + 1;
  return to_profile(resample(pts, n));
}

FlowRun run_flow(const FlowState& start, double tEnd, double dt, const FlowOptions& options,
                 double snapshotInterval) {
  if (tEnd < start.time) throw DomainError("end time precedes the start time");
  FlowRun run;
  run.dt = dt > 0.0 ? dt : options.dtFactor * start.curve.step() * start.curve.step();
  std::vector<Complex> p = start.curve.points();
  double t = start.time;
  double nextSnap = snapshotInterval > 0.0 ? t : std::numeric_limits<double>::infinity();
  while (true) {
    if (t >= nextSnap - 1e-12) {
      run.snapshots.push_back({to_profile(p), t});
      nextSnap += snapshotInterval;
    }
    if (t >= tEnd - 1e-14) break;
    const double step = std::min(run.dt, tEnd - t);
    try {
      p = euler_step(p, step, options.singularRadius);
    } catch (const FlowSingularity& e) {
      throw FlowSingularity(std::string(e.what()) + " at t = " + std::to_string(t),
                            FlowState{to_profile(p), t});
    }
    t = (tEnd - t <= run.dt) ? tEnd : t + step;
    ++run.steps;
  }
  run.unscaled = {to_profile(p), tEnd};
  run.state = run.unscaled;
  return run;
}

FlowRun run_from_cone(const EquivariantRayPair& rays, double tEnd, double dt,
                      double desingularizationRadius, const FlowOptions& options,
                      double snapshotInterval) {
  if (!(tEnd > 0.0)) throw DomainError("flow end time must be positive");
  const ProfileCurve cone = mollified_cone(rays, desingularizationRadius, options.ds, options.radius);
  FlowRun run = run_flow({cone, 0.0}, tEnd, dt, options, snapshotInterval);
  if (tEnd != 0.5) run.state.curve = run.unscaled.curve.scaled(1.0 / std::sqrt(2.0 * tEnd));
  return run;
}

SelfSimilarityReport self_similarity_check(const ProfileCurve& expander, double tauMax, double dt,
                                           const FlowOptions& options, int checks) {
  if (!(tauMax > 0.0) || checks < 1) throw DomainError("self-similarity check needs tauMax > 0");
  SelfSimilarityReport rep;
  const double h = expander.step();
  const double step = dt > 0.0 ? dt : options.dtFactor * h * h;
  FlowState state{expander, 0.5};
  const auto base = expander.points();
  for (int k = 1; k <= checks; ++k) {
    const double tau = tauMax * k / checks;
    state = run_flow(state, 0.5 + tau, step, options).unscaled;
    std::vector<Complex> target(base.size());
    const double c = std::sqrt(1.0 + 2.0 * tau);
    for (std::size_t i = 0; i < base.size(); ++i) target[i] = c * base[i];
    const auto pts = state.curve.points();
    rep.taus.push_back(tau);
    rep.defects.push_back(hausdorff_distance(pts, target, options.compareRadius));
    rep.maxDefect = std::max(rep.maxDefect, rep.defects.back());
  }
  return rep;
}

UniquenessReport cone_uniqueness_check(const ProfileCurve& reference, const EquivariantRayPair& rays,
                                       double w, const FlowOptions& options) {
  FlowOptions half = options;
  half.ds = 0.5 * options.ds;
  auto final_points = [&](const FlowOptions& o, double width) {
    return run_from_cone(rays, 0.5, -1.0, width, o).state.curve.points();
  };
  const auto a = final_points(options, w), b = final_points(options, 0.5 * w);
  const auto a2 = final_points(half, w), b2 = final_points(half, 0.5 * w);
  const double rad = options.compareRadius;
  UniquenessReport rep;
  rep.distanceToReference = hausdorff_distance(a, reference.points(), rad);
  rep.mollificationChange = hausdorff_distance(a, b, rad);
  rep.discretizationError = hausdorff_distance(a, a2, rad);
  rep.discretizationErrorHalf = hausdorff_distance(b, b2, rad);
  return rep;
}

MuReport mu_conservation_check(const std::vector<FlowState>& states, int alphaSamples) {
  MuReport rep;
  for (const auto& s : states) {
    for (const auto& g : s.curve.points()) {
      for (int a = 0; a < alphaSamples; ++a) {
        const double alpha = 2.0 * kPi * a / alphaSamples;
        rep.maxAbsMu = std::max(rep.maxAbsMu, std::abs(mu(equivariant_point(g, alpha))));
        ++rep.points;
      }
    }
  }
  return rep;
}

MuReport mu_check(const std::vector<Point>& points) {
  MuReport rep;
  for (const auto& p : points) rep.maxAbsMu = std::max(rep.maxAbsMu, std::abs(mu(p)));
  rep.points = points.size();
  return rep;
}

nlohmann::json flow_manifest_json(const EquivariantRayPair& rays, double dt, double ds,
                                  const std::vector<double>& times) {
  nlohmann::json j;
  j["rays"] = rays;
  j["dt"] = dt;
  j["ds"] = ds;
  j["times"] = times;
  return j;
}

}  // namespace lagexp
