#include "lagexp/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "lagexp/density.hpp"
#include "lagexp/errors.hpp"
#include "lagexp/flow.hpp"
#include "lagexp/linop.hpp"
#include "lagexp/profile.hpp"

namespace lagexp {

namespace {

const EquivariantRayPair kNeckRays{0.0, 2.0 * kPi / 3.0};

ProfileCurve neck_at(double ds) {
  ShootingProblem p;
  p.rays = kNeckRays;
  p.stepSize = ds;
  return shoot(p);
}

const ProfileCurve& neck() {
  static const ProfileCurve c = neck_at(1e-2);
  return c;
}

// Collects "key value" pairs for the detail line.
class Detail {
 public:
  Detail& operator()(const std::string& key, double value) {
    if (!out_.str().empty()) out_ << ", ";
    out_ << key << ' ' << std::setprecision(4) << value;
    return *this;
  }
  Detail& operator()(const std::string& key, const std::string& value) {
    if (!out_.str().empty()) out_ << ", ";
    out_ << key << ' ' << value;
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. The straight line is a fixed point of both the shooting solver and the flow.
bool plane_fixed_point(Detail& d) {
  const auto t0 = std::chrono::steady_clock::now();
  ShootingProblem p;
  p.rays = {0.0, kPi};
  const auto line = shoot(p);
  const double residual = residual_selfexpander(line);
  double velocity = 0.0;
  for (double v : normal_velocity(line)) velocity = std::max(velocity, std::abs(v));
  const double t = seconds_since(t0);
  d("residual", residual)("velocity", velocity)("runtime", t);
  return residual < 1e-10 && velocity < 1e-10 && t < 1.0;
}

bool density_anchors(Detail& d) {
  const auto t0 = std::chrono::steady_clock::now();
  double planeErr = 0.0, coneErr = 0.0;
  const auto plane = make_surface(half_line(0.0, 6.0, 0.01));
  const auto cone = make_surface(cone_profile(kNeckRays, 6.0, 0.01));
  for (double l : {0.1, 0.5, 1.0, 2.0}) {
    planeErr = std::max(planeErr, std::abs(surface_density({plane}, {{0.0, 0.0}, l, 0.0}) - 1.0));
    coneErr = std::max(coneErr, std::abs(surface_density({cone}, {{0.0, 0.0}, l, 0.0}) - 2.0));
  }
  const auto grid = make_density_grid(10, 10, 5, 1.5, 0.05, 2.0, 1.0);
  const auto sup = density_sup(make_surface(neck()), grid);
  const double t = seconds_since(t0);
  d("plane error", planeErr)("cone error", coneErr)("neck sup", sup.sup)(
      "margin", sup.marginBelow2)("runtime", t);
  return planeErr < 1e-6 && coneErr < 1e-6 && sup.sup < 2.0 && sup.marginBelow2 > 0.0 && t < 30.0;
}

bool monotonicity(Detail& d) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto grid = make_density_grid(10, 10, 5, 1.5, 0.05, 2.0, 1.0);
  const auto n = monotonicity_check(make_surface(neck()), grid);
  const auto p = monotonicity_check(make_surface(half_line(0.0, 6.0, 0.01)), grid);
  const double t = seconds_since(t0);
  d("neck max excess", n.maxViolation)("plane max excess", p.maxViolation)(
      "violations", static_cast<double>(n.violations.size() + p.violations.size()))("runtime", t);
  return n.violations.empty() && p.violations.empty() && t < 30.0;
}

bool uniqueness(Detail& d) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rep = cone_uniqueness_check(neck(), kNeckRays, kDefaultMollification);
  const double t = seconds_since(t0);
  d("distance to shooting", rep.distanceToReference)("w vs w/2", rep.mollificationChange)(
      "discretization", rep.combined())("runtime", t);
  return rep.distanceToReference < 5e-3 && rep.independent() && t < 300.0;
}

bool self_similarity(Detail& d) {
  const auto coarse = self_similarity_check(neck(), 0.25, -1.0);
  FlowOptions o;
  o.ds = 5e-3;
  const auto fine = self_similarity_check(neck_at(5e-3), 0.25, -1.0, o);
  const double order = std::log2(coarse.maxDefect / fine.maxDefect);
  d("defect", coarse.maxDefect)("defect at ds/2", fine.maxDefect)("order", order);
  return coarse.maxDefect < 1e-2 && fine.maxDefect < 2.5e-3 && order >= 1.9;
}

double weighted_dot(const OperatorGrid& g, const Vector& a, const Vector& b) {
  const auto w = g.weights();
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += w[static_cast<std::size_t>(i)] * a[i] * b[i];
  return s;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double adjoint_defect(const OperatorGrid& g, const TestFunction& phi, const TestFunction& eta) {
  const Vector p = to_vector(sample(phi, g.s)), e = to_vector(sample(eta, g.s));
  const double lhs = weighted_dot(g, assemble(g) * p, e);
  const double rhs = weighted_dot(g, p, assemble_adjoint(g) * e);
  return std::abs(lhs - rhs) / std::sqrt(weighted_dot(g, p, p) * weighted_dot(g, e, e));
}

bool spectral(Detail& d) {
  auto eigen_error = [](double h) {
    const auto g = make_grid(plane_base(h, 8.0), 0, 8.0);
    return std::abs(eigenvalues_nearest(g, -4.0, 1).front() + 4.0);
  };
  const double ratio = eigen_error(0.02) / eigen_error(0.01);
  bool witnessed = true;
  double minSigma = 1e300, maxDrift = 0.0;
  for (int k = 0; k <= 4; ++k) {
    const auto rep = invertibility_check(neck(), k);
    witnessed = witnessed && rep.witnessed();
    minSigma = std::min(minSigma, rep.sigma);
    maxDrift = std::max(maxDrift, rep.drift);
  }
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> c(-3.0, 3.0), w(0.3, 0.8);
  const auto g = make_grid(neck(), 0, 6.0, 2);
  double maxScaled = 0.0;
  for (int t = 0; t < 5; ++t) {
    const auto phi = gaussian_bump(c(rng), w(rng)), eta = gaussian_bump(c(rng), w(rng));
    maxScaled = std::max(maxScaled, adjoint_defect(g, phi, eta) / (g.h * g.h));
  }
  d("eigen error ratio", ratio)("min sigma", minSigma)("max drift", maxDrift)(
      "adjoint defect / h^2", maxScaled);
  return std::abs(ratio - 4.0) <= 0.5 && witnessed && maxScaled < 10.0;
}

bool barrier_exactness(Detail& d) {
  double worstBarrier = -1e300, worstOsc = 0.0;
  bool holds = true;
  std::vector<ProfileCurve> family{plane_base(0.01, 6.5)};
  for (double open : {0.3, 0.6, 1.0, kPi / 3, 1.3, 1.5}) {
    ShootingProblem p;
    p.rays = {0.0, open};
    family.push_back(shoot(p));
  }
  family.push_back(neck());
  for (const auto& c : family) {
    const auto rep = barrier_check(c);
    holds = holds && rep.holds;
    worstBarrier = std::max(worstBarrier, rep.maxClosedForm);
    worstOsc = std::max(worstOsc, oscillation(beta_theta_sum(c)));
  }
  d("profiles", static_cast<double>(family.size()))("max (L rho + 4 rho)/rho", worstBarrier)(
      "max beta+theta oscillation", worstOsc);
  return holds && worstOsc < 1e-6;
}

bool decay(Detail& d) {
  const auto fit = fit_decay(neck());
  d("slope", fit.slope)("stderr", fit.slopeStdError)("rss exp", fit.rss)("rss poly", fit.polyRss);
  return fit.slope <= -0.25 + 0.02 && fit.exponentialPreferred();
}

bool linearization(Detail& d) {
  const auto rep = linearization_check(neck(), gaussian_bump(0.3, 0.5), {1e-2, 5e-3});
  d("relative error", rep.relativeError)("defect order", rep.order);
  return rep.relativeError < 1e-3 && rep.order >= 1.9;
}

bool mutations(Detail& d) {
  // Residual: radial perturbation of the neck.
  const auto& c = neck();
  std::vector<Complex> pts;
  for (std::size_t i = 0; i < c.size(); ++i) {
    pts.push_back(std::polar(c[i].r + 0.01 * std::sin(c[i].s), c[i].phi));
  }
  const auto pert = profile_from_points(pts, c.s_min(), c.step());
  const double residual = residual_selfexpander(pert), threshold = residual_threshold(pert);
  const bool residualFires = residual > threshold && residual_selfexpander(c) < residual_threshold(c);

  // sigma_min: the zero-order term flipped from -2 to +2.
  bool operatorFires = false;
  double brokenSigma = 1e300;
  for (int k = 0; k <= 4; ++k) {
    const auto rep = invertibility_check(c, k, 6.0, 2, 2.0);
    operatorFires = operatorFires || !rep.witnessed();
    brokenSigma = std::min(brokenSigma, rep.sigma);
  }

  // mu: a point off every equivariant surface.
  const double muBad = mu_check({{Complex(1.0, 0.0), Complex(0.0, 1.0)}}).maxAbsMu;
  const double muGood = mu_check({equivariant_point(c.gamma(c.size() / 3), 0.7)}).maxAbsMu;

  // Flow: the neck scaled by 1.2 is not self-similar.
  const double scaled = self_similarity_check(c.scaled(1.2), 0.25, -1.0).maxDefect;

  d("perturbed residual", residual)("threshold", threshold)("broken min sigma", brokenSigma)(
      "mu", muBad)("scaled self-similarity", scaled);
  return residualFires && operatorFires && muBad > 1e-12 && muGood < 1e-12 && scaled > 1e-2;
}

struct Criterion {
  const char* name;
  bool (*check)(Detail&);
};

const Criterion kCriteria[] = {
    {"plane fixed point", plane_fixed_point},
    {"density anchors", density_anchors},
    {"monotonicity", monotonicity},
    {"cross-oracle uniqueness", uniqueness},
    {"self-similarity", self_similarity},
    {"spectral anchors", spectral},
    {"barrier and exactness", barrier_exactness},
    {"decay", decay},
    {"linearization", linearization},
    {"mutation detection", mutations},
};

constexpr int kCount = static_cast<int>(sizeof(kCriteria) / sizeof(kCriteria[0]));

}  // namespace

void to_json(nlohmann::json& j, const CriterionResult& r) {
  j = nlohmann::json{{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}};
}

CriterionResult run_criterion(int id) {
  if (id < 1 || id > kCount) throw DomainError("unknown criterion " + std::to_string(id));
  const auto& c = kCriteria[id - 1];
  CriterionResult r;
  r.id = id;
  r.name = c.name;
  const auto t0 = std::chrono::steady_clock::now();
  Detail d;
  try {
    r.passed = c.check(d);
    r.detail = d.str();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids) {
  std::vector<int> todo = ids;
  if (todo.empty()) {
    for (int i = 1; i <= kCount; ++i) todo.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : todo) out.push_back(run_criterion(id));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream o;
  o << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << ' ' << r.name << " (" << std::fixed
    << std::setprecision(1) << r.seconds << " s): " << r.detail;
  return o.str();
}

}  // namespace lagexp
