#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include <boost/math/special_functions/expint.hpp>
#include <boost/numeric/odeint.hpp>

#include "lagexp/profile.hpp"
#include "profile_internal.hpp"

namespace lagexp {

ProfileState ode_rhs(const ProfileState& x) {
  if (!(x.r > 0.0)) throw DomainError("ode_rhs requires r > 0, got r = " + std::to_string(x.r));
  const double su = std::sin(x.psi - x.phi);
  return {std::cos(x.psi - x.phi), su / x.r, -x.r * su - su / x.r};
}

namespace detail {

namespace odeint = boost::numeric::odeint;
using OdeState = std::array<double, 3>;

namespace {

struct Abort {
  std::string why;
};

}  // namespace

struct Advancer::Impl {
  IntegrationOptions opt;
  odeint::runge_kutta4<OdeState> rk4;
  decltype(odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(1.0, 1.0)) ctrl;

  explicit Impl(const IntegrationOptions& o)
      : opt(o),
        ctrl(odeint::make_controlled<odeint::runge_kutta_dopri5<OdeState>>(
            o.tolerance > 0 ? o.tolerance : 1e-12, o.tolerance > 0 ? o.tolerance : 1e-12)) {}

  void system(const OdeState& x, OdeState& dx, double) const {
    if (!(x[0] > opt.minRadius)) {
      throw Abort{"profile reached the origin (r = " + std::to_string(x[0]) + ")"};
    }
    const auto d = ode_rhs({x[0], x[1], x[2]});
    if (!(std::abs(d.psi) <= opt.maxCurvature)) {
      throw Abort{"curvature blow-up (|psi'| = " + std::to_string(std::abs(d.psi)) + ")"};
    }
    dx = {d.r, d.phi, d.psi};
  }
};

Advancer::Advancer(const IntegrationOptions& options) : impl_(std::make_unique<Impl>(options)) {}
Advancer::~Advancer() = default;

bool Advancer::advance(ProfileState& state, double s, double h, std::string& why) {
  OdeState x{state.r, state.phi, state.psi};
  auto sys = [this](const OdeState& y, OdeState& dy, double t) { impl_->system(y, dy, t); };
  try {
    if (impl_->opt.tolerance <= 0.0) {
      impl_->rk4.do_step(sys, x, s, h);
      OdeState probe;
      sys(x, probe, s + h);
    } else {
      // A first trial step longer than the radius would step across the origin.
      const double dt0 = std::min(h, 0.05 * state.r);
      odeint::integrate_adaptive(impl_->ctrl, sys, x, s, s + h, dt0);
    }
  } catch (const Abort& a) {
    why = a.why;
    return false;
  }
  state = {x[0], x[1], x[2]};
  return true;
}

std::vector<ProfileSample> sample_forward(const ProfileState& start, double step,
                                          std::size_t maxSteps, const IntegrationOptions& options,
                                          const std::function<bool(const ProfileState&)>& stop) {
  if (!(start.r > 0.0)) throw DomainError("integration start requires r > 0");
  if (!(step > 0.0)) throw DomainError("step size must be positive");
  Advancer adv(options);
  std::vector<ProfileSample> out;
  out.reserve(maxSteps + 1);
  ProfileState x = start;
  out.push_back({0.0, x.r, x.phi, x.psi});
  std::string why;
  for (std::size_t k = 1; k <= maxSteps; ++k) {
    const double s = static_cast<double>(k - 1) * step;
    if (!adv.advance(x, s, step, why)) {
      throw IntegrationFailure(why + " at s = " + std::to_string(s), std::move(out));
    }
    out.push_back({static_cast<double>(k) * step, x.r, x.phi, x.psi});
    if (stop && stop(x)) break;
  }
  return out;
}

}  // namespace detail

ProfileCurve integrate(const ProfileState& start, double length,
                       const IntegrationOptions& options) {
  if (length == 0.0) throw DomainError("integration length must be nonzero");
  const double h = options.stepSize;
  if (!(h > 0.0)) throw DomainError("step size must be positive");
  const auto n = static_cast<std::size_t>(std::llround(std::abs(length) / h));
  if (n < 1) throw DomainError("integration length shorter than one step");
  if (length > 0.0) return ProfileCurve(detail::sample_forward(start, h, n, options, {}));

  // Backwards: integrate the reversed curve forwards and flip it.
  const ProfileState rev{start.r, start.phi, start.psi + kPi};
  std::vector<ProfileSample> fwd;
  try {
    fwd = detail::sample_forward(rev, h, n, options, {});
  } catch (IntegrationFailure& f) {
    auto partial = f.partial();
    for (auto& p : partial) {
      p.s = -p.s;
      p.psi -= kPi;
    }
    std::reverse(partial.begin(), partial.end());
    throw IntegrationFailure(f.what(), std::move(partial));
  }
  std::vector<ProfileSample> out(fwd.rbegin(), fwd.rend());
  for (auto& p : out) {
    p.s = -p.s;
    p.psi -= kPi;
  }
  return ProfileCurve(std::move(out));
}

namespace {

// 1/T - e^T E1(T); the asymptotic series is used once e^T would lose all digits.
double tail_factor(double t) {
  if (t > 40.0) {
    const double it = 1.0 / t;
    return it * it * (1.0 - 2.0 * it + 6.0 * it * it - 24.0 * it * it * it + 120.0 * it * it * it * it);
  }
  return 1.0 / t - std::exp(t) * boost::math::expint(1, t);
}

}  // namespace

double limiting_angle(const ProfileState& end) {
  if (end.r < 3.0) {
    throw InsufficientData("end radius " + std::to_string(end.r) +
                           " too small to extrapolate the limiting ray (need r >= 3)");
  }
  const double u = wrap_angle(end.psi - end.phi);
  if (std::abs(u) > 0.25) {
    throw InsufficientData("profile end is not yet radial (psi - phi = " + std::to_string(u) + ")");
  }
  // Linearized tail: du/dr = -(r + 2/r) u, dphi/dr = u / r.
  const double t = 0.5 * end.r * end.r;
  return end.phi + std::tan(u) * 0.25 * end.r * end.r * tail_factor(t);
}

}  // namespace lagexp
