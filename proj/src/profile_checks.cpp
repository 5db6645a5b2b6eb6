#include <algorithm>
#include <cmath>
#include <string>

#include "lagexp/numerics.hpp"
#include "lagexp/profile.hpp"

namespace lagexp {

EquivariantRayPair asymptotic_angles(const ProfileCurve& curve, double minRadius) {
  if (curve.size() < 2) throw InsufficientData("empty profile");
  const auto& a = curve.samples().front();
  const auto& b = curve.samples().back();
  if (a.r < minRadius || b.r < minRadius) {
    throw InsufficientData("profile ends at radii " + std::to_string(a.r) + ", " +
                           std::to_string(b.r) + "; need at least " + std::to_string(minRadius));
  }
  // The incoming end is the outgoing end of the reversed curve.
  const double minus = limiting_angle({a.r, a.phi, a.psi + kPi});
  const double plus = limiting_angle({b.r, b.phi, b.psi});
  return {minus, plus};
}

double residual_selfexpander(const ProfileCurve& curve, int alphaSamples) {
  if (alphaSamples < 1) throw DomainError("need at least one angular sample");
  const double h = curve.step();
  const double da = h;
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    if (curve[i].r < 4.0 * h) continue;
    const Complex gm = curve.gamma(i - 1), g0 = curve.gamma(i), gp = curve.gamma(i + 1);
    for (int j = 0; j < alphaSamples; ++j) {
      const double a = 2.0 * kPi * (j + 0.25) / alphaSamples;
      const Point x = equivariant_point(g0, a);
      const Point xsp = equivariant_point(gp, a), xsm = equivariant_point(gm, a);
      const Point xap = equivariant_point(g0, a + da), xam = equivariant_point(g0, a - da);
      const Point xs = (0.5 / h) * (xsp - xsm);
      const Point xa = (0.5 / da) * (xap - xam);
      const Point xss = (1.0 / (h * h)) * (xsp - 2.0 * x + xsm);
      const Point xaa = (1.0 / (da * da)) * (xap - 2.0 * x + xam);
      const Point xsa =
          (0.25 / (h * da)) * (equivariant_point(gp, a + da) - equivariant_point(gp, a - da) -
                               equivariant_point(gm, a + da) + equivariant_point(gm, a - da));
      const double g11 = inner(xs, xs), g12 = inner(xs, xa), g22 = inner(xa, xa);
      const double det = g11 * g22 - g12 * g12;
      if (!(det > 1e-14 * g11 * g22)) {
        throw NumericalDegeneracy("degenerate discrete frame at sample " + std::to_string(i));
      }
      const double i11 = g22 / det, i12 = -g12 / det, i22 = g11 / det;
      auto tangential = [&](const Point& v) {
        const double c1 = inner(v, xs), c2 = inner(v, xa);
        return (i11 * c1 + i12 * c2) * xs + (i12 * c1 + i22 * c2) * xa;
      };
      const Point trace = i11 * xss + (2.0 * i12) * xsa + i22 * xaa;
      const Point mean = trace - tangential(trace);
      const Point xperp = x - tangential(x);
      worst = std::max(worst, norm(mean - xperp));
    }
  }
  return worst;
}

std::vector<double> beta_theta_sum(const ProfileCurve& curve) {
  const std::size_t n = curve.size();
  std::vector<double> liouville(n), theta(n);
  bool have = false;
  double prev = 0.0, shift = 0.0;
  Complex prevGamma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = curve[i];
    liouville[i] = p.r * std::sin(p.psi - p.phi);
    if (p.r == 0.0) {
      theta[i] = prev;
      continue;
    }
    const Complex g = curve.gamma(i);
    if (have && (std::conj(prevGamma) * g).real() < 0.0) {
      // Passing through the axis flips the orientation of the circle orbit.
      shift -= kPi;
    }
    double t = p.psi + p.phi + shift;
    if (have) t = unwrap_near(t, prev);
    theta[i] = t;
    prev = t;
    prevGamma = g;
    have = true;
  }
  for (std::size_t i = 0; i < n && curve[i].r == 0.0; ++i) theta[i] = prev;
  const auto beta = cumulative_integral(liouville, curve.step());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = theta[i] + beta[i];
  return out;
}

double max_curvature(const ProfileCurve& curve) {
  double k = 0.0;
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    k = std::max(k, std::abs(curve[i + 1].psi - curve[i - 1].psi) / (2.0 * curve.step()));
  }
  return k;
}

double residual_threshold(const ProfileCurve& curve) {
  // The leading finite-difference error of the second derivative scales like kappa^3 ds^2;
  // the constant is the largest residual / (ds^2 (1 + kappa^3)) seen on necks of
  // openings 0.1 .. 1.5.
  constexpr double kReference = 0.25;
  const double k = max_curvature(curve);
  const double h = curve.step();
  return 10.0 * h * h * kReference * (1.0 + k * k * k);
}

std::vector<std::pair<double, double>> graph_potential(const ProfileCurve& curve, double rMin,
                                                       double rMax) {
  const auto& last = curve.samples().back();
  const double phiInf = limiting_angle({last.r, last.phi, last.psi});
  const std::size_t n = curve.size();
  // Integrate from the far end inwards: psi_g(s) = -int_s^end y(rho) d rho.
  std::vector<double> f(n), x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& p = curve[n - 1 - k];
    x[k] = p.r * std::cos(p.phi - phiInf);
    y[k] = p.r * std::sin(p.phi - phiInf);
    f[k] = y[k] * std::cos(p.psi - phiInf);
  }
  const auto acc = cumulative_integral(f, curve.step());
  // Beyond the end y decays like exp(-rho^2/2) / rho^3, so its tail integral is about y / rho.
  const double tail = y[0] / x[0];
  // Only the outgoing branch: walk inwards while the radius keeps decreasing.
  std::size_t branch = 1;
  while (branch < n && curve[n - 1 - branch].r < curve[n - branch].r) ++branch;
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = branch; k-- > 0;) {
    if (x[k] < rMin || x[k] > rMax) continue;
    out.emplace_back(x[k], -(acc[k] + tail));
  }
  return out;
}

DecayFit fit_decay(const ProfileCurve& curve, double rMin, double rMax) {
  if (rMax <= 0.0) rMax = curve.samples().back().r - 1.0;
  if (!(rMax > rMin)) throw InsufficientData("decay fit window is empty");
  const auto pot = graph_potential(curve, rMin, rMax);
  std::vector<double> r2, lr, lp;
  for (const auto& [rho, v] : pot) {
    if (v == 0.0) continue;
    r2.push_back(rho * rho);
    lr.push_back(std::log(rho));
    lp.push_back(std::log(std::abs(v)));
  }
  if (r2.size() < 3) throw InsufficientData("too few points in the decay fit window");
  const auto e = fit_line(r2, lp);
  const auto p = fit_line(lr, lp);
  DecayFit fit;
  fit.slope = e.slope;
  fit.intercept = e.intercept;
  fit.rss = e.rss;
  fit.slopeStdError = e.slopeStdError;
  fit.polySlope = p.slope;
  fit.polyRss = p.rss;
  fit.rMin = rMin;
  fit.rMax = rMax;
  fit.points = e.points;
  return fit;
}

}  // namespace lagexp
