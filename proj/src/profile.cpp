#include "lagexp/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lagexp {

ProfileCurve::ProfileCurve(std::vector<ProfileSample> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw DomainError("profile curve needs at least two samples");
  step_ = samples_[1].s - samples_[0].s;
  if (!(step_ > 0.0)) throw DomainError("profile samples must be ordered by increasing s");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!(samples_[i].r >= 0.0)) {
      throw DomainError("negative radius at sample " + std::to_string(i));
    }
    if (i > 0) {
      const double ds = samples_[i].s - samples_[i - 1].s;
      if (std::abs(ds - step_) > 1e-6 * step_) {
        throw DomainError("non-uniform arc-length spacing at sample " + std::to_string(i));
      }
    }
  }
}

double ProfileCurve::min_radius() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& p : samples_) m = std::min(m, p.r);
  return m;
}

double ProfileCurve::max_radius() const {
  double m = 0.0;
  for (const auto& p : samples_) m = std::max(m, p.r);
  return m;
}

Complex ProfileCurve::gamma(std::size_t i) const {
  return std::polar(samples_[i].r, samples_[i].phi);
}

Complex ProfileCurve::tangent(std::size_t i) const { return std::polar(1.0, samples_[i].psi); }

std::vector<Complex> ProfileCurve::points() const {
  std::vector<Complex> out;
  out.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) out.push_back(gamma(i));
  return out;
}

ProfileCurve ProfileCurve::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("scale factor must be positive");
  auto out = samples_;
  for (auto& p : out) {
    p.s *= c;
    p.r *= c;
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve ProfileCurve::rotated(double angle) const {
  auto out = samples_;
  for (auto& p : out) {
    p.phi += angle;
    p.psi += angle;
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve ProfileCurve::reversed() const {
  std::vector<ProfileSample> out(samples_.rbegin(), samples_.rend());
  for (auto& p : out) {
    p.s = -p.s;
    p.psi += kPi;
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve ProfileCurve::reflected() const {
  std::vector<ProfileSample> out(samples_.rbegin(), samples_.rend());
  for (auto& p : out) {
    p.s = -p.s;
    p.phi = -p.phi;
    p.psi = kPi - p.psi;
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve profile_from_points(const std::vector<Complex>& pts, double s0, double h) {
  const std::size_t n = pts.size();
  if (n < 5) throw DomainError("profile_from_points needs at least five points");
  std::vector<ProfileSample> out(n);
  double prevPhi = 0.0, prevPsi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Complex d;
    if (i >= 2 && i + 2 < n) {
      d = (-pts[i + 2] + 8.0 * pts[i + 1] - 8.0 * pts[i - 1] + pts[i - 2]) / (12.0 * h);
    } else if (i < 2) {
      d = (-25.0 * pts[i] + 48.0 * pts[i + 1] - 36.0 * pts[i + 2] + 16.0 * pts[i + 3] -
           3.0 * pts[i + 4]) /
          (12.0 * h);
    } else {
      d = (25.0 * pts[i] - 48.0 * pts[i - 1] + 36.0 * pts[i - 2] - 16.0 * pts[i - 3] +
           3.0 * pts[i - 4]) /
          (12.0 * h);
    }
    const double r = std::abs(pts[i]);
    double phi = r > 0.0 ? std::arg(pts[i]) : prevPhi;
    double psi = std::arg(d);
    if (i > 0) {
      phi = unwrap_near(phi, prevPhi);
      psi = unwrap_near(psi, prevPsi);
    }
    out[i] = {s0 + static_cast<double>(i) * h, r, phi, psi};
    prevPhi = phi;
    prevPsi = psi;
  }
  return ProfileCurve(std::move(out));
}

namespace {

std::size_t sample_count(double length, double step) {
  if (!(step > 0.0)) throw DomainError("step size must be positive");
  if (!(length > 0.0)) throw DomainError("length must be positive");
  return static_cast<std::size_t>(std::llround(length / step)) + 1;
}

}  // namespace

ProfileCurve straight_line(double phi0, double halfLength, double step) {
  const std::size_t half = sample_count(halfLength, step) - 1;
  std::vector<ProfileSample> out;
  out.reserve(2 * half + 1);
  for (std::size_t k = 0; k <= 2 * half; ++k) {
    const double s = (static_cast<double>(k) - static_cast<double>(half)) * step;
    out.push_back({s, std::abs(s), s < 0.0 ? phi0 + kPi : phi0, phi0});
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve half_line(double phi0, double length, double step) {
  const std::size_t n = sample_count(length, step);
  std::vector<ProfileSample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = static_cast<double>(k) * step;
    out.push_back({s, s, phi0, phi0});
  }
  return ProfileCurve(std::move(out));
}

ProfileCurve cone_profile(const EquivariantRayPair& rays, double length, double step) {
  const std::size_t half = sample_count(length, step) - 1;
  std::vector<ProfileSample> out;
  out.reserve(2 * half + 1);
  for (std::size_t k = 0; k <= 2 * half; ++k) {
    const double s = (static_cast<double>(k) - static_cast<double>(half)) * step;
    if (s < 0.0) {
      out.push_back({s, -s, rays.phiMinus, rays.phiMinus + kPi});
    } else {
      out.push_back({s, s, rays.phiPlus, rays.phiPlus});
    }
  }
  return ProfileCurve(std::move(out));
}

CurveDiagnostics diagnose(const ProfileCurve& curve) {
  CurveDiagnostics d;
  const double h = curve.step();
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    d.maxChordDefect =
        std::max(d.maxChordDefect, std::abs(std::abs(curve.gamma(i + 1) - curve.gamma(i)) - h));
  }
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    const auto& c = curve[i + 1];
    if (std::min({a.r, b.r, c.r}) < 2.0 * h) continue;
    const double u = b.psi - b.phi;
    const double dr = (c.r - a.r) / (2.0 * h);
    const double dphi = (c.phi - a.phi) / (2.0 * h);
    d.maxCompatibility = std::max(d.maxCompatibility, std::abs(dr - std::cos(u)));
    d.maxCompatibility = std::max(d.maxCompatibility, std::abs(b.r * dphi - std::sin(u)));
  }
  return d;
}

double oscillation(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

}  // namespace lagexp
