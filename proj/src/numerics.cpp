#include "lagexp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lagexp {

std::vector<double> uniform_weights(std::size_t n, double h) {
  std::vector<double> w(n, 0.0);
  if (n < 2) return w;
  if (n < 4) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      w[i] += 0.5 * h;
      w[i + 1] += 0.5 * h;
    }
    return w;
  }
  const double c = h / 24.0;
  // first interval: one-sided cubic through nodes 0..3
  w[0] += 9 * c;
  w[1] += 19 * c;
  w[2] -= 5 * c;
  w[3] += 1 * c;
  for (std::size_t i = 1; i + 2 < n; ++i) {
    w[i - 1] -= c;
    w[i] += 13 * c;
    w[i + 1] += 13 * c;
    w[i + 2] -= c;
  }
  // last interval
  w[n - 1] += 9 * c;
  w[n - 2] += 19 * c;
  w[n - 3] -= 5 * c;
  w[n - 4] += 1 * c;
  return w;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t i = 1; i < n; ++i) out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
  }
  const double c = h / 24.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double piece;
    if (i == 0) {
      piece = c * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]);
    } else if (i + 2 == n) {
      piece = c * (9 * f[n - 1] + 19 * f[n - 2] - 5 * f[n - 3] + f[n - 4]);
    } else {
      piece = c * (-f[i - 1] + 13 * f[i] + 13 * f[i + 1] - f[i + 2]);
    }
    out[i + 1] = out[i] + piece;
  }
  return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) {
    throw std::invalid_argument("fit_line needs at least three (x, y) pairs");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0) throw std::invalid_argument("fit_line: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    fit.rss += e * e;
  }
  fit.slopeStdError = std::sqrt(fit.rss / (n - 2.0) / sxx);
  fit.points = x.size();
  return fit;
}

double distance_to_polyline(std::complex<double> p,
                            std::span<const std::complex<double>> curve) {
  double best = std::numeric_limits<double>::infinity();
  if (curve.size() == 1) return std::abs(p - curve[0]);
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    const auto a = curve[i];
    const auto d = curve[i + 1] - a;
    const double len2 = std::norm(d);
    double t = len2 > 0 ? ((std::conj(d) * (p - a)).real() / len2) : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(p - (a + t * d)));
  }
  return best;
}

double hausdorff_distance(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b, double radius) {
  double h = 0.0;
  for (const auto& p : a) {
    if (std::abs(p) <= radius) h = std::max(h, distance_to_polyline(p, b));
  }
  for (const auto& p : b) {
    if (std::abs(p) <= radius) h = std::max(h, distance_to_polyline(p, a));
  }
  return h;
}

}  // namespace lagexp
