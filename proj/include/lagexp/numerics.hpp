#pragma once

// Small numerical helpers shared by the profile, density, linop and flow modules.

#include <complex>
#include <span>
#include <vector>

namespace lagexp {

/// Quadrature weights of a fourth-order composite rule on a uniform grid with spacing h.
/// Interior intervals use the cubic through the four surrounding nodes; the first and
/// last intervals use the one-sided cubic. Falls back to the trapezoid rule below
/// four nodes.
std::vector<double> uniform_weights(std::size_t n, double h);

/// Running integral F_i = int_{x_0}^{x_i} f on a uniform grid, fourth order.
std::vector<double> cumulative_integral(std::span<const double> values, double h);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double rss = 0.0;  ///< residual sum of squares
  double slopeStdError = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x. Requires at least three points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Distance from p to the polyline through `curve`.
double distance_to_polyline(std::complex<double> p, std::span<const std::complex<double>> curve);

/// Hausdorff distance between two planar polylines, restricted to the vertices lying in
/// the disk |z| <= radius (each vertex is measured against the full other polyline).
double hausdorff_distance(std::span<const std::complex<double>> a,
                          std::span<const std::complex<double>> b,
                          double radius);

}  // namespace lagexp
