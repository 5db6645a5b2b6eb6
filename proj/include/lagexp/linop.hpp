#pragma once

// The linearized self-expander operator L(phi) = Delta phi + <x, grad phi> - 2 phi restricted to
// Fourier modes f(s) e^{i k alpha} on an equivariant surface with metric ds^2 + r^2 d alpha^2:
//
//   L f = f'' + (r'/r + r r') f' - (k^2 / r^2) f - 2 f,   r' = cos(psi - phi),
//
// and its formal adjoint L* = Delta - <x, grad> - (4 + |x^perp|^2), |x^perp|^2 = r^2 sin^2(psi - phi).

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <json.hpp>

#include "lagexp/profile.hpp"

namespace lagexp {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

/// Cell-centered grid on the samples of a profile with r <= truncationRadius. Nodes are the
/// profile samples (every `stride`-th one). The boundary is homogeneous Dirichlet, except at a
/// profile start on the rotation axis (flat plane), where the flux through r = 0 vanishes.
struct OperatorGrid {
  ProfileCurve base;
  int mode = 0;
  double truncationRadius = 6.0;
  int stride = 1;
  double zeroOrder = -2.0;  ///< the constant term; -2 for L

  std::vector<double> s, r, dr, sinU;  ///< node data, filled by make_grid
  double h = 0.0;
  bool axis = false;

  std::size_t size() const { return r.size(); }
  std::vector<double> weights() const;  ///< volume element r_i h
};

/// Uses every stride-th sample; a cell-centered plane base is resampled at the coarse cell
/// centers instead. Throws DomainError for fewer than 16 interior nodes, truncation radius < 4,
/// negative mode or a first cell face on the far side of the axis.
OperatorGrid make_grid(const ProfileCurve& base, int mode, double truncationRadius = 6.0,
                       int stride = 1, double zeroOrder = -2.0);

/// The flat plane as a base: r = s at s = (i + 1/2) h, i = 0 .. R/h - 1.
ProfileCurve plane_base(double h, double radius);

SparseMatrix assemble(const OperatorGrid& grid);
SparseMatrix assemble_adjoint(const OperatorGrid& grid);

/// Pointwise L f for a smooth radial-profile function given by value and derivatives.
struct TestFunction {
  std::function<double(double)> f, df, d2f;
};

/// amplitude * exp(-(s - center)^2 / (2 width^2)).
TestFunction gaussian_bump(double center, double width, double amplitude = 1.0);

std::vector<double> sample(const TestFunction& fn, const std::vector<double>& s);

/// Symbolic L f at the grid nodes (uses the node data r, r' exactly).
std::vector<double> apply_symbolic(const OperatorGrid& grid, const TestFunction& fn);

struct WeightedNormReport {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2star = 0.0;
  double drift = 0.0;  ///< the term (int <x^T, grad phi>^2)^(1/2) alone
};

WeightedNormReport norms(const OperatorGrid& grid, const Vector& phi);

/// Gram matrix of the discrete H^2_* norm (l2 + gradient + Hessian + drift terms).
SparseMatrix h2star_gram(const OperatorGrid& grid);

enum class Pairing { H2StarToL2, L2ToL2 };

/// sqrt of the smallest eigenvalue of A^T W A v = lambda N v, N the Gram matrix of the
/// domain norm; bisection on the inertia of the banded matrix A^T W A - lambda N.
double smallest_singular_value(const OperatorGrid& grid, Pairing pairing = Pairing::H2StarToL2);

/// Same quantity from a dense generalized symmetric eigensolver (small grids only).
double smallest_singular_value_dense(const OperatorGrid& grid,
                                     Pairing pairing = Pairing::H2StarToL2);

/// Real eigenvalues of the assembled matrix (it is similar to a symmetric tridiagonal one).
std::vector<double> eigenvalues(const OperatorGrid& grid);

/// The `count` eigenvalues of smallest magnitude, ordered by magnitude.
std::vector<double> eigenvalues_nearest(const OperatorGrid& grid, double target, int count);

/// The H^2_* -> L^2 singular values lie in (0, 1] up to discretization (highly oscillating
/// functions have ratio -> 1); values below this floor count as a numerical zero.
inline constexpr double kSigmaFloor = 0.1;

struct InvertibilityReport {
  int mode = 0;
  double h = 0.0;
  double truncationRadius = 0.0;
  double sigma = 0.0;          ///< grid (h, R)
  double sigmaRefined = 0.0;   ///< grid (h/2, R)
  double sigmaExtended = 0.0;  ///< grid (h, R + 1)
  double drift = 0.0;          ///< max relative change against sigma
  bool positive = false;       ///< sigma > kSigmaFloor
  bool stable = false;         ///< drift < 20%

  bool witnessed() const { return positive && stable; }
};

/// sigma_min on the grid with the given stride, on the half-stride grid and with R + 1.
/// The base must reach radius R + 1 and stride must be even.
InvertibilityReport invertibility_check(const ProfileCurve& base, int mode,
                                        double truncationRadius = 6.0, int stride = 2,
                                        double zeroOrder = -2.0);

struct CoercivityReport {
  double maxRatio = 0.0;  ///< max ||phi||^2_{H^2_*} / ||L phi||^2_{L^2}
  int trials = 0;
};

/// Random sums of three Gaussian bumps with centers in [sLo, sHi], numerically compactly
/// supported (|f| < 1e-8 outside [sLo - 1, sHi + 1]); fixed seed.
std::vector<TestFunction> random_test_functions(double sLo, double sHi, int count,
                                                unsigned seed = 12345);

CoercivityReport coercivity_check(const OperatorGrid& grid,
                                  const std::vector<TestFunction>& functions);
/// Uses random_test_functions over the middle of the grid.
CoercivityReport coercivity_check(const OperatorGrid& grid, int trials, unsigned seed = 12345);

struct BarrierReport {
  double maxClosedForm = 0.0;  ///< max over nodes of (L rho + 4 rho) / rho, closed form
  double maxMatrix = 0.0;      ///< max of (A rho + 4 rho) / rho_max over interior rows
  double maxMismatch = 0.0;    ///< max |A rho - L rho| / rho_max over interior rows
  bool holds = false;          ///< closed form <= 0 at every interior node
  bool strict = false;         ///< strictly negative where |x^perp| > 1e-8
};

/// rho = exp(-r^2 / 2) with L rho = rho (|x^T|^2 - 4 - |x|^2).
BarrierReport barrier_check(const ProfileCurve& base, double truncationRadius = 6.0);

struct LinearizationReport {
  std::vector<double> s;
  std::vector<double> slope;     ///< Richardson slope of (theta + beta) in epsilon
  std::vector<double> assembled; ///< A f
  std::vector<double> symbolic;  ///< pointwise L f
  double relativeError = 0.0;    ///< max |slope - A f| / max |A f| over interior nodes
  std::vector<double> defects;   ///< max |D(eps) - eps L f| per epsilon
  double order = 0.0;            ///< log2 ratio of the first two defects (eps halving)
};

/// Deforms the profile by gamma + eps f' i gamma' (the Hamiltonian flow of f), recomputes
/// theta + beta and compares its epsilon-derivative with L f. epsilons must contain at least
/// two values; the first two are used for the Richardson slope. Throws StepRejected when a
/// deformation leaves the graphical regime.
LinearizationReport linearization_check(const ProfileCurve& base, const TestFunction& fn,
                                        const std::vector<double>& epsilons);

struct RadialGrowthReport {
  std::vector<double> r;
  std::vector<double> f;
  std::vector<double> ratio;  ///< r f'(r) / (3 f(r)); the inequality holds where ratio >= 1
  bool identicallyZero = false;
  bool holdsEverywhere = false;
  bool failsAtLargeR = false;
};

/// f(r) = int_{B_r} eta^2 + (1/3) |grad eta|^2 on the flat plane for radial eta.
RadialGrowthReport radial_growth_check(const std::function<double(double)>& eta,
                                       const std::function<double(double)>& deta, double rMax,
                                       int samples = 400);

nlohmann::json spectrum_json(const OperatorGrid& grid, double sigmaMin,
                             const std::vector<double>& nearestZero);

}  // namespace lagexp
