#include "lagexp/linop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "lagexp/errors.hpp"
#include "lagexp/numerics.hpp"

namespace lagexp {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Tridiagonal matrix with ghost handling: the left ghost is (-1)^k f_0 on the axis and 0
// otherwise; the right ghost is always 0.
SparseMatrix tridiagonal(const OperatorGrid& g, const std::vector<double>& lower,
                         const std::vector<double>& diag, const std::vector<double>& upper) {
  const int n = static_cast<int>(g.size());
  Triplets t;
  t.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    double d = diag[i];
    if (i == 0 && g.axis) d += (g.mode % 2 == 0 ? 1.0 : -1.0) * lower[0];
    if (i > 0 && lower[i] != 0.0) t.emplace_back(i, i - 1, lower[i]);
    if (d != 0.0) t.emplace_back(i, i, d);
    if (i + 1 < n && upper[i] != 0.0) t.emplace_back(i, i + 1, upper[i]);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<double> face_radii(const OperatorGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> f(n + 1);
  f[0] = g.axis ? 0.0 : g.r[0] - 0.5 * g.h * g.dr[0];
  for (std::size_t i = 1; i < n; ++i) f[i] = 0.5 * (g.r[i - 1] + g.r[i]);
  f[n] = g.r[n - 1] + 0.5 * g.h * g.dr[n - 1];
  return f;
}

// Diffusion part (1/r)(r f')' - k^2/r^2 f plus drift `driftSign` * r r' f' and a zero-order
// term per node.
SparseMatrix assemble_with(const OperatorGrid& g, double driftSign,
                           const std::vector<double>& zeroOrder) {
  const std::size_t n = g.size();
  const auto face = face_radii(g);
  const double h2 = g.h * g.h;
  const double k2 = static_cast<double>(g.mode) * g.mode;
  std::vector<double> lo(n), di(n), up(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double drift = driftSign * g.r[i] * g.dr[i] / (2.0 * g.h);
    lo[i] = face[i] / (g.r[i] * h2) - drift;
    up[i] = face[i + 1] / (g.r[i] * h2) + drift;
    di[i] = -(face[i] + face[i + 1]) / (g.r[i] * h2) - k2 / (g.r[i] * g.r[i]) + zeroOrder[i];
  }
  return tridiagonal(g, lo, di, up);
}

SparseMatrix diagonal(const std::vector<double>& d) {
  const int n = static_cast<int>(d.size());
  SparseMatrix m(n, n);
  Triplets t;
  for (int i = 0; i < n; ++i) t.emplace_back(i, i, d[i]);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix first_difference(const OperatorGrid& g) {
  const std::size_t n = g.size();
  std::vector<double> lo(n, -0.5 / g.h), di(n, 0.0), up(n, 0.5 / g.h);
  return tridiagonal(g, lo, di, up);
}

SparseMatrix second_difference(const OperatorGrid& g) {
  const std::size_t n = g.size();
  const double h2 = g.h * g.h;
  std::vector<double> lo(n, 1.0 / h2), di(n, -2.0 / h2), up(n, 1.0 / h2);
  return tridiagonal(g, lo, di, up);
}

// The linear maps T_j whose weighted squares sum to the H^2_* norm, grouped by order.
struct NormPieces {
  std::vector<SparseMatrix> gradient;  // |grad f|^2 = |f'|^2 + k^2/r^2 |f|^2
  std::vector<SparseMatrix> hessian;
  SparseMatrix drift;
};

NormPieces norm_pieces(const OperatorGrid& g) {
  const std::size_t n = g.size();
  const double k = g.mode;
  const SparseMatrix d1 = first_difference(g), d2 = second_difference(g);
  std::vector<double> kOverR(n), drOverR(n), rdr(n), k2OverR2(n);
  for (std::size_t i = 0; i < n; ++i) {
    kOverR[i] = k / g.r[i];
    drOverR[i] = g.dr[i] / g.r[i];
    rdr[i] = g.r[i] * g.dr[i];
    k2OverR2[i] = k * k / (g.r[i] * g.r[i]);
  }
  NormPieces p;
  p.gradient = {d1, diagonal(kOverR)};
  // Orthonormal frame (e_s, e_alpha / r): f'', sqrt(2) k/r (f' - r'/r f), -k^2/r^2 f + r'/r f'.
  const SparseMatrix mixed = std::sqrt(2.0) * diagonal(kOverR) * (d1 - diagonal(drOverR));
  const SparseMatrix angular = diagonal(drOverR) * d1 - diagonal(k2OverR2);
  p.hessian = {d2, mixed, angular};
  p.drift = diagonal(rdr) * d1;
  return p;
}

double weighted_square(const std::vector<double>& w, const Vector& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
  return s;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SparseMatrix domain_gram(const OperatorGrid& g, Pairing pairing) {
  return pairing == Pairing::L2ToL2 ? diagonal(g.weights()) : h2star_gram(g);
}

}  // namespace

std::vector<double> OperatorGrid::weights() const {
  std::vector<double> w(size());
  for (std::size_t i = 0; i < size(); ++i) w[i] = r[i] * h;
  return w;
}

OperatorGrid make_grid(const ProfileCurve& base, int mode, double truncationRadius, int stride,
                       double zeroOrder) {
  if (mode < 0) throw DomainError("Fourier mode must be nonnegative");
  if (truncationRadius < 4.0) throw DomainError("truncation radius must be at least 4");
  if (stride < 1) throw DomainError("stride must be positive");
  // Every stride-th cell center of a plane grid is not a coarse cell center; resample instead.
  const double h0 = base.step();
  if (stride > 1 && base.size() > 1 && std::abs(base[0].r - 0.5 * h0) < 1e-9 * h0 &&
      std::abs(base[0].psi - base[0].phi) < 1e-12) {
    auto g = make_grid(plane_base(h0 * stride, base.s_max() + 0.5 * h0), mode, truncationRadius, 1,
                       zeroOrder);
    g.stride = stride;
    return g;
  }
  OperatorGrid g;
  g.base = base;
  g.mode = mode;
  g.truncationRadius = truncationRadius;
  g.stride = stride;
  g.zeroOrder = zeroOrder;
  g.h = base.step() * stride;

  // The contiguous run of samples with r <= R around the innermost point.
  std::size_t inner = 0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (base[i].r < base[inner].r) inner = i;
  }
  if (base[inner].r > truncationRadius) throw DomainError("profile lies outside the truncation radius");
  std::size_t lo = inner, hi = inner;
  while (lo >= static_cast<std::size_t>(stride) && base[lo - stride].r <= truncationRadius) lo -= stride;
  while (hi + stride < base.size() && base[hi + stride].r <= truncationRadius) hi += stride;
  for (std::size_t i = lo; i <= hi; i += stride) {
    const auto& p = base[i];
    if (p.r <= 0.0) throw DomainError("grid node on the rotation axis; sample the plane at cell centers");
    const double u = p.psi - p.phi;
    g.s.push_back(p.s);
    g.r.push_back(p.r);
    g.dr.push_back(std::cos(u));
    g.sinU.push_back(std::sin(u));
  }
  if (g.size() < 16) throw DomainError("operator grid has fewer than 16 interior nodes");
  g.axis = std::abs(g.r[0] - 0.5 * g.h * g.dr[0]) < 1e-9 * g.h;
  if (!g.axis && g.r[0] - 0.5 * g.h * g.dr[0] <= 0.0) {
    throw DomainError("first cell face crosses the rotation axis");
  }
  return g;
}

ProfileCurve plane_base(double h, double radius) {
  if (!(h > 0.0) || !(radius > h)) throw DomainError("plane base needs 0 < h < radius");
  const auto n = static_cast<std::size_t>(std::floor(radius / h + 1e-9));
  std::vector<ProfileSample> samples;
  samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (static_cast<double>(i) + 0.5) * h;
    samples.push_back({s, s, 0.0, 0.0});
  }
  return ProfileCurve(std::move(samples));
}

SparseMatrix assemble(const OperatorGrid& g) {
  return assemble_with(g, 1.0, std::vector<double>(g.size(), g.zeroOrder));
}

SparseMatrix assemble_adjoint(const OperatorGrid& g) {
  // L* = Delta - <x, grad> - (n + |x^perp|^2) + c with n = 2; c = -2 gives -(4 + |x^perp|^2).
  std::vector<double> z(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double xp = g.r[i] * g.sinU[i];
    z[i] = -(2.0 + xp * xp) + g.zeroOrder;
  }
  return assemble_with(g, -1.0, z);
}

TestFunction gaussian_bump(double center, double width, double amplitude) {
  const double w2 = width * width;
  TestFunction fn;
  fn.f = [=](double s) { return amplitude * std::exp(-(s - center) * (s - center) / (2.0 * w2)); };
  fn.df = [=](double s) {
    const double x = s - center;
    return -amplitude * x / w2 * std::exp(-x * x / (2.0 * w2));
  };
  fn.d2f = [=](double s) {
    const double x = s - center;
    return amplitude * (x * x / w2 - 1.0) / w2 * std::exp(-x * x / (2.0 * w2));
  };
  return fn;
}

std::vector<double> sample(const TestFunction& fn, const std::vector<double>& s) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = fn.f(s[i]);
  return out;
}

std::vector<double> apply_symbolic(const OperatorGrid& g, const TestFunction& fn) {
  std::vector<double> out(g.size());
  const double k2 = static_cast<double>(g.mode) * g.mode;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double s = g.s[i], r = g.r[i], dr = g.dr[i];
    out[i] = fn.d2f(s) + (dr / r + r * dr) * fn.df(s) - k2 / (r * r) * fn.f(s) +
             g.zeroOrder * fn.f(s);
  }
  return out;
}

WeightedNormReport norms(const OperatorGrid& g, const Vector& phi) {
  const auto w = g.weights();
  const auto p = norm_pieces(g);
  double grad = 0.0, hess = 0.0;
  for (const auto& m : p.gradient) grad += weighted_square(w, m * phi);
  for (const auto& m : p.hessian) hess += weighted_square(w, m * phi);
  const double drift = weighted_square(w, p.drift * phi);
  const double l2 = weighted_square(w, phi);
  WeightedNormReport rep;
  rep.l2 = std::sqrt(l2);
  rep.h1 = std::sqrt(l2 + grad);
  rep.h2star = std::sqrt(l2 + grad + hess + drift);
  rep.drift = std::sqrt(drift);
  return rep;
}

SparseMatrix h2star_gram(const OperatorGrid& g) {
  const SparseMatrix w = diagonal(g.weights());
  const auto p = norm_pieces(g);
  SparseMatrix gram = w;
  for (const auto& m : p.gradient) gram += SparseMatrix(m.transpose() * w * m);
  for (const auto& m : p.hessian) gram += SparseMatrix(m.transpose() * w * m);
  gram += SparseMatrix(p.drift.transpose() * w * p.drift);
  return gram;
}

double smallest_singular_value(const OperatorGrid& g, Pairing pairing) {
  const SparseMatrix a = assemble(g);
  const SparseMatrix k = SparseMatrix(a.transpose() * diagonal(g.weights()) * a);
  const SparseMatrix gram = domain_gram(g, pairing);

  // Number of generalized eigenvalues below lambda = number of negative pivots of
  // K - lambda N (Sylvester's law of inertia; N is positive definite).
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt;
  ldlt.analyzePattern(SparseMatrix(k - gram));
  auto below = [&](double lambda) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      ldlt.factorize(SparseMatrix(k - lambda * gram));
      if (ldlt.info() == Eigen::Success) {
        const Vector d = ldlt.vectorD();
        if (d.allFinite() && (d.array() != 0.0).all()) return (d.array() < 0.0).count();
      }
      lambda *= 1.0 + 1e-12;
    }
    throw NumericalDegeneracy("inertia count failed");
  };

  double lo = 0.0, hi = 1.0;
  while (below(hi) == 0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalDegeneracy("smallest singular value not bracketed");
  }
  if (below(0.0) > 0) return 0.0;
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (below(mid) == 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::sqrt(0.5 * (lo + hi));
}

double smallest_singular_value_dense(const OperatorGrid& g, Pairing pairing) {
  const Eigen::MatrixXd a = Eigen::MatrixXd(assemble(g));
  const Eigen::MatrixXd gram = Eigen::MatrixXd(domain_gram(g, pairing));
  const Vector w = to_vector(g.weights());
  const Eigen::MatrixXd k = a.transpose() * w.asDiagonal() * a;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(es.eigenvalues()[0], 0.0));
}

std::vector<double> eigenvalues(const OperatorGrid& g) {
  const SparseMatrix a = assemble(g);
  const Eigen::Index n = a.rows();
  Vector diag(n), sub(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) diag[i] = a.coeff(i, i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double prod = a.coeff(i + 1, i) * a.coeff(i, i + 1);
    if (!(prod > 0.0)) throw NumericalDegeneracy("operator is not symmetrizable on this grid");
    sub[i] = std::sqrt(prod);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
  return out;
}

std::vector<double> eigenvalues_nearest(const OperatorGrid& g, double target, int count) {
  auto ev = eigenvalues(g);
  std::sort(ev.begin(), ev.end(), [&](double x, double y) {
    return std::abs(x - target) < std::abs(y - target);
  });
  ev.resize(std::min<std::size_t>(ev.size(), static_cast<std::size_t>(std::max(count, 0))));
  return ev;
}

std::vector<TestFunction> random_test_functions(double sLo, double sHi, int count,
                                                unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> center(sLo, sHi), width(0.2, 0.6);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::vector<TestFunction> out;
  for (int t = 0; t < count; ++t) {
    std::vector<TestFunction> parts;
    for (int j = 0; j < 3; ++j) parts.push_back(gaussian_bump(center(rng), width(rng), amp(rng)));
    TestFunction fn;
    fn.f = [parts](double s) {
      double v = 0.0;
      for (const auto& p : parts) v += p.f(s);
      return v;
    };
    fn.df = [parts](double s) {
      double v = 0.0;
      for (const auto& p : parts) v += p.df(s);
      return v;
    };
    fn.d2f = [parts](double s) {
      double v = 0.0;
      for (const auto& p : parts) v += p.d2f(s);
      return v;
    };
    out.push_back(std::move(fn));
  }
  return out;
}

InvertibilityReport invertibility_check(const ProfileCurve& base, int mode, double truncationRadius,
                                        int stride, double zeroOrder) {
  if (stride < 2 || stride % 2 != 0) throw DomainError("invertibility check needs an even stride");
  InvertibilityReport rep;
  rep.mode = mode;
  const auto coarse = make_grid(base, mode, truncationRadius, stride, zeroOrder);
  rep.h = coarse.h;
  rep.truncationRadius = truncationRadius;
  rep.sigma = smallest_singular_value(coarse);
  rep.sigmaRefined = smallest_singular_value(make_grid(base, mode, truncationRadius, stride / 2, zeroOrder));
  rep.sigmaExtended = smallest_singular_value(make_grid(base, mode, truncationRadius + 1.0, stride, zeroOrder));
  rep.drift = std::max(std::abs(rep.sigmaRefined - rep.sigma), std::abs(rep.sigmaExtended - rep.sigma)) /
              rep.sigma;
  rep.positive = rep.sigma > kSigmaFloor;
  rep.stable = rep.drift < 0.2;
  return rep;
}

CoercivityReport coercivity_check(const OperatorGrid& g, const std::vector<TestFunction>& fns) {
  const SparseMatrix a = assemble(g);
  const auto w = g.weights();
  CoercivityReport rep;
  for (const auto& fn : fns) {
    const Vector phi = to_vector(sample(fn, g.s));
    const double top = std::pow(norms(g, phi).h2star, 2);
    const double bottom = weighted_square(w, a * phi);
    if (bottom > 0.0) rep.maxRatio = std::max(rep.maxRatio, top / bottom);
    ++rep.trials;
  }
  return rep;
}

CoercivityReport coercivity_check(const OperatorGrid& g, int trials, unsigned seed) {
  const double lo = g.s.front(), hi = g.s.back();
  const double margin = 0.25 * (hi - lo);
  return coercivity_check(g, random_test_functions(lo + margin, hi - margin, trials, seed));
}

BarrierReport barrier_check(const ProfileCurve& base, double truncationRadius) {
  const OperatorGrid g = make_grid(base, 0, truncationRadius);
  const SparseMatrix a = assemble(g);
  const std::size_t n = g.size();
  Vector rho(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::exp(-0.5 * g.r[i] * g.r[i]);
  const Vector arho = a * rho;
  const double rhoMax = rho.maxCoeff();

  BarrierReport rep;
  rep.maxClosedForm = -std::numeric_limits<double>::infinity();
  rep.maxMatrix = -std::numeric_limits<double>::infinity();
  rep.holds = true;
  rep.strict = true;
  for (std::size_t i = 0; i < n; ++i) {
    // L rho = rho (|x^T|^2 - n - 2 - |x|^2) with |x^T|^2 - |x|^2 = -|x^perp|^2 = -(Im conj(gamma) gamma')^2
    const double xPerp = g.r[i] * g.sinU[i];
    const double excess = -xPerp * xPerp;
    const double closed = rho[i] * (excess - 4.0);
    rep.maxClosedForm = std::max(rep.maxClosedForm, excess);
    if (excess > 0.0) rep.holds = false;
    if (std::abs(xPerp) > 1e-8 && !(excess < 0.0)) rep.strict = false;
    const bool interior = (i > 0 || g.axis) && i + 1 < n;
    if (interior) {
      rep.maxMatrix = std::max(rep.maxMatrix, (arho[i] + 4.0 * rho[i]) / rhoMax);
      rep.maxMismatch = std::max(rep.maxMismatch, std::abs(arho[i] - closed) / rhoMax);
    }
  }
  return rep;
}

namespace {

// fourth-order derivative on a uniform grid, second order at the two outermost nodes
std::vector<double> derivative(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 2 && i + 2 < n) {
      d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h);
    } else if (i == 0) {
      d[i] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    } else if (i + 1 == n) {
      d[i] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    } else {
      d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
  }
  return d;
}

// theta + beta along gamma + eps f' i gamma', relative to its value at the first sample
std::vector<double> theta_plus_beta(const ProfileCurve& c, const std::vector<double>& dpsi,
                                    const TestFunction& fn, double eps) {
  const std::size_t n = c.size();
  std::vector<double> lambda(n), theta(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = c[i].s;
    const Complex g = c.gamma(i), t = c.tangent(i);
    const double f1 = fn.df(s), f2 = fn.d2f(s);
    const Complex ge = g + eps * f1 * Complex(0.0, 1.0) * t;
    const Complex stretch = 1.0 + eps * Complex(-f1 * dpsi[i], f2);
    if (std::abs(stretch) < 0.5 || std::abs(ge) < 0.5 * std::abs(g)) {
      throw StepRejected("deformation leaves the graphical regime at s = " + std::to_string(s));
    }
    const Complex te = t * stretch;
    lambda[i] = (std::conj(ge) * te).imag();
    // Lagrangian angle of the equivariant surface: arg gamma' + arg gamma, tracked near the base.
    const double base = c[i].psi + c[i].phi;
    theta[i] = unwrap_near(std::arg(te) + std::arg(ge), base);
  }
  const auto beta = cumulative_integral(lambda, c.step());
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = theta[i] + beta[i] - theta[0];
  return out;
}

}  // namespace

LinearizationReport linearization_check(const ProfileCurve& base, const TestFunction& fn,
                                        const std::vector<double>& eps) {
  if (eps.size() < 2) throw DomainError("linearization check needs two epsilons");
  if (base.min_radius() <= 0.0) throw DomainError("linearization check needs a profile avoiding 0");
  const std::size_t n = base.size();
  std::vector<double> psi(n);
  for (std::size_t i = 0; i < n; ++i) psi[i] = base[i].psi;
  for (std::size_t i = 1; i < n; ++i) psi[i] = unwrap_near(psi[i], psi[i - 1]);
  const auto dpsi = derivative(psi, base.step());

  const auto ref = theta_plus_beta(base, dpsi, fn, 0.0);
  std::vector<std::vector<double>> diffs;
  for (double e : eps) {
    auto d = theta_plus_beta(base, dpsi, fn, e);
    for (std::size_t i = 0; i < n; ++i) d[i] -= ref[i];
    diffs.push_back(std::move(d));
  }

  // Operator on every sample of the base (no truncation).
  OperatorGrid g;
  g.base = base;
  g.h = base.step();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = base[i].psi - base[i].phi;
    g.s.push_back(base[i].s);
    g.r.push_back(base[i].r);
    g.dr.push_back(std::cos(u));
    g.sinU.push_back(std::sin(u));
  }
  const Vector af = assemble(g) * to_vector(sample(fn, g.s));

  LinearizationReport rep;
  rep.s = g.s;
  rep.assembled.assign(af.data(), af.data() + af.size());
  rep.symbolic = apply_symbolic(g, fn);
  const double e1 = eps[0], e2 = eps[1];
  rep.slope.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    rep.slope[i] = (e1 * e1 * diffs[1][i] - e2 * e2 * diffs[0][i]) / (e1 * e2 * (e1 - e2));
  }
  double scale = 0.0, err = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    scale = std::max(scale, std::abs(rep.assembled[i]));
    err = std::max(err, std::abs(rep.slope[i] - rep.assembled[i]));
  }
  rep.relativeError = scale > 0.0 ? err / scale : err;
  for (std::size_t k = 0; k < eps.size(); ++k) {
    double d = 0.0;
    for (std::size_t i = 2; i + 2 < n; ++i) {
      d = std::max(d, std::abs(diffs[k][i] - eps[k] * rep.symbolic[i]));
    }
    rep.defects.push_back(d);
  }
  rep.order = rep.defects[1] > 0.0 ? std::log(rep.defects[0] / rep.defects[1]) / std::log(e1 / e2)
                                   : 0.0;
  return rep;
}

RadialGrowthReport radial_growth_check(const std::function<double(double)>& eta,
                                       const std::function<double(double)>& deta, double rMax,
                                       int samples) {
  if (!(rMax > 0.0) || samples < 4) throw DomainError("radial growth check needs rMax > 0");
  const int sub = 16;
  const int m = samples * sub;
  const double h = rMax / m;
  auto density = [&](double r) {
    const double e = eta(r), d = deta(r);
    return 2.0 * kPi * (e * e + d * d / 3.0) * r;
  };
  std::vector<double> integrand(m + 1);
  for (int i = 0; i <= m; ++i) integrand[i] = density(i * h);
  const auto cumulative = cumulative_integral(integrand, h);

  RadialGrowthReport rep;
  double fmax = 0.0;
  for (int j = 1; j <= samples; ++j) {
    const double r = j * sub * h;
    const double f = cumulative[j * sub];
    rep.r.push_back(r);
    rep.f.push_back(f);
    fmax = std::max(fmax, std::abs(f));
    rep.ratio.push_back(f > 0.0 ? r * density(r) / (3.0 * f) : 1.0);
  }
  rep.identicallyZero = fmax == 0.0;
  rep.holdsEverywhere = std::all_of(rep.ratio.begin(), rep.ratio.end(),
                                    [](double q) { return q >= 1.0 - 1e-12; });
  rep.failsAtLargeR = rep.ratio.back() < 1.0 - 1e-12;
  return rep;
}

nlohmann::json spectrum_json(const OperatorGrid& g, double sigmaMin,
                             const std::vector<double>& nearestZero) {
  return {{"mode", g.mode},
          {"sigma_min", sigmaMin},
          {"eigenvalues_nearest_zero", nearestZero},
          {"grid", {{"h", g.h}, {"R", g.truncationRadius}}}};
}

}  // namespace lagexp
