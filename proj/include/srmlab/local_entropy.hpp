#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "srmlab/core.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition by cyclic Jacobi rotations. Parameter
// dimensions here are tiny, so a self-contained solver is enough; the
// reconstruction residual ||Q D Q' - m||_max is checked by tests.
// ---------------------------------------------------------------------------
struct SymEig {
  std::vector<double> values;  // descending
  Mat vectors;                 // columns are eigenvectors, m = Q D Q'
};

inline SymEig jacobi_eigensym(Mat a, int max_sweeps = 128) {
  if (!a.square()) throw std::invalid_argument("jacobi_eigensym: matrix must be square");
  const int d = a.rows();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-10)
        throw std::invalid_argument("jacobi_eigensym: matrix not symmetric");
  Mat q(d, d);
  for (int i = 0; i < d; ++i) q(i, i) = 1.0;

  auto offdiag = [&]() {
    double s = 0.0;
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) s += a(i, j) * a(i, j);
    return s;
  };

  int sweep = 0;
  while (offdiag() > 1e-30 && sweep++ < max_sweeps) {
    for (int p = 0; p < d - 1; ++p) {
      for (int qq = p + 1; qq < d; ++qq) {
        const double apq = a(p, qq);
        if (std::fabs(apq) < 1e-300) continue;
        const double tau = (a(qq, qq) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int i = 0; i < d; ++i) {
          const double aip = a(i, p), aiq = a(i, qq);
          a(i, p) = c * aip - s * aiq;
          a(i, qq) = s * aip + c * aiq;
        }
        for (int i = 0; i < d; ++i) {
          const double api = a(p, i), aqi = a(qq, i);
          a(p, i) = c * api - s * aqi;
          a(qq, i) = s * api + c * aqi;
        }
        for (int i = 0; i < d; ++i) {
          const double qip = q(i, p), qiq = q(i, qq);
          q(i, p) = c * qip - s * qiq;
          q(i, qq) = s * qip + c * qiq;
        }
      }
    }
  }
  if (offdiag() > 1e-18) throw numeric_error("jacobi_eigensym: rotations did not converge");

  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) > a(y, y); });
  SymEig out{std::vector<double>(d), Mat(d, d)};
  for (int col = 0; col < d; ++col) {
    out.values[col] = a(order[col], order[col]);
    for (int i = 0; i < d; ++i) out.vectors(i, col) = q(i, order[col]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// GramMatrix: (1/n) sum psi(X_i) psi(X_i)' with its spectrum. The matrix
// turns empirical-norm balls over the class into parameter-space ellipsoids.
// ---------------------------------------------------------------------------
inline constexpr double kPdTolerance = 1e-12;

struct GramMatrix {
  Mat m;
  std::vector<double> eigenvalues;  // descending
  Mat eigenvectors;
  int source_n = 0;
  bool positive_definite = false;

  int dim() const { return m.rows(); }
};

inline GramMatrix gram_from_matrix(Mat g, int source_n, double pd_tol = kPdTolerance) {
  SymEig eig = jacobi_eigensym(g);
  for (double& v : eig.values)
    if (v < 0.0 && v > -1e-10) v = 0.0;
  if (!eig.values.empty() && eig.values.back() < -1e-10)
    throw numeric_error("gram_matrix: negative eigenvalue beyond tolerance");
  const bool pd = eig.values.back() > pd_tol;
  return GramMatrix{std::move(g), std::move(eig.values), std::move(eig.vectors), source_n, pd};
}

inline GramMatrix gram_matrix(const LabeledSample& s, const LinearClass& cls,
                              double pd_tol = kPdTolerance) {
  return gram_from_matrix(quad_moments(cls, s).G, s.n(), pd_tol);
}

/// ||g_theta||_n^2 = theta' m theta.
inline double empirical_norm_via_gram(const GramMatrix& g, std::span<const double> theta) {
  const int d = g.dim();
  if (static_cast<int>(theta.size()) != d)
    throw std::invalid_argument("empirical_norm_via_gram: dimension mismatch");
  double v = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v += theta[i] * g.m(i, j) * theta[j];
  return v;
}

/// Elliptical radii delta / sqrt(lambda_i), returned nondecreasing.
inline std::vector<double> ellipsoid_radii(const GramMatrix& g, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("ellipsoid_radii: delta must be > 0");
  if (!g.positive_definite)
    throw numeric_error("ellipsoid_radii: Gram matrix is numerically singular");
  std::vector<double> radii(g.eigenvalues.size());
  for (std::size_t i = 0; i < radii.size(); ++i) radii[i] = delta / std::sqrt(g.eigenvalues[i]);
  return radii;
}

// ---------------------------------------------------------------------------
// Local metric entropy of a radius-delta ball, at covering scale u.
//
// The cube bound d log(3 delta / u) always applies. For d >= 9 two sharper
// branches with an absolute constant C exist (delta/u below or above d); C is
// not pinned down, so those branches join the minimum only when the caller
// attests the constant, and are reported informationally otherwise.
// ---------------------------------------------------------------------------
enum class EntropyBranch { cube, rogers_small, rogers_large };

inline std::string to_string(EntropyBranch b) {
  switch (b) {
    case EntropyBranch::cube: return "cube";
    case EntropyBranch::rogers_small: return "rogers_small";
    case EntropyBranch::rogers_large: return "rogers_large";
  }
  return "?";
}

struct EntropyBoundOptions {
  double rogers_constant = 10.0;
  bool trust_rogers = false;
};

struct EntropyBoundReport {
  double delta = 0.0;
  double u = 0.0;
  int d = 0;
  double log_bound = 0.0;
  EntropyBranch branch = EntropyBranch::cube;
  double cube_log_bound = 0.0;
  std::optional<double> rogers_log_bound;  // present when d >= 9
  std::optional<EntropyBranch> rogers_branch;
};

inline EntropyBoundReport local_entropy_bound(int d, double delta, double u,
                                              EntropyBoundOptions opts = {}) {
  if (d < 1) throw std::invalid_argument("local_entropy_bound: d must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("local_entropy_bound: delta must be > 0");
  if (!(u > 0.0 && u <= delta))
    throw std::invalid_argument("local_entropy_bound: need 0 < u <= delta");
  EntropyBoundReport rep;
  rep.delta = delta;
  rep.u = u;
  rep.d = d;
  rep.cube_log_bound = d * std::log(3.0 * delta / u);
  rep.log_bound = rep.cube_log_bound;
  rep.branch = EntropyBranch::cube;
  if (d >= 9) {
    const double ratio = delta / u;
    const EntropyBranch rb =
        ratio < static_cast<double>(d) ? EntropyBranch::rogers_small : EntropyBranch::rogers_large;
    const double lead = rb == EntropyBranch::rogers_small
                            ? std::log(opts.rogers_constant * std::pow(d, 2.5))
                            : std::log(opts.rogers_constant * d * std::log(static_cast<double>(d)));
    const double rv = lead + d * std::log(ratio);
    rep.rogers_log_bound = rv;
    rep.rogers_branch = rb;
    if (opts.trust_rogers && rv < rep.log_bound) {
      rep.log_bound = rv;
      rep.branch = rb;
    }
  }
  return rep;
}

/// Ball-radius schedule delta_n = log(n) / sqrt(n).
inline double delta_n(long long n) {
  if (n < 2) throw std::invalid_argument("delta_n: n must be >= 2");
  return std::log(static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
}

/// A = integral_0^(1/3) sqrt(log(1/z)) dz, by adaptive quadrature on the
/// integrand. The lower endpoint is cut at 1e-14; the discarded tail is
/// below 4e-13, inside the 1e-10 budget. Equals the upper incomplete gamma
/// Gamma(3/2, log 3) ~ 0.4719.
inline double compute_A(double tol = 1e-10) {
  const double a = 1e-14;
  return adaptive_simpson([](double z) { return std::sqrt(std::log(1.0 / z)); }, a, 1.0 / 3.0,
                          tol * 0.5);
}

/// Closed form of integral_0^delta sqrt(d log(3 delta / u)) du = 3 A delta
/// sqrt(d); with delta = delta_n this is 3 A log(n) sqrt(d/n).
inline double entropy_integral(int d, double delta) {
  if (d < 1) throw std::invalid_argument("entropy_integral: d must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("entropy_integral: delta must be > 0");
  return 3.0 * compute_A() * delta * std::sqrt(static_cast<double>(d));
}

}  // namespace srmlab
