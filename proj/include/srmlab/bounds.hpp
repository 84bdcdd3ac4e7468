#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srmlab/common.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// Closed-form covering-number upper bounds.
//
// The universal constant K in the subgraph bound is not pinned down by the
// theory; it defaults to 1 and every report carries the K that was used, so
// downstream soundness checks compare trends rather than absolute tightness.
// ---------------------------------------------------------------------------

/// N_r(eps) <= K (V+1) (16e)^(V+1) eps^(-rV) for a subgraph class with
/// constant envelope 1, valid on 0 < eps < 1.
inline double vc_subgraph_covering_bound(int V, double eps, int r, double K = 1.0) {
  if (V < 1) throw std::invalid_argument("vc_subgraph_covering_bound: V must be >= 1");
  if (r != 1 && r != 2) throw std::invalid_argument("vc_subgraph_covering_bound: r must be 1 or 2");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("vc_subgraph_covering_bound: epsilon must lie in (0,1)");
  const double c = 16.0 * kEuler;
  return K * (V + 1) * std::pow(c, V + 1) * std::pow(eps, -static_cast<double>(r) * V);
}

/// Two upper bounds for the L1 covering number of the squared-error class of
/// a subgraph class with dimension V, combined by taking the minimum:
///   branch 1:  K (2V) (16e)^(2V) eps^-(2V-1)
///   branch 2:  K (V-1) (16e)^(V-1) (eps/2)^(-2V)     (needs V >= 2)
/// The two routes do not share exponents; both are kept as written.
struct LossCoveringBound {
  double value;
  int winning_branch;  // 1 or 2
  double branch1;
  std::optional<double> branch2;
};

inline LossCoveringBound loss_class_covering_bound(int V, double eps, double K = 1.0) {
  if (V < 1) throw std::invalid_argument("loss_class_covering_bound: V must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("loss_class_covering_bound: epsilon must lie in (0,1)");
  const double c = 16.0 * kEuler;
  const double b1 = K * (2.0 * V) * std::pow(c, 2.0 * V) * std::pow(eps, -(2.0 * V - 1.0));
  if (V < 2) return LossCoveringBound{b1, 1, b1, std::nullopt};
  const double b2 = K * (V - 1.0) * std::pow(c, V - 1.0) * std::pow(eps / 2.0, -2.0 * V);
  if (b2 < b1) return LossCoveringBound{b2, 2, b1, b2};
  return LossCoveringBound{b1, 1, b1, b2};
}

/// N_p(eps) <= sqrt(d)^d (m_norm * diam / eps)^d for a class indexed by a
/// bounded parameter set with Lipschitz envelope m. The norm order p only
/// selects which norm of m the caller supplies.
inline double parametric_covering_bound(int d, double diam, double m_norm, double eps,
                                        int p = 1) {
  if (d < 1) throw std::invalid_argument("parametric_covering_bound: d must be >= 1");
  if (p != 1 && p != 2) throw std::invalid_argument("parametric_covering_bound: p must be 1 or 2");
  if (!(diam > 0.0) || !(m_norm > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("parametric_covering_bound: arguments must be positive");
  return std::pow(std::sqrt(static_cast<double>(d)), d) * std::pow(m_norm * diam / eps, d);
}

/// Squared-error classes double the Lipschitz envelope, giving
/// 2^d sqrt(d)^d (m_norm * diam / eps)^d.
inline double parametric_loss_covering_bound(int d, double diam, double m_norm, double eps) {
  return std::pow(2.0, d) * parametric_covering_bound(d, diam, m_norm, eps, 1);
}

// ---------------------------------------------------------------------------
// Deviation probability bounds. Raw formulas exceed 1 at small n; returned
// values are clamped to [0,1]. The exponent sums are assembled in log space
// so huge covering factors cannot overflow into inf * 0.
// ---------------------------------------------------------------------------

inline double log_binomial_sum(long long n, int V) {
  // log of sum_{i=0}^{min(V,n)} C(n,i), computed stably.
  long double sum = 0.0L, term = 1.0L;
  const long long cap = std::min<long long>(V, n);
  for (long long i = 1; i <= cap + 1; ++i) {
    sum += term;
    if (i <= cap) term *= static_cast<long double>(n - i + 1) / static_cast<long double>(i);
  }
  return static_cast<double>(std::log(sum));
}

/// log of the raw classification bound 8 * growth * exp(-n eps^2 / c) where
/// growth = n^V when n > 2V and the binomial shatter bound otherwise.
inline double classification_deviation_log(long long n, double eps, int V,
                                           double exponent_constant = 32.0) {
  if (n < 1) throw std::invalid_argument("classification_deviation_bound: n must be >= 1");
  if (V < 1) throw std::invalid_argument("classification_deviation_bound: V must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("classification_deviation_bound: epsilon <= 0");
  const double log_growth =
      (n > 2LL * V) ? V * std::log(static_cast<double>(n)) : log_binomial_sum(n, V);
  return std::log(8.0) + log_growth - n * eps * eps / exponent_constant;
}

/// min(1, 8 n^V exp(-n eps^2 / 32)); pass exponent_constant = 128 for the
/// model-selection-side variant.
inline double classification_deviation_bound(long long n, double eps, int V,
                                             double exponent_constant = 32.0) {
  const double lg = classification_deviation_log(n, eps, V, exponent_constant);
  return lg >= 0.0 ? 1.0 : std::exp(lg);
}

/// min(1, 8 * shatter * exp(-n eps^2 / c)) with a caller-supplied shatter
/// coefficient instead of the n^V substitution.
inline double classification_deviation_bound_shatter(long long n, double eps, double shatter,
                                                     double exponent_constant = 32.0) {
  if (n < 1 || !(shatter >= 1.0) || !(eps > 0.0))
    throw std::invalid_argument("classification_deviation_bound_shatter: bad arguments");
  const double lg = std::log(8.0) + std::log(shatter) - n * eps * eps / exponent_constant;
  return lg >= 0.0 ? 1.0 : std::exp(lg);
}

/// Density-style variant 8 C n^(dV) exp(-n eps^2 / 32) with a caller-attested
/// constant C. Not used by default anywhere.
inline double vc_density_deviation_bound(long long n, double eps, double C, double density,
                                         double exponent_constant = 32.0) {
  if (n < 1 || !(C > 0.0) || !(density > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("vc_density_deviation_bound: bad arguments");
  const double lg =
      std::log(8.0) + std::log(C) + density * std::log(static_cast<double>(n)) -
      n * eps * eps / exponent_constant;
  return lg >= 0.0 ? 1.0 : std::exp(lg);
}

/// min(1, 8 * covering_bound_at(eps/8) * exp(-n eps^2 / 128)) for a class of
/// positive functions bounded by 1; the evaluator is any covering bound
/// applied to the squared-error class.
inline double regression_deviation_bound(long long n, double eps,
                                         const std::function<double(double)>& covering_bound_at) {
  if (n < 1) throw std::invalid_argument("regression_deviation_bound: n must be >= 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::domain_error("regression_deviation_bound: epsilon must lie in (0,1)");
  const double cov = covering_bound_at(eps / 8.0);
  if (!(cov > 0.0)) throw std::invalid_argument("regression_deviation_bound: evaluator <= 0");
  const double lg = std::log(8.0) + std::log(cov) - n * eps * eps / 128.0;
  return lg >= 0.0 ? 1.0 : std::exp(lg);
}

/// min(1, 2 exp(-2 eta^2 / sum (b_i - a_i)^2)) for independent summands with
/// the given ranges.
inline double hoeffding_tail(double eta, const std::vector<std::pair<double, double>>& ranges) {
  if (ranges.empty()) throw std::invalid_argument("hoeffding_tail: no ranges");
  double denom = 0.0;
  for (auto [a, b] : ranges) {
    if (b < a) throw std::invalid_argument("hoeffding_tail: range with b < a");
    denom += (b - a) * (b - a);
  }
  if (denom == 0.0) throw std::domain_error("hoeffding_tail: all ranges degenerate");
  const double raw = 2.0 * std::exp(-2.0 * eta * eta / denom);
  return raw > 1.0 ? 1.0 : raw;
}

// ---------------------------------------------------------------------------
// Lambert W on [0, inf): the inverse of w -> w e^w. Halley iteration seeded
// from log1p(x), bisection fallback if it ever stalls.
// ---------------------------------------------------------------------------
inline double lambert_w(double x) {
  if (x < 0.0) throw std::domain_error("lambert_w: negative argument");
  if (x == 0.0) return 0.0;
  const double target_tol = 1e-13 * std::max(1.0, x);
  double w = std::log1p(x);
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::fabs(f) <= target_tol) return w;
    const double fp = ew * (1.0 + w);
    const double fpp = ew * (2.0 + w);
    const double denom = fp - f * fpp / (2.0 * fp);
    if (denom == 0.0) break;
    const double step = f / denom;
    w -= step;
    if (w < 0.0) w = 0.0;
  }
  // Bisection fallback on [0, hi]; w e^w is increasing.
  double lo = 0.0, hi = std::max(1.5, std::log(std::max(x, 3.0)));
  while (hi * std::exp(hi) < x) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid * std::exp(mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  w = 0.5 * (lo + hi);
  if (std::fabs(w * std::exp(w) - x) > 1e-12 * std::max(1.0, x))
    throw numeric_error("lambert_w: failed to converge");
  return w;
}

// ---------------------------------------------------------------------------
// Confidence radii by equating tail bounds to eta and solving for epsilon.
// ---------------------------------------------------------------------------

/// Constants and outputs of the polynomial-covering inversion. With a
/// covering bound A eps^-W the tail is B gamma^-Z exp(-R_n gamma) in
/// gamma = eps^2, where B = 8^(W+1) A, Z = W/2, R_n = n/128; solving it
/// exactly for gamma uses Lambert W.
struct EtaTrickResult {
  double epsilon;        // exact inversion
  double loose_epsilon;  // explicit logarithmic upper form
  double A, W, B, Z, R_n;
  double eta;
  long long n;
  bool remark_condition;  // W-argument >= 3, where exact <= loose is guaranteed
};

inline EtaTrickResult eta_trick_epsilon(double A, double W, long long n, double eta) {
  if (!(A > 0.0)) throw std::invalid_argument("eta_trick_epsilon: A must be > 0");
  if (!(W >= 1.0)) throw std::invalid_argument("eta_trick_epsilon: W must be >= 1");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("eta_trick_epsilon: eta must lie in (0,1)");
  const double B = std::pow(8.0, W + 1.0) * A;
  const double Z = W / 2.0;
  const double R = static_cast<double>(n) / 128.0;
  const double n_min = 384.0 * Z * std::pow(eta / B, 1.0 / Z);
  if (static_cast<double>(n) < n_min)
    throw std::domain_error("eta_trick_epsilon: n below the stated threshold " +
                            std::to_string(n_min));
  const double warg = (R / Z) * std::pow(B / eta, 1.0 / Z);
  const double gamma = (Z / R) * lambert_w(warg);
  const double eps = std::sqrt(gamma);
  const double loose_radicand = Z * std::log(R / Z) / R + std::log(B) / R - std::log(eta) / R;
  const double loose = loose_radicand > 0.0 ? std::sqrt(loose_radicand) :
                                              std::numeric_limits<double>::quiet_NaN();
  const bool remark = R * std::pow(B / eta, 1.0 / Z) >= 3.0 * Z;
  if (remark && !(eps <= loose + 1e-15))
    throw numeric_error("eta_trick_epsilon: exact radius exceeded the explicit form");
  return EtaTrickResult{eps, loose, A, W, B, Z, R, eta, n, remark};
}

/// sqrt(c (V log n - log(eta/8)) / n) with c = 32, or c = 128 for the
/// model-selection variant.
inline double classification_eta_epsilon(int V, long long n, double eta, double constant = 32.0) {
  if (V < 1) throw std::invalid_argument("classification_eta_epsilon: V must be >= 1");
  if (n < 2) throw std::invalid_argument("classification_eta_epsilon: n must be >= 2");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("classification_eta_epsilon: eta must lie in (0,1)");
  const double radicand =
      constant * (V * std::log(static_cast<double>(n)) - std::log(eta / 8.0)) / n;
  if (!(radicand > 0.0)) throw std::domain_error("classification_eta_epsilon: radicand <= 0");
  return std::sqrt(radicand);
}

// ---------------------------------------------------------------------------
// Subgraph-dimension calculus. Expression trees over leaf dimensions fold
// with the rules:
//   min/max (binary)          V_F + V_G - 1
//   negate / shift / monotone V
//   square / abs              2V - 1
// ---------------------------------------------------------------------------
class VcExpr {
 public:
  enum class Op { leaf, vmin, vmax, negate, shift, monotone_compose, square, abs };

  static VcExpr leaf(int v) {
    if (v < 1) throw std::invalid_argument("VcExpr: leaf dimension must be >= 1");
    VcExpr e(Op::leaf);
    e.leaf_v_ = v;
    return e;
  }
  static VcExpr vmin(VcExpr a, VcExpr b) { return binary(Op::vmin, std::move(a), std::move(b)); }
  static VcExpr vmax(VcExpr a, VcExpr b) { return binary(Op::vmax, std::move(a), std::move(b)); }
  static VcExpr negate(VcExpr a) { return unary(Op::negate, std::move(a)); }
  static VcExpr shift(VcExpr a) { return unary(Op::shift, std::move(a)); }
  static VcExpr monotone_compose(VcExpr a) { return unary(Op::monotone_compose, std::move(a)); }
  static VcExpr square(VcExpr a) { return unary(Op::square, std::move(a)); }
  static VcExpr abs(VcExpr a) { return unary(Op::abs, std::move(a)); }

  int fold() const {
    switch (op_) {
      case Op::leaf:
        return leaf_v_;
      case Op::vmin:
      case Op::vmax:
        return kids_[0]->fold() + kids_[1]->fold() - 1;
      case Op::negate:
      case Op::shift:
      case Op::monotone_compose:
        return kids_[0]->fold();
      case Op::square:
      case Op::abs:
        return 2 * kids_[0]->fold() - 1;
    }
    throw std::invalid_argument("VcExpr: malformed tree");
  }

 private:
  explicit VcExpr(Op op) : op_(op) {}
  static VcExpr unary(Op op, VcExpr a) {
    VcExpr e(op);
    e.kids_.push_back(std::make_shared<VcExpr>(std::move(a)));
    return e;
  }
  static VcExpr binary(Op op, VcExpr a, VcExpr b) {
    VcExpr e(op);
    e.kids_.push_back(std::make_shared<VcExpr>(std::move(a)));
    e.kids_.push_back(std::make_shared<VcExpr>(std::move(b)));
    return e;
  }

  Op op_;
  int leaf_v_ = 0;
  std::vector<std::shared_ptr<VcExpr>> kids_;
};

inline int vc_calculus(const VcExpr& expr) { return expr.fold(); }

}  // namespace srmlab
