#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srmlab/common.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// LabeledSample: n pairs (x_i in [0,1]^k, y_i in [0,1]).
// ---------------------------------------------------------------------------
class LabeledSample {
 public:
  LabeledSample(std::vector<Point> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.empty() || xs_.size() != ys_.size())
      throw std::invalid_argument("LabeledSample: need len(xs) == len(ys) >= 1");
    for (double y : ys_)
      if (!(y >= 0.0 && y <= 1.0))
        throw std::invalid_argument("LabeledSample: every response must lie in [0,1]");
    const std::size_t k = xs_.front().size();
    for (const Point& x : xs_)
      if (x.size() != k) throw std::invalid_argument("LabeledSample: ragged point dimensions");
  }

  int n() const { return static_cast<int>(xs_.size()); }
  int dim() const { return static_cast<int>(xs_.front().size()); }
  const std::vector<Point>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const Point& x(int i) const { return xs_[i]; }
  double y(int i) const { return ys_[i]; }

 private:
  std::vector<Point> xs_;
  std::vector<double> ys_;
};

// ---------------------------------------------------------------------------
// BasisFamily: an ordered family psi_1, ..., psi_D of positive functions on
// [0,1]^k bounded by 1. Three families ship:
//
//   monomial   psi_i(x) = x_c^p          (coordinate c and power p cycle)
//   trig_bump  psi_i(x) = max(0, sin(p * pi * x_c))
//   indicator  psi_i(x) = 1{x_c <= t_i}  (distinct thresholds)
//
// For index i (1-based) the coordinate is c = ((i-1) mod k) + 1 and the
// "level" is p = floor((i-1)/k) + 1, so with j = k the monomial family is
// exactly the coordinate functions.
// ---------------------------------------------------------------------------
class BasisFamily {
 public:
  enum class Kind { monomial, trig_bump, indicator };

  static BasisFamily monomial(int input_dim, int dimension_cap) {
    return BasisFamily(Kind::monomial, input_dim, dimension_cap, {});
  }
  static BasisFamily trig_bump(int input_dim, int dimension_cap) {
    return BasisFamily(Kind::trig_bump, input_dim, dimension_cap, {});
  }
  /// Thresholds default to i / (cap + 1); a custom list must be distinct and
  /// in (0, 1].
  static BasisFamily indicator(int input_dim, int dimension_cap,
                               std::vector<double> thresholds = {}) {
    if (thresholds.empty()) {
      thresholds.resize(dimension_cap);
      for (int i = 0; i < dimension_cap; ++i)
        thresholds[i] = static_cast<double>(i + 1) / (dimension_cap + 1);
    }
    if (static_cast<int>(thresholds.size()) < dimension_cap)
      throw std::invalid_argument("BasisFamily: need one threshold per index");
    for (std::size_t a = 0; a < thresholds.size(); ++a) {
      if (!(thresholds[a] > 0.0 && thresholds[a] <= 1.0))
        throw std::invalid_argument("BasisFamily: thresholds must lie in (0,1]");
      for (std::size_t b = a + 1; b < thresholds.size(); ++b)
        if (thresholds[a] == thresholds[b])
          throw std::invalid_argument("BasisFamily: thresholds must be distinct");
    }
    return BasisFamily(Kind::indicator, input_dim, dimension_cap, std::move(thresholds));
  }

  static BasisFamily from_name(const std::string& name, int input_dim, int dimension_cap,
                               std::vector<double> thresholds = {}) {
    if (name == "monomial") return monomial(input_dim, dimension_cap);
    if (name == "trig_bump") return trig_bump(input_dim, dimension_cap);
    if (name == "indicator") return indicator(input_dim, dimension_cap, std::move(thresholds));
    throw std::invalid_argument("BasisFamily: unknown family '" + name + "'");
  }

  Kind kind() const { return kind_; }
  int input_dim() const { return input_dim_; }
  int dimension_cap() const { return dimension_cap_; }

  std::string name() const {
    switch (kind_) {
      case Kind::monomial: return "monomial";
      case Kind::trig_bump: return "trig_bump";
      case Kind::indicator: return "indicator";
    }
    return "?";
  }

  /// Evaluates psi_i (1-based, i <= dimension_cap) at x in [0,1]^k.
  double eval(int i, const Point& x) const {
    if (i < 1 || i > dimension_cap_)
      throw std::invalid_argument("BasisFamily: index out of range");
    check_domain(x);
    const int c = (i - 1) % input_dim_;
    const int level = (i - 1) / input_dim_ + 1;
    switch (kind_) {
      case Kind::monomial: {
        double v = 1.0;
        for (int p = 0; p < level; ++p) v *= x[c];
        return v;
      }
      case Kind::trig_bump:
        return std::max(0.0, std::sin(level * kPi * x[c]));
      case Kind::indicator:
        return x[c] <= thresholds_[i - 1] ? 1.0 : 0.0;
    }
    return 0.0;
  }

 private:
  BasisFamily(Kind kind, int input_dim, int dimension_cap, std::vector<double> thresholds)
      : kind_(kind),
        input_dim_(input_dim),
        dimension_cap_(dimension_cap),
        thresholds_(std::move(thresholds)) {
    if (input_dim_ < 1) throw std::invalid_argument("BasisFamily: input_dim must be >= 1");
    if (dimension_cap_ < 1) throw std::invalid_argument("BasisFamily: dimension_cap must be >= 1");
  }

  void check_domain(const Point& x) const {
    if (static_cast<int>(x.size()) != input_dim_)
      throw std::invalid_argument("BasisFamily: point dimension mismatch");
    for (double c : x)
      if (!(c >= -1e-12 && c <= 1.0 + 1e-12))
        throw std::domain_error("BasisFamily: point outside [0,1]^k");
  }

  Kind kind_;
  int input_dim_;
  int dimension_cap_;
  std::vector<double> thresholds_;  // indicator only
};

// ---------------------------------------------------------------------------
// LinearClass: G_j = { theta . (psi_1, ..., psi_j) : theta in Theta_j } with
// Theta_j the corner simplex { theta >= 0, sum(theta) <= 1 }. Classes with
// increasing j over one family are nested.
// ---------------------------------------------------------------------------
inline constexpr double kSimplexTol = 1e-9;

inline bool simplex_contains(std::span<const double> theta, double tol = kSimplexTol) {
  double sum = 0.0;
  for (double t : theta) {
    if (t < -tol) return false;
    sum += t;
  }
  return sum <= 1.0 + tol;
}

/// diam(Theta_1) = 1; diam(Theta_j) = sqrt(2) for j >= 2.
inline double simplex_diameter(int j) {
  if (j < 1) throw std::invalid_argument("simplex_diameter: j must be >= 1");
  return j == 1 ? 1.0 : std::sqrt(2.0);
}

class LinearClass {
 public:
  LinearClass(BasisFamily basis, int j) : basis_(std::move(basis)), j_(j) {
    if (j_ < 1 || j_ > basis_.dimension_cap())
      throw std::invalid_argument("LinearClass: need 1 <= j <= dimension_cap");
  }

  const BasisFamily& basis() const { return basis_; }
  int j() const { return j_; }
  double diameter() const { return simplex_diameter(j_); }

  /// psi^(j)(x) as a dense row.
  std::vector<double> basis_row(const Point& x) const {
    std::vector<double> row(j_);
    for (int i = 0; i < j_; ++i) row[i] = basis_.eval(i + 1, x);
    return row;
  }

 private:
  BasisFamily basis_;
  int j_;
};

/// Nested sequence G_1 subset ... subset G_jmax over one family.
inline std::vector<LinearClass> nested_classes(const BasisFamily& basis, int j_max) {
  if (j_max < 1 || j_max > basis.dimension_cap())
    throw std::invalid_argument("nested_classes: need 1 <= j_max <= dimension_cap");
  std::vector<LinearClass> out;
  out.reserve(j_max);
  for (int j = 1; j <= j_max; ++j) out.emplace_back(basis, j);
  return out;
}

// ---------------------------------------------------------------------------
// Predictor: g_theta = theta . psi^(j), theta in Theta_j.
// ---------------------------------------------------------------------------
class Predictor {
 public:
  Predictor(LinearClass cls, std::vector<double> theta)
      : cls_(std::move(cls)), theta_(std::move(theta)) {
    if (static_cast<int>(theta_.size()) != cls_.j())
      throw std::invalid_argument("Predictor: coefficient length must equal j");
    if (!simplex_contains(theta_))
      throw std::invalid_argument("Predictor: coefficients outside the simplex");
  }

  const LinearClass& cls() const { return cls_; }
  const std::vector<double>& theta() const { return theta_; }

 private:
  LinearClass cls_;
  std::vector<double> theta_;
};

/// g_theta(x) = sum_i theta_i psi_i(x); lies in [0,1] by simplex + basis
/// range, clamped against rounding dust.
inline double evaluate_predictor(const Predictor& p, const Point& x) {
  const auto row = p.cls().basis_row(x);
  double v = 0.0;
  for (int i = 0; i < p.cls().j(); ++i) v += p.theta()[i] * row[i];
  if (v < -1e-9 || v > 1.0 + 1e-9)
    throw numeric_error("evaluate_predictor: value escaped [0,1]");
  return clamp01(v);
}

// ---------------------------------------------------------------------------
// Loss values and risk functionals (squared loss throughout).
// ---------------------------------------------------------------------------
struct LossValue {
  double value;
  explicit LossValue(double v) : value(v) {
    if (!(value >= 0.0 && value <= 1.0))
      throw numeric_error("LossValue: squared loss escaped [0,1]");
  }
};

inline LossValue squared_loss(const Predictor& p, const Point& x, double y) {
  const double d = evaluate_predictor(p, x) - y;
  return LossValue(d * d);
}

/// Mean squared error of g over the sample; lies in [0,1].
inline double empirical_risk(const Predictor& p, const LabeledSample& s) {
  double acc = 0.0;
  for (int i = 0; i < s.n(); ++i) {
    const double d = evaluate_predictor(p, s.x(i)) - s.y(i);
    acc += d * d;
  }
  return acc / s.n();
}

/// L^p distance between two value vectors under the uniform measure on the
/// indices: ((1/n) sum |a_i - b_i|^p)^(1/p), p in {1, 2}.
inline double lp_distance(std::span<const double> a, std::span<const double> b, int p) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("lp_distance: need equal nonempty value vectors");
  if (p != 1 && p != 2) throw std::invalid_argument("lp_distance: p must be 1 or 2");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::fabs(a[i] - b[i]);
    acc += (p == 1) ? d : d * d;
  }
  acc /= static_cast<double>(a.size());
  return (p == 1) ? acc : std::sqrt(acc);
}

/// Values of a callable f on the sample points.
template <typename F>
std::vector<double> values_on_sample(F&& f, const LabeledSample& s) {
  std::vector<double> v(s.n());
  for (int i = 0; i < s.n(); ++i) v[i] = f(s.x(i));
  return v;
}

/// Empirical L^p pseudometric between two functions of the input point.
template <typename F, typename G>
double lp_empirical_distance(F&& f, G&& g, const LabeledSample& s, int p) {
  return lp_distance(values_on_sample(f, s), values_on_sample(g, s), p);
}

inline double lp_empirical_distance(const Predictor& f, const Predictor& g,
                                    const LabeledSample& s, int p) {
  return lp_empirical_distance([&](const Point& x) { return evaluate_predictor(f, x); },
                               [&](const Point& x) { return evaluate_predictor(g, x); }, s, p);
}

// ---------------------------------------------------------------------------
// Quadratic moments of the least-squares objective over a class:
//   risk(theta) = theta' G theta - 2 theta' b + c
// with G = mean psi psi', b = mean y psi, c = mean y^2.
// ---------------------------------------------------------------------------
struct QuadMoments {
  Mat G;
  std::vector<double> b;
  double c = 0.0;

  double risk(std::span<const double> theta) const {
    const int j = static_cast<int>(b.size());
    if (static_cast<int>(theta.size()) != j)
      throw std::invalid_argument("QuadMoments: dimension mismatch");
    double v = c;
    for (int i = 0; i < j; ++i) {
      v -= 2.0 * theta[i] * b[i];
      for (int l = 0; l < j; ++l) v += theta[i] * G(i, l) * theta[l];
    }
    return v;
  }
};

inline QuadMoments quad_moments(const LinearClass& cls, const LabeledSample& s) {
  const int j = cls.j();
  QuadMoments m{Mat(j, j), std::vector<double>(j, 0.0), 0.0};
  for (int i = 0; i < s.n(); ++i) {
    const auto row = cls.basis_row(s.x(i));
    const double y = s.y(i);
    m.c += y * y;
    for (int a = 0; a < j; ++a) {
      m.b[a] += y * row[a];
      for (int bb = 0; bb <= a; ++bb) m.G(a, bb) += row[a] * row[bb];
    }
  }
  const double inv = 1.0 / s.n();
  m.c *= inv;
  for (int a = 0; a < j; ++a) {
    m.b[a] *= inv;
    for (int bb = 0; bb <= a; ++bb) {
      m.G(a, bb) *= inv;
      m.G(bb, a) = m.G(a, bb);
    }
  }
  return m;
}

}  // namespace srmlab
