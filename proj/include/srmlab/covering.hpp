#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srmlab/core.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// FinitePseudometricSpace: explicit points plus a distance matrix, validated
// on construction (symmetry, zero diagonal, triangle inequality to 1e-12).
// ---------------------------------------------------------------------------
class FinitePseudometricSpace {
 public:
  explicit FinitePseudometricSpace(Mat dist, std::vector<std::string> labels = {})
      : dist_(std::move(dist)), labels_(std::move(labels)) {
    if (!dist_.square() || dist_.rows() < 1)
      throw std::invalid_argument("FinitePseudometricSpace: need a square nonempty matrix");
    const int m = dist_.rows();
    if (labels_.empty()) {
      labels_.reserve(m);
      for (int i = 0; i < m; ++i) labels_.push_back(std::to_string(i));
    }
    if (static_cast<int>(labels_.size()) != m)
      throw std::invalid_argument("FinitePseudometricSpace: label count mismatch");
    constexpr double tol = 1e-12;
    for (int i = 0; i < m; ++i) {
      if (std::fabs(dist_(i, i)) > tol)
        throw std::invalid_argument("FinitePseudometricSpace: nonzero diagonal");
      for (int j = 0; j < m; ++j) {
        if (dist_(i, j) < -tol)
          throw std::invalid_argument("FinitePseudometricSpace: negative distance");
        if (std::fabs(dist_(i, j) - dist_(j, i)) > tol)
          throw std::invalid_argument("FinitePseudometricSpace: asymmetric matrix");
      }
    }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int l = 0; l < m; ++l)
          if (dist_(i, j) > dist_(i, l) + dist_(l, j) + tol)
            throw std::invalid_argument("FinitePseudometricSpace: triangle inequality violated");
  }

  int size() const { return dist_.rows(); }
  double dist(int i, int j) const { return dist_(i, j); }
  const Mat& matrix() const { return dist_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  Mat dist_;
  std::vector<std::string> labels_;
};

/// Space of m points with pairwise L^p distances between value rows
/// (rows = functions sampled on a common point set).
inline FinitePseudometricSpace empirical_function_space(
    const std::vector<std::vector<double>>& values, int p) {
  if (values.empty()) throw std::invalid_argument("empirical_function_space: no functions");
  const int m = static_cast<int>(values.size());
  Mat d(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) d(i, j) = d(j, i) = lp_distance(values[i], values[j], p);
  return FinitePseudometricSpace(std::move(d));
}

inline FinitePseudometricSpace empirical_function_space(const std::vector<Predictor>& predictors,
                                                        const LabeledSample& s, int p) {
  std::vector<std::vector<double>> values;
  values.reserve(predictors.size());
  for (const Predictor& g : predictors)
    values.push_back(values_on_sample([&](const Point& x) { return evaluate_predictor(g, x); }, s));
  return empirical_function_space(values, p);
}

// ---------------------------------------------------------------------------
// Covering oracles. Centers are restricted to the space's own elements and a
// point is covered only when its distance to a center is strictly below
// epsilon; ties at exactly epsilon are not covered.
// ---------------------------------------------------------------------------
struct CoverResult {
  int size = 0;
  std::vector<int> centers;
  bool exact = false;
};

struct CoveringOptions {
  /// Exact search refuses instances above this size. The default keeps the
  /// worst case tractable; callers working on structured instances may raise
  /// it explicitly.
  int exact_threshold = 20;
};

namespace detail {

// Word-packed element sets for the set-cover search.
class BitSet {
 public:
  explicit BitSet(int n = 0) : n_(n), w_((n + 63) / 64, 0ull) {}
  void set(int i) { w_[i >> 6] |= 1ull << (i & 63); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1ull; }
  int count() const {
    int c = 0;
    for (std::uint64_t w : w_) c += __builtin_popcountll(w);
    return c;
  }
  bool none() const {
    for (std::uint64_t w : w_)
      if (w) return false;
    return true;
  }
  bool subset_of(const BitSet& o) const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i] & ~o.w_[i]) return false;
    return true;
  }
  int count_and(const BitSet& o) const {
    int c = 0;
    for (std::size_t i = 0; i < w_.size(); ++i) c += __builtin_popcountll(w_[i] & o.w_[i]);
    return c;
  }
  void and_not(const BitSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
  }
  void or_with(const BitSet& o) {
    for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
  }
  int first_set() const {
    for (std::size_t i = 0; i < w_.size(); ++i)
      if (w_[i]) return static_cast<int>(i) * 64 + __builtin_ctzll(w_[i]);
    return -1;
  }
  int size() const { return n_; }

 private:
  int n_;
  std::vector<std::uint64_t> w_;
};

inline std::vector<BitSet> cover_balls(const FinitePseudometricSpace& space, double eps) {
  const int m = space.size();
  std::vector<BitSet> balls(m, BitSet(m));
  for (int c = 0; c < m; ++c)
    for (int e = 0; e < m; ++e)
      if (space.dist(e, c) < eps) balls[c].set(e);
  return balls;
}

// Greedy max-coverage; ties break toward the smaller index.
inline std::vector<int> greedy_cover(const std::vector<BitSet>& balls, BitSet uncovered) {
  std::vector<int> chosen;
  while (!uncovered.none()) {
    int best = -1, best_gain = 0;
    for (int c = 0; c < static_cast<int>(balls.size()); ++c) {
      const int gain = balls[c].count_and(uncovered);
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best < 0) throw numeric_error("covering: element not coverable by any ball");
    chosen.push_back(best);
    uncovered.and_not(balls[best]);
  }
  return chosen;
}

// Disjoint-witness lower bound: repeatedly charge one ball for an uncovered
// element and discard everything any ball through that element could cover.
inline int packing_lower_bound(const std::vector<BitSet>& balls,
                               const std::vector<std::vector<int>>& covering_ball_ids,
                               BitSet uncovered) {
  int lb = 0;
  while (!uncovered.none()) {
    const int e = uncovered.first_set();
    ++lb;
    BitSet reach(uncovered.size());
    for (int c : covering_ball_ids[e]) reach.or_with(balls[c]);
    uncovered.and_not(reach);
  }
  return lb;
}

struct ExactCoverSearch {
  const std::vector<BitSet>& balls;
  std::vector<std::vector<int>> covering_ball_ids;  // per element
  std::vector<int> best;
  std::vector<int> current;

  void run(const BitSet& uncovered) {
    if (uncovered.none()) {
      best = current;
      return;
    }
    if (static_cast<int>(current.size()) + 1 >= static_cast<int>(best.size())) return;
    // Cheap counting bound first, then the packing bound.
    int max_gain = 0;
    for (const BitSet& b : balls) max_gain = std::max(max_gain, b.count_and(uncovered));
    const int counting_lb = (uncovered.count() + max_gain - 1) / max_gain;
    if (static_cast<int>(current.size()) + counting_lb >= static_cast<int>(best.size())) return;
    if (static_cast<int>(current.size()) +
            packing_lower_bound(balls, covering_ball_ids, uncovered) >=
        static_cast<int>(best.size()))
      return;
    // Branch on the uncovered element with the fewest candidate balls.
    int elem = -1, fewest = 1 << 30;
    for (int e = 0; e < uncovered.size(); ++e) {
      if (!uncovered.test(e)) continue;
      int cnt = 0;
      for (int c : covering_ball_ids[e])
        if (balls[c].count_and(uncovered) > 0) ++cnt;
      if (cnt < fewest) {
        fewest = cnt;
        elem = e;
      }
    }
    std::vector<std::pair<int, int>> order;  // (-gain, ball)
    for (int c : covering_ball_ids[elem]) {
      const int gain = balls[c].count_and(uncovered);
      if (gain > 0) order.emplace_back(-gain, c);
    }
    std::sort(order.begin(), order.end());
    for (auto [neg_gain, c] : order) {
      (void)neg_gain;
      current.push_back(c);
      BitSet rest = uncovered;
      rest.and_not(balls[c]);
      run(rest);
      current.pop_back();
      if (static_cast<int>(best.size()) <= static_cast<int>(current.size()) + 1) break;
    }
  }
};

inline void verify_cover(const FinitePseudometricSpace& space, double eps,
                         const std::vector<int>& centers) {
  for (int e = 0; e < space.size(); ++e) {
    bool covered = false;
    for (int c : centers)
      if (space.dist(e, c) < eps) {
        covered = true;
        break;
      }
    if (!covered) throw numeric_error("covering: post-hoc verification failed");
  }
}

}  // namespace detail

/// Minimum number of strict eps-balls, centers among the elements, covering
/// the whole space. Branch-and-bound set cover with greedy seeding, dominance
/// elimination and a packing lower bound.
inline CoverResult exact_covering_number(const FinitePseudometricSpace& space, double eps,
                                         CoveringOptions opts = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("exact_covering_number: epsilon must be > 0");
  const int m = space.size();
  if (m > opts.exact_threshold)
    throw std::invalid_argument("exact_covering_number: instance too large for exact search (" +
                                std::to_string(m) + " > " + std::to_string(opts.exact_threshold) +
                                ")");
  auto balls = detail::cover_balls(space, eps);

  // Dominated centers never help; keep the smallest index among duplicates.
  std::vector<char> alive(m, 1);
  for (int a = 0; a < m; ++a) {
    if (!alive[a]) continue;
    for (int b = 0; b < m; ++b) {
      if (a == b || !alive[b] || !alive[a]) continue;
      if (balls[a].subset_of(balls[b]) &&
          (!balls[b].subset_of(balls[a]) || b < a))
        alive[a] = 0;
    }
  }

  detail::ExactCoverSearch search{balls, {}, {}, {}};
  search.covering_ball_ids.assign(m, {});
  for (int e = 0; e < m; ++e)
    for (int c = 0; c < m; ++c)
      if (alive[c] && balls[c].test(e)) search.covering_ball_ids[e].push_back(c);

  detail::BitSet all(m);
  for (int e = 0; e < m; ++e) all.set(e);
  search.best = detail::greedy_cover(balls, all);
  search.run(all);

  std::sort(search.best.begin(), search.best.end());
  detail::verify_cover(space, eps, search.best);
  return CoverResult{static_cast<int>(search.best.size()), search.best, true};
}

/// Greedy max-coverage heuristic; size is an upper bound on the exact answer.
inline CoverResult greedy_covering_number(const FinitePseudometricSpace& space, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("greedy_covering_number: epsilon must be > 0");
  auto balls = detail::cover_balls(space, eps);
  detail::BitSet all(space.size());
  for (int e = 0; e < space.size(); ++e) all.set(e);
  auto centers = detail::greedy_cover(balls, all);
  std::sort(centers.begin(), centers.end());
  detail::verify_cover(space, eps, centers);
  return CoverResult{static_cast<int>(centers.size()), centers, false};
}

// ---------------------------------------------------------------------------
// Shatter coefficient of a finite family on a finite point set: the number of
// distinct subgraph traces { (x,t) : t < f(x) } cut out on the points.
// ---------------------------------------------------------------------------
inline int shatter_coefficient(const std::vector<std::function<double(const Point&)>>& family,
                               const std::vector<std::pair<Point, double>>& points) {
  if (points.empty()) throw std::invalid_argument("shatter_coefficient: empty point set");
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (points[a] == points[b])
        throw std::invalid_argument("shatter_coefficient: points must be distinct");
  std::set<std::vector<bool>> traces;
  for (const auto& f : family) {
    std::vector<bool> trace(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      trace[i] = points[i].second < f(points[i].first);
    traces.insert(std::move(trace));
  }
  return static_cast<int>(traces.size());
}

/// Uniform grid over the corner simplex Theta_j with per-axis step h,
/// enumerated in lexicographic order. Used to discretize classes for
/// covering measurements.
inline std::vector<std::vector<double>> simplex_grid(int j, double step) {
  if (j < 1) throw std::invalid_argument("simplex_grid: j must be >= 1");
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("simplex_grid: bad step");
  const int ticks = static_cast<int>(std::floor(1.0 / step + 1e-9));
  std::vector<std::vector<double>> grid;
  std::vector<int> idx(j, 0);
  std::function<void(int, int)> rec = [&](int pos, int used) {
    if (pos == j) {
      std::vector<double> theta(j);
      for (int i = 0; i < j; ++i) theta[i] = idx[i] * step;
      grid.push_back(std::move(theta));
      return;
    }
    for (int t = 0; t + used <= ticks; ++t) {
      idx[pos] = t;
      rec(pos + 1, used + t);
    }
  };
  rec(0, 0);
  return grid;
}

}  // namespace srmlab
