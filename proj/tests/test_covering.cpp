#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "srmlab/covering.hpp"

using namespace srmlab;

namespace {

Mat equilateral(int m, double d) {
  Mat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = i == j ? 0.0 : d;
  return out;
}

Mat line_metric(const std::vector<double>& pts) {
  const int m = static_cast<int>(pts.size());
  Mat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = std::fabs(pts[i] - pts[j]);
  return out;
}

std::vector<std::vector<double>> random_plane_points(Rng& rng, int m) {
  std::vector<std::vector<double>> pts(m, std::vector<double>(2));
  for (auto& p : pts) {
    p[0] = rng.uniform01();
    p[1] = rng.uniform01();
  }
  return pts;
}

Mat euclidean_metric(const std::vector<std::vector<double>>& pts) {
  const int m = static_cast<int>(pts.size());
  Mat out(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < pts[i].size(); ++c)
        s += (pts[i][c] - pts[j][c]) * (pts[i][c] - pts[j][c]);
      out(i, j) = std::sqrt(s);
    }
  return out;
}

}  // namespace

TEST_CASE("pseudometric space validation") {
  CHECK_THROWS_AS(FinitePseudometricSpace(Mat(2, 3)), std::invalid_argument);
  {
    Mat m(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 2.0;
    CHECK_THROWS_AS(FinitePseudometricSpace(m), std::invalid_argument);
  }
  {
    Mat m(2, 2);
    m(0, 0) = 0.5;
    CHECK_THROWS_AS(FinitePseudometricSpace(m), std::invalid_argument);
  }
  {
    Mat m(3, 3);
    m(0, 1) = m(1, 0) = 1.0;
    m(1, 2) = m(2, 1) = 1.0;
    m(0, 2) = m(2, 0) = 5.0;  // violates the triangle through 1
    CHECK_THROWS_AS(FinitePseudometricSpace(m), std::invalid_argument);
  }
  CHECK_NOTHROW(FinitePseudometricSpace(equilateral(4, 1.0)));
}

TEST_CASE("exact covering oracle") {
  SECTION("singleton") {
    const FinitePseudometricSpace s(equilateral(1, 0.0));
    CHECK(exact_covering_number(s, 0.1).size == 1);
  }
  SECTION("three far points need three balls at eps below the gap") {
    const FinitePseudometricSpace s(equilateral(3, 1.0));
    CHECK(exact_covering_number(s, 0.5).size == 3);
  }
  SECTION("one big ball suffices") {
    const FinitePseudometricSpace s(equilateral(3, 1.0));
    CHECK(exact_covering_number(s, 1.5).size == 1);
  }
  SECTION("coverage is strict: a tie at exactly eps is not covered") {
    const FinitePseudometricSpace s(line_metric({0.0, 0.5}));
    CHECK(exact_covering_number(s, 0.5).size == 2);
    CHECK(exact_covering_number(s, 0.5 + 1e-9).size == 1);
  }
  SECTION("bad arguments") {
    const FinitePseudometricSpace s(equilateral(3, 1.0));
    CHECK_THROWS_AS(exact_covering_number(s, 0.0), std::invalid_argument);
    const FinitePseudometricSpace big(equilateral(21, 1.0));
    CHECK_THROWS_AS(exact_covering_number(big, 0.5), std::invalid_argument);
    CHECK(exact_covering_number(big, 0.5, {32}).size == 21);  // raised cap
  }
  SECTION("centers cover every element") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
      const auto pts = random_plane_points(rng, 12);
      const FinitePseudometricSpace s{euclidean_metric(pts)};
      const auto res = exact_covering_number(s, 0.3);
      for (int e = 0; e < s.size(); ++e) {
        bool covered = false;
        for (int c : res.centers) covered = covered || s.dist(e, c) < 0.3;
        CHECK(covered);
      }
    }
  }
}

TEST_CASE("greedy covering heuristic") {
  SECTION("singleton") {
    const FinitePseudometricSpace s(equilateral(1, 0.0));
    CHECK(greedy_covering_number(s, 0.1).size == 1);
  }
  SECTION("eps above the diameter needs one ball") {
    Rng rng(5);
    const auto pts = random_plane_points(rng, 15);
    const FinitePseudometricSpace s{euclidean_metric(pts)};
    CHECK(greedy_covering_number(s, 3.0).size == 1);
  }
  SECTION("ten grid points on a line at eps=0.15") {
    std::vector<double> pts(10);
    for (int i = 0; i < 10; ++i) pts[i] = i / 9.0;
    const FinitePseudometricSpace s(line_metric(pts));
    const auto greedy = greedy_covering_number(s, 0.15);
    const auto exact = exact_covering_number(s, 0.15);
    CHECK_FALSE(greedy.exact);
    CHECK(exact.exact);
    CHECK(greedy.size >= exact.size);
  }
  SECTION("greedy never beats exact") {
    Rng rng(9);
    for (int rep = 0; rep < 30; ++rep) {
      const auto pts = random_plane_points(rng, 10 + static_cast<int>(rng.next() % 8));
      const FinitePseudometricSpace s{euclidean_metric(pts)};
      for (double eps : {0.1, 0.2, 0.35, 0.6}) {
        CHECK(greedy_covering_number(s, eps).size >= exact_covering_number(s, eps).size);
      }
    }
  }
}

TEST_CASE("covering number is monotone in eps") {
  Rng rng(15);
  for (int rep = 0; rep < 15; ++rep) {
    const auto pts = random_plane_points(rng, 12);
    const FinitePseudometricSpace s{euclidean_metric(pts)};
    int prev = s.size() + 1;
    for (double eps : {0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
      const int n = exact_covering_number(s, eps).size;
      CHECK(n <= prev);
      prev = n;
    }
  }
}

TEST_CASE("function spaces from value rows") {
  SECTION("one function gives one point") {
    const auto s = empirical_function_space({{0.1, 0.2}}, 1);
    CHECK(s.size() == 1);
  }
  SECTION("duplicates give zero off-diagonal distance") {
    const auto s = empirical_function_space({{0.3, 0.7}, {0.3, 0.7}}, 2);
    CHECK(s.dist(0, 1) == 0.0);
  }
  SECTION("zero, identity and one on {0,1} under L1") {
    // rows are function values at the two sample points
    const auto s = empirical_function_space({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}, 1);
    CHECK(s.dist(0, 2) == Catch::Approx(1.0));
    CHECK(s.dist(0, 1) == Catch::Approx(0.5));
    CHECK(s.dist(1, 2) == Catch::Approx(0.5));
  }
  SECTION("predictor overload agrees with pairwise distances") {
    const LinearClass cls(BasisFamily::monomial(1, 2), 2);
    const std::vector<Predictor> preds{Predictor(cls, {0.0, 0.0}), Predictor(cls, {1.0, 0.0}),
                                       Predictor(cls, {0.0, 1.0})};
    const LabeledSample s({{0.2}, {0.5}, {0.9}}, {0.0, 0.0, 0.0});
    const auto space = empirical_function_space(preds, s, 2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        CHECK(space.dist(i, j) ==
              Catch::Approx(lp_empirical_distance(preds[i], preds[j], s, 2)).margin(1e-15));
  }
}

TEST_CASE("squared-class covering numbers: N1(2e, G^2) <= N2(e, G)") {
  Rng rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    const int funcs = 4 + static_cast<int>(rng.next() % 10);
    const int n = 3 + static_cast<int>(rng.next() % 6);
    std::vector<std::vector<double>> g(funcs, std::vector<double>(n));
    std::vector<std::vector<double>> g2(funcs, std::vector<double>(n));
    for (int f = 0; f < funcs; ++f)
      for (int i = 0; i < n; ++i) {
        g[f][i] = rng.uniform01();
        g2[f][i] = g[f][i] * g[f][i];
      }
    const auto space_g = empirical_function_space(g, 2);
    const auto space_g2 = empirical_function_space(g2, 1);
    for (double eps : {0.05, 0.1, 0.2, 0.4}) {
      CHECK(exact_covering_number(space_g2, 2.0 * eps).size <=
            exact_covering_number(space_g, eps).size);
    }
  }
}

TEST_CASE("translation keeps covering numbers exactly equal") {
  Rng rng(27);
  for (int rep = 0; rep < 30; ++rep) {
    const int funcs = 5 + static_cast<int>(rng.next() % 8);
    const int n = 3 + static_cast<int>(rng.next() % 5);
    std::vector<double> h(n);
    for (int i = 0; i < n; ++i) h[i] = (rng.next() % 512) / 1024.0;
    std::vector<std::vector<double>> g(funcs, std::vector<double>(n));
    std::vector<std::vector<double>> shifted(funcs, std::vector<double>(n));
    for (int f = 0; f < funcs; ++f)
      for (int i = 0; i < n; ++i) {
        g[f][i] = (rng.next() % 512) / 1024.0;  // dyadic: sums stay exact
        shifted[f][i] = g[f][i] + h[i];
      }
    for (int p = 1; p <= 2; ++p) {
      const auto a = empirical_function_space(g, p);
      const auto b = empirical_function_space(shifted, p);
      for (double eps : {0.05, 0.15, 0.3})
        CHECK(exact_covering_number(a, eps).size == exact_covering_number(b, eps).size);
    }
  }
}

TEST_CASE("bilipschitz images sandwich the covering number") {
  Rng rng(33);
  for (int rep = 0; rep < 25; ++rep) {
    const int m = 8 + static_cast<int>(rng.next() % 8);
    const auto pts = random_plane_points(rng, m);
    const double K = 1.0 + rng.uniform01() * 2.0;
    // Rotation times diag(s1, s2) with singular values inside [1/K, K].
    const double s1 = 1.0 / K + rng.uniform01() * (K - 1.0 / K);
    const double s2 = 1.0 / K + rng.uniform01() * (K - 1.0 / K);
    const double phi = rng.uniform01() * 2.0 * kPi;
    std::vector<std::vector<double>> image(m, std::vector<double>(2));
    for (int i = 0; i < m; ++i) {
      const double a = s1 * pts[i][0], b = s2 * pts[i][1];
      image[i][0] = std::cos(phi) * a - std::sin(phi) * b;
      image[i][1] = std::sin(phi) * a + std::cos(phi) * b;
    }
    const FinitePseudometricSpace m1{euclidean_metric(pts)};
    const FinitePseudometricSpace m2{euclidean_metric(image)};
    for (double eps : {0.1, 0.2, 0.4}) {
      const int base = exact_covering_number(m1, eps).size;
      CHECK(exact_covering_number(m2, K * eps).size <= base);
      CHECK(base <= exact_covering_number(m2, eps / K).size);
    }
  }
}

TEST_CASE("Holder images compress covering numbers") {
  Rng rng(39);
  for (int rep = 0; rep < 25; ++rep) {
    const int m = 8 + static_cast<int>(rng.next() % 8);
    const auto pts = random_plane_points(rng, m);
    const Mat d1 = euclidean_metric(pts);
    const double alpha = 0.4 + rng.uniform01() * 0.6;
    const double K = 1.0 + rng.uniform01() * 2.0;
    // d2 = (K/2) d1^alpha is a metric (concave subadditive transform) and the
    // identity map is Holder of order alpha with constant K.
    Mat d2(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) d2(i, j) = i == j ? 0.0 : 0.5 * K * std::pow(d1(i, j), alpha);
    const FinitePseudometricSpace m1{d1};
    const FinitePseudometricSpace m2{d2};
    for (double eps : {0.1, 0.25, 0.5}) {
      CHECK(exact_covering_number(m2, K * std::pow(eps, alpha)).size <=
            exact_covering_number(m1, eps).size);
    }
  }
}

TEST_CASE("shatter coefficient") {
  using Fam = std::vector<std::function<double(const Point&)>>;
  SECTION("one function has one trace") {
    Fam fam{[](const Point& x) { return x[0]; }};
    CHECK(shatter_coefficient(fam, {{{0.2}, 0.1}, {{0.8}, 0.1}}) == 1);
  }
  SECTION("threshold family on three line points") {
    Fam fam;
    for (int c = 0; c <= 100; ++c)
      fam.push_back([t = c / 100.0](const Point& x) { return x[0] <= t ? 1.0 : 0.0; });
    std::vector<std::pair<Point, double>> pts{{{0.15}, 0.5}, {{0.45}, 0.5}, {{0.85}, 0.5}};
    CHECK(shatter_coefficient(fam, pts) == 4);
  }
  SECTION("points above every graph leave only the empty trace") {
    Fam fam{[](const Point& x) { return 0.2 * x[0]; }, [](const Point&) { return 0.5; }};
    CHECK(shatter_coefficient(fam, {{{0.3}, 0.9}, {{0.6}, 0.95}}) == 1);
  }
  SECTION("bad inputs") {
    Fam fam{[](const Point&) { return 1.0; }};
    CHECK_THROWS_AS(shatter_coefficient(fam, {}), std::invalid_argument);
    CHECK_THROWS_AS(shatter_coefficient(fam, {{{0.1}, 0.5}, {{0.1}, 0.5}}),
                    std::invalid_argument);
  }
  SECTION("bounded by family size and 2^points") {
    Rng rng(45);
    Fam fam;
    for (int f = 0; f < 9; ++f) {
      const double a = rng.uniform01(), b = rng.uniform01();
      fam.push_back([a, b](const Point& x) { return a * x[0] + b * (1 - x[0]); });
    }
    std::vector<std::pair<Point, double>> pts;
    for (int i = 0; i < 3; ++i) pts.push_back({{rng.uniform01()}, rng.uniform01()});
    const int traces = shatter_coefficient(fam, pts);
    CHECK(traces <= 9);
    CHECK(traces <= 8);  // 2^3
  }
}

TEST_CASE("simplex grid enumerates the discretized parameter set") {
  const auto g1 = simplex_grid(1, 0.25);
  CHECK(g1.size() == 5);
  const auto g2 = simplex_grid(2, 0.5);
  CHECK(g2.size() == 6);
  for (const auto& theta : g2) CHECK(simplex_contains(theta));
}
