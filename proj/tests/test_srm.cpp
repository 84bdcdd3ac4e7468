#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "srmlab/srm.hpp"

using namespace srmlab;

namespace {

LabeledSample line_sample(std::vector<double> xs, std::vector<double> ys) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return LabeledSample(std::move(pts), std::move(ys));
}

LabeledSample random_sample(Rng& rng, int n, const std::function<double(double)>& target,
                            double noise = 0.0) {
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = rng.uniform01();
    ys[i] = clamp01(target(xs[i]) + noise * rng.uniform(-0.5, 0.5));
  }
  return line_sample(std::move(xs), std::move(ys));
}

}  // namespace

TEST_CASE("least squares over the simplex") {
  SECTION("noiseless realizable data is interpolated") {
    Rng rng(81);
    const LinearClass cls(BasisFamily::monomial(1, 3), 3);
    const std::vector<double> truth{0.2, 0.3, 0.4};
    const Predictor g_star(cls, truth);
    const auto s = random_sample(rng, 400, [&](double x) {
      return evaluate_predictor(g_star, {x});
    });
    const auto fit = fit_least_squares(cls, s);
    CHECK(fit.risk <= empirical_risk(g_star, s) + 1e-8);
    CHECK(fit.risk < 1e-6);
    CHECK(fit.gap <= 1e-8);
  }
  SECTION("j = 1 agrees with a fine grid search") {
    Rng rng(83);
    for (int rep = 0; rep < 5; ++rep) {
      const LinearClass cls(BasisFamily::monomial(1, 1), 1);
      const auto s = random_sample(rng, 60, [](double x) { return 0.3 + 0.3 * x; }, 0.2);
      const auto fit = fit_least_squares(cls, s);
      double best = 1e9;
      for (int i = 0; i <= 10000; ++i) {
        const double theta = i / 10000.0;
        best = std::min(best, empirical_risk(Predictor(cls, {theta}), s));
      }
      CHECK(std::fabs(fit.risk - best) <= 1e-6);
    }
  }
  SECTION("all-zero responses make the zero vector optimal") {
    const LinearClass cls(BasisFamily::monomial(1, 2), 2);
    const auto s = line_sample({0.2, 0.5, 0.9}, {0.0, 0.0, 0.0});
    const auto fit = fit_least_squares(cls, s);
    CHECK(fit.risk <= empirical_risk(Predictor(cls, {0.0, 0.0}), s) + 1e-8);
    CHECK(fit.predictor.theta()[0] == 0.0);
    CHECK(fit.predictor.theta()[1] == 0.0);
  }
  SECTION("returned risk never beats any vertex by less than it should") {
    Rng rng(85);
    for (int rep = 0; rep < 20; ++rep) {
      const int j = 1 + static_cast<int>(rng.next() % 4);
      const LinearClass cls(BasisFamily::monomial(1, j), j);
      const auto s = random_sample(rng, 50, [](double x) { return 0.5 * x + 0.2; }, 0.3);
      const auto fit = fit_least_squares(cls, s);
      CHECK(fit.risk <= empirical_risk(Predictor(cls, std::vector<double>(j, 0.0)), s) + 1e-8);
      for (int v = 0; v < j; ++v) {
        std::vector<double> vertex(j, 0.0);
        vertex[v] = 1.0;
        CHECK(fit.risk <= empirical_risk(Predictor(cls, vertex), s) + 1e-8);
      }
    }
  }
  SECTION("deterministic across repeated invocations") {
    Rng rng(87);
    const LinearClass cls(BasisFamily::trig_bump(1, 3), 3);
    const auto s = random_sample(rng, 200, [](double x) { return 0.4 + 0.4 * x * (1 - x); }, 0.1);
    const auto a = fit_least_squares(cls, s);
    const auto b = fit_least_squares(cls, s);
    CHECK(a.predictor.theta() == b.predictor.theta());
    CHECK(a.risk == b.risk);
    CHECK(a.iterations == b.iterations);
  }
  SECTION("non-convergence is reported with the gap achieved") {
    Rng rng(95);
    const LinearClass cls(BasisFamily::monomial(1, 4), 4);
    const auto s = random_sample(rng, 100, [](double x) { return 0.2 + 0.6 * x; }, 0.2);
    FitOptions strangled;
    strangled.max_iters = 1;
    CHECK_THROWS_MATCHES(fit_least_squares(cls, s, strangled), numeric_error,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("gap")));
  }
  SECTION("empirical risk of nested fits is nonincreasing in j") {
    Rng rng(89);
    const BasisFamily fam = BasisFamily::monomial(1, 6);
    const auto s = random_sample(rng, 300, [](double x) { return 0.2 + 0.5 * x * x; }, 0.2);
    double prev = 2.0;
    for (int j = 1; j <= 6; ++j) {
      const auto fit = fit_least_squares(LinearClass(fam, j), s);
      CHECK(fit.risk <= prev + 1e-8);
      prev = fit.risk;
    }
  }
}

TEST_CASE("penalty schedules") {
  SECTION("simplex-family schedule at n = 10^6, j = 1") {
    const auto spec = PenaltySpec::parametric_example();
    const double expected = std::sqrt(128.0 * std::log(16.0 * std::sqrt(2.0) * 1e6) / 1e6);
    CHECK(penalty(spec, 1000000, 1) == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("monotone in j for every regime") {
    const PenaltySpec specs[] = {
        PenaltySpec::vc_subgraph({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}),
        PenaltySpec::parametric(),
        PenaltySpec::parametric_example(),
        PenaltySpec::local_entropy_experimental(),
    };
    for (const auto& spec : specs) {
      double prev = 0.0;
      for (int j = 1; j <= 10; ++j) {
        const double r = penalty(spec, 5000, j);
        CHECK(r >= prev);
        prev = r;
      }
    }
  }
  SECTION("schedules vanish as n grows") {
    const PenaltySpec specs[] = {
        PenaltySpec::vc_subgraph({1, 2, 3}),
        PenaltySpec::parametric(),
        PenaltySpec::parametric_example(),
        PenaltySpec::local_entropy_experimental(),
    };
    for (const auto& spec : specs) CHECK(penalty(spec, 100000000, 3) < 0.02);
  }
  SECTION("subgraph schedule with default constants") {
    const auto spec = PenaltySpec::vc_subgraph({2, 3});
    const double expected = std::sqrt(256.0 * 3.0 * std::log(128.0 * kEuler * kEuler * 4000.0) /
                                      4000.0);
    CHECK(penalty(spec, 4000, 2) == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("default M_j reproduces the simplex-family schedule") {
    const auto a = PenaltySpec::parametric();
    const auto b = PenaltySpec::parametric_example();
    for (int j = 1; j <= 5; ++j)
      CHECK(penalty(a, 3000, j) == Catch::Approx(penalty(b, 3000, j)).epsilon(1e-12));
  }
  SECTION("experimental schedule and its marker") {
    const auto spec = PenaltySpec::local_entropy_experimental();
    CHECK(spec.unproven());
    CHECK_FALSE(PenaltySpec::parametric_example().unproven());
    const double expected = 3.0 * compute_A() * std::log(2000.0) * std::sqrt(2.0 / 2000.0);
    CHECK(penalty(spec, 2000, 2) == Catch::Approx(expected).epsilon(1e-12));
  }
  SECTION("below-domain log argument is reported") {
    const auto spec = PenaltySpec::vc_subgraph({1}, /*covering_A=*/1e-12);
    CHECK_THROWS_AS(penalty(spec, 2, 1), std::domain_error);
  }
  SECTION("sequence validation") {
    CHECK_THROWS_AS(PenaltySpec::vc_subgraph({2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(PenaltySpec::vc_subgraph({0}), std::invalid_argument);
    CHECK_THROWS_AS(PenaltySpec::parametric({0.5}), std::invalid_argument);
    CHECK_THROWS_AS(PenaltySpec::parametric({3.0, 2.0}), std::invalid_argument);
  }
}

TEST_CASE("structural risk is the sum") {
  CHECK(structural_risk(0.0, 0.0) == 0.0);
  CHECK(structural_risk(0.25, 0.1) == Catch::Approx(0.35));
  CHECK_THROWS_AS(structural_risk(-0.1, 0.0), std::invalid_argument);
}

TEST_CASE("model selection") {
  Rng rng(91);
  const BasisFamily fam = BasisFamily::monomial(1, 4);
  const auto classes = nested_classes(fam, 4);
  const auto sample = random_sample(rng, 500, [](double x) { return 0.3 * x + 0.4 * x * x; }, 0.1);

  SECTION("argmin picks the strict minimum") {
    const auto [idx, tie] = argmin_with_ties({0.5, 0.4});
    CHECK(idx == 1);
    CHECK_FALSE(tie);
  }
  SECTION("exact ties break toward the smaller index") {
    const auto [idx, tie] = argmin_with_ties({0.7, 0.4, 0.4});
    CHECK(idx == 1);
    CHECK(tie);
  }
  SECTION("report is internally consistent") {
    const auto rep = select_model(sample, classes, PenaltySpec::parametric_example());
    REQUIRE(rep.js.size() == classes.size());
    for (std::size_t i = 0; i < rep.js.size(); ++i)
      CHECK(rep.structural_risks[i] ==
            Catch::Approx(rep.empirical_risks[i] + rep.penalties[i]).margin(1e-12));
    CHECK(rep.chosen_j == rep.js[rep.chosen_index]);
    for (double sr : rep.structural_risks)
      CHECK(rep.structural_risks[rep.chosen_index] <= sr);
    CHECK(simplex_contains(rep.theta_hat));
  }
  SECTION("duplicate classes tie exactly and break to the first") {
    const std::vector<LinearClass> dup{LinearClass(fam, 2), LinearClass(fam, 2)};
    const auto rep = select_model(sample, dup, PenaltySpec::parametric_example());
    CHECK(rep.chosen_index == 0);
    CHECK(rep.tie_broken);
  }
  SECTION("zero penalties select the largest class of a nested sequence") {
    auto spec = PenaltySpec::parametric_example();
    spec.scale = 0.0;
    const auto rep = select_model(sample, classes, spec);
    for (double p : rep.penalties) CHECK(p == 0.0);
    CHECK(rep.chosen_j == 4);
  }
  SECTION("classes must be ordered by j") {
    const std::vector<LinearClass> bad{LinearClass(fam, 2), LinearClass(fam, 1)};
    CHECK_THROWS_AS(select_model(sample, bad, PenaltySpec::parametric_example()),
                    std::invalid_argument);
  }
  SECTION("a failing fit aborts the selection naming its class") {
    FitOptions strangled;
    strangled.max_iters = 1;
    CHECK_THROWS_MATCHES(
        select_model(sample, classes, PenaltySpec::parametric_example(), strangled),
        numeric_error,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("j=")));
  }
}

TEST_CASE("selection responds to the penalty weight and ignores constant shifts") {
  Rng rng(93);
  for (int rep = 0; rep < 25; ++rep) {
    const BasisFamily fam = BasisFamily::monomial(1, 5);
    const auto classes = nested_classes(fam, 5);
    const double a = rng.uniform01() * 0.4, b = rng.uniform01() * 0.3,
                 c = rng.uniform01() * 0.3;
    const auto sample = random_sample(
        rng, 150 + static_cast<int>(rng.next() % 300),
        [&](double x) { return a * x + b * x * x + c * x * x * x; }, 0.15);

    int prev_chosen = 1 << 20;
    for (double scale : {0.0, 0.05, 1.0, 50.0}) {
      auto spec = PenaltySpec::parametric_example();
      spec.scale = scale;
      const auto report = select_model(sample, classes, spec);
      CHECK(report.chosen_j <= prev_chosen);  // heavier penalties never pick bigger classes
      prev_chosen = report.chosen_j;

      // shifting every structural risk by a constant cannot move the argmin
      std::vector<double> shifted = report.structural_risks;
      for (double& v : shifted) v += 0.37;
      CHECK(argmin_with_ties(shifted).first == report.chosen_index);
    }
  }
}

TEST_CASE("tail series diagnostic") {
  SECTION("linear W_j converges geometrically") {
    const auto diag = delta_diagnostic([](int j) { return static_cast<double>(j); }, 40);
    CHECK(diag.geometric_tail);
    const double limit = std::exp(-0.5) / (1.0 - std::exp(-0.5));
    CHECK(diag.partial_sums.back() == Catch::Approx(limit).epsilon(1e-6));
    for (std::size_t i = 1; i < diag.partial_sums.size(); ++i)
      CHECK(diag.partial_sums[i] > diag.partial_sums[i - 1]);
  }
  SECTION("logarithmic W_j looks divergent") {
    const auto diag = delta_diagnostic([](int j) { return std::log(j + 1.0); }, 40);
    CHECK_FALSE(diag.geometric_tail);
  }
  SECTION("single term") {
    const auto diag = delta_diagnostic([](int) { return 3.0; }, 1);
    REQUIRE(diag.partial_sums.size() == 1);
    CHECK(diag.partial_sums[0] == Catch::Approx(std::exp(-1.5)));
  }
  SECTION("regime-derived series") {
    const auto vc = delta_diagnostic(PenaltySpec::vc_subgraph({1, 2, 3, 4, 5, 6, 7, 8, 9, 10,
                                                               11, 12, 13, 14, 15, 16, 17, 18,
                                                               19, 20}),
                                     20);
    CHECK(vc.geometric_tail);
    CHECK(vc.partial_sums[0] == Catch::Approx(std::exp(-1.0)));
    const auto par = delta_diagnostic(PenaltySpec::parametric_example(), 20);
    CHECK(par.geometric_tail);
    CHECK(par.partial_sums[0] == Catch::Approx(std::exp(-1.0)));
  }
}
