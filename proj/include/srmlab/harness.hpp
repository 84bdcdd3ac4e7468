#pragma once

#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "srmlab/bounds.hpp"
#include "srmlab/io.hpp"
#include "srmlab/srm.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// Synthetic data generation. Designs have a density on [0,1]^k (the clipped
// Gaussian is truncated by rejection, not clamped, so no boundary atoms).
// Responses stay in [0,1] for every noise model.
// ---------------------------------------------------------------------------
enum class Design { uniform_cube, gaussian_clipped };

struct NoiseSpec {
  enum class Kind { none, uniform_width, bernoulli_flip };
  Kind kind = Kind::none;
  double param = 0.0;  // width w, or flip probability p

  static NoiseSpec none() { return {}; }
  static NoiseSpec uniform_width(double w) {
    if (!(w >= 0.0 && w <= 1.0)) throw std::invalid_argument("NoiseSpec: width outside [0,1]");
    return NoiseSpec{Kind::uniform_width, w};
  }
  static NoiseSpec bernoulli_flip(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("NoiseSpec: p outside [0,1]");
    return NoiseSpec{Kind::bernoulli_flip, p};
  }
};

struct GeneratorConfig {
  int k = 1;
  Design design = Design::uniform_cube;
  std::uint64_t seed = 1;
  std::optional<Predictor> truth;  // in-class target (j*, theta*)
  std::function<double(const Point&)> external;  // bounded external target
  std::string external_name;
  NoiseSpec noise;

  void validate() const {
    if (k < 1) throw std::invalid_argument("GeneratorConfig: k must be >= 1");
    if (!truth.has_value() && !external)
      throw std::invalid_argument("GeneratorConfig: no target configured");
    if (truth.has_value() && truth->cls().basis().input_dim() != k)
      throw std::invalid_argument("GeneratorConfig: target dimension mismatch");
  }

  double clean(const Point& x) const {
    const double v = truth.has_value() ? evaluate_predictor(*truth, x) : external(x);
    if (!(v >= 0.0 && v <= 1.0))
      throw numeric_error("GeneratorConfig: target value escaped [0,1]");
    return v;
  }

  GeneratorConfig with_seed(std::uint64_t s) const {
    GeneratorConfig c = *this;
    c.seed = s;
    return c;
  }
};

/// Named external targets selectable from config files.
inline std::function<double(const Point&)> external_target(const std::string& name) {
  if (name == "sine")
    return [](const Point& x) { return 0.5 + 0.5 * std::sin(2.0 * kPi * x[0]); };
  if (name == "ramp")
    return [](const Point& x) { return clamp01(1.5 * x[0] - 0.25); };
  throw std::invalid_argument("external_target: unknown target '" + name + "'");
}

namespace detail {

inline Point draw_point(Rng& rng, const GeneratorConfig& cfg) {
  Point x(cfg.k);
  for (int c = 0; c < cfg.k; ++c) {
    switch (cfg.design) {
      case Design::uniform_cube:
        x[c] = rng.uniform01();
        break;
      case Design::gaussian_clipped: {
        double v;
        do {
          v = rng.gaussian(0.5, 0.25);
        } while (!(v >= 0.0 && v <= 1.0));
        x[c] = v;
        break;
      }
    }
  }
  return x;
}

inline double draw_response(Rng& rng, const GeneratorConfig& cfg, double clean) {
  switch (cfg.noise.kind) {
    case NoiseSpec::Kind::none:
      return clean;
    case NoiseSpec::Kind::uniform_width: {
      const double w = cfg.noise.param;
      return clamp01(clean + rng.uniform(-w / 2.0, w / 2.0));
    }
    case NoiseSpec::Kind::bernoulli_flip:
      return rng.uniform01() < cfg.noise.param ? 1.0 - clean : clean;
  }
  return clean;
}

inline std::pair<Point, double> draw_pair(Rng& rng, const GeneratorConfig& cfg) {
  Point x = draw_point(rng, cfg);
  const double clean = cfg.clean(x);
  return {std::move(x), draw_response(rng, cfg, clean)};
}

}  // namespace detail

/// Deterministic for (seed, n); xs i.i.d. from the design, ys in [0,1].
inline LabeledSample generate(const GeneratorConfig& cfg, int n) {
  cfg.validate();
  if (n < 1) throw std::invalid_argument("generate: n must be >= 1");
  Rng rng(seed_mix(cfg.seed, static_cast<std::uint64_t>(n), kSampleStreamTag));
  std::vector<Point> xs;
  std::vector<double> ys;
  xs.reserve(n);
  ys.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto [x, y] = detail::draw_pair(rng, cfg);
    xs.push_back(std::move(x));
    ys.push_back(y);
  }
  return LabeledSample(std::move(xs), std::move(ys));
}

// ---------------------------------------------------------------------------
// True risk by Monte Carlo over a fresh draw on the evaluation stream, which
// is independent of the sample stream for the same seed.
// ---------------------------------------------------------------------------
struct TrueRiskResult {
  double value = 0.0;
  double mc_error = 0.0;
};

inline TrueRiskResult true_risk(const Predictor& p, const GeneratorConfig& cfg, int precision) {
  cfg.validate();
  if (precision < 10000) throw std::invalid_argument("true_risk: precision must be >= 10^4");
  Rng rng(seed_mix(cfg.seed, kEvalStreamTag));
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < precision; ++i) {
    auto [x, y] = detail::draw_pair(rng, cfg);
    const double d = evaluate_predictor(p, x) - y;
    const double v = d * d;
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / precision;
  const double var = std::max(0.0, (sumsq - precision * mean * mean) / (precision - 1));
  return TrueRiskResult{mean, std::sqrt(var / precision)};
}

/// Smallest achievable risk for the configured generator. Closed form for
/// the noiseless and uniform-noise models; flip noise integrates the
/// conditional variance over a fixed evaluation draw.
inline double bayes_risk(const GeneratorConfig& cfg, int precision = 200000) {
  cfg.validate();
  switch (cfg.noise.kind) {
    case NoiseSpec::Kind::none:
      return 0.0;
    case NoiseSpec::Kind::uniform_width:
      return cfg.noise.param * cfg.noise.param / 12.0;
    case NoiseSpec::Kind::bernoulli_flip: {
      const double p = cfg.noise.param;
      Rng rng(seed_mix(cfg.seed, kEvalStreamTag, 0xB41Dull));
      double acc = 0.0;
      for (int i = 0; i < precision; ++i) {
        const Point x = detail::draw_point(rng, cfg);
        const double g = cfg.clean(x);
        acc += p * (1.0 - p) * (1.0 - 2.0 * g) * (1.0 - 2.0 * g);
      }
      return acc / precision;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Experiment results. Two row kinds share the carrier; CSV headers follow
// the field names exactly and numbers round-trip losslessly.
// ---------------------------------------------------------------------------
struct ConsistencyRow {
  long long n = 0;
  int trial = 0;
  int chosen_j = 0;  // -1 records a fit failure
  double empirical_risk = 0.0;
  double true_risk = 0.0;
  double excess_risk = 0.0;
  std::string penalty_regime;
};

struct CoverageRow {
  long long n = 0;
  double eta = 0.0;
  int trials = 0;
  int violations = 0;
  double violation_rate = 0.0;
};

struct ExperimentResult {
  enum class Kind { consistency, coverage };
  Kind kind = Kind::consistency;
  std::vector<ConsistencyRow> consistency_rows;
  std::vector<CoverageRow> coverage_rows;
};

inline std::string to_csv(const ExperimentResult& result) {
  std::string out;
  if (result.kind == ExperimentResult::Kind::consistency) {
    out = "n,trial,chosen_j,empirical_risk,true_risk,excess_risk,penalty_regime\n";
    for (const auto& r : result.consistency_rows) {
      out += std::to_string(r.n) + "," + std::to_string(r.trial) + "," +
             std::to_string(r.chosen_j) + "," + format_double(r.empirical_risk) + "," +
             format_double(r.true_risk) + "," + format_double(r.excess_risk) + "," +
             r.penalty_regime + "\n";
    }
  } else {
    out = "n,eta,trials,violations,violation_rate\n";
    for (const auto& r : result.coverage_rows) {
      out += std::to_string(r.n) + "," + format_double(r.eta) + "," + std::to_string(r.trials) +
             "," + std::to_string(r.violations) + "," + format_double(r.violation_rate) + "\n";
    }
  }
  return out;
}

inline ExperimentResult experiment_from_csv(const std::string& csv) {
  std::vector<std::string> lines;
  {
    std::stringstream ss(csv);
    std::string line;
    while (std::getline(ss, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) lines.push_back(line);
    }
  }
  if (lines.empty()) throw std::invalid_argument("experiment csv: empty");
  ExperimentResult out;
  if (lines[0] == "n,trial,chosen_j,empirical_risk,true_risk,excess_risk,penalty_regime") {
    out.kind = ExperimentResult::Kind::consistency;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto c = split_csv_line(lines[i]);
      if (c.size() != 7) throw std::invalid_argument("experiment csv: bad consistency row");
      out.consistency_rows.push_back(ConsistencyRow{
          std::stoll(c[0]), std::stoi(c[1]), std::stoi(c[2]), parse_double(c[3]),
          parse_double(c[4]), parse_double(c[5]), c[6]});
    }
  } else if (lines[0] == "n,eta,trials,violations,violation_rate") {
    out.kind = ExperimentResult::Kind::coverage;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto c = split_csv_line(lines[i]);
      if (c.size() != 5) throw std::invalid_argument("experiment csv: bad coverage row");
      out.coverage_rows.push_back(CoverageRow{std::stoll(c[0]), parse_double(c[1]),
                                              std::stoi(c[2]), std::stoi(c[3]),
                                              parse_double(c[4])});
    }
  } else {
    throw std::invalid_argument("experiment csv: unknown header");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments. Trials are independent; a worker pool may run them in any
// order because each writes only its own slot, so outputs are byte-identical
// across worker counts. Trial t draws from seed_mix(base_seed, t) and its
// evaluation draws from seed_mix(base_seed, t, EVAL).
// ---------------------------------------------------------------------------
struct RunOptions {
  int mc_precision = 100000;
  int threads = 1;
  double theta_grid_step = 0.02;  // coverage sup scan
  FitOptions fit;
};

namespace detail {

template <typename Fn>
void run_indexed(int count, int threads, Fn&& body) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> cursor{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, count);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int i = cursor.fetch_add(1); i < count; i = cursor.fetch_add(1)) body(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace detail

inline ExperimentResult run_consistency(const GeneratorConfig& cfg,
                                        const std::vector<LinearClass>& classes,
                                        const PenaltySpec& spec,
                                        const std::vector<long long>& n_grid, int trials,
                                        RunOptions opts = {}) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("run_consistency: trials must be >= 1");
  for (std::size_t i = 1; i < n_grid.size(); ++i)
    if (n_grid[i] <= n_grid[i - 1])
      throw std::invalid_argument("run_consistency: n_grid must be increasing");

  const double l_star = bayes_risk(cfg);
  const int total = static_cast<int>(n_grid.size()) * trials;
  std::vector<ConsistencyRow> rows(total);

  detail::run_indexed(total, opts.threads, [&](int slot) {
    const int ni = slot / trials;
    const int t = slot % trials;
    const long long n = n_grid[ni];
    const GeneratorConfig trial_cfg = cfg.with_seed(seed_mix(cfg.seed, t));
    const LabeledSample sample = generate(trial_cfg, static_cast<int>(n));
    ConsistencyRow row;
    row.n = n;
    row.trial = t;
    row.penalty_regime = spec.regime_name();
    try {
      const SelectionReport rep = select_model(sample, classes, spec, opts.fit);
      // Re-check the additive identity on ingestion.
      for (std::size_t j = 0; j < rep.structural_risks.size(); ++j)
        if (std::fabs(rep.structural_risks[j] - (rep.empirical_risks[j] + rep.penalties[j])) >
            1e-12)
          throw numeric_error("run_consistency: structural risk identity violated");
      const Predictor chosen(classes[rep.chosen_index], rep.theta_hat);
      const TrueRiskResult tr = true_risk(chosen, trial_cfg, opts.mc_precision);
      row.chosen_j = rep.chosen_j;
      row.empirical_risk = rep.empirical_risks[rep.chosen_index];
      row.true_risk = tr.value;
      row.excess_risk = tr.value - l_star;
    } catch (const numeric_error& e) {
      row.chosen_j = -1;
      row.empirical_risk = std::numeric_limits<double>::quiet_NaN();
      row.true_risk = std::numeric_limits<double>::quiet_NaN();
      row.excess_risk = std::numeric_limits<double>::quiet_NaN();
      row.penalty_regime = std::string("fit_error:") + e.what();
    }
    rows[slot] = std::move(row);
  });

  ExperimentResult out;
  out.kind = ExperimentResult::Kind::consistency;
  out.consistency_rows = std::move(rows);
  return out;
}

// ---------------------------------------------------------------------------
// Coverage experiment: per trial, the largest gap between true risk (Monte
// Carlo) and sample risk over a theta-grid of the class, compared against
// the inverted tail radius for each eta. The grid sup underestimates the
// class sup, which only makes the check stricter.
// ---------------------------------------------------------------------------
struct CoverageParams {
  double covering_A = 0.0;  // N_1(eps) <= A eps^-W for the squared-error class
  double covering_W = 0.0;

  /// Constants for the simplex family of dimension j. The class is
  /// sqrt(j)-Lipschitz in the coefficients, its squared-error class doubles
  /// that envelope, and the doubling is the 2^j factor below:
  ///   N_1(u) <= 2^j sqrt(j)^j (sqrt(j) diam(Theta_j) / u)^j.
  static CoverageParams for_simplex_class(int j) {
    const double a = std::pow(2.0, j) * std::pow(std::sqrt(static_cast<double>(j)), j) *
                     std::pow(std::sqrt(static_cast<double>(j)) * simplex_diameter(j), j);
    return CoverageParams{a, static_cast<double>(j)};
  }
};

/// max over the theta grid of risk difference (eval-side minus sample-side).
inline double sup_deviation_on_grid(const QuadMoments& eval_side, const QuadMoments& sample_side,
                                    const std::vector<std::vector<double>>& grid) {
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& theta : grid)
    sup = std::max(sup, eval_side.risk(theta) - sample_side.risk(theta));
  return sup;
}

/// One coverage trial: sup over the grid of L(g) - Lhat_n(g), with the true
/// risk taken on the trial's evaluation draw.
inline double coverage_trial_sup(const GeneratorConfig& trial_cfg, const LinearClass& cls,
                                 long long n, const std::vector<std::vector<double>>& grid,
                                 int mc_precision) {
  const LabeledSample sample = generate(trial_cfg, static_cast<int>(n));
  Rng eval_rng(seed_mix(trial_cfg.seed, kEvalStreamTag));
  std::vector<Point> exs;
  std::vector<double> eys;
  exs.reserve(mc_precision);
  eys.reserve(mc_precision);
  for (int i = 0; i < mc_precision; ++i) {
    auto [x, y] = detail::draw_pair(eval_rng, trial_cfg);
    exs.push_back(std::move(x));
    eys.push_back(y);
  }
  const LabeledSample eval_draw(std::move(exs), std::move(eys));
  return sup_deviation_on_grid(quad_moments(cls, eval_draw), quad_moments(cls, sample), grid);
}

inline ExperimentResult run_coverage(const GeneratorConfig& cfg, const LinearClass& cls,
                                     const CoverageParams& params,
                                     const std::vector<double>& eta_grid, long long n, int trials,
                                     RunOptions opts = {}) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("run_coverage: trials must be >= 1");
  if (eta_grid.empty()) throw std::invalid_argument("run_coverage: empty eta grid");
  if (!(params.covering_A > 0.0 && params.covering_W >= 1.0))
    throw std::invalid_argument("run_coverage: bad covering constants");

  // Radii per eta; eta_trick_epsilon enforces the n threshold and refuses
  // undersized samples.
  std::vector<double> radii;
  radii.reserve(eta_grid.size());
  for (double eta : eta_grid)
    radii.push_back(eta_trick_epsilon(params.covering_A, params.covering_W, n, eta).epsilon);

  const auto grid = simplex_grid(cls.j(), opts.theta_grid_step);
  std::vector<double> sups(trials);
  detail::run_indexed(trials, opts.threads, [&](int t) {
    sups[t] = coverage_trial_sup(cfg.with_seed(seed_mix(cfg.seed, t)), cls, n, grid,
                                 opts.mc_precision);
  });

  ExperimentResult out;
  out.kind = ExperimentResult::Kind::coverage;
  for (std::size_t e = 0; e < eta_grid.size(); ++e) {
    CoverageRow row;
    row.n = n;
    row.eta = eta_grid[e];
    row.trials = trials;
    row.violations = 0;
    for (double sup : sups)
      if (sup > radii[e]) ++row.violations;
    row.violation_rate = static_cast<double>(row.violations) / trials;
    out.coverage_rows.push_back(row);
  }
  return out;
}

enum class EmitFormat { csv, json };

/// JSON writer lives with the config layer; the harness serializes CSV
/// itself so experiments stay free of the JSON dependency.
inline void emit(const ExperimentResult& result, const std::string& path, EmitFormat format,
                 const std::function<std::string(const ExperimentResult&)>& json_writer = {}) {
  if (format == EmitFormat::csv) {
    write_file(path, to_csv(result));
    return;
  }
  if (!json_writer) throw std::invalid_argument("emit: json writer not supplied");
  write_file(path, json_writer(result));
}

/// Default half-decade n grid.
inline std::vector<long long> default_n_grid() { return {200, 632, 2000, 6325, 20000}; }

}  // namespace srmlab
