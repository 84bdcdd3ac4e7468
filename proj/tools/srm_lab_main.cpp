// srm-lab: command-line front end for the model-selection laboratory.
//
// Subcommands: select, penalty, bound, entropy, covering,
// simulate-consistency, simulate-coverage. All read a JSON config; results
// go to --out or stdout. Exit codes: 0 success, 2 config error, 3 numerical
// failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "srmlab/config.hpp"
#include "srmlab/srmlab.hpp"

namespace {

using srmlab::json;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::string format;  // empty = subcommand default
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool config_required = true) {
  auto* opt = cmd->add_option("--config", args.config_path, "JSON config file");
  if (config_required) opt->required();
  cmd->add_option("--out", args.out_path, "output path (default: stdout)");
  cmd->add_option("--format", args.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--seed", args.seed, "override generator seed");
  cmd->add_option("--threads", args.threads, "worker count for trial loops")
      ->check(CLI::PositiveNumber);
}

void write_out(const CommonArgs& args, const std::string& content) {
  if (args.out_path.empty())
    std::cout << content;
  else
    srmlab::write_file(args.out_path, content);
}

srmlab::AppConfig load(const CommonArgs& args) {
  auto app = srmlab::load_config(args.config_path);
  return app;
}

srmlab::GeneratorConfig generator_for(const srmlab::AppConfig& app, const CommonArgs& args) {
  auto gen = srmlab::make_generator(app);
  if (args.seed.has_value()) gen.seed = *args.seed;
  return gen;
}

std::string result_payload(const srmlab::ExperimentResult& result, const std::string& format) {
  if (format == "json") return srmlab::experiment_json_string(result);
  return srmlab::to_csv(result);
}

int cmd_select(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.classes.has_value()) throw srmlab::config_error("select: classes section missing");
  if (!app.penalty.has_value()) throw srmlab::config_error("select: penalty section missing");
  if (app.experiment.sample_csv.empty())
    throw srmlab::config_error("select: experiment.sample_csv missing");
  srmlab::LabeledSample sample = [&] {
    try {
      return srmlab::read_sample_csv(app.experiment.sample_csv);
    } catch (const std::invalid_argument& e) {
      throw srmlab::config_error(e.what());
    }
  }();
  const auto report = srmlab::select_model(sample, app.classes->make_classes(), *app.penalty);
  write_out(args, srmlab::to_json(report).dump(2) + "\n");
  return 0;
}

int cmd_penalty(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.classes.has_value()) throw srmlab::config_error("penalty: classes section missing");
  if (!app.penalty.has_value()) throw srmlab::config_error("penalty: penalty section missing");
  const std::string format = args.format.empty() ? "csv" : args.format;
  if (format == "csv") {
    std::string out = "regime,n,j,r\n";
    for (long long n : app.experiment.n_grid)
      for (int j = 1; j <= app.classes->j_max; ++j)
        out += app.penalty->regime_name() + "," + std::to_string(n) + "," + std::to_string(j) +
               "," + srmlab::format_double(srmlab::penalty(*app.penalty, n, j)) + "\n";
    write_out(args, out);
  } else {
    json arr = json::array();
    for (long long n : app.experiment.n_grid)
      for (int j = 1; j <= app.classes->j_max; ++j)
        arr.push_back({{"regime", app.penalty->regime_name()},
                       {"n", n},
                       {"j", j},
                       {"r", srmlab::penalty(*app.penalty, n, j)}});
    write_out(args, arr.dump(2) + "\n");
  }
  return 0;
}

json forward_bound_report(const srmlab::BoundConfig& b) {
  json rep;
  rep["formula_id"] = b.formula;
  rep["n"] = b.n;
  rep["epsilon"] = b.epsilon;
  json constants;
  double value = 0.0;
  if (b.formula == "vc_subgraph") {
    value = srmlab::vc_subgraph_covering_bound(b.V, b.epsilon, b.r, b.K);
    constants = {{"V", b.V}, {"r", b.r}, {"K", b.K}};
  } else if (b.formula == "loss_class") {
    const auto res = srmlab::loss_class_covering_bound(b.V, b.epsilon, b.K);
    value = res.value;
    constants = {{"V", b.V}, {"K", b.K}, {"winning_branch", res.winning_branch}};
  } else if (b.formula == "parametric") {
    value = srmlab::parametric_covering_bound(b.d, b.diam, b.m_norm, b.epsilon, b.r);
    constants = {{"d", b.d}, {"diam", b.diam}, {"m_norm", b.m_norm}, {"p", b.r}};
  } else if (b.formula == "parametric_loss") {
    value = srmlab::parametric_loss_covering_bound(b.d, b.diam, b.m_norm, b.epsilon);
    constants = {{"d", b.d}, {"diam", b.diam}, {"m_norm", b.m_norm}};
  } else if (b.formula == "classification") {
    value = srmlab::classification_deviation_bound(b.n, b.epsilon, b.V, b.constant);
    constants = {{"V", b.V}, {"exponent_constant", b.constant}};
  } else if (b.formula == "regression_parametric") {
    value = srmlab::regression_deviation_bound(b.n, b.epsilon, [&](double e) {
      return srmlab::parametric_loss_covering_bound(b.d, b.diam, b.m_norm, e);
    });
    constants = {{"d", b.d}, {"diam", b.diam}, {"m_norm", b.m_norm}};
  } else if (b.formula == "regression_vc") {
    value = srmlab::regression_deviation_bound(b.n, b.epsilon, [&](double e) {
      return srmlab::loss_class_covering_bound(b.V, e, b.K).value;
    });
    constants = {{"V", b.V}, {"K", b.K}};
  } else {
    throw srmlab::config_error("bound: unknown formula '" + b.formula + "'");
  }
  rep["value"] = value;
  rep["constants"] = constants;
  return rep;
}

int cmd_bound(const CommonArgs& args, CLI::App* cmd, const srmlab::BoundConfig& flags,
              bool invert_flag) {
  srmlab::BoundConfig b = flags;
  if (!args.config_path.empty()) {
    const auto app = load(args);
    if (app.bound.has_value()) {
      b = *app.bound;
      // explicit flags still win over the config section
      if (cmd->count("--formula")) b.formula = flags.formula;
      if (cmd->count("--n")) b.n = flags.n;
      if (cmd->count("--epsilon")) b.epsilon = flags.epsilon;
      if (cmd->count("--eta")) b.eta = flags.eta;
      if (cmd->count("--V")) b.V = flags.V;
      if (cmd->count("--d")) b.d = flags.d;
      if (cmd->count("--diam")) b.diam = flags.diam;
      if (cmd->count("--m-norm")) b.m_norm = flags.m_norm;
      if (cmd->count("--K")) b.K = flags.K;
      if (cmd->count("--A")) b.A = flags.A;
      if (cmd->count("--W")) b.W = flags.W;
      if (cmd->count("--constant")) b.constant = flags.constant;
      if (cmd->count("--r")) b.r = flags.r;
    }
  }
  if (invert_flag) b.invert = true;
  json rep;
  if (b.invert) {
    if (b.formula == "classification_eta") {
      rep["formula_id"] = "classification_eta";
      rep["epsilon"] = srmlab::classification_eta_epsilon(b.V, b.n, b.eta, b.constant);
      rep["n"] = b.n;
      rep["eta"] = b.eta;
      rep["constants"] = {{"V", b.V}, {"constant", b.constant}};
    } else {
      rep = srmlab::to_json(srmlab::eta_trick_epsilon(b.A, b.W, b.n, b.eta));
    }
  } else {
    rep = forward_bound_report(b);
  }
  write_out(args, rep.dump(2) + "\n");
  return 0;
}

int cmd_covering(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.covering.has_value()) throw srmlab::config_error("covering: section missing");
  const auto& c = *app.covering;
  srmlab::Mat dist = [&] {
    try {
      return srmlab::read_matrix_csv(c.matrix_csv);
    } catch (const std::invalid_argument& e) {
      throw srmlab::config_error(e.what());
    }
  }();
  srmlab::FinitePseudometricSpace space = [&] {
    try {
      return srmlab::FinitePseudometricSpace(std::move(dist));
    } catch (const std::invalid_argument& e) {
      throw srmlab::config_error(std::string("covering: ") + e.what());
    }
  }();
  if (!(c.epsilon > 0.0)) throw srmlab::config_error("covering: epsilon must be > 0");
  srmlab::CoverResult res;
  if (c.mode == "greedy" || (c.mode == "auto" && space.size() > c.exact_threshold))
    res = srmlab::greedy_covering_number(space, c.epsilon);
  else
    res = srmlab::exact_covering_number(space, c.epsilon, {c.exact_threshold});
  if (args.format == "csv") {
    std::string out = "size,exact,centers\n" + std::to_string(res.size) + "," +
                      (res.exact ? "true" : "false") + ",";
    for (std::size_t i = 0; i < res.centers.size(); ++i)
      out += (i ? " " : "") + std::to_string(res.centers[i]);
    out += "\n";
    write_out(args, out);
  } else {
    write_out(args, srmlab::to_json(res, c.epsilon).dump(2) + "\n");
  }
  return 0;
}

int cmd_entropy(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.entropy.has_value()) throw srmlab::config_error("entropy: section missing");
  if (!app.classes.has_value()) throw srmlab::config_error("entropy: classes section missing");
  const auto& e = *app.entropy;
  if (e.j < 1 || e.j > app.classes->j_max)
    throw srmlab::config_error("entropy: need 1 <= j <= classes.j_max");
  const srmlab::LinearClass cls(app.classes->make_basis(), e.j);

  srmlab::GramMatrix gram = [&] {
    if (e.population) {
      // Moment matrix of the basis under the configured design, by a large
      // fixed draw.
      auto gen = generator_for(app, args);
      srmlab::Rng rng(srmlab::seed_mix(gen.seed, srmlab::kEvalStreamTag, 0x505349ull));
      srmlab::Mat m(e.j, e.j);
      for (int i = 0; i < e.population_precision; ++i) {
        const srmlab::Point x = srmlab::detail::draw_point(rng, gen);
        const auto row = cls.basis_row(x);
        for (int a = 0; a < e.j; ++a)
          for (int b = 0; b <= a; ++b) m(a, b) += row[a] * row[b];
      }
      for (int a = 0; a < e.j; ++a)
        for (int b = 0; b <= a; ++b) {
          m(a, b) /= e.population_precision;
          m(b, a) = m(a, b);
        }
      return srmlab::gram_from_matrix(std::move(m), e.population_precision);
    }
    if (e.sample_csv.empty()) throw srmlab::config_error("entropy: sample_csv missing");
    srmlab::LabeledSample sample = [&] {
      try {
        return srmlab::read_sample_csv(e.sample_csv);
      } catch (const std::invalid_argument& ex) {
        throw srmlab::config_error(ex.what());
      }
    }();
    return srmlab::gram_matrix(sample, cls);
  }();

  const double delta = e.delta.value_or(srmlab::delta_n(gram.source_n));
  std::vector<double> us = e.u.empty() ? std::vector<double>{delta / 2.0} : e.u;

  json rep;
  rep["j"] = e.j;
  rep["n"] = gram.source_n;
  rep["delta"] = delta;
  rep["eigenvalues"] = gram.eigenvalues;
  rep["positive_definite"] = gram.positive_definite;
  if (gram.positive_definite) rep["ellipsoid_radii"] = srmlab::ellipsoid_radii(gram, delta);
  json bounds = json::array();
  for (double u : us) {
    const auto rb = srmlab::local_entropy_bound(e.j, delta, u,
                                                {e.rogers_constant, e.trust_rogers});
    json one = {{"u", u}, {"log_bound", rb.log_bound}, {"branch", srmlab::to_string(rb.branch)}};
    if (rb.rogers_log_bound.has_value()) one["rogers_log_bound"] = *rb.rogers_log_bound;
    bounds.push_back(one);
  }
  rep["log_entropy_bounds"] = bounds;
  rep["entropy_integral"] = srmlab::entropy_integral(e.j, delta);
  write_out(args, rep.dump(2) + "\n");
  return 0;
}

int cmd_simulate_consistency(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.classes.has_value() || !app.penalty.has_value())
    throw srmlab::config_error("simulate-consistency: needs classes and penalty sections");
  const auto gen = generator_for(app, args);
  srmlab::RunOptions opts;
  opts.mc_precision = app.experiment.mc_precision;
  opts.threads = args.threads;
  const auto result = srmlab::run_consistency(gen, app.classes->make_classes(), *app.penalty,
                                              app.experiment.n_grid, app.experiment.trials, opts);
  write_out(args, result_payload(result, args.format.empty() ? "csv" : args.format));
  return 0;
}

int cmd_simulate_coverage(const CommonArgs& args) {
  const auto app = load(args);
  if (!app.classes.has_value())
    throw srmlab::config_error("simulate-coverage: classes section missing");
  const auto gen = generator_for(app, args);
  const srmlab::LinearClass cls(app.classes->make_basis(), app.classes->j_max);
  srmlab::CoverageParams params = srmlab::CoverageParams::for_simplex_class(cls.j());
  if (app.experiment.bound_A.has_value()) params.covering_A = *app.experiment.bound_A;
  if (app.experiment.bound_W.has_value()) params.covering_W = *app.experiment.bound_W;
  srmlab::RunOptions opts;
  opts.mc_precision = app.experiment.mc_precision;
  opts.threads = args.threads;
  opts.theta_grid_step = app.experiment.theta_grid_step;
  const auto result = [&] {
    try {
      return srmlab::run_coverage(gen, cls, params, app.experiment.eta_grid, app.experiment.n,
                                  app.experiment.trials, opts);
    } catch (const std::domain_error& e) {
      throw srmlab::config_error(std::string("simulate-coverage: ") + e.what());
    }
  }();
  write_out(args, result_payload(result, args.format.empty() ? "csv" : args.format));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"model selection laboratory for bounded regression"};
  cli.require_subcommand(1);

  CommonArgs args;
  srmlab::BoundConfig bound_flags;
  bool invert_flag = false;

  auto* sel = cli.add_subcommand("select", "fit nested classes on a sample CSV and pick a model");
  add_common(sel, args);
  auto* pen = cli.add_subcommand("penalty", "print r(n,j) tables");
  add_common(pen, args);
  auto* bnd = cli.add_subcommand("bound", "evaluate deviation/covering bound formulas");
  add_common(bnd, args, /*config_required=*/false);
  bnd->add_option("--formula", bound_flags.formula, "formula id");
  bnd->add_option("--n", bound_flags.n, "sample size");
  bnd->add_option("--epsilon", bound_flags.epsilon, "radius");
  bnd->add_option("--eta", bound_flags.eta, "failure probability");
  bnd->add_option("--V", bound_flags.V, "subgraph dimension");
  bnd->add_option("--d", bound_flags.d, "parameter dimension");
  bnd->add_option("--diam", bound_flags.diam, "parameter-set diameter");
  bnd->add_option("--m-norm", bound_flags.m_norm, "Lipschitz envelope norm");
  bnd->add_option("--K", bound_flags.K, "universal constant override");
  bnd->add_option("--A", bound_flags.A, "covering constant A");
  bnd->add_option("--W", bound_flags.W, "covering exponent W");
  bnd->add_option("--constant", bound_flags.constant, "exponent constant (32 or 128)");
  bnd->add_option("--r", bound_flags.r, "norm order");
  bnd->add_flag("--invert", invert_flag, "solve the tail bound for epsilon");
  auto* ent = cli.add_subcommand("entropy", "Gram spectrum and local entropy bounds");
  add_common(ent, args);
  auto* cov = cli.add_subcommand("covering", "covering number of a distance-matrix CSV");
  add_common(cov, args);
  auto* simc = cli.add_subcommand("simulate-consistency", "model-selection risk experiment");
  add_common(simc, args);
  auto* simv = cli.add_subcommand("simulate-coverage", "confidence-radius coverage experiment");
  add_common(simv, args);

  CLI11_PARSE(cli, argc, argv);

  try {
    if (sel->parsed()) return cmd_select(args);
    if (pen->parsed()) return cmd_penalty(args);
    if (bnd->parsed()) return cmd_bound(args, bnd, bound_flags, invert_flag);
    if (ent->parsed()) return cmd_entropy(args);
    if (cov->parsed()) return cmd_covering(args);
    if (simc->parsed()) return cmd_simulate_consistency(args);
    if (simv->parsed()) return cmd_simulate_coverage(args);
  } catch (const srmlab::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const srmlab::numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
