#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "srmlab/covering.hpp"
#include "srmlab/harness.hpp"
#include "srmlab/local_entropy.hpp"

namespace srmlab {

using json = nlohmann::json;

class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace cfg_detail {

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw config_error(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw config_error(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_required(const json& obj, const std::string& where, const std::string& key) {
  if (!obj.contains(key)) throw config_error(where + ": missing key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(where + ": bad value for '" + key + "'");
  }
}

template <typename T>
T get_or(const json& obj, const std::string& where, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw config_error(where + ": bad value for '" + key + "'");
  }
}

}  // namespace cfg_detail

// ---------------------------------------------------------------------------
// Config document. One JSON object; sections are optional and validated
// strictly (unknown keys are rejected at every level). Each subcommand
// checks that the sections it needs are present.
// ---------------------------------------------------------------------------
struct ClassesConfig {
  std::string basis = "monomial";
  int k = 1;
  int j_max = 1;
  std::vector<double> thresholds;  // indicator only

  BasisFamily make_basis(int dimension_cap = 0) const {
    const int cap = dimension_cap > 0 ? dimension_cap : j_max;
    return BasisFamily::from_name(basis, k, cap, thresholds);
  }
  std::vector<LinearClass> make_classes() const { return nested_classes(make_basis(), j_max); }
};

struct ExperimentConfig {
  std::vector<long long> n_grid = default_n_grid();
  int trials = 20;
  std::vector<double> eta_grid = {0.01, 0.05, 0.1};
  long long n = 5000;  // coverage sample size
  int mc_precision = 100000;
  double theta_grid_step = 0.02;
  std::string sample_csv;
  std::optional<double> bound_A;
  std::optional<double> bound_W;
};

struct CoveringConfig {
  std::string matrix_csv;
  double epsilon = 0.0;
  std::string mode = "auto";  // auto | exact | greedy
  int exact_threshold = 20;
};

struct EntropyConfig {
  std::string sample_csv;
  int j = 1;
  std::optional<double> delta;  // default: delta_n(sample size)
  std::vector<double> u;        // default: {delta/2}
  double rogers_constant = 10.0;
  bool trust_rogers = false;
  bool population = false;      // estimate the moment matrix from the design
  int population_precision = 200000;
};

struct BoundConfig {
  std::string formula = "regression_parametric";
  long long n = 1000;
  double epsilon = 0.1;
  double eta = 0.05;
  int V = 1;
  int d = 1;
  double diam = 1.0;
  double m_norm = 1.0;
  double K = 1.0;
  double A = 1.0;
  double W = 1.0;
  double constant = 32.0;
  int r = 1;
  bool invert = false;
};

struct AppConfig {
  std::optional<json> generator_json;  // resolved lazily (needs classes for in-class targets)
  std::optional<ClassesConfig> classes;
  std::optional<PenaltySpec> penalty;
  ExperimentConfig experiment;
  std::optional<CoveringConfig> covering;
  std::optional<EntropyConfig> entropy;
  std::optional<BoundConfig> bound;
};

namespace cfg_detail {

inline ClassesConfig parse_classes(const json& j) {
  require_keys(j, "classes", {"basis", "k", "j_max", "thresholds"});
  ClassesConfig c;
  c.basis = get_or<std::string>(j, "classes", "basis", "monomial");
  c.k = get_or<int>(j, "classes", "k", 1);
  c.j_max = get_required<int>(j, "classes", "j_max");
  c.thresholds = get_or<std::vector<double>>(j, "classes", "thresholds", {});
  if (c.k < 1 || c.j_max < 1) throw config_error("classes: k and j_max must be >= 1");
  return c;
}

inline PenaltySpec parse_penalty(const json& j) {
  require_keys(j, "penalty", {"regime", "V", "M", "A", "scale"});
  const std::string regime = get_required<std::string>(j, "penalty", "regime");
  PenaltySpec spec;
  try {
    if (regime == "vc_subgraph")
      spec = PenaltySpec::vc_subgraph(get_required<std::vector<int>>(j, "penalty", "V"),
                                      get_or<double>(j, "penalty", "A", 128.0 * kEuler));
    else if (regime == "parametric")
      spec = PenaltySpec::parametric(get_or<std::vector<double>>(j, "penalty", "M", {}));
    else if (regime == "parametric_example")
      spec = PenaltySpec::parametric_example();
    else if (regime == "local_entropy_experimental")
      spec = PenaltySpec::local_entropy_experimental();
    else
      throw config_error("penalty: unknown regime '" + regime + "'");
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("penalty: ") + e.what());
  }
  spec.scale = get_or<double>(j, "penalty", "scale", 1.0);
  if (!(spec.scale >= 0.0)) throw config_error("penalty: scale must be >= 0");
  return spec;
}

inline ExperimentConfig parse_experiment(const json& j) {
  require_keys(j, "experiment",
               {"n_grid", "trials", "eta_grid", "n", "mc_precision", "theta_grid_step",
                "sample_csv", "bound_A", "bound_W"});
  ExperimentConfig e;
  e.n_grid = get_or<std::vector<long long>>(j, "experiment", "n_grid", default_n_grid());
  e.trials = get_or<int>(j, "experiment", "trials", 20);
  e.eta_grid = get_or<std::vector<double>>(j, "experiment", "eta_grid", {0.01, 0.05, 0.1});
  e.n = get_or<long long>(j, "experiment", "n", 5000);
  e.mc_precision = get_or<int>(j, "experiment", "mc_precision", 100000);
  e.theta_grid_step = get_or<double>(j, "experiment", "theta_grid_step", 0.02);
  e.sample_csv = get_or<std::string>(j, "experiment", "sample_csv", "");
  if (j.contains("bound_A")) e.bound_A = get_required<double>(j, "experiment", "bound_A");
  if (j.contains("bound_W")) e.bound_W = get_required<double>(j, "experiment", "bound_W");
  return e;
}

inline CoveringConfig parse_covering(const json& j) {
  require_keys(j, "covering", {"matrix_csv", "epsilon", "mode", "exact_threshold"});
  CoveringConfig c;
  c.matrix_csv = get_required<std::string>(j, "covering", "matrix_csv");
  c.epsilon = get_required<double>(j, "covering", "epsilon");
  c.mode = get_or<std::string>(j, "covering", "mode", "auto");
  c.exact_threshold = get_or<int>(j, "covering", "exact_threshold", 20);
  if (c.mode != "auto" && c.mode != "exact" && c.mode != "greedy")
    throw config_error("covering: mode must be auto|exact|greedy");
  return c;
}

inline EntropyConfig parse_entropy(const json& j) {
  require_keys(j, "entropy",
               {"sample_csv", "j", "delta", "u", "rogers_constant", "trust_rogers", "population",
                "population_precision"});
  EntropyConfig e;
  e.sample_csv = get_or<std::string>(j, "entropy", "sample_csv", "");
  e.j = get_required<int>(j, "entropy", "j");
  if (j.contains("delta")) e.delta = get_required<double>(j, "entropy", "delta");
  e.u = get_or<std::vector<double>>(j, "entropy", "u", {});
  e.rogers_constant = get_or<double>(j, "entropy", "rogers_constant", 10.0);
  e.trust_rogers = get_or<bool>(j, "entropy", "trust_rogers", false);
  e.population = get_or<bool>(j, "entropy", "population", false);
  e.population_precision = get_or<int>(j, "entropy", "population_precision", 200000);
  return e;
}

inline BoundConfig parse_bound(const json& j) {
  require_keys(j, "bound",
               {"formula", "n", "epsilon", "eta", "V", "d", "diam", "m_norm", "K", "A", "W",
                "constant", "r", "invert"});
  BoundConfig b;
  b.formula = get_or<std::string>(j, "bound", "formula", "regression_parametric");
  b.n = get_or<long long>(j, "bound", "n", 1000);
  b.epsilon = get_or<double>(j, "bound", "epsilon", 0.1);
  b.eta = get_or<double>(j, "bound", "eta", 0.05);
  b.V = get_or<int>(j, "bound", "V", 1);
  b.d = get_or<int>(j, "bound", "d", 1);
  b.diam = get_or<double>(j, "bound", "diam", 1.0);
  b.m_norm = get_or<double>(j, "bound", "m_norm", 1.0);
  b.K = get_or<double>(j, "bound", "K", 1.0);
  b.A = get_or<double>(j, "bound", "A", 1.0);
  b.W = get_or<double>(j, "bound", "W", 1.0);
  b.constant = get_or<double>(j, "bound", "constant", 32.0);
  b.r = get_or<int>(j, "bound", "r", 1);
  b.invert = get_or<bool>(j, "bound", "invert", false);
  return b;
}

}  // namespace cfg_detail

inline AppConfig parse_config(const json& doc) {
  cfg_detail::require_keys(doc, "config",
                           {"generator", "classes", "penalty", "experiment", "covering",
                            "entropy", "bound"});
  AppConfig app;
  if (doc.contains("classes")) app.classes = cfg_detail::parse_classes(doc.at("classes"));
  if (doc.contains("penalty")) app.penalty = cfg_detail::parse_penalty(doc.at("penalty"));
  if (doc.contains("experiment"))
    app.experiment = cfg_detail::parse_experiment(doc.at("experiment"));
  if (doc.contains("covering")) app.covering = cfg_detail::parse_covering(doc.at("covering"));
  if (doc.contains("entropy")) app.entropy = cfg_detail::parse_entropy(doc.at("entropy"));
  if (doc.contains("bound")) app.bound = cfg_detail::parse_bound(doc.at("bound"));
  if (doc.contains("generator")) {
    cfg_detail::require_keys(doc.at("generator"),
                             "generator", {"k", "design", "target", "noise", "seed"});
    app.generator_json = doc.at("generator");
  }
  return app;
}

inline AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// Builds the generator; in-class targets need the classes section to supply
/// the basis family.
inline GeneratorConfig make_generator(const AppConfig& app) {
  if (!app.generator_json.has_value()) throw config_error("generator: section missing");
  const json& g = *app.generator_json;
  GeneratorConfig cfg;
  cfg.k = cfg_detail::get_or<int>(g, "generator", "k", 1);
  const std::string design = cfg_detail::get_or<std::string>(g, "generator", "design",
                                                             "uniform_cube");
  if (design == "uniform_cube")
    cfg.design = Design::uniform_cube;
  else if (design == "gaussian_clipped")
    cfg.design = Design::gaussian_clipped;
  else
    throw config_error("generator: unknown design '" + design + "'");
  cfg.seed = cfg_detail::get_or<std::uint64_t>(g, "generator", "seed", 1);

  const json& t = g.contains("target") ? g.at("target") : json::object();
  cfg_detail::require_keys(t, "generator.target", {"kind", "j", "theta", "name"});
  const std::string kind = cfg_detail::get_or<std::string>(t, "generator.target", "kind",
                                                           "in_class");
  if (kind == "in_class") {
    if (!app.classes.has_value())
      throw config_error("generator: in-class target needs the classes section");
    const int jstar = cfg_detail::get_required<int>(t, "generator.target", "j");
    const auto theta = cfg_detail::get_required<std::vector<double>>(t, "generator.target",
                                                                     "theta");
    if (app.classes->k != cfg.k) throw config_error("generator: k differs from classes.k");
    try {
      cfg.truth = Predictor(LinearClass(app.classes->make_basis(), jstar), theta);
    } catch (const std::invalid_argument& e) {
      throw config_error(std::string("generator.target: ") + e.what());
    }
  } else if (kind == "external") {
    cfg.external_name = cfg_detail::get_required<std::string>(t, "generator.target", "name");
    try {
      cfg.external = external_target(cfg.external_name);
    } catch (const std::invalid_argument& e) {
      throw config_error(e.what());
    }
  } else {
    throw config_error("generator.target: kind must be in_class|external");
  }

  const json& nz = g.contains("noise") ? g.at("noise") : json::object();
  cfg_detail::require_keys(nz, "generator.noise", {"kind", "width", "p"});
  const std::string nkind = cfg_detail::get_or<std::string>(nz, "generator.noise", "kind", "none");
  try {
    if (nkind == "none")
      cfg.noise = NoiseSpec::none();
    else if (nkind == "uniform")
      cfg.noise = NoiseSpec::uniform_width(
          cfg_detail::get_required<double>(nz, "generator.noise", "width"));
    else if (nkind == "bernoulli_flip")
      cfg.noise =
          NoiseSpec::bernoulli_flip(cfg_detail::get_required<double>(nz, "generator.noise", "p"));
    else
      throw config_error("generator.noise: kind must be none|uniform|bernoulli_flip");
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("generator.noise: ") + e.what());
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw config_error(std::string("generator: ") + e.what());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// JSON serialization for reports and results.
// ---------------------------------------------------------------------------
inline json to_json(const SelectionReport& rep) {
  json j;
  j["chosen_j"] = rep.chosen_j;
  j["chosen_index"] = rep.chosen_index;
  j["theta_hat"] = rep.theta_hat;
  j["js"] = rep.js;
  j["empirical_risks"] = rep.empirical_risks;
  j["penalties"] = rep.penalties;
  j["structural_risks"] = rep.structural_risks;
  j["tie_broken"] = rep.tie_broken;
  j["penalty_regime"] = rep.regime;
  if (rep.unproven) j["caveat"] = "unproven";
  return j;
}

inline json to_json(const CoverResult& res, double epsilon) {
  json j;
  j["size"] = res.size;
  j["centers"] = res.centers;
  j["exact"] = res.exact;
  j["epsilon"] = epsilon;
  return j;
}

inline json to_json(const EtaTrickResult& r) {
  json j;
  j["formula_id"] = "interval_inversion";
  j["epsilon"] = r.epsilon;
  j["loose_epsilon"] = r.loose_epsilon;
  j["eta"] = r.eta;
  j["n"] = r.n;
  j["constants"] = {{"A", r.A}, {"W", r.W}, {"B", r.B}, {"Z", r.Z}, {"R_n", r.R_n}};
  j["remark_condition"] = r.remark_condition;
  return j;
}

inline json to_json(const ExperimentResult& result) {
  json arr = json::array();
  if (result.kind == ExperimentResult::Kind::consistency) {
    for (const auto& r : result.consistency_rows)
      arr.push_back({{"n", r.n},
                     {"trial", r.trial},
                     {"chosen_j", r.chosen_j},
                     {"empirical_risk", r.empirical_risk},
                     {"true_risk", r.true_risk},
                     {"excess_risk", r.excess_risk},
                     {"penalty_regime", r.penalty_regime}});
  } else {
    for (const auto& r : result.coverage_rows)
      arr.push_back({{"n", r.n},
                     {"eta", r.eta},
                     {"trials", r.trials},
                     {"violations", r.violations},
                     {"violation_rate", r.violation_rate}});
  }
  return arr;
}

inline std::string experiment_json_string(const ExperimentResult& result) {
  return to_json(result).dump(2) + "\n";
}

}  // namespace srmlab
