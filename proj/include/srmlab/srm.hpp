#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "srmlab/core.hpp"
#include "srmlab/local_entropy.hpp"

namespace srmlab {

// ---------------------------------------------------------------------------
// Simplex-constrained least squares.
//
// Frank-Wolfe over Theta_j with the pairwise step: the linear oracle picks
// the best among the j unit vertices and the zero vector, the away step
// drains the worst active vertex, and the exact line search solves the
// quadratic along the pair direction. Projection-free, exactly feasible on
// every face, and the duality gap certifies the returned risk.
// ---------------------------------------------------------------------------
struct FitOptions {
  double tol = 1e-8;          // duality-gap target
  long long max_iters = 100000;
};

struct FitResult {
  Predictor predictor;
  double risk = 0.0;
  double gap = 0.0;
  long long iterations = 0;
};

inline FitResult fit_least_squares(const LinearClass& cls, const LabeledSample& s,
                                   FitOptions opts = {}) {
  const int j = cls.j();
  const QuadMoments m = quad_moments(cls, s);
  std::vector<double> theta(j, 0.0);
  double zero_weight = 1.0;  // mass on the zero vertex

  std::vector<double> grad(j);
  auto compute_grad = [&]() {
    for (int i = 0; i < j; ++i) {
      double gi = -2.0 * m.b[i];
      for (int l = 0; l < j; ++l) gi += 2.0 * m.G(i, l) * theta[l];
      grad[i] = gi;
    }
  };

  double gap = 0.0;
  long long it = 0;
  for (; it < opts.max_iters; ++it) {
    compute_grad();

    // Frank-Wolfe vertex: index -1 denotes the zero vertex.
    int fw = -1;
    double fw_val = 0.0;
    for (int i = 0; i < j; ++i)
      if (grad[i] < fw_val) {
        fw_val = grad[i];
        fw = i;
      }

    double theta_dot_grad = 0.0;
    for (int i = 0; i < j; ++i) theta_dot_grad += theta[i] * grad[i];
    gap = theta_dot_grad - fw_val;
    if (gap <= opts.tol) break;

    // Away vertex: worst direction currently carrying weight.
    int away = -1;
    double away_val = zero_weight > 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    for (int i = 0; i < j; ++i)
      if (theta[i] > 0.0 && grad[i] > away_val) {
        away_val = grad[i];
        away = i;
      }

    // Direction d = v_fw - v_away; curvature d' (2G) d and slope grad . d.
    const double slope = fw_val - away_val;
    if (!(slope < 0.0)) break;  // no descent pair left; gap already certified above
    double curv;
    if (fw >= 0 && away >= 0)
      curv = 2.0 * (m.G(fw, fw) - 2.0 * m.G(fw, away) + m.G(away, away));
    else if (fw >= 0)
      curv = 2.0 * m.G(fw, fw);
    else
      curv = 2.0 * m.G(away, away);
    const double max_step = away >= 0 ? theta[away] : zero_weight;
    double step = curv > 0.0 ? std::min(max_step, -slope / curv) : max_step;
    if (!(step > 0.0)) break;

    if (fw >= 0)
      theta[fw] += step;
    else
      zero_weight += step;
    if (away >= 0) {
      theta[away] -= step;
      if (theta[away] < 1e-15) theta[away] = 0.0;
    } else {
      zero_weight -= step;
      if (zero_weight < 1e-15) zero_weight = 0.0;
    }
  }

  if (gap > opts.tol) {
    compute_grad();
    throw numeric_error("fit_least_squares: no convergence after " +
                        std::to_string(opts.max_iters) + " iterations, gap " +
                        std::to_string(gap));
  }
  Predictor p(cls, theta);
  double risk = m.risk(theta);
  // mean of squares; exact fits can land a rounding hair below zero
  if (risk < 0.0) {
    if (risk < -1e-10) throw numeric_error("fit_least_squares: negative risk " +
                                           std::to_string(risk));
    risk = 0.0;
  }
  return FitResult{std::move(p), risk, gap, it};
}

// ---------------------------------------------------------------------------
// Complexity penalties r(n, j). Four regimes:
//
//   vc_subgraph     sqrt(128 W_j log(A e n) / n), W_j = 2 V_j by default
//                   (the squared-error class of a dimension-V class has
//                   dimension at most 2V - 1) and A = 128 e, reproducing
//                   sqrt(256 V_j log(128 e^2 n) / n).
//   parametric      sqrt(128 j log(2 sqrt(j) M_j n) / n), M_j >= 1, default
//                   M_j = 8 sqrt(2 j).
//   parametric_example
//                   sqrt(128 j log(16 sqrt(2) j n) / n), the simplex family
//                   instantiation of the parametric regime.
//   local_entropy_experimental
//                   3 A log(n) sqrt(j / n) with A the entropy-integral
//                   constant. No consistency guarantee backs this schedule;
//                   reports always carry the unproven marker.
//
// `scale` multiplies every penalty and exists for tests probing how the
// selection moves with the penalty weight.
// ---------------------------------------------------------------------------
struct PenaltySpec {
  enum class Regime { vc_subgraph, parametric, parametric_example, local_entropy_experimental };

  Regime regime = Regime::parametric_example;
  std::vector<int> vc_dims;        // V_j for vc_subgraph, indexed by j-1
  std::vector<double> m_constants; // M_j for parametric; empty = default rule
  double covering_A = 128.0 * kEuler;  // A in log(A e n) for vc_subgraph
  double scale = 1.0;              // test hook

  static PenaltySpec vc_subgraph(std::vector<int> vc_dims, double covering_A = 128.0 * kEuler) {
    PenaltySpec s;
    s.regime = Regime::vc_subgraph;
    s.vc_dims = std::move(vc_dims);
    s.covering_A = covering_A;
    s.validate();
    return s;
  }
  static PenaltySpec parametric(std::vector<double> m_constants = {}) {
    PenaltySpec s;
    s.regime = Regime::parametric;
    s.m_constants = std::move(m_constants);
    s.validate();
    return s;
  }
  static PenaltySpec parametric_example() {
    PenaltySpec s;
    s.regime = Regime::parametric_example;
    return s;
  }
  static PenaltySpec local_entropy_experimental() {
    PenaltySpec s;
    s.regime = Regime::local_entropy_experimental;
    return s;
  }

  void validate() const {
    if (regime == Regime::vc_subgraph) {
      if (vc_dims.empty()) throw std::invalid_argument("PenaltySpec: vc_subgraph needs V_j");
      for (std::size_t i = 0; i < vc_dims.size(); ++i) {
        if (vc_dims[i] < 1) throw std::invalid_argument("PenaltySpec: V_j must be >= 1");
        if (i > 0 && vc_dims[i] < vc_dims[i - 1])
          throw std::invalid_argument("PenaltySpec: V_j must be nondecreasing");
      }
      if (!(covering_A > 0.0)) throw std::invalid_argument("PenaltySpec: A must be > 0");
    }
    for (std::size_t i = 0; i < m_constants.size(); ++i) {
      if (!(m_constants[i] >= 1.0))
        throw std::invalid_argument("PenaltySpec: M_j must be >= 1");
      if (i > 0 && m_constants[i] < m_constants[i - 1])
        throw std::invalid_argument("PenaltySpec: M_j must be nondecreasing");
    }
  }

  bool unproven() const { return regime == Regime::local_entropy_experimental; }

  std::string regime_name() const {
    switch (regime) {
      case Regime::vc_subgraph: return "vc_subgraph";
      case Regime::parametric: return "parametric";
      case Regime::parametric_example: return "parametric_example";
      case Regime::local_entropy_experimental: return "local_entropy_experimental";
    }
    return "?";
  }

  int vc_dim(int j) const {
    if (j < 1 || j > static_cast<int>(vc_dims.size()))
      throw std::invalid_argument("PenaltySpec: no V_j for j=" + std::to_string(j));
    return vc_dims[j - 1];
  }

  double m_constant(int j) const {
    if (!m_constants.empty()) {
      if (j < 1 || j > static_cast<int>(m_constants.size()))
        throw std::invalid_argument("PenaltySpec: no M_j for j=" + std::to_string(j));
      return m_constants[j - 1];
    }
    return 8.0 * std::sqrt(2.0 * j);
  }

  /// W_j feeding the tail series exp(-W_j/2): 2 V_j for the subgraph regime,
  /// 2 j for the parametric ones (whose proofs give per-class tails exp(-j)).
  double w_term(int j) const {
    if (regime == Regime::vc_subgraph) return 2.0 * vc_dim(j);
    return 2.0 * j;
  }
};

inline double penalty(const PenaltySpec& spec, long long n, int j) {
  if (n < 2) throw std::invalid_argument("penalty: n must be >= 2");
  if (j < 1) throw std::invalid_argument("penalty: j must be >= 1");
  const double nn = static_cast<double>(n);
  double r;
  switch (spec.regime) {
    case PenaltySpec::Regime::vc_subgraph: {
      const double W = 2.0 * spec.vc_dim(j);
      const double arg = spec.covering_A * kEuler * nn;
      if (!(arg > 1.0)) throw std::domain_error("penalty: log argument below domain at n=" +
                                                std::to_string(n));
      r = std::sqrt(128.0 * W * std::log(arg) / nn);
      break;
    }
    case PenaltySpec::Regime::parametric: {
      const double arg = 2.0 * std::sqrt(static_cast<double>(j)) * spec.m_constant(j) * nn;
      if (!(arg > 1.0)) throw std::domain_error("penalty: log argument below domain at n=" +
                                                std::to_string(n));
      r = std::sqrt(128.0 * j * std::log(arg) / nn);
      break;
    }
    case PenaltySpec::Regime::parametric_example: {
      const double arg = 16.0 * std::sqrt(2.0) * j * nn;
      if (!(arg > 1.0)) throw std::domain_error("penalty: log argument below domain at n=" +
                                                std::to_string(n));
      r = std::sqrt(128.0 * j * std::log(arg) / nn);
      break;
    }
    case PenaltySpec::Regime::local_entropy_experimental:
      r = 3.0 * compute_A() * std::log(nn) * std::sqrt(static_cast<double>(j) / nn);
      break;
    default:
      throw std::invalid_argument("penalty: unknown regime");
  }
  return spec.scale * r;
}

/// Structural risk of one class: fitted empirical risk plus its penalty.
inline double structural_risk(double fit_risk, double pen) {
  if (!(fit_risk >= 0.0) || !(pen >= 0.0))
    throw std::invalid_argument("structural_risk: inputs must be nonnegative");
  return fit_risk + pen;
}

// ---------------------------------------------------------------------------
// Model selection: fit every class, add penalties, pick the smallest index
// attaining the minimum structural risk.
// ---------------------------------------------------------------------------
struct SelectionReport {
  int chosen_index = 0;  // position in the class list
  int chosen_j = 0;
  std::vector<double> theta_hat;
  std::vector<int> js;
  std::vector<double> empirical_risks;
  std::vector<double> penalties;
  std::vector<double> structural_risks;
  bool tie_broken = false;
  std::string regime;
  bool unproven = false;
};

/// Smallest index of the minimum; flags whether another index ties exactly.
inline std::pair<int, bool> argmin_with_ties(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("argmin_with_ties: empty");
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i)
    if (values[i] < values[best]) best = i;
  bool tie = false;
  for (int i = 0; i < static_cast<int>(values.size()); ++i)
    if (i != best && values[i] == values[best]) tie = true;
  return {best, tie};
}

inline SelectionReport select_model(const LabeledSample& s, const std::vector<LinearClass>& classes,
                                    const PenaltySpec& spec, FitOptions fit_opts = {}) {
  if (classes.empty()) throw std::invalid_argument("select_model: no classes");
  for (std::size_t i = 1; i < classes.size(); ++i)
    if (classes[i].j() < classes[i - 1].j())
      throw std::invalid_argument("select_model: classes must be ordered by j");

  SelectionReport rep;
  rep.regime = spec.regime_name();
  rep.unproven = spec.unproven();
  std::vector<std::vector<double>> thetas;
  for (const LinearClass& cls : classes) {
    FitResult fit = [&] {
      try {
        return fit_least_squares(cls, s, fit_opts);
      } catch (const numeric_error& e) {
        throw numeric_error("select_model: fit failed at j=" + std::to_string(cls.j()) + ": " +
                            e.what());
      }
    }();
    const double pen = penalty(spec, s.n(), cls.j());
    rep.js.push_back(cls.j());
    rep.empirical_risks.push_back(fit.risk);
    rep.penalties.push_back(pen);
    rep.structural_risks.push_back(structural_risk(fit.risk, pen));
    thetas.push_back(fit.predictor.theta());
  }
  auto [best, tie] = argmin_with_ties(rep.structural_risks);
  rep.chosen_index = best;
  rep.chosen_j = rep.js[best];
  rep.theta_hat = thetas[best];
  rep.tie_broken = tie;
  return rep;
}

// ---------------------------------------------------------------------------
// Tail-series diagnostic: partial sums of exp(-W_j / 2) plus a geometric
// ratio heuristic on the last terms. Consecutive ratios approaching 1 signal
// a series that will not settle.
// ---------------------------------------------------------------------------
struct DeltaDiagnostic {
  std::vector<double> partial_sums;
  bool geometric_tail = false;
};

inline DeltaDiagnostic delta_diagnostic(const std::function<double(int)>& w_of_j, int j_max,
                                        double ratio_threshold = 0.95) {
  if (j_max < 1) throw std::invalid_argument("delta_diagnostic: j_max must be >= 1");
  std::vector<double> terms(j_max);
  DeltaDiagnostic out;
  out.partial_sums.resize(j_max);
  double acc = 0.0;
  for (int j = 1; j <= j_max; ++j) {
    terms[j - 1] = std::exp(-w_of_j(j) / 2.0);
    acc += terms[j - 1];
    out.partial_sums[j - 1] = acc;
  }
  if (j_max == 1) {
    out.geometric_tail = true;
    return out;
  }
  const int window = std::min(10, j_max - 1);
  out.geometric_tail = true;
  for (int j = j_max - window; j < j_max; ++j) {
    const double ratio = terms[j] / terms[j - 1];
    if (!(ratio <= ratio_threshold)) out.geometric_tail = false;
  }
  return out;
}

inline DeltaDiagnostic delta_diagnostic(const PenaltySpec& spec, int j_max) {
  return delta_diagnostic([&spec](int j) { return spec.w_term(j); }, j_max);
}

}  // namespace srmlab
