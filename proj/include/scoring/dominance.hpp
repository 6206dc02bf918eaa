#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "scoring/core.hpp"
#include "scoring/geometry.hpp"
#include "scoring/propriety.hpp"
#include "scoring/rules.hpp"
#include "scoring/simplex_qp.hpp"

namespace scoring {

struct DominanceConfig {
  double margin = 1e-6;
  std::size_t start_k = 100;
  std::size_t max_k = 3200;
  /// Largest grid (in points) the pipeline will build.
  std::size_t point_budget = 2'000'000;
  /// Grid used to check <q, z0> < E_q s(q) before searching.
  std::size_t probe_k = 50;
  std::size_t iterations = 2000;
  double tol = 1e-9;
};

struct DominatorTrace {
  std::vector<double> z2;
  std::vector<double> z1;
  std::vector<double> z3;
  std::vector<double> chosen;
  std::size_t resolution = 0;
  std::size_t candidates_scanned = 0;
  /// Every sampled score satisfies <u, w> <= <u, s(u)> for the uniform u.
  bool bounded = true;
  std::vector<std::size_t> attempted_resolutions;
};

struct DominatorResult {
  std::string rule;
  std::vector<double> credence;
  ScoreVector z0;
  Probability p = Probability::uniform(1);
  ScoreVector score;
  /// s(p)(w) - z0(w); +inf where z0(w) is -inf.
  std::vector<double> margins;
  std::string method;
  std::optional<DominatorTrace> trace;
};

/// s(p) strictly exceeds z0 at every outcome by at least `margin`; -inf in z0
/// is exceeded by any finite entry.
inline std::vector<double> domination_margins(const ScoreVector& s, const ScoreVector& z0) {
  require_same_size(s.size(), z0.size(), "domination_margins");
  std::vector<double> m(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (z0[i].is_neg_inf()) {
      m[i] = s[i].is_neg_inf() ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    } else if (s[i].is_neg_inf()) {
      m[i] = -std::numeric_limits<double>::infinity();
    } else {
      m[i] = s[i].value() - z0[i].value();
    }
  }
  return m;
}

inline bool strictly_dominates(const ScoreVector& s, const ScoreVector& z0, double margin = 0.0) {
  for (double m : domination_margins(s, z0)) {
    if (!(m > 0.0 && m >= margin)) return false;
  }
  return true;
}

namespace detail {

inline DominatorResult finish_result(const ScoringRule& rule, const Credence& c, ScoreVector z0, Probability p,
                                     std::string method) {
  DominatorResult r;
  r.rule = rule.name();
  r.credence.assign(c.values().begin(), c.values().end());
  r.score = evaluate(rule, p);
  r.margins = domination_margins(r.score, z0);
  r.z0 = std::move(z0);
  r.p = std::move(p);
  r.method = std::move(method);
  return r;
}

/// Largest resolution <= k whose grid fits the budget (0 if none).
inline std::size_t fit_resolution(std::size_t n, std::size_t k, std::size_t budget) {
  while (k > 0 && simplex_grid_size(n, k, false) > budget) k = k * 3 / 4;
  return k;
}

}  // namespace detail

/// Repairs an incoherent credence: finds a probability whose score strictly
/// dominates the credence's score. Hull dominator z2, intermediate z1, orthant
/// maximiser z3, then the sampled scores nearest z3 are scanned for one that
/// dominates z0. The grid doubles until max_k on failure.
inline DominatorResult find_dominating_probability(const ScoringRule& rule, const Credence& c,
                                                   const DominanceConfig& config = {}) {
  if (is_coherent(c)) fail(ErrorKind::Coherent, "credence is already a probability");
  const std::size_t n = rule.outcomes();
  const ScoreVector z0 = evaluate(rule, c);

  for (const auto& q : sample_simplex(n, config.probe_k, false)) {
    const ExtendedReal self = expected_score(q, evaluate(rule, q));
    const ExtendedReal other = extended_dot(q.weights(), z0);
    if (self.is_neg_inf() && other.is_neg_inf()) continue;
    if (!(other < self)) {
      fail(ErrorKind::PremiseViolated, "the credence's score is not beaten in expectation at some grid probability");
    }
  }

  DominatorTrace trace;
  const double uniform_self = expected_score(Probability::uniform(n), evaluate(rule, Probability::uniform(n))).raw();
  std::size_t k = detail::fit_resolution(n, config.start_k, config.point_budget);
  for (; k > 0 && k <= config.max_k && simplex_grid_size(n, k, false) <= config.point_budget; k *= 2) {
    trace.attempted_resolutions.push_back(k);
    const FiniteScoreSample sample = build_sample(rule, k);
    if (sample.empty()) continue;
    for (std::size_t i = 0; i < sample.size() && trace.bounded; ++i) {
      double u = 0.0;
      for (double x : sample.point(i)) u += x / static_cast<double>(n);
      trace.bounded = u <= uniform_self + 1e-9;
    }

    HullDominator z2;
    try {
      z2 = find_hull_dominator(sample, z0, config.margin, config.tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Infeasible) throw;
      continue;
    }
    std::vector<double> z1(n);
    for (std::size_t j = 0; j < n; ++j) {
      z1[j] = z0[j].is_finite() ? 0.5 * (z0[j].value() + z2.point[j]) : z2.point[j] - 1.0;
    }
    OrthantResult z3;
    try {
      z3 = orthant_argmax(sample, z1, {config.iterations, config.tol});
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InfeasibleOrthant) throw;
      continue;
    }

    std::vector<std::pair<double, std::size_t>> order(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) order[i] = {linf_distance(sample.point(i), z3.point), i};
    std::sort(order.begin(), order.end());
    std::size_t scanned = 0;
    for (const auto& [d, i] : order) {
      ++scanned;
      const ScoreVector s = ScoreVector::from_doubles(sample.point(i));
      if (!strictly_dominates(s, z0, config.margin)) continue;
      trace.z2 = z2.point;
      trace.z1 = z3.anchor;
      trace.z3 = z3.point;
      trace.chosen.assign(sample.point(i).begin(), sample.point(i).end());
      trace.resolution = k;
      trace.candidates_scanned = scanned;
      DominatorResult r = detail::finish_result(rule, c, z0, sample.source(i), "pipeline");
      r.trace = std::move(trace);
      return r;
    }
  }
  fail(ErrorKind::NoDominator, "no sampled probability strictly dominates the credence up to k=" +
                                   std::to_string(config.max_k));
}

/// Euclidean projection of the credence's event table onto the coherent
/// polytope, whose vertices are the n truth-value tables. ||V lambda - c||^2 =
/// lambda'G lambda - 2 b'lambda + const with G(w,v) = #events containing w and
/// v and b(w) = sum of c(A) over A containing w.
inline DominatorResult brier_projection(const Credence& c) {
  if (is_coherent(c)) fail(ErrorKind::Coherent, "credence is already a probability");
  const std::size_t n = c.outcomes();
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g[i][j] = std::ldexp(1.0, static_cast<int>(n) - (i == j ? 1 : 2));
  }
  std::vector<double> b(n, 0.0);
  const auto values = c.values();
  for (std::size_t mask = 1; mask < values.size(); ++mask) {
    for (std::size_t w = 0; w < n; ++w) {
      if ((mask >> w) & 1u) b[w] += values[mask];
    }
  }
  const qp::SimplexQpResult qp = qp::minimize_on_simplex(g, b);
  const ScoringRule rule = brier_rule(n);
  const ScoreVector z0 = evaluate(rule, c);
  DominatorResult r = detail::finish_result(rule, c, z0, Probability::normalized(qp.weights), "projection");
  if (!strictly_dominates(r.score, r.z0)) {
    fail(ErrorKind::NoDominator, "projection does not strictly dominate (numerical degeneracy)");
  }
  return r;
}

enum class WitnessCase { SelfScoreLimit, Density };

inline std::string_view to_string(WitnessCase w) { return w == WitnessCase::SelfScoreLimit ? "bi" : "bii"; }

struct WitnessParams {
  WitnessCase kind = WitnessCase::Density;
  std::size_t verify_k = 2000;
  double verify_tol = 1e-6;
  // self-score limit case
  std::vector<double> target;
  double limit_tol = 1e-3;
  /// alpha = 1 + fraction * (L / E_p s(p) - 1)
  double alpha_fraction = 0.5;
  // density case
  std::size_t gap_k = 500;
  GapOptions gap;
  double gap_tol = 0.1;
  double delta_factor = 0.4;
  /// Exact z0, normal and eps when the geometry is known in closed form.
  std::optional<std::vector<double>> z0;
  std::optional<std::vector<double>> normal;
  std::optional<double> epsilon;
};

/// p = (1,0) with the limit taken along (1-1/j, 1/j).
inline WitnessParams boundary_bonus_witness_params() {
  WitnessParams p;
  p.kind = WitnessCase::SelfScoreLimit;
  p.target = {1.0, 0.0};
  return p;
}

/// z0 = midpoint of B = s(pi/4) and C = (cos pi/4, 1 + sin pi/4); the L-inf
/// ball of radius |B - C|_inf / 2 around it misses both arcs.
inline WitnessParams two_circle_witness_params() {
  WitnessParams p;
  p.kind = WitnessCase::Density;
  const double h = std::sqrt(0.5);
  const std::vector<double> b = {1.0 + h, h};
  const std::vector<double> c = {h, 1.0 + h};
  p.z0 = std::vector<double>{0.5 * (b[0] + c[0]), 0.5 * (b[1] + c[1])};
  p.normal = std::vector<double>{0.5, 0.5};
  p.epsilon = 0.5 * linf_distance(b, c);
  return p;
}

struct WitnessBundle {
  WitnessCase kind = WitnessCase::Density;
  std::string rule;
  ScoreVector fill;
  // self-score limit case
  std::vector<double> target;
  std::optional<LimitReport> limit;
  double alpha = 0.0;
  double alpha_upper = 0.0;
  /// E_{p_j} s(p_j) at j = 10^4 along the limit path.
  double path_value = 0.0;
  // density case
  std::optional<GapReport> gap;
  std::vector<double> z0;
  std::vector<double> normal;
  double epsilon = 0.0;
  double delta = 0.0;
  bool in_ball = false;
  // verification
  std::size_t verify_k = 0;
  double verify_tol = 0.0;
  /// min over grid q of <q, s(q)> - <q, fill>.
  double quasi_strict_margin = 0.0;
  bool propriety_passed = false;
  std::size_t dominating_count = 0;
  bool verified = false;
};

namespace detail {

inline void verify_witness(const ScoringRule& rule, WitnessBundle& w) {
  const ScoringRule ext = extend_with_vector(rule, w.fill);
  ProprietyOptions opt;
  opt.mode = ProprietyMode::QuasiStrict;
  opt.resolution = w.verify_k;
  opt.tol = w.verify_tol;
  opt.max_incoherent = 16;
  w.propriety_passed = check_propriety(ext, opt).passed;

  w.quasi_strict_margin = std::numeric_limits<double>::infinity();
  w.dominating_count = 0;
  for_each_simplex_point(rule.outcomes(), w.verify_k, false, [&](std::span<const double> q) {
    const Probability p({q.begin(), q.end()});
    const ScoreVector s = evaluate(rule, p);
    w.quasi_strict_margin = std::min(w.quasi_strict_margin, gap_of(expected_score(p, s), extended_dot(q, w.fill)));
    if (strictly_dominates(s, w.fill)) ++w.dominating_count;
  });
  w.verified = w.propriety_passed && w.quasi_strict_margin > w.verify_tol && w.dominating_count == 0;
  if (w.kind == WitnessCase::Density) w.verified = w.verified && w.in_ball;
}

}  // namespace detail

/// Builds the extension fill that no probability dominates, for a rule that
/// fails the self-score limit condition or the density condition, and checks
/// it on a fine grid. NoWitness when the condition holds for the rule.
inline WitnessBundle build_witness(const ScoringRule& rule, const WitnessParams& params) {
  WitnessBundle w;
  w.kind = params.kind;
  w.rule = rule.name();
  w.verify_k = params.verify_k;
  w.verify_tol = params.verify_tol;
  const std::size_t n = rule.outcomes();

  if (params.kind == WitnessCase::SelfScoreLimit) {
    if (params.target.empty()) fail(ErrorKind::BadInput, "self-score limit witness needs a target probability");
    const Probability target(params.target);
    const ProbabilityPath path = path_toward(target);
    LimitReport limit = check_self_score_continuity(rule, target, path, params.limit_tol);
    if (limit.holds) fail(ErrorKind::NoWitness, "self-score limit equals the self-score at the target");
    const double self = limit.self_score.value();
    if (!(self < 0.0 && limit.limit < self)) {
      fail(ErrorKind::NoWitness, "limit must lie below a negative self-score to scale the score");
    }
    w.alpha_upper = limit.limit / self;
    w.alpha = 1.0 + params.alpha_fraction * (w.alpha_upper - 1.0);
    const ScoreVector s = evaluate(rule, target);
    std::vector<ExtendedReal> x;
    for (auto e : s.entries()) x.push_back(e.is_neg_inf() ? kNegInf : ExtendedReal(w.alpha * e.value()));
    w.fill = ScoreVector(std::move(x));
    w.target = params.target;
    const Probability pj = path.at(10000);
    w.path_value = expected_score(pj, evaluate(rule, pj)).value();
    w.limit = std::move(limit);
  } else {
    const FiniteScoreSample sample = build_sample(rule, params.gap_k);
    GapReport gap = density_gap(sample, params.gap);
    if (gap.max_gap <= params.gap_tol) {
      fail(ErrorKind::NoWitness, "density gap " + std::to_string(gap.max_gap) + " is within tolerance");
    }
    w.z0 = params.z0 ? *params.z0 : gap.witness;
    w.normal = params.normal ? *params.normal : gap.witness_certificate.normal;
    require_same_size(n, w.z0.size(), "witness z0");
    // a slightly smaller ball than the sampled distance keeps clear of unsampled scores
    w.epsilon = params.epsilon ? *params.epsilon : 0.9 * gap.max_gap;
    const Probability normal = Probability::normalized(w.normal);
    w.normal.assign(normal.weights().begin(), normal.weights().end());
    w.delta = safe_delta(normal, w.epsilon, params.delta_factor);
    std::vector<double> z1(n);
    for (std::size_t j = 0; j < n; ++j) z1[j] = w.z0[j] - 0.5 * w.delta;
    w.in_ball = linf_distance(z1, w.z0) < w.delta + 1e-9;
    for (std::size_t j = 0; j < n; ++j) w.in_ball = w.in_ball && z1[j] < w.z0[j];
    w.fill = ScoreVector::from_doubles(z1);
    w.gap = std::move(gap);
  }
  detail::verify_witness(rule, w);
  return w;
}

struct ConditionBConfig {
  /// Non-regular points of this grid are the limit targets.
  std::size_t limit_k = 2;
  double limit_tol = 1e-3;
  std::size_t gap_k = 200;
  GapOptions gap;
  double gap_tol = 0.1;
};

struct PathCheck {
  std::vector<double> target;
  std::optional<LimitReport> report;
  /// Set when the limit could not be estimated.
  std::string error;
  bool holds = false;
};

struct ConditionBReport {
  std::string rule;
  std::vector<PathCheck> paths;
  bool limit_holds = true;
  GapReport gap;
  double gap_tol = 0.0;
  bool density_holds = true;
  /// Some grid probability has E_p s(p) = -inf.
  bool infinite_self_score = false;
  std::vector<std::vector<double>> infinite_self_score_at;
  bool holds = true;
};

inline ConditionBReport check_condition_b(const ScoringRule& rule, const ConditionBConfig& config = {}) {
  ConditionBReport report;
  report.rule = rule.name();
  const std::size_t n = rule.outcomes();

  for_each_simplex_point(n, config.limit_k, false, [&](std::span<const double> w) {
    if (std::all_of(w.begin(), w.end(), [](double x) { return x > 0.0; })) return;
    PathCheck check;
    check.target.assign(w.begin(), w.end());
    const Probability target(check.target);
    try {
      check.report = check_self_score_continuity(rule, target, path_toward(target), config.limit_tol);
      check.holds = check.report->holds;
    } catch (const Error& e) {
      check.error = std::string(to_string(e.kind())) + ": " + e.what();
    }
    report.limit_holds = report.limit_holds && check.holds;
    report.paths.push_back(std::move(check));
  });

  const FiniteScoreSample sample = build_sample(rule, config.gap_k);
  for_each_simplex_point(n, config.gap_k, false, [&](std::span<const double> w) {
    const Probability p({w.begin(), w.end()});
    if (expected_score(p, evaluate(rule, p)).is_neg_inf()) report.infinite_self_score_at.emplace_back(w.begin(), w.end());
  });
  report.infinite_self_score = !report.infinite_self_score_at.empty();
  report.gap = density_gap(sample, config.gap);
  report.gap_tol = config.gap_tol;
  report.density_holds = report.gap.max_gap <= config.gap_tol;
  report.holds = report.infinite_self_score || (report.limit_holds && report.density_holds);
  return report;
}

}  // namespace scoring
