#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "scoring/core.hpp"
#include "scoring/geometry.hpp"
#include "scoring/rules.hpp"

namespace scoring {

enum class ProprietyMode { Proper, Strict, QuasiStrict };

inline std::string_view to_string(ProprietyMode m) {
  switch (m) {
    case ProprietyMode::Proper: return "proper";
    case ProprietyMode::Strict: return "strict";
    case ProprietyMode::QuasiStrict: return "quasi-strict";
  }
  return "?";
}

/// Forecast on the losing side of a propriety comparison: either a grid
/// probability or an incoherent test credence (all 2^n event values).
struct ComparedForecast {
  bool coherent = true;
  std::vector<double> values;
};

struct ViolationPair {
  std::vector<double> p;
  ComparedForecast c;
  /// E_p s(p) - E_p s(c); +inf when the second term is -inf.
  double gap = 0.0;
};

struct ProprietyReport {
  std::string rule;
  ProprietyMode mode = ProprietyMode::Proper;
  std::size_t resolution = 0;
  double tol = 0.0;
  bool passed = true;
  std::optional<ViolationPair> worst;
  /// Smallest gap among pairs where the mode demands strictness (+inf if none).
  double min_margin = std::numeric_limits<double>::infinity();
  std::size_t pairs_checked = 0;
  std::size_t incoherent_credences = 0;
  /// Smallest gap against an incoherent credence. Strict mode only asks this
  /// to be >= -tol; spherical ties at 0 since it reads singleton weights only.
  double incoherent_min_gap = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
};

struct ProprietyOptions {
  ProprietyMode mode = ProprietyMode::Strict;
  std::size_t resolution = 64;
  double tol = 1e-9;
  std::uint64_t seed = 42;
  /// Upper bound on incoherent test credences (spread over the grid).
  std::size_t max_incoherent = 512;
  double perturbation = 0.3;
};

namespace detail {

inline double gap_of(ExtendedReal self, ExtendedReal other) {
  if (other.is_neg_inf()) return self.is_neg_inf() ? 0.0 : std::numeric_limits<double>::infinity();
  if (self.is_neg_inf()) return -std::numeric_limits<double>::infinity();
  return self.value() - other.value();
}

}  // namespace detail

/// Coherent grid credences perturbed on non-singleton events by seeded offsets
/// in [-perturbation, perturbation]; accidentally coherent draws are redrawn.
inline std::vector<Credence> incoherent_test_credences(std::size_t n, const std::vector<Probability>& grid,
                                                       std::size_t count, std::uint64_t seed,
                                                       double perturbation = 0.3) {
  std::vector<Credence> out;
  if (grid.empty() || count == 0) return out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-perturbation, perturbation);
  const std::size_t stride = std::max<std::size_t>(1, grid.size() / count);
  for (std::size_t g = 0; g < grid.size() && out.size() < count; g += stride) {
    const std::vector<double> base = grid[g].event_values();
    for (int attempt = 0; attempt < 64; ++attempt) {
      std::vector<double> values = base;
      for (std::size_t mask = 0; mask < values.size(); ++mask) {
        if (!EventKey(static_cast<std::uint32_t>(mask)).is_singleton()) values[mask] += offset(rng);
      }
      Credence c(n, std::move(values));
      if (!is_coherent(c)) {
        out.push_back(std::move(c));
        break;
      }
    }
  }
  return out;
}

/// Scans every pair of grid probabilities (and, for rules defined on all
/// credences, seeded incoherent credences) for violations of
/// E_p s(p) >= E_p s(c), with the strictness the mode asks for.
inline ProprietyReport check_propriety(const ScoringRule& rule, const ProprietyOptions& opt) {
  if (opt.mode == ProprietyMode::QuasiStrict && rule.domain() == RuleDomain::ProbabilitiesOnly) {
    fail(ErrorKind::DomainViolation, "quasi-strict check needs an extension of " + rule.name() + " to all credences");
  }
  const std::size_t n = rule.outcomes();
  const std::vector<Probability> grid = sample_simplex(n, opt.resolution, false);
  std::vector<ScoreVector> scores;
  scores.reserve(grid.size());
  for (const auto& p : grid) scores.push_back(evaluate(rule, p));
  std::vector<ExtendedReal> self(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) self[i] = expected_score(grid[i], scores[i]);

  std::vector<Credence> incoherent;
  std::vector<ScoreVector> incoherent_scores;
  if (rule.domain() == RuleDomain::AllCredences) {
    incoherent = incoherent_test_credences(n, grid, opt.max_incoherent, opt.seed, opt.perturbation);
    for (const auto& c : incoherent) incoherent_scores.push_back(evaluate(rule, c));
  }

  ProprietyReport report;
  report.rule = rule.name();
  report.mode = opt.mode;
  report.resolution = opt.resolution;
  report.tol = opt.tol;
  report.incoherent_credences = incoherent.size();
  report.seed = opt.seed;
  double worst_excess = 0.0;

  auto consider = [&](std::size_t pi, double gap, bool strict_required, auto&& make_c) {
    ++report.pairs_checked;
    if (strict_required) report.min_margin = std::min(report.min_margin, gap);
    const bool ok = strict_required ? gap > opt.tol : gap >= -opt.tol;
    if (ok) return;
    const double excess = gap - (strict_required ? opt.tol : -opt.tol);
    if (!report.worst || excess < worst_excess) {
      worst_excess = excess;
      const auto w = grid[pi].weights();
      report.worst = ViolationPair{{w.begin(), w.end()}, make_c(), gap};
    }
    report.passed = false;
  };

  const bool strict_on_probabilities = opt.mode == ProprietyMode::Strict;
  // strictness against incoherent credences is the quasi-strict condition
  const bool strict_on_incoherent = opt.mode == ProprietyMode::QuasiStrict;
  for (std::size_t pi = 0; pi < grid.size(); ++pi) {
    const auto w = grid[pi].weights();
    for (std::size_t ci = 0; ci < grid.size(); ++ci) {
      if (ci == pi) continue;
      const double gap = detail::gap_of(self[pi], extended_dot(w, scores[ci]));
      consider(pi, gap, strict_on_probabilities, [&] {
        const auto cw = grid[ci].weights();
        return ComparedForecast{true, {cw.begin(), cw.end()}};
      });
    }
    for (std::size_t ci = 0; ci < incoherent.size(); ++ci) {
      const double gap = detail::gap_of(self[pi], extended_dot(w, incoherent_scores[ci]));
      report.incoherent_min_gap = std::min(report.incoherent_min_gap, gap);
      consider(pi, gap, strict_on_incoherent, [&] {
        const auto v = incoherent[ci].values();
        return ComparedForecast{false, {v.begin(), v.end()}};
      });
    }
  }
  return report;
}

struct SupportProbe {
  std::vector<double> p;
  double support = 0.0;
  ExtendedReal self_score;
  double discrepancy = 0.0;
  bool flagged = false;
  /// Identity inapplicable: E_p s(p) is -inf.
  bool skipped = false;
};

struct SupportIdentityReport {
  std::string rule;
  std::size_t sample_size = 0;
  double tol = 0.0;
  std::vector<SupportProbe> probes;
  double max_discrepancy = 0.0;
  std::size_t flagged = 0;
};

/// Compares sigma_F(p) on the sample with E_p s(p) for each probe. A probe is
/// flagged when the support falls short of the self-score by more than tol, or
/// exceeds it by more than tol.
inline SupportIdentityReport check_support_identity(const ScoringRule& rule, const FiniteScoreSample& sample,
                                                    const std::vector<Probability>& probes, double tol) {
  SupportIdentityReport report;
  report.rule = rule.name();
  report.sample_size = sample.size();
  report.tol = tol;
  for (const auto& p : probes) {
    SupportProbe probe;
    probe.p.assign(p.weights().begin(), p.weights().end());
    probe.self_score = expected_score(p, evaluate(rule, p));
    probe.support = support_function(sample, p.weights()).value;
    if (probe.self_score.is_neg_inf()) {
      probe.skipped = true;
    } else {
      probe.discrepancy = std::abs(probe.support - probe.self_score.value());
      probe.flagged = probe.discrepancy > tol;
      report.max_discrepancy = std::max(report.max_discrepancy, probe.discrepancy);
      report.flagged += probe.flagged;
    }
    report.probes.push_back(std::move(probe));
  }
  return report;
}

/// One step of a path p_j -> target.
struct ProbabilityPath {
  std::string description;
  std::function<Probability(std::uint64_t)> at;
  std::uint64_t first_index = 16;
  std::uint64_t max_index = std::uint64_t{1} << 26;
};

/// p_j = (1 - 1/j) target + (1/j) uniform-on-the-zero-weight-outcomes; for a
/// regular target the mixing point is the uniform probability.
inline ProbabilityPath path_toward(const Probability& target) {
  const std::size_t n = target.outcomes();
  std::vector<double> mix(n, 0.0);
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) zeros += target[i] == 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mix[i] = zeros == 0 ? 1.0 / static_cast<double>(n) : (target[i] == 0.0 ? 1.0 / static_cast<double>(zeros) : 0.0);
  }
  std::string desc = "(1-1/j)*(";
  for (std::size_t i = 0; i < n; ++i) desc += (i ? "," : "") + detail::format_number(target[i]);
  desc += ")+(1/j)*(";
  for (std::size_t i = 0; i < n; ++i) desc += (i ? "," : "") + detail::format_number(mix[i]);
  desc += ")";
  std::vector<double> t(target.weights().begin(), target.weights().end());
  ProbabilityPath path;
  path.description = std::move(desc);
  path.at = [t, mix](std::uint64_t j) {
    const double a = 1.0 / static_cast<double>(j);
    std::vector<double> w(t.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      w[i] = (1.0 - a) * t[i] + a * mix[i];
      sum += w[i];
    }
    for (double& x : w) x /= sum;
    return Probability(std::move(w));
  };
  return path;
}

struct LimitSample {
  std::uint64_t index;
  double self_score;
};

struct LimitReport {
  std::string rule;
  std::vector<double> target;
  std::string path;
  double limit = 0.0;
  ExtendedReal self_score;
  bool holds = false;
  double gap = 0.0;
  double tol = 0.0;
  std::vector<LimitSample> samples;
};

/// Estimates lim_j E_{p_j} s(p_j) along a path by doubling the index until
/// three successive doublings move the estimate by less than tol/4, then
/// extrapolates once and compares with the target's own expected score.
inline LimitReport check_self_score_continuity(const ScoringRule& rule, const Probability& target,
                                               const ProbabilityPath& path, double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::BadInput, "tolerance must be positive");
  LimitReport report;
  report.rule = rule.name();
  report.target.assign(target.weights().begin(), target.weights().end());
  report.path = path.description;
  report.tol = tol;
  report.self_score = expected_score(target, evaluate(rule, target));

  std::size_t stable = 0;
  double last_distance = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (std::uint64_t j = std::max<std::uint64_t>(1, path.first_index); j <= path.max_index; j *= 2) {
    const Probability p = path.at(j);
    const ScoreVector s = evaluate(rule, p);
    if (!s.is_finite()) {
      fail(ErrorKind::InfiniteScoreOnPath, "score at path index " + std::to_string(j) + " is not finite");
    }
    const double v = expected_score(p, s).value();
    if (!report.samples.empty() && std::abs(v - report.samples.back().self_score) < tol / 4) {
      ++stable;
    } else {
      stable = 0;
    }
    report.samples.push_back({j, v});
    last_distance = linf_distance(p.weights(), target.weights());
    if (stable >= 3) {
      converged = true;
      break;
    }
  }
  if (!converged) fail(ErrorKind::PathNotConvergent, "self-score estimates did not stabilise along " + path.description);
  if (last_distance > 1e-3) fail(ErrorKind::PathNotConvergent, "path does not approach the target");
  // Richardson step for an O(1/j) tail: doubling j halves the error.
  const double last = report.samples.back().self_score;
  const double prev = report.samples[report.samples.size() - 2].self_score;
  report.limit = 2.0 * last - prev;
  report.gap = report.self_score.is_finite() ? std::abs(report.self_score.value() - report.limit)
                                             : std::numeric_limits<double>::infinity();
  report.holds = report.gap <= tol;
  return report;
}

}  // namespace scoring
