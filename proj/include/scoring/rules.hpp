#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scoring/core.hpp"

namespace scoring {

enum class RuleDomain { AllCredences, ProbabilitiesOnly };

inline std::string_view to_string(RuleDomain d) {
  return d == RuleDomain::AllCredences ? "all-credences" : "probabilities-only";
}

class ScoringRule;
using RulePtr = std::shared_ptr<const ScoringRule>;

/// Additive component s_A(x, i): x is the credence in A, i = 1_A(w).
using EventComponent = std::function<ExtendedReal(double credence, bool indicator)>;

namespace kinds {
struct Brier {};
struct Spherical {};
struct Log {};
struct TwoCircle {};
/// Shifted Brier on regular probabilities, -2 / -inf at the two point masses.
struct BoundaryBonus {
  static constexpr double shift = 3.0;
  static constexpr double bonus = -2.0;
};
struct Additive {
  std::vector<EventComponent> components;
};
struct SAlpha {
  RulePtr base;
  ExtendedReal alpha;
};
/// Sign flip of an accuracy rule on probabilities; only proper when the base is constant.
struct Negated {
  RulePtr base;
};
/// base on probabilities, constant fill elsewhere.
struct Extended {
  RulePtr base;
  ScoreVector fill;
};
}  // namespace kinds

using RuleKind = std::variant<kinds::Brier, kinds::Spherical, kinds::Log, kinds::TwoCircle, kinds::BoundaryBonus,
                              kinds::Additive, kinds::SAlpha, kinds::Negated, kinds::Extended>;

/// Immutable accuracy scoring rule descriptor: kind, outcome count, upper
/// bound M and the set of credences it accepts.
class ScoringRule {
 public:
  ScoringRule(RuleKind kind, std::string name, std::size_t outcomes, double upper_bound, RuleDomain domain)
      : kind_(std::move(kind)), name_(std::move(name)), outcomes_(outcomes), upper_(upper_bound), domain_(domain) {}

  const RuleKind& kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t outcomes() const { return outcomes_; }
  double upper_bound() const { return upper_; }
  RuleDomain domain() const { return domain_; }

  template <typename Kind>
  bool is() const {
    return std::holds_alternative<Kind>(kind_);
  }

 private:
  RuleKind kind_;
  std::string name_;
  std::size_t outcomes_;
  double upper_;
  RuleDomain domain_;
};

namespace detail {

inline std::vector<double> brier_from_events(std::span<const double> event_values, std::size_t n) {
  std::vector<double> out(n, 0.0);
  for (std::size_t w = 0; w < n; ++w) {
    double total = 0.0;
    for (std::size_t mask = 0; mask < event_values.size(); ++mask) {
      const double indicator = ((mask >> w) & 1u) ? 1.0 : 0.0;
      const double d = indicator - event_values[mask];
      total += d * d;
    }
    out[w] = -total;
  }
  return out;
}

inline ScoreVector spherical_from_weights(std::span<const double> weights) {
  double norm = 0.0;
  for (double x : weights) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) fail(ErrorKind::ZeroVector, "spherical rule undefined on all-zero singleton credences");
  std::vector<ExtendedReal> e;
  for (double x : weights) e.emplace_back(x / norm);
  return ScoreVector(std::move(e));
}

inline ScoreVector finite_vector(const std::vector<double>& v) {
  std::vector<ExtendedReal> e(v.begin(), v.end());
  return ScoreVector(std::move(e));
}

inline void check_entries(const ScoringRule& rule, const ScoreVector& s) {
  for (auto e : s.entries()) {
    if (e.raw() > rule.upper_bound() + 1e-12) {
      fail(ErrorKind::EntryAboveM, rule.name() + " produced an entry above its bound M");
    }
  }
}

}  // namespace detail

ScoreVector evaluate(const ScoringRule& rule, const Probability& p);
ScoreVector evaluate(const ScoringRule& rule, const Credence& c);

namespace detail {

struct ProbabilityEvaluator {
  const ScoringRule& rule;
  const Probability& p;

  ScoreVector operator()(const kinds::Brier&) const {
    return finite_vector(brier_from_events(p.event_values(), p.outcomes()));
  }
  ScoreVector operator()(const kinds::Spherical&) const { return spherical_from_weights(p.weights()); }
  ScoreVector operator()(const kinds::Log&) const {
    std::vector<ExtendedReal> e;
    for (double w : p.weights()) e.push_back(w == 0.0 ? kNegInf : ExtendedReal(std::log(w)));
    return ScoreVector(std::move(e));
  }
  ScoreVector operator()(const kinds::TwoCircle&) const {
    // theta = pi/4 belongs to the first arc, so B is a score and C is not.
    const double theta = std::atan2(p[1], p[0]);
    if (theta <= std::numbers::pi / 4) {
      return finite_vector({1.0 + std::cos(theta), std::sin(theta)});
    }
    return finite_vector({std::cos(theta), 1.0 + std::sin(theta)});
  }
  ScoreVector operator()(const kinds::BoundaryBonus& b) const {
    if (p[1] == 0.0) return ScoreVector({ExtendedReal(b.bonus), kNegInf});
    if (p[0] == 0.0) return ScoreVector({kNegInf, ExtendedReal(b.bonus)});
    auto s = brier_from_events(p.event_values(), 2);
    for (double& x : s) x -= b.shift;
    return finite_vector(s);
  }
  ScoreVector operator()(const kinds::Additive& a) const { return additive(a, p.event_values()); }
  ScoreVector operator()(const kinds::SAlpha& s) const {
    ScoreVector base = evaluate(*s.base, p);
    if (p.is_regular()) return base;
    std::vector<ExtendedReal> e(base.entries().begin(), base.entries().end());
    for (std::size_t w = 0; w < e.size(); ++w) {
      if (p[w] == 0.0) e[w] = s.alpha;
    }
    return ScoreVector(std::move(e));
  }
  ScoreVector operator()(const kinds::Negated& neg) const {
    ScoreVector base = evaluate(*neg.base, p);
    std::vector<ExtendedReal> e;
    for (auto x : base.entries()) e.emplace_back(-x.value());
    return ScoreVector(std::move(e));
  }
  ScoreVector operator()(const kinds::Extended& ext) const { return evaluate(*ext.base, p); }

  static ScoreVector additive(const kinds::Additive& a, std::span<const double> events) {
    const std::size_t n = static_cast<std::size_t>(std::countr_zero(events.size()));
    std::vector<ExtendedReal> e(n);
    for (std::size_t w = 0; w < n; ++w) {
      ExtendedReal total;
      for (std::size_t mask = 0; mask < events.size(); ++mask) {
        total += a.components[mask](events[mask], (mask >> w) & 1u);
      }
      e[w] = total;
    }
    return ScoreVector(std::move(e));
  }
};

}  // namespace detail

inline ScoreVector evaluate(const ScoringRule& rule, const Probability& p) {
  require_same_size(rule.outcomes(), p.outcomes(), rule.name().c_str());
  ScoreVector s = std::visit(detail::ProbabilityEvaluator{rule, p}, rule.kind());
  detail::check_entries(rule, s);
  return s;
}

/// Evaluates any credence. Coherent credences (within kCoherenceTol) are
/// scored as probabilities; incoherent ones need an AllCredences rule.
inline ScoreVector evaluate(const ScoringRule& rule, const Credence& c) {
  require_same_size(rule.outcomes(), c.outcomes(), rule.name().c_str());
  std::optional<Probability> coherent;
  try {
    coherent = validate_probability(c, kCoherenceTol);
  } catch (const Error&) {
  }
  if (coherent) return evaluate(rule, *coherent);

  if (rule.domain() == RuleDomain::ProbabilitiesOnly) {
    fail(ErrorKind::DomainViolation, rule.name() + " is only defined on probabilities");
  }
  ScoreVector s;
  if (rule.is<kinds::Brier>()) {
    s = detail::finite_vector(detail::brier_from_events(c.values(), c.outcomes()));
  } else if (rule.is<kinds::Spherical>()) {
    s = detail::spherical_from_weights(c.singletons());
  } else if (const auto* a = std::get_if<kinds::Additive>(&rule.kind())) {
    s = detail::ProbabilityEvaluator::additive(*a, c.values());
  } else if (const auto* sa = std::get_if<kinds::SAlpha>(&rule.kind())) {
    s = evaluate(*sa->base, c);
  } else if (const auto* ext = std::get_if<kinds::Extended>(&rule.kind())) {
    s = ext->fill;
  } else {
    fail(ErrorKind::DomainViolation, rule.name() + " has no credence evaluation");
  }
  detail::check_entries(rule, s);
  return s;
}

/// Infimum of score entries over all probabilities when it is known in closed
/// form; nullopt otherwise.
inline std::optional<ExtendedReal> analytic_lower_bound(const ScoringRule& rule) {
  const std::size_t n = rule.outcomes();
  return std::visit(
      [&](const auto& k) -> std::optional<ExtendedReal> {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, kinds::Brier>) {
          // a point mass scored at another outcome misses half of all events
          if (n == 1) return ExtendedReal(0.0);
          return ExtendedReal(-std::ldexp(1.0, static_cast<int>(n) - 1));
        } else if constexpr (std::is_same_v<K, kinds::Spherical> || std::is_same_v<K, kinds::TwoCircle>) {
          return ExtendedReal(0.0);
        } else if constexpr (std::is_same_v<K, kinds::Log> || std::is_same_v<K, kinds::BoundaryBonus>) {
          return kNegInf;
        } else if constexpr (std::is_same_v<K, kinds::SAlpha>) {
          auto base = analytic_lower_bound(*k.base);
          if (!base) return std::nullopt;
          return std::min(*base, k.alpha);
        } else if constexpr (std::is_same_v<K, kinds::Negated>) {
          return ExtendedReal(-k.base->upper_bound());
        } else {
          return std::nullopt;
        }
      },
      rule.kind());
}

inline ScoringRule brier_rule(std::size_t n) {
  if (n == 0 || n > kMaxOutcomes) fail(ErrorKind::BadSpec, "brier: outcome count out of range");
  return ScoringRule(kinds::Brier{}, "brier", n, 0.0, RuleDomain::AllCredences);
}

inline ScoringRule spherical_rule(std::size_t n) {
  if (n == 0 || n > kMaxOutcomes) fail(ErrorKind::BadSpec, "spherical: outcome count out of range");
  return ScoringRule(kinds::Spherical{}, "spherical", n, 1.0, RuleDomain::AllCredences);
}

inline ScoringRule log_rule(std::size_t n) {
  if (n == 0 || n > kMaxOutcomes) fail(ErrorKind::BadSpec, "log: outcome count out of range");
  return ScoringRule(kinds::Log{}, "log", n, 0.0, RuleDomain::ProbabilitiesOnly);
}

inline ScoringRule two_circle_rule() {
  return ScoringRule(kinds::TwoCircle{}, "two-circle", 2, 2.0, RuleDomain::ProbabilitiesOnly);
}

inline ScoringRule boundary_bonus_rule() {
  return ScoringRule(kinds::BoundaryBonus{}, "boundary-bonus", 2, kinds::BoundaryBonus::bonus,
                     RuleDomain::ProbabilitiesOnly);
}

inline ScoringRule additive_rule(std::size_t n, std::vector<EventComponent> components, double upper_bound,
                                 std::string name = "additive") {
  if (n == 0 || n > kMaxOutcomes) fail(ErrorKind::BadSpec, "additive: outcome count out of range");
  if (components.size() != (std::size_t{1} << n)) fail(ErrorKind::BadSpec, "additive: need one component per event");
  for (const auto& c : components) {
    if (!c) fail(ErrorKind::BadSpec, "additive: empty component");
  }
  if (!std::isfinite(upper_bound)) fail(ErrorKind::BadSpec, "additive: M must be finite");
  return ScoringRule(kinds::Additive{std::move(components)}, std::move(name), n, upper_bound,
                     RuleDomain::AllCredences);
}

/// Per-event quadratic components reproducing the Brier rule.
inline std::vector<EventComponent> brier_components(std::size_t n) {
  std::vector<EventComponent> out(std::size_t{1} << n, [](double x, bool i) {
    const double d = (i ? 1.0 : 0.0) - x;
    return ExtendedReal(-d * d);
  });
  return out;
}

namespace detail {
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}
}  // namespace detail

/// Zero-weight entries replaced by alpha. alpha must not exceed any score the
/// base assigns to a probability; the base must be finite on probabilities.
inline ScoringRule s_alpha_rule(const ScoringRule& base, ExtendedReal alpha) {
  ExtendedReal sampled_min = ExtendedReal(base.upper_bound());
  const std::size_t k = base.outcomes() <= 3 ? 64 : (base.outcomes() <= 5 ? 8 : 2);
  for_each_simplex_point(base.outcomes(), k, false, [&](std::span<const double> w) {
    const ScoreVector s = evaluate(base, Probability(std::vector<double>(w.begin(), w.end())));
    if (!s.is_finite()) fail(ErrorKind::BadSpec, "s-alpha base must be finite on every probability");
    for (auto e : s.entries()) sampled_min = std::min(sampled_min, e);
  });
  if (alpha > sampled_min) {
    fail(ErrorKind::BadAlpha, "alpha " + alpha.to_string() + " exceeds a base score " + sampled_min.to_string());
  }
  if (auto lb = analytic_lower_bound(base); lb && alpha > *lb) {
    fail(ErrorKind::BadAlpha, "alpha " + alpha.to_string() + " exceeds the base minimum " + lb->to_string());
  }
  const std::string name =
      "s-alpha:base=" + base.name() + ",alpha=" + (alpha.is_finite() ? detail::format_number(alpha.value()) : "-inf");
  return ScoringRule(kinds::SAlpha{std::make_shared<const ScoringRule>(base), alpha}, name, base.outcomes(),
                     base.upper_bound(), base.domain());
}

inline ScoreVector s_alpha_transform(const ScoringRule& base, ExtendedReal alpha, const Probability& p) {
  return evaluate(s_alpha_rule(base, alpha), p);
}

inline ScoringRule negated_rule(const ScoringRule& base) {
  const auto lb = analytic_lower_bound(base);
  if (!lb || lb->is_neg_inf()) fail(ErrorKind::BadSpec, "negated: base needs a finite lower bound on probabilities");
  return ScoringRule(kinds::Negated{std::make_shared<const ScoringRule>(base)}, "negated:base=" + base.name(),
                     base.outcomes(), -lb->value(), RuleDomain::ProbabilitiesOnly);
}

/// base on probabilities, x on every non-probability credence.
inline ScoringRule extend_with_vector(const ScoringRule& base, ScoreVector x) {
  require_same_size(base.outcomes(), x.size(), "extend_with_vector");
  for (auto e : x.entries()) {
    if (e.raw() > base.upper_bound()) {
      fail(ErrorKind::EntryAboveM, "fill entry " + e.to_string() + " exceeds M=" + detail::format_number(base.upper_bound()));
    }
  }
  std::string name = "extended:base=" + base.name() + ",x=(";
  for (std::size_t i = 0; i < x.size(); ++i) name += (i ? ";" : "") + x[i].to_string();
  name += ")";
  return ScoringRule(kinds::Extended{std::make_shared<const ScoringRule>(base), std::move(x)}, std::move(name),
                     base.outcomes(), base.upper_bound(), RuleDomain::AllCredences);
}

struct RuleReport {
  std::string name;
  RuleDomain domain;
  double upper_bound;
  std::size_t resolution;
  std::size_t grid_points;
  std::vector<Probability> infinite_score_probabilities;
};

inline RuleReport describe_rule(const ScoringRule& rule, std::size_t resolution) {
  RuleReport report{rule.name(), rule.domain(), rule.upper_bound(), resolution, 0, {}};
  for_each_simplex_point(rule.outcomes(), resolution, false, [&](std::span<const double> w) {
    Probability p(std::vector<double>(w.begin(), w.end()));
    ++report.grid_points;
    if (!evaluate(rule, p).is_finite()) report.infinite_score_probabilities.push_back(std::move(p));
  });
  return report;
}

}  // namespace scoring
