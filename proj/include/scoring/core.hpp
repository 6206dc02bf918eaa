#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "scoring/error.hpp"
#include "scoring/extended_real.hpp"

namespace scoring {

inline constexpr std::size_t kMaxOutcomes = 16;
inline constexpr double kCoherenceTol = 1e-9;
inline constexpr double kDefaultMargin = 1e-9;

/// Finite sample space of 1..16 labelled outcomes.
class SampleSpace {
 public:
  explicit SampleSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty() || labels_.size() > kMaxOutcomes) {
      fail(ErrorKind::BadInput, "sample space needs 1.." + std::to_string(kMaxOutcomes) + " outcomes");
    }
    std::unordered_set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) fail(ErrorKind::BadInput, "outcome labels must be distinct");
  }

  /// Outcomes labelled "1".."n".
  static SampleSpace indexed(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i + 1));
    return SampleSpace(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  std::size_t event_count() const { return std::size_t{1} << size(); }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const SampleSpace&, const SampleSpace&) = default;

 private:
  std::vector<std::string> labels_;
};

/// Event A, bit i set iff outcome i is in A.
class EventKey {
 public:
  constexpr explicit EventKey(std::uint32_t mask) : mask_(mask) {}

  static constexpr EventKey empty() { return EventKey(0); }
  static constexpr EventKey full(std::size_t n) { return EventKey(static_cast<std::uint32_t>((1u << n) - 1u)); }
  static constexpr EventKey singleton(std::size_t i) { return EventKey(1u << i); }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool contains(std::size_t outcome) const { return (mask_ >> outcome) & 1u; }
  constexpr bool is_singleton() const { return mask_ != 0 && (mask_ & (mask_ - 1)) == 0; }

  friend constexpr bool operator==(EventKey, EventKey) = default;

 private:
  std::uint32_t mask_;
};

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::SpaceMismatch, std::string(what) + ": sizes " + std::to_string(a) + " and " + std::to_string(b));
  }
}

/// Real-valued assignment to all 2^n events; need not be coherent.
class Credence {
 public:
  Credence(std::size_t outcomes, std::vector<double> values) : outcomes_(outcomes), values_(std::move(values)) {
    if (outcomes_ == 0 || outcomes_ > kMaxOutcomes) fail(ErrorKind::BadInput, "credence outcome count out of range");
    if (values_.size() != (std::size_t{1} << outcomes_)) {
      fail(ErrorKind::BadInput, "credence needs a value for each of the 2^n events");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) fail(ErrorKind::BadInput, "credence values must be finite");
    }
  }

  std::size_t outcomes() const { return outcomes_; }
  std::size_t event_count() const { return values_.size(); }
  double operator[](EventKey e) const { return values_[e.mask()]; }
  std::span<const double> values() const { return values_; }

  /// Singleton values c({w}) in outcome order.
  std::vector<double> singletons() const {
    std::vector<double> out(outcomes_);
    for (std::size_t i = 0; i < outcomes_; ++i) out[i] = values_[EventKey::singleton(i).mask()];
    return out;
  }

 private:
  std::size_t outcomes_;
  std::vector<double> values_;
};

/// Coherent credence represented by its singleton weights.
class Probability {
 public:
  explicit Probability(std::vector<double> weights) : weights_(std::move(weights)) {
    if (weights_.empty() || weights_.size() > kMaxOutcomes) fail(ErrorKind::BadInput, "probability size out of range");
    double sum = 0.0;
    regular_ = true;
    for (double w : weights_) {
      if (!std::isfinite(w)) fail(ErrorKind::InvalidProbability, "probability weights must be finite");
      if (w < 0.0) fail(ErrorKind::NegativeWeight, "probability weight below zero");
      if (w == 0.0) regular_ = false;
      sum += w;
    }
    if (std::abs(sum - 1.0) > kCoherenceTol) fail(ErrorKind::InvalidProbability, "probability weights must sum to 1");
  }

  /// Rescales a non-negative, non-zero vector onto the simplex.
  static Probability normalized(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) {
      if (!(x >= 0.0)) fail(ErrorKind::NegativeWeight, "cannot normalize a vector with negative entries");
      sum += x;
    }
    if (!(sum > 0.0)) fail(ErrorKind::ZeroVector, "cannot normalize the zero vector");
    std::vector<double> w(v.begin(), v.end());
    for (double& x : w) x /= sum;
    return Probability(std::move(w));
  }

  static Probability uniform(std::size_t n) { return Probability(std::vector<double>(n, 1.0 / static_cast<double>(n))); }

  static Probability point_mass(std::size_t n, std::size_t outcome) {
    std::vector<double> w(n, 0.0);
    w.at(outcome) = 1.0;
    return Probability(std::move(w));
  }

  std::size_t outcomes() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t outcome) const { return weights_[outcome]; }
  bool is_regular() const { return regular_; }

  double event(EventKey e) const {
    double total = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      if (e.contains(i)) total += weights_[i];
    }
    return total;
  }

  /// p(A) for every event, indexed by mask.
  std::vector<double> event_values() const {
    const std::size_t count = std::size_t{1} << weights_.size();
    std::vector<double> out(count, 0.0);
    for (std::size_t mask = 1; mask < count; ++mask) {
      const auto low = static_cast<std::size_t>(std::countr_zero(mask));
      out[mask] = out[mask & (mask - 1)] + weights_[low];
    }
    return out;
  }

  Credence to_credence() const { return Credence(weights_.size(), event_values()); }

  friend bool operator==(const Probability& a, const Probability& b) { return a.weights_ == b.weights_; }

 private:
  std::vector<double> weights_;
  bool regular_ = true;
};

/// Per-outcome accuracy values in [-inf, M].
class ScoreVector {
 public:
  ScoreVector() = default;
  explicit ScoreVector(std::vector<ExtendedReal> entries) : entries_(std::move(entries)) {}

  static ScoreVector from_doubles(std::span<const double> values) {
    std::vector<ExtendedReal> e;
    e.reserve(values.size());
    for (double v : values) e.push_back(ExtendedReal::from_double(v));
    return ScoreVector(std::move(e));
  }

  std::size_t size() const { return entries_.size(); }
  ExtendedReal operator[](std::size_t i) const { return entries_[i]; }
  std::span<const ExtendedReal> entries() const { return entries_; }

  bool is_finite() const {
    return std::all_of(entries_.begin(), entries_.end(), [](ExtendedReal e) { return e.is_finite(); });
  }

  /// Finite entries as doubles. Throws if any entry is -inf.
  std::vector<double> finite_values() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (auto e : entries_) out.push_back(e.value());
    return out;
  }

  /// Raw IEEE encoding, -inf kept.
  std::vector<double> raw() const {
    std::vector<double> out;
    out.reserve(entries_.size());
    for (auto e : entries_) out.push_back(e.raw());
    return out;
  }

  friend bool operator==(const ScoreVector&, const ScoreVector&) = default;

 private:
  std::vector<ExtendedReal> entries_;
};

/// Sum over outcomes of f(w) * g(w) with a*0 = 0*a = 0. f must lie in [0,1]^n.
inline ExtendedReal extended_dot(std::span<const double> f, std::span<const ExtendedReal> g) {
  require_same_size(f.size(), g.size(), "extended_dot");
  ExtendedReal total;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] >= 0.0 && f[i] <= 1.0)) fail(ErrorKind::DomainViolation, "extended_dot weights must lie in [0,1]");
    total += g[i].times(f[i]);
  }
  return total;
}

inline ExtendedReal extended_dot(std::span<const double> f, const ScoreVector& g) {
  return extended_dot(f, g.entries());
}

/// E_p f, summing only over outcomes with non-zero weight.
inline ExtendedReal expected_score(const Probability& p, const ScoreVector& f) {
  require_same_size(p.outcomes(), f.size(), "expected_score");
  ExtendedReal total;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (p[i] != 0.0) total += f[i].times(p[i]);
  }
  return total;
}

/// Plain scalar product of finite vectors.
inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// max_w |f(w) - g(w)|; +inf when one side is -inf and the other finite.
inline double linf_distance(const ScoreVector& f, const ScoreVector& g) {
  require_same_size(f.size(), g.size(), "linf_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i].is_neg_inf() && g[i].is_neg_inf()) continue;
    if (f[i].is_neg_inf() || g[i].is_neg_inf()) return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(f[i].value() - g[i].value()));
  }
  return d;
}

inline double linf_distance(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "linf_distance");
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

/// Checks the probability axioms within tol and returns the probability given
/// by the singleton values. Negative singletons within tol are clamped to zero.
inline Probability validate_probability(const Credence& c, double tol = kCoherenceTol) {
  if (!(tol >= 0.0)) fail(ErrorKind::BadInput, "tolerance must be non-negative");
  const std::size_t n = c.outcomes();
  std::vector<double> singles = c.singletons();
  for (std::size_t i = 0; i < n; ++i) {
    if (singles[i] < -tol) {
      fail(ErrorKind::NegativeWeight, "singleton {" + std::to_string(i + 1) + "} has negative credence " +
                                          std::to_string(singles[i]));
    }
    singles[i] = std::max(0.0, singles[i]);
  }

  std::uint32_t worst_mask = 0;
  double worst = 0.0;
  const double total_discrepancy = c[EventKey::full(n)] - 1.0;
  if (std::abs(total_discrepancy) > tol) {
    worst_mask = EventKey::full(n).mask();
    worst = total_discrepancy;
  }
  const auto raw_singles = c.singletons();
  const std::size_t count = c.event_count();
  std::vector<double> sums(count, 0.0);
  for (std::size_t mask = 1; mask < count; ++mask) {
    sums[mask] = sums[mask & (mask - 1)] + raw_singles[static_cast<std::size_t>(std::countr_zero(mask))];
  }
  for (std::size_t mask = 0; mask < count; ++mask) {
    const double d = c.values()[mask] - sums[mask];
    if (std::abs(d) > tol && std::abs(d) > std::abs(worst)) {
      worst = d;
      worst_mask = static_cast<std::uint32_t>(mask);
    }
  }
  if (worst != 0.0) {
    throw IncoherentError(worst_mask, worst,
                          "credence is incoherent at event mask " + std::to_string(worst_mask) +
                              " (discrepancy " + std::to_string(std::abs(worst)) + ")");
  }

  const double sum = std::accumulate(singles.begin(), singles.end(), 0.0);
  for (double& w : singles) w /= sum;
  return Probability(std::move(singles));
}

inline bool is_coherent(const Credence& c, double tol = kCoherenceTol) {
  try {
    validate_probability(c, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

/// Number of lattice points (m_1/k, ..., m_n/k) on the simplex.
inline std::size_t simplex_grid_size(std::size_t n, std::size_t k, bool interior_only) {
  // compositions of k into n parts (>= 1 each when interior_only)
  if (interior_only) {
    if (k < n) return 0;
    k -= n;
  }
  double count = 1.0;
  for (std::size_t i = 1; i < n; ++i) count = count * static_cast<double>(k + i) / static_cast<double>(i);
  return static_cast<std::size_t>(std::llround(count));
}

/// Visits every lattice weight vector in lexicographic order of (m_1, ..., m_n).
template <typename Visitor>
void for_each_simplex_point(std::size_t n, std::size_t k, bool interior_only, Visitor&& visit) {
  if (n == 0 || n > kMaxOutcomes) fail(ErrorKind::BadInput, "outcome count out of range");
  if (k == 0) fail(ErrorKind::BadInput, "simplex resolution must be at least 1");
  const std::size_t lo = interior_only ? 1 : 0;
  std::vector<std::size_t> m(n, 0);
  std::vector<double> w(n, 0.0);
  const double kd = static_cast<double>(k);

  auto rec = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i + 1 == n) {
      if (remaining < lo) return;
      m[i] = remaining;
      for (std::size_t j = 0; j < n; ++j) w[j] = static_cast<double>(m[j]) / kd;
      visit(std::span<const double>(w));
      return;
    }
    const std::size_t reserve = lo * (n - i - 1);
    if (remaining < reserve + lo) return;
    for (std::size_t v = lo; v + reserve <= remaining; ++v) {
      m[i] = v;
      self(self, i + 1, remaining - v);
    }
  };
  rec(rec, 0, k);
}

inline std::vector<Probability> sample_simplex(std::size_t n, std::size_t k, bool interior_only) {
  std::vector<Probability> out;
  out.reserve(simplex_grid_size(n, k, interior_only));
  for_each_simplex_point(n, k, interior_only, [&](std::span<const double> w) {
    out.emplace_back(std::vector<double>(w.begin(), w.end()));
  });
  return out;
}

}  // namespace scoring
