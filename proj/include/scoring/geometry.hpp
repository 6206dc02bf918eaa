#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "scoring/core.hpp"
#include "scoring/lp.hpp"
#include "scoring/rules.hpp"

namespace scoring {

/// Finite approximation of the set of finite scores of probabilities. Points
/// are stored row-major; sources[i] generated point i when the sample was
/// built from a rule.
class FiniteScoreSample {
 public:
  FiniteScoreSample(std::string rule, std::size_t dimension, std::size_t resolution)
      : rule_(std::move(rule)), dim_(dimension), resolution_(resolution) {}

  static FiniteScoreSample from_points(const std::vector<std::vector<double>>& points, std::string label = "synthetic") {
    if (points.empty()) fail(ErrorKind::EmptySample, "sample needs at least one point");
    FiniteScoreSample s(std::move(label), points.front().size(), 0);
    for (const auto& p : points) s.add(p, std::nullopt);
    return s;
  }

  void add(std::span<const double> point, std::optional<Probability> source) {
    require_same_size(dim_, point.size(), "sample point");
    for (double x : point) {
      if (!std::isfinite(x)) fail(ErrorKind::BadInput, "sample points must be finite");
    }
    data_.insert(data_.end(), point.begin(), point.end());
    if (source) sources_.push_back(std::move(*source));
  }

  void add_infinite(Probability p) { infinite_.push_back(std::move(p)); }

  const std::string& rule() const { return rule_; }
  std::size_t dimension() const { return dim_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const { return data_.empty(); }
  std::span<const double> point(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  bool has_sources() const { return !sources_.empty(); }
  const Probability& source(std::size_t i) const { return sources_.at(i); }
  const std::vector<Probability>& infinite_score_probabilities() const { return infinite_; }

  std::vector<std::vector<double>> points() const {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < size(); ++i) out.emplace_back(point(i).begin(), point(i).end());
    return out;
  }

 private:
  std::string rule_;
  std::size_t dim_;
  std::size_t resolution_;
  std::vector<double> data_;
  std::vector<Probability> sources_;
  std::vector<Probability> infinite_;
};

/// Scores every grid probability at resolution k. Refinement adds, for each
/// point mass, the probabilities (1 - 2^-j) e_w + 2^-j u_w for the next
/// `refinement` dyadic levels below 1/k, u_w uniform off w.
inline FiniteScoreSample build_sample(const ScoringRule& rule, std::size_t k, std::size_t refinement = 0) {
  const std::size_t n = rule.outcomes();
  FiniteScoreSample sample(rule.name(), n, k);
  auto add = [&](Probability p) {
    const ScoreVector s = evaluate(rule, p);
    if (s.is_finite()) {
      const auto v = s.finite_values();
      sample.add(v, std::move(p));
    } else {
      sample.add_infinite(std::move(p));
    }
  };
  for_each_simplex_point(n, k, false, [&](std::span<const double> w) { add(Probability({w.begin(), w.end()})); });
  if (refinement > 0 && n > 1) {
    double a = 1.0;
    while (a >= 1.0 / static_cast<double>(k)) a /= 2.0;
    for (std::size_t level = 0; level < refinement; ++level, a /= 2.0) {
      for (std::size_t w = 0; w < n; ++w) {
        std::vector<double> weights(n, a / static_cast<double>(n - 1));
        weights[w] = 1.0 - a;
        add(Probability::normalized(weights));
      }
    }
  }
  return sample;
}

struct SupportResult {
  double value = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> argmax;
};

inline double tie_tolerance(double sigma) { return 1e-7 * (1.0 + std::abs(sigma)); }

/// sigma(v) = max over sample points of <v, w>, with every maximizer within the
/// tie tolerance 1e-7 (1 + |sigma|).
inline SupportResult support_function(const FiniteScoreSample& sample, std::span<const double> v) {
  if (sample.empty()) fail(ErrorKind::EmptySample, "support function of an empty sample");
  require_same_size(sample.dimension(), v.size(), "support_function");
  SupportResult r;
  std::vector<double> values(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    values[i] = dot(v, sample.point(i));
    r.value = std::max(r.value, values[i]);
  }
  const double tie = tie_tolerance(r.value);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= r.value - tie) r.argmax.push_back(i);
  }
  return r;
}

inline std::size_t support_argmax(const FiniteScoreSample& sample, std::span<const double> v) {
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double d = dot(v, sample.point(i));
    if (d > best_value) {
      best_value = d;
      best = i;
    }
  }
  return best;
}

/// Positive normal v at z: v >= 1 componentwise and <v, w - z> <= tol for all
/// sampled w. slack = min_w <v, z - w>.
struct NormalCertificate {
  std::vector<double> point;
  std::vector<double> normal;
  double slack = 0.0;
  double tol = 0.0;

  /// The normal rescaled onto the simplex.
  Probability direction() const { return Probability::normalized(normal); }
};

inline double certificate_slack(std::span<const double> z, std::span<const double> v, const FiniteScoreSample& sample) {
  double slack = std::numeric_limits<double>::infinity();
  const double vz = dot(v, z);
  for (std::size_t i = 0; i < sample.size(); ++i) slack = std::min(slack, vz - dot(v, sample.point(i)));
  return slack;
}

/// An LP solution that is tight at tol lands on -tol up to rounding.
inline bool slack_within(double slack, double tol) { return slack >= -tol * (1.0 + 1e-6) - 1e-12; }

/// Builds a certificate for a given positive direction, rescaled so its
/// smallest component is 1.
inline NormalCertificate make_certificate(std::span<const double> z, std::span<const double> direction,
                                          const FiniteScoreSample& sample, double tol) {
  double lo = std::numeric_limits<double>::infinity();
  for (double x : direction) lo = std::min(lo, x);
  if (!(lo > 0.0)) fail(ErrorKind::BadInput, "certificate direction must be strictly positive");
  NormalCertificate cert;
  cert.point.assign(z.begin(), z.end());
  for (double x : direction) cert.normal.push_back(x / lo);
  cert.slack = certificate_slack(cert.point, cert.normal, sample);
  cert.tol = tol;
  return cert;
}

/// Re-checks the defining inequalities against a sample, independently of how
/// the certificate was produced.
inline bool verify_certificate(const NormalCertificate& cert, const FiniteScoreSample& sample, double tol) {
  for (double x : cert.normal) {
    if (!(x >= 1.0 - 1e-12)) return false;
  }
  return slack_within(certificate_slack(cert.point, cert.normal, sample), tol);
}

struct NormalOptions {
  double tol = 1e-9;
  /// Largest allowed ratio between normal components. A vertex exposed only by
  /// near-axis directions is not positive-facing at the sample's resolution.
  double max_ratio = 100.0;
};

/// Solves: find v with v >= 1, v <= max_ratio, <v, w - z> <= tol for every
/// sampled w, minimising sum v. nullopt when infeasible.
inline std::optional<NormalCertificate> positive_normal(std::span<const double> z, const FiniteScoreSample& sample,
                                                        const NormalOptions& opt = {}) {
  if (sample.empty()) fail(ErrorKind::EmptySample, "positive_normal on an empty sample");
  const std::size_t n = sample.dimension();
  require_same_size(n, z.size(), "positive_normal");
  const bool capped = std::isfinite(opt.max_ratio);
  const std::size_t rows = sample.size() + (capped ? n : 0);
  // v = 1 + u, u >= 0
  lp::Matrix a(rows, n);
  std::vector<double> b(rows);
  std::vector<double> c(n, -1.0);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto w = sample.point(i);
    double ones = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      a(i, j) = w[j] - z[j];
      ones += w[j] - z[j];
    }
    b[i] = opt.tol - ones;
  }
  if (capped) {
    for (std::size_t j = 0; j < n; ++j) {
      a(sample.size() + j, j) = 1.0;
      b[sample.size() + j] = opt.max_ratio - 1.0;
    }
  }
  const lp::Solution sol = lp::maximize(a, b, c, 1e-12);
  if (sol.status != lp::Status::Optimal) return std::nullopt;
  std::vector<double> v(n);
  for (std::size_t j = 0; j < n; ++j) v[j] = 1.0 + std::max(0.0, sol.x[j]);
  NormalCertificate cert;
  cert.point.assign(z.begin(), z.end());
  cert.normal = std::move(v);
  cert.slack = certificate_slack(cert.point, cert.normal, sample);
  cert.tol = opt.tol;
  if (!slack_within(cert.slack, opt.tol)) return std::nullopt;
  return cert;
}

struct GapFace {
  std::vector<double> direction;
  std::vector<std::size_t> vertices;
  std::size_t sampled_points = 0;
  double max_distance = 0.0;
  std::vector<double> farthest_point;
};

struct GapReport {
  std::string rule;
  std::size_t resolution = 0;
  std::size_t sample_size = 0;
  std::size_t directions = 0;
  std::vector<GapFace> faces;
  double max_gap = 0.0;
  std::vector<double> witness;
  NormalCertificate witness_certificate;
};

struct GapOptions {
  std::size_t direction_count = 16;
  std::size_t face_samples = 20;
  double tol = 1e-9;
};

/// L-inf distance from z to the nearest sample point.
inline double distance_to_sample(std::span<const double> z, const FiniteScoreSample& sample) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = sample.dimension();
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto w = sample.point(i);
    double d = 0.0;
    for (std::size_t j = 0; j < n && d < best; ++j) d = std::max(d, std::abs(z[j] - w[j]));
    best = std::min(best, d);
  }
  return best;
}

namespace detail {

/// Smallest grid resolution r whose interior lattice has at least `count` points.
inline std::size_t direction_resolution(std::size_t n, std::size_t count) {
  std::size_t r = n;
  while (simplex_grid_size(n, r, true) < count) ++r;
  return r;
}

class FaceTracer {
 public:
  FaceTracer(const FiniteScoreSample& sample) : sample_(sample) {}

  /// Follows the support maximizer from va to vb, recording each supporting
  /// face crossed on the way.
  void trace(const std::vector<double>& va, const std::vector<double>& vb, std::size_t ia, std::size_t ib,
             int depth = 0) {
    if (ia == ib || depth > 60) return;
    const auto wa = sample_.point(ia);
    const auto wb = sample_.point(ib);
    double da = 0.0, db = 0.0;
    for (std::size_t j = 0; j < va.size(); ++j) {
      da += va[j] * (wa[j] - wb[j]);
      db += vb[j] * (wa[j] - wb[j]);
    }
    const double t = (da - db) > 0.0 ? std::clamp(da / (da - db), 0.0, 1.0) : 0.5;
    std::vector<double> vt(va.size());
    for (std::size_t j = 0; j < va.size(); ++j) vt[j] = (1.0 - t) * va[j] + t * vb[j];

    const SupportResult sup = support_function(sample_, vt);
    const double level = dot(vt, wa);
    if (sup.value > level + tie_tolerance(sup.value)) {
      std::size_t ic = sup.argmax.front();
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i : sup.argmax) {
        const double d = dot(vt, sample_.point(i));
        if (d > best) {
          best = d;
          ic = i;
        }
      }
      trace(va, vt, ia, ic, depth + 1);
      trace(vt, vb, ic, ib, depth + 1);
      return;
    }
    std::vector<std::size_t> face = sup.argmax;
    for (std::size_t i : {ia, ib}) {
      if (std::find(face.begin(), face.end(), i) == face.end()) face.push_back(i);
    }
    std::sort(face.begin(), face.end());
    if (faces_.emplace(face, vt).second) order_.push_back(face);
  }

  std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> faces() const {
    std::vector<std::pair<std::vector<std::size_t>, std::vector<double>>> out;
    for (const auto& f : order_) out.emplace_back(f, faces_.at(f));
    return out;
  }

 private:
  const FiniteScoreSample& sample_;
  std::map<std::vector<std::size_t>, std::vector<double>> faces_;
  std::vector<std::vector<std::size_t>> order_;
};

}  // namespace detail

/// Measures how far the positive-facing boundary of the sampled hull strays
/// from the sample itself. Supporting faces are found by tracing the support
/// maximizer between neighbouring strictly positive probe directions; points
/// across each face are scored by their L-inf distance to the sample.
inline GapReport density_gap(const FiniteScoreSample& sample, const GapOptions& opt = {}) {
  if (sample.empty()) fail(ErrorKind::EmptySample, "density_gap on an empty sample");
  const std::size_t n = sample.dimension();
  if (opt.direction_count < n + 1 && n > 1) fail(ErrorKind::BadInput, "direction_count must be at least n+1");

  GapReport report;
  report.rule = sample.rule();
  report.resolution = sample.resolution();
  report.sample_size = sample.size();

  std::vector<std::vector<double>> directions;
  std::vector<std::vector<std::size_t>> lattice;
  if (n == 1) {
    directions.push_back({1.0});
    lattice.push_back({1});
  } else {
    const std::size_t r = detail::direction_resolution(n, opt.direction_count);
    for_each_simplex_point(n, r, true, [&](std::span<const double> w) {
      directions.emplace_back(w.begin(), w.end());
      std::vector<std::size_t> m;
      for (double x : w) m.push_back(static_cast<std::size_t>(std::llround(x * static_cast<double>(r))));
      lattice.push_back(std::move(m));
    });
  }
  report.directions = directions.size();

  std::vector<std::size_t> maximizer(directions.size());
  for (std::size_t d = 0; d < directions.size(); ++d) maximizer[d] = support_argmax(sample, directions[d]);

  // Start from the maximizer of the central direction: distance zero.
  const std::size_t center = directions.size() / 2;
  report.witness.assign(sample.point(maximizer[center]).begin(), sample.point(maximizer[center]).end());
  std::vector<double> witness_direction = directions[center];

  detail::FaceTracer tracer(sample);
  std::map<std::vector<std::size_t>, std::size_t> index_of;
  for (std::size_t d = 0; d < lattice.size(); ++d) index_of[lattice[d]] = d;
  for (std::size_t d = 0; d < lattice.size(); ++d) {
    // neighbours: move one lattice unit from coordinate i to coordinate j > i, either way
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || lattice[d][i] <= 1) continue;
        auto m = lattice[d];
        --m[i];
        ++m[j];
        auto it = index_of.find(m);
        if (it == index_of.end() || it->second < d) continue;
        tracer.trace(directions[d], directions[it->second], maximizer[d], maximizer[it->second]);
      }
    }
  }

  const std::size_t steps = std::max<std::size_t>(1, opt.face_samples);
  for (const auto& [vertices, direction] : tracer.faces()) {
    GapFace face;
    const Probability dir = Probability::normalized(direction);
    face.direction.assign(dir.weights().begin(), dir.weights().end());
    face.vertices = vertices;
    std::vector<std::vector<double>> candidates;
    const std::size_t limit = std::min<std::size_t>(vertices.size(), 8);
    for (std::size_t a = 0; a < limit; ++a) {
      for (std::size_t b = a + 1; b < limit; ++b) {
        const auto wa = sample.point(vertices[a]);
        const auto wb = sample.point(vertices[b]);
        for (std::size_t s = 1; s < steps; ++s) {
          const double t = static_cast<double>(s) / static_cast<double>(steps);
          std::vector<double> z(n);
          for (std::size_t j = 0; j < n; ++j) z[j] = (1.0 - t) * wa[j] + t * wb[j];
          candidates.push_back(std::move(z));
        }
      }
    }
    if (limit > 2) {
      std::vector<double> centroid(n, 0.0);
      for (std::size_t a = 0; a < limit; ++a) {
        for (std::size_t j = 0; j < n; ++j) centroid[j] += sample.point(vertices[a])[j] / static_cast<double>(limit);
      }
      candidates.push_back(std::move(centroid));
    }
    face.sampled_points = candidates.size();
    for (auto& z : candidates) {
      const double d = distance_to_sample(z, sample);
      if (d > face.max_distance) {
        face.max_distance = d;
        face.farthest_point = z;
      }
    }
    if (face.max_distance > report.max_gap) {
      report.max_gap = face.max_distance;
      report.witness = face.farthest_point;
      witness_direction = face.direction;
    }
    report.faces.push_back(std::move(face));
  }
  report.witness_certificate = make_certificate(report.witness, witness_direction, sample, opt.tol);
  return report;
}

struct HullDominator {
  std::vector<double> point;
  /// (sample index, convex weight) pairs with non-zero weight.
  std::vector<std::pair<std::size_t, double>> weights;
  /// Smallest excess of the combination over z0 on the finite coordinates.
  double margin = 0.0;
};

/// Convex combination of sample points maximising the smallest excess over z0
/// on its finite coordinates (-inf coordinates impose nothing). Infeasible
/// when that excess is below `margin`.
inline HullDominator find_hull_dominator(const FiniteScoreSample& sample, const ScoreVector& z0, double margin,
                                         double tol = 1e-9) {
  if (sample.empty()) fail(ErrorKind::EmptySample, "hull dominator over an empty sample");
  const std::size_t n = sample.dimension();
  require_same_size(n, z0.size(), "find_hull_dominator");
  std::vector<std::size_t> finite;
  for (std::size_t j = 0; j < n; ++j) {
    if (z0[j].is_finite()) finite.push_back(j);
  }
  HullDominator result;
  if (finite.empty()) {
    result.point.assign(sample.point(0).begin(), sample.point(0).end());
    result.weights = {{0, 1.0}};
    result.margin = std::numeric_limits<double>::infinity();
    return result;
  }

  // variables: lambda_0..lambda_{m-1}, t+, t-
  const std::size_t m = sample.size();
  const std::size_t cols = m + 2;
  lp::Matrix a(finite.size() + 2, cols);
  std::vector<double> b(finite.size() + 2, 0.0);
  for (std::size_t r = 0; r < finite.size(); ++r) {
    const std::size_t j = finite[r];
    for (std::size_t i = 0; i < m; ++i) a(r, i) = -sample.point(i)[j];
    a(r, m) = 1.0;
    a(r, m + 1) = -1.0;
    b[r] = -z0[j].value();
  }
  for (std::size_t i = 0; i < m; ++i) {
    a(finite.size(), i) = 1.0;
    a(finite.size() + 1, i) = -1.0;
  }
  b[finite.size()] = 1.0;
  b[finite.size() + 1] = -1.0;
  std::vector<double> c(cols, 0.0);
  c[m] = 1.0;
  c[m + 1] = -1.0;
  const lp::Solution sol = lp::maximize(a, b, c, 1e-11);
  if (sol.status != lp::Status::Optimal) {
    fail(ErrorKind::Infeasible, "no convex combination of the sample dominates the point");
  }

  result.point.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (sol.x[i] > 0.0) {
      result.weights.emplace_back(i, sol.x[i]);
      total += sol.x[i];
    }
  }
  for (auto& [i, w] : result.weights) {
    w /= total;
    for (std::size_t j = 0; j < n; ++j) result.point[j] += w * sample.point(i)[j];
  }
  result.margin = std::numeric_limits<double>::infinity();
  for (std::size_t j : finite) result.margin = std::min(result.margin, result.point[j] - z0[j].value());
  if (result.margin < margin - tol) {
    fail(ErrorKind::Infeasible, "best hull point exceeds the target by only " + std::to_string(result.margin));
  }
  return result;
}

struct OrthantOptions {
  std::size_t iterations = 2000;
  double tol = 1e-9;
};

struct OrthantResult {
  std::vector<double> point;
  NormalCertificate certificate;
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
  double fw_gap = 0.0;
  /// z1 actually used (after the inward nudge, if any).
  std::vector<double> anchor;
};

/// Maximises sum_w ln(z(w) - z1(w)) over the convex hull of the points, which
/// is the log of the product-of-coordinates objective on the orthant above z1.
/// Away-step conditional gradient with exact line search; the linear
/// subproblem is an exact maximisation over the vertex list. The gradient
/// 1/(z3 - z1) at the optimum is the positive normal.
inline OrthantResult orthant_argmax(const FiniteScoreSample& hull, std::span<const double> z1_in,
                                    const OrthantOptions& opt = {}) {
  if (hull.empty()) fail(ErrorKind::EmptySample, "orthant_argmax over an empty hull");
  const std::size_t n = hull.dimension();
  require_same_size(n, z1_in.size(), "orthant_argmax");
  std::vector<double> z1(z1_in.begin(), z1_in.end());

  HullDominator start;
  try {
    start = find_hull_dominator(hull, ScoreVector::from_doubles(z1), 0.0, 0.0);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Infeasible) throw;
    fail(ErrorKind::InfeasibleOrthant, "no hull point dominates z1");
  }
  if (!(start.margin > 0.0)) fail(ErrorKind::InfeasibleOrthant, "no hull point strictly dominates z1");
  if (start.margin < 1e-9) {
    for (double& x : z1) x -= 1e-9;
  }

  std::map<std::size_t, double> active;
  for (auto [i, w] : start.weights) active[i] += w;
  std::vector<double> z = start.point;

  auto objective = [&](std::span<const double> p) {
    double f = 0.0;
    for (std::size_t j = 0; j < n; ++j) f += std::log(p[j] - z1[j]);
    return f;
  };

  OrthantResult result;
  result.objective_trace.push_back(objective(z));
  std::vector<double> g(n), d(n);
  for (std::size_t iter = 0; iter < opt.iterations; ++iter) {
    for (std::size_t j = 0; j < n; ++j) g[j] = 1.0 / (z[j] - z1[j]);
    const std::size_t s = support_argmax(hull, g);
    const double gz = dot(g, z);
    const double fw_gap = dot(g, hull.point(s)) - gz;
    std::size_t away = active.begin()->first;
    double away_value = std::numeric_limits<double>::infinity();
    for (const auto& [i, w] : active) {
      const double v = dot(g, hull.point(i));
      if (v < away_value) {
        away_value = v;
        away = i;
      }
    }
    const double away_gap = gz - away_value;
    result.fw_gap = fw_gap;
    result.iterations = iter;
    if (fw_gap <= opt.tol) break;

    const bool toward = fw_gap >= away_gap;
    double gamma_max;
    if (toward) {
      for (std::size_t j = 0; j < n; ++j) d[j] = hull.point(s)[j] - z[j];
      gamma_max = 1.0;
    } else {
      for (std::size_t j = 0; j < n; ++j) d[j] = z[j] - hull.point(away)[j];
      const double la = active[away];
      gamma_max = la >= 1.0 ? 0.0 : la / (1.0 - la);
    }
    // stay strictly inside the orthant
    for (std::size_t j = 0; j < n; ++j) {
      if (d[j] < 0.0) gamma_max = std::min(gamma_max, (z[j] - z1[j]) / -d[j] * (1.0 - 1e-12));
    }
    auto slope = [&](double gamma) {
      double s2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) s2 += d[j] / (z[j] + gamma * d[j] - z1[j]);
      return s2;
    };
    double gamma = 0.0;
    if (slope(0.0) > 0.0) {
      if (slope(gamma_max) >= 0.0) {
        gamma = gamma_max;
      } else {
        double lo = 0.0, hi = gamma_max;
        for (int b = 0; b < 200 && hi - lo > 1e-16 * std::max(1.0, hi); ++b) {
          const double mid = 0.5 * (lo + hi);
          (slope(mid) > 0.0 ? lo : hi) = mid;
        }
        gamma = lo;
      }
    }
    std::vector<double> next(n);
    for (std::size_t j = 0; j < n; ++j) next[j] = z[j] + gamma * d[j];
    const double f_next = objective(next);
    if (!(f_next >= result.objective_trace.back()) || gamma == 0.0) {
      result.iterations = iter + 1;
      break;
    }
    if (toward) {
      for (auto& [i, w] : active) w *= (1.0 - gamma);
      active[s] += gamma;
    } else {
      for (auto& [i, w] : active) w *= (1.0 + gamma);
      active[away] -= gamma;
      if (active[away] <= 1e-15) active.erase(away);
    }
    z = std::move(next);
    result.objective_trace.push_back(f_next);
    result.iterations = iter + 1;
  }
  for (std::size_t j = 0; j < n; ++j) g[j] = 1.0 / (z[j] - z1[j]);
  result.fw_gap = dot(g, hull.point(support_argmax(hull, g))) - dot(g, z);
  result.point = z;
  result.anchor = z1;
  result.certificate = make_certificate(z, g, hull, opt.tol);
  return result;
}

/// Safe radius delta = factor * eps * min_w p(w): no point of the half-space
/// K = {<p, y> <= <p, x>} within delta of x is weakly dominated by a point of
/// K at distance >= eps from x.
inline double safe_delta(const Probability& p, double eps, double factor) {
  if (!p.is_regular()) fail(ErrorKind::NotRegular, "safe_delta needs a regular probability");
  if (!(eps > 0.0)) fail(ErrorKind::BadInput, "eps must be positive");
  if (!(factor > 0.0 && factor < 1.0)) fail(ErrorKind::BadInput, "factor must lie in (0,1)");
  double lo = 1.0;
  for (double w : p.weights()) lo = std::min(lo, w);
  return factor * eps * lo;
}

}  // namespace scoring
