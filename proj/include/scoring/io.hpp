#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scoring/dominance.hpp"

namespace scoring::io {

using Json = nlohmann::ordered_json;

/// Finite doubles as numbers; infinities as the strings "inf" / "-inf".
inline Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline Json num(ExtendedReal v) { return num(v.raw()); }

inline Json nums(std::span<const double> v) {
  Json out = Json::array();
  for (double x : v) out.push_back(num(x));
  return out;
}

inline Json nums(const ScoreVector& s) {
  Json out = Json::array();
  for (auto e : s.entries()) out.push_back(num(e));
  return out;
}

inline double parse_number(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  fail(ErrorKind::BadInput, "expected a number or \"-inf\", got " + j.dump());
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::BadInput, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::BadInput, path + ": " + e.what());
  }
}

struct CredenceFile {
  SampleSpace space;
  Credence credence;
};

/// {"outcomes": [labels], "credences": {"<mask>": value, ...}}, every mask present.
inline CredenceFile parse_credence(const Json& j) {
  if (!j.is_object() || !j.contains("outcomes") || !j.contains("credences")) {
    fail(ErrorKind::BadInput, "credence file needs \"outcomes\" and \"credences\"");
  }
  if (!j["outcomes"].is_array()) fail(ErrorKind::BadInput, "\"outcomes\" must be an array of labels");
  std::vector<std::string> labels;
  for (const auto& l : j["outcomes"]) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  SampleSpace space(std::move(labels));
  const auto& table = j["credences"];
  if (!table.is_object()) fail(ErrorKind::BadInput, "\"credences\" must be an object keyed by event mask");
  std::vector<double> values(space.event_count());
  std::vector<bool> seen(values.size(), false);
  for (const auto& [key, value] : table.items()) {
    std::size_t mask = 0;
    std::size_t used = 0;
    try {
      mask = std::stoul(key, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != key.size() || mask >= values.size()) fail(ErrorKind::BadInput, "bad event mask \"" + key + "\"");
    if (seen[mask]) fail(ErrorKind::BadInput, "duplicate event mask " + key);
    const double v = parse_number(value);
    if (!std::isfinite(v)) fail(ErrorKind::BadInput, "credence for mask " + key + " must be finite");
    values[mask] = v;
    seen[mask] = true;
  }
  for (std::size_t m = 0; m < seen.size(); ++m) {
    if (!seen[m]) fail(ErrorKind::BadInput, "missing event mask " + std::to_string(m));
  }
  return {space, Credence(space.size(), std::move(values))};
}

inline CredenceFile read_credence_file(const std::string& path) { return parse_credence(read_json_file(path)); }

inline Json credence_json(const SampleSpace& space, const Credence& c) {
  Json table = Json::object();
  for (std::size_t m = 0; m < c.event_count(); ++m) table[std::to_string(m)] = num(c.values()[m]);
  return Json{{"outcomes", space.labels()}, {"credences", table}};
}

/// {"scores": [...]} or a bare array; entries are numbers or "-inf".
inline ScoreVector parse_score_vector(const Json& j) {
  const Json* arr = &j;
  if (j.is_object()) {
    if (!j.contains("scores")) fail(ErrorKind::BadInput, "score vector object needs \"scores\"");
    arr = &j["scores"];
  }
  if (!arr->is_array() || arr->empty()) fail(ErrorKind::BadInput, "score vector must be a non-empty array");
  std::vector<ExtendedReal> out;
  for (const auto& e : *arr) {
    const double v = parse_number(e);
    if (v == std::numeric_limits<double>::infinity()) fail(ErrorKind::BadInput, "scores cannot be +inf");
    out.push_back(ExtendedReal::from_double(v));
  }
  return ScoreVector(std::move(out));
}

inline ScoreVector read_score_vector_file(const std::string& path) {
  return parse_score_vector(read_json_file(path));
}

inline Json to_json(const Error& e) {
  Json j{{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
  if (const auto* inc = dynamic_cast<const IncoherentError*>(&e)) {
    j["event_mask"] = inc->event_mask();
    j["discrepancy"] = num(inc->discrepancy());
  }
  return j;
}

inline Json to_json(const RuleReport& r) {
  Json inf = Json::array();
  for (const auto& p : r.infinite_score_probabilities) inf.push_back(nums(p.weights()));
  return Json{{"rule", r.name},
              {"domain", std::string(to_string(r.domain))},
              {"upper_bound", num(r.upper_bound)},
              {"resolution", r.resolution},
              {"grid_points", r.grid_points},
              {"infinite_score_probabilities", inf}};
}

inline Json to_json(const ProprietyReport& r) {
  Json j{{"rule", r.rule},
         {"mode", std::string(to_string(r.mode))},
         {"resolution", r.resolution},
         {"tol", num(r.tol)},
         {"passed", r.passed},
         {"min_margin", num(r.min_margin)},
         {"pairs_checked", r.pairs_checked},
         {"incoherent_credences", r.incoherent_credences},
         {"incoherent_min_gap", num(r.incoherent_min_gap)},
         {"seed", r.seed}};
  if (r.worst) {
    j["worst"] = Json{{"p", nums(r.worst->p)},
                      {"c", Json{{"coherent", r.worst->c.coherent}, {"values", nums(r.worst->c.values)}}},
                      {"gap", num(r.worst->gap)}};
  } else {
    j["worst"] = nullptr;
  }
  return j;
}

inline Json to_json(const SupportIdentityReport& r) {
  Json probes = Json::array();
  for (const auto& p : r.probes) {
    probes.push_back(Json{{"p", nums(p.p)},
                          {"support", num(p.support)},
                          {"self_score", num(p.self_score)},
                          {"discrepancy", num(p.discrepancy)},
                          {"flagged", p.flagged},
                          {"skipped", p.skipped}});
  }
  return Json{{"rule", r.rule},
              {"sample_size", r.sample_size},
              {"tol", num(r.tol)},
              {"max_discrepancy", num(r.max_discrepancy)},
              {"flagged", r.flagged},
              {"probes", probes}};
}

inline Json to_json(const LimitReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back(Json{{"index", s.index}, {"self_score", num(s.self_score)}});
  return Json{{"rule", r.rule},   {"target", nums(r.target)}, {"path", r.path},       {"limit", num(r.limit)},
              {"self_score", num(r.self_score)}, {"holds", r.holds}, {"gap", num(r.gap)}, {"tol", num(r.tol)},
              {"samples", samples}};
}

inline Json to_json(const NormalCertificate& c) {
  return Json{{"point", nums(c.point)}, {"normal", nums(c.normal)}, {"slack", num(c.slack)}, {"tol", num(c.tol)}};
}

inline Json to_json(const GapReport& r, bool with_faces = false) {
  Json j{{"rule", r.rule},
         {"resolution", r.resolution},
         {"sample_size", r.sample_size},
         {"directions", r.directions},
         {"face_count", r.faces.size()},
         {"max_gap", num(r.max_gap)},
         {"witness", nums(r.witness)},
         {"certificate", to_json(r.witness_certificate)}};
  if (with_faces) {
    Json faces = Json::array();
    for (const auto& f : r.faces) {
      faces.push_back(Json{{"direction", nums(f.direction)},
                           {"vertices", f.vertices},
                           {"sampled_points", f.sampled_points},
                           {"max_distance", num(f.max_distance)}});
    }
    j["faces"] = faces;
  }
  return j;
}

inline Json to_json(const DominatorResult& r) {
  Json j{{"rule", r.rule},         {"method", r.method},         {"credence", nums(r.credence)},
         {"z0", nums(r.z0)},       {"p", nums(r.p.weights())},   {"score", nums(r.score)},
         {"margins", nums(r.margins)}};
  if (r.trace) {
    j["trace"] = Json{{"resolution", r.trace->resolution},
                      {"attempted_resolutions", r.trace->attempted_resolutions},
                      {"z2", nums(r.trace->z2)},
                      {"z1", nums(r.trace->z1)},
                      {"z3", nums(r.trace->z3)},
                      {"chosen", nums(r.trace->chosen)},
                      {"candidates_scanned", r.trace->candidates_scanned},
                      {"bounded", r.trace->bounded}};
  }
  return j;
}

inline Json to_json(const WitnessBundle& w) {
  Json j{{"case", std::string(to_string(w.kind))}, {"rule", w.rule}, {"fill", nums(w.fill)}};
  if (w.kind == WitnessCase::SelfScoreLimit) {
    j["target"] = nums(w.target);
    j["limit"] = w.limit ? to_json(*w.limit) : Json(nullptr);
    j["alpha"] = num(w.alpha);
    j["alpha_upper"] = num(w.alpha_upper);
    j["path_value_at_10000"] = num(w.path_value);
  } else {
    j["gap"] = w.gap ? to_json(*w.gap) : Json(nullptr);
    j["z0"] = nums(w.z0);
    j["normal"] = nums(w.normal);
    j["epsilon"] = num(w.epsilon);
    j["delta"] = num(w.delta);
    j["in_ball"] = w.in_ball;
  }
  j["verification"] = Json{{"resolution", w.verify_k},
                           {"tol", num(w.verify_tol)},
                           {"quasi_strict_margin", num(w.quasi_strict_margin)},
                           {"propriety_passed", w.propriety_passed},
                           {"dominating_count", w.dominating_count},
                           {"verified", w.verified}};
  return j;
}

inline Json to_json(const ConditionBReport& r) {
  Json paths = Json::array();
  for (const auto& p : r.paths) {
    Json e{{"target", nums(p.target)}, {"holds", p.holds}};
    if (p.report) e["report"] = to_json(*p.report);
    if (!p.error.empty()) e["error"] = p.error;
    paths.push_back(std::move(e));
  }
  Json inf = Json::array();
  for (const auto& p : r.infinite_self_score_at) inf.push_back(nums(p));
  return Json{{"rule", r.rule},
              {"limit_holds", r.limit_holds},
              {"paths", paths},
              {"density_holds", r.density_holds},
              {"gap_tol", num(r.gap_tol)},
              {"gap", to_json(r.gap)},
              {"infinite_self_score", r.infinite_self_score},
              {"infinite_self_score_at", inf},
              {"holds", r.holds}};
}

}  // namespace scoring::io
