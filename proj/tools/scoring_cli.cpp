#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scoring/scoring.hpp"

namespace fs = std::filesystem;
using namespace scoring;
using io::Json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kFinding = 2;

struct Options {
  std::string rule = "brier";
  std::size_t outcomes = 2;
  std::size_t resolution = 200;
  double tol = 1e-9;
  std::uint64_t seed = 42;

  std::string credence;
  std::string credence_dir;
  std::string method = "pipeline";
  std::size_t max_k = 3200;

  std::string check = "all";
  std::string mode = "strict";

  std::size_t directions = 16;
  std::size_t face_samples = 20;
  double gap_tol = 0.1;
  bool faces = false;

  std::string witness_case = "bii";
  bool verify = false;
  std::size_t verify_k = 2000;
};

void emit(const Json& j) { std::cout << j.dump(2) << "\n"; }

ProprietyMode parse_mode(const std::string& s) {
  if (s == "proper") return ProprietyMode::Proper;
  if (s == "strict") return ProprietyMode::Strict;
  if (s == "quasi-strict") return ProprietyMode::QuasiStrict;
  fail(ErrorKind::BadInput, "unknown mode " + s);
}

int cmd_score(const Options& o) {
  const auto file = io::read_credence_file(o.credence);
  const ScoringRule rule = make_rule(o.rule, file.space.size());
  const ScoreVector s = evaluate(rule, file.credence);
  Json j{{"rule", rule.name()}, {"outcomes", file.space.labels()}, {"coherent", is_coherent(file.credence)},
         {"score", io::nums(s)}};
  if (is_coherent(file.credence)) {
    const Probability p = validate_probability(file.credence);
    j["p"] = io::nums(p.weights());
    j["expected_self_score"] = io::num(expected_score(p, s));
  }
  emit(j);
  return kOk;
}

int cmd_verify(const Options& o) {
  const ScoringRule rule = make_rule(o.rule, o.outcomes);
  Json j{{"rule", rule.name()}};
  bool ok = true;
  if (o.check == "all" || o.check == "propriety") {
    ProprietyOptions opt;
    opt.mode = parse_mode(o.mode);
    opt.resolution = o.resolution;
    opt.tol = o.tol;
    opt.seed = o.seed;
    const ProprietyReport r = check_propriety(rule, opt);
    ok = ok && r.passed;
    j["propriety"] = io::to_json(r);
  }
  if (o.check == "all" || o.check == "condition-b") {
    ConditionBConfig cfg;
    cfg.gap_k = o.resolution;
    cfg.gap.direction_count = o.directions;
    cfg.gap.face_samples = o.face_samples;
    cfg.gap_tol = o.gap_tol;
    const ConditionBReport r = check_condition_b(rule, cfg);
    ok = ok && r.holds;
    j["condition_b"] = io::to_json(r);
  }
  if (o.check != "all" && o.check != "propriety" && o.check != "condition-b") {
    fail(ErrorKind::BadInput, "unknown check " + o.check);
  }
  j["passed"] = ok;
  emit(j);
  return ok ? kOk : kFinding;
}

Json repair_one(const Options& o, const io::CredenceFile& file, bool& found) {
  found = false;
  try {
    DominatorResult r;
    if (o.method == "projection") {
      r = brier_projection(file.credence);
    } else if (o.method == "pipeline") {
      DominanceConfig cfg;
      cfg.max_k = o.max_k;
      cfg.tol = o.tol;
      r = find_dominating_probability(make_rule(o.rule, file.space.size()), file.credence, cfg);
    } else {
      fail(ErrorKind::BadInput, "unknown method " + o.method);
    }
    found = true;
    return io::to_json(r);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoDominator) throw;
    return io::to_json(e);
  }
}

int cmd_repair(const Options& o) {
  if (o.credence.empty() == o.credence_dir.empty()) {
    fail(ErrorKind::BadInput, "repair needs exactly one of --credence or --credence-dir");
  }
  if (!o.credence.empty()) {
    bool found = false;
    emit(repair_one(o, io::read_credence_file(o.credence), found));
    return found ? kOk : kFinding;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.credence_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  Json results = Json::array();
  std::size_t repaired = 0, failed = 0;
  for (const auto& f : files) {
    Json item{{"file", f.filename().string()}};
    try {
      bool found = false;
      item["result"] = repair_one(o, io::read_credence_file(f.string()), found);
      (found ? repaired : failed) += 1;
    } catch (const Error& e) {
      item["result"] = io::to_json(e);
      ++failed;
    }
    results.push_back(std::move(item));
  }
  emit(Json{{"method", o.method}, {"repaired", repaired}, {"failed", failed}, {"results", results}});
  return failed == 0 ? kOk : kFinding;
}

GapOptions gap_options(const Options& o) {
  GapOptions g;
  g.direction_count = o.directions;
  g.face_samples = o.face_samples;
  g.tol = o.tol;
  return g;
}

int cmd_gap(const Options& o) {
  const ScoringRule rule = make_rule(o.rule, o.outcomes);
  const GapReport r = density_gap(build_sample(rule, o.resolution), gap_options(o));
  Json j = io::to_json(r, o.faces);
  j["gap_tol"] = io::num(o.gap_tol);
  j["gap_found"] = r.max_gap > o.gap_tol;
  emit(j);
  return r.max_gap > o.gap_tol ? kFinding : kOk;
}

WitnessParams witness_params(const Options& o, const ScoringRule& rule) {
  WitnessParams p;
  if (o.witness_case == "bi") {
    p = rule.is<kinds::BoundaryBonus>() ? boundary_bonus_witness_params() : WitnessParams{};
    p.kind = WitnessCase::SelfScoreLimit;
    if (p.target.empty()) {
      p.target.assign(rule.outcomes(), 0.0);
      p.target[0] = 1.0;
    }
  } else if (o.witness_case == "bii") {
    p = rule.is<kinds::TwoCircle>() ? two_circle_witness_params() : WitnessParams{};
    p.kind = WitnessCase::Density;
    p.gap = gap_options(o);
    p.gap_tol = o.gap_tol;
  } else {
    fail(ErrorKind::BadInput, "--case must be bi or bii");
  }
  p.verify_k = o.verify_k;
  return p;
}

int cmd_witness(const Options& o, bool rule_given) {
  const std::string spec = rule_given ? o.rule : (o.witness_case == "bi" ? "boundary-bonus" : "two-circle");
  const ScoringRule rule = make_rule(spec, o.outcomes);
  WitnessBundle w = build_witness(rule, witness_params(o, rule));
  Json j = io::to_json(w);
  if (!o.verify) j.erase("verification");
  if (o.verify) j["summary"] = w.verified ? "VERIFIED" : "NOT VERIFIED";
  emit(j);
  return !o.verify || w.verified ? kOk : kFinding;
}

std::string csv_row(const std::string& role, std::span<const double> x) {
  std::string row = role;
  char buf[40];
  for (double v : x) {
    std::snprintf(buf, sizeof buf, ",%.10g", v);
    row += buf;
  }
  return row;
}

int cmd_figure(const Options& o, bool rule_given) {
  const ScoringRule rule = make_rule(rule_given ? o.rule : "two-circle", o.outcomes);
  const FiniteScoreSample sample = build_sample(rule, o.resolution);
  const GapReport gap = density_gap(sample, gap_options(o));
  std::string header = "role";
  for (std::size_t j = 1; j <= sample.dimension(); ++j) header += ",x" + std::to_string(j);
  std::cout << header << "\n";
  for (std::size_t i = 0; i < sample.size(); ++i) std::cout << csv_row("F", sample.point(i)) << "\n";
  // faces spanning a gap: the segment endpoints are the outermost face vertices
  for (const auto& f : gap.faces) {
    if (f.max_distance <= o.gap_tol) continue;
    std::cout << csv_row("hull_edge", sample.point(f.vertices.front())) << "\n";
    std::cout << csv_row("hull_edge", sample.point(f.vertices.back())) << "\n";
  }
  if (gap.max_gap > o.gap_tol) {
    Options wo = o;
    wo.witness_case = "bii";
    try {
      const WitnessBundle w = build_witness(rule, witness_params(wo, rule));
      std::cout << csv_row("witness", w.z0) << "\n";
      std::cout << csv_row("witness", w.fill.raw()) << "\n";
      std::cout << csv_row("normal", w.normal) << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoWitness) throw;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scoring rules: propriety checks, coherence repair, density gaps and witnesses"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool with_rule = true) {
    if (with_rule) sub->add_option("--rule", o.rule, "rule spec (brier, spherical, log, two-circle, ...)");
    sub->add_option("-n,--outcomes", o.outcomes, "outcome count for rules that take one")->check(CLI::Range(1, 16));
    sub->add_option("-k,--resolution", o.resolution, "grid resolution")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", o.seed, "seed for random test credences");
  };

  auto* score = app.add_subcommand("score", "score a credence file");
  common(score);
  score->add_option("--credence", o.credence, "credence JSON file")->required();

  auto* verify = app.add_subcommand("verify", "check propriety and condition (b)");
  common(verify);
  verify->add_option("--check", o.check, "all | propriety | condition-b");
  verify->add_option("--mode", o.mode, "proper | strict | quasi-strict");
  verify->add_option("--directions", o.directions, "probe directions for the density scan");
  verify->add_option("--gap-tol", o.gap_tol, "largest acceptable density gap");

  auto* repair = app.add_subcommand("repair", "find a probability whose score dominates an incoherent credence");
  common(repair);
  repair->add_option("--credence", o.credence, "credence JSON file");
  repair->add_option("--credence-dir", o.credence_dir, "directory of credence JSON files");
  repair->add_option("--method", o.method, "pipeline | projection");
  repair->add_option("--max-k", o.max_k, "largest grid resolution tried");

  auto* gap = app.add_subcommand("gap", "scan the density gap of the finite score set");
  common(gap);
  gap->add_option("--directions", o.directions, "probe directions");
  gap->add_option("--face-samples", o.face_samples, "points per face edge");
  gap->add_option("--gap-tol", o.gap_tol, "gap reported as a finding above this");
  gap->add_flag("--faces", o.faces, "include per-face records");

  auto* witness = app.add_subcommand("witness", "build a counterexample extension");
  common(witness);
  witness->add_option("--case", o.witness_case, "bi | bii")->check(CLI::IsMember({"bi", "bii"}));
  witness->add_flag("--verify", o.verify, "run the grid verification");
  witness->add_option("--verify-k", o.verify_k, "verification grid resolution");
  witness->add_option("--gap-tol", o.gap_tol, "density gap threshold");

  auto* figure = app.add_subcommand("figure", "CSV of sampled scores, gap edges and witness points");
  common(figure);
  figure->add_option("--gap-tol", o.gap_tol, "faces with larger gaps are emitted as hull edges");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit(Json{{"error", "BadInput"}, {"message", e.what()}});
    return kError;
  }

  try {
    if (*score) return cmd_score(o);
    if (*verify) return cmd_verify(o);
    if (*repair) return cmd_repair(o);
    if (*gap) return cmd_gap(o);
    if (*witness) return cmd_witness(o, witness->count("--rule") > 0);
    if (*figure) return cmd_figure(o, figure->count("--rule") > 0);
  } catch (const Error& e) {
    emit(io::to_json(e));
    return kError;
  } catch (const std::exception& e) {
    emit(Json{{"error", "BadInput"}, {"message", e.what()}});
    return kError;
  }
  return kError;
}
