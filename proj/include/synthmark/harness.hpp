// Copyright 2026 The Synthmark Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthmark/csv.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/forest.hpp"
#include "synthmark/metrics.hpp"
#include "synthmark/microdata.hpp"
#include "synthmark/privacy.hpp"
#include "synthmark/prf.hpp"
#include "synthmark/stats.hpp"
#include "synthmark/store.hpp"

namespace synthmark {

inline constexpr int kStoreFormat = 1;

// ---------------------------------------------------------------------------
// JSON helpers

// Doubles as JSON; infinities become the strings "inf" / "-inf" and NaN
// becomes null, since JSON has no literal for either.
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline nlohmann::json json_number(const std::optional<double>& v) {
  return v ? json_number(*v) : nlohmann::json(nullptr);
}

inline double number_from_json(const nlohmann::json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw ValidationError("expected a number, got '" + s + "'");
  }
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return v.get<double>();
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::filesystem::path& path,
                       const std::string& text) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
}

// Loads a CSV holding any subset of the schema's columns (a synthetic table
// usually has no entity column).
inline Dataset load_table(const std::string& path, const Schema& schema,
                          const ColumnEncoding* base) {
  auto records = csv::read_file(path);
  if (records.empty()) throw ValidationError(path + ": missing header row");
  const auto header = records.front();
  Schema sub;
  for (const auto& name : header) {
    auto it = std::find_if(schema.begin(), schema.end(),
                           [&](const auto& c) { return c.name == name; });
    if (it == schema.end()) {
      throw ValidationError(path + ": column '" + name +
                            "' is not in the schema");
    }
    sub.push_back(*it);
  }
  return dataset_from_records(
      sub, header, std::span<const csv::Record>(records).subspan(1), base);
}

// ---------------------------------------------------------------------------
// Perfect scores, one per comparable metric. Every summary value in a
// report is measured against these.

inline const std::map<std::string, double>& perfect_scores() {
  static const std::map<std::string, double> scores{
      {"univariate", 0},      {"correlation", 0}, {"k_marginal", 1000},
      {"regression", 0},      {"pmse", 0},        {"pca", 0},
      {"inconsistencies", 0},
  };
  return scores;
}

inline const std::vector<std::string>& all_metrics() {
  static const std::vector<std::string> names{
      "univariate", "correlation", "k_marginal",      "regression",
      "pmse",       "pca",         "inconsistencies", "privacy"};
  return names;
}

// ---------------------------------------------------------------------------
// Measurement configuration

struct RegressionSpec {
  std::string x;
  std::string y;
  std::vector<GroupFilter> groups;
};

struct MeasureConfig {
  std::set<std::string> metrics{all_metrics().begin(), all_metrics().end()};
  int bins = 100;
  std::size_t marginal_count = 232;
  std::uint64_t seed = 0;
  int sampling_trials = 5;
  std::vector<double> sampling_rates = default_sampling_rates();
  std::vector<RegressionSpec> regressions;
  std::vector<InconsistencyRule> rules;
  std::optional<AttackConfig> attack;
  PmseOptions pmse;

  void set_metrics(const std::vector<std::string>& names) {
    metrics.clear();
    for (const auto& n : names) {
      if (std::find(all_metrics().begin(), all_metrics().end(), n) ==
          all_metrics().end()) {
        throw ValidationError("unknown metric '" + n + "'");
      }
      metrics.insert(n);
    }
  }
  bool enabled(const std::string& m) const { return metrics.contains(m); }

  // Optional keys: metrics, bins, marginals, seed, sampling_trials,
  // sampling_rates, regressions, rules, attack.
  static MeasureConfig from_json(const nlohmann::json& doc) {
    MeasureConfig cfg;
    try {
      if (doc.contains("metrics")) {
        cfg.set_metrics(doc.at("metrics").get<std::vector<std::string>>());
      }
      if (doc.contains("bins")) cfg.bins = doc.at("bins").get<int>();
      if (doc.contains("marginals")) {
        cfg.marginal_count = doc.at("marginals").get<std::size_t>();
      }
      if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
      if (doc.contains("sampling_trials")) {
        cfg.sampling_trials = doc.at("sampling_trials").get<int>();
      }
      if (doc.contains("sampling_rates")) {
        cfg.sampling_rates =
            doc.at("sampling_rates").get<std::vector<double>>();
      }
      for (const auto& r : doc.value("regressions", nlohmann::json::array())) {
        RegressionSpec spec;
        spec.x = r.at("x").get<std::string>();
        spec.y = r.at("y").get<std::string>();
        for (const auto& g : r.value("groups", nlohmann::json::array())) {
          GroupFilter f;
          f.label = g.at("label").get<std::string>();
          for (const auto& p : g.value("filters", nlohmann::json::array())) {
            f.predicates.push_back(
                Predicate::from_json(p.at("column").get<std::string>(), p));
          }
          spec.groups.push_back(std::move(f));
        }
        cfg.regressions.push_back(std::move(spec));
      }
      if (doc.contains("rules")) cfg.rules = parse_rules(doc.at("rules"));
      if (doc.contains("attack")) {
        cfg.attack = AttackConfig::from_json(doc.at("attack"));
      }
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("measure config: ") + e.what());
    }
    if (cfg.bins < 1) throw ValidationError("measure config: bins < 1");
    return cfg;
  }
};

// ---------------------------------------------------------------------------
// Report assembly

namespace detail {

inline std::vector<std::string> regression_columns(const RegressionSpec& r) {
  std::vector<std::string> cols{r.x, r.y};
  for (const auto& g : r.groups) {
    for (const auto& p : g.predicates) cols.push_back(p.column);
  }
  return canonical_columns(cols);
}

inline nlohmann::json median_of(const std::vector<double>& values) {
  if (values.empty()) return nullptr;
  return json_number(stats::median(values));
}

}  // namespace detail

// Runs the enabled metrics against the store and returns the report. Every
// metric reads its synthetic table through store.fetch, so the fetch policy
// decides between exact and projected tables.
inline nlohmann::json measure_report(const Dataset& original,
                                     const SynTableStore& store,
                                     const MeasureConfig& cfg,
                                     const std::string& technique) {
  using nlohmann::json;
  const auto columns = original.data_columns();
  json metrics = json::object();
  json summary = json::object();
  json warnings = json::array();

  if (cfg.enabled("univariate")) {
    json entries = json::array();
    std::vector<double> comp;
    for (const auto& c : columns) {
      const Dataset syn = store.fetch({c});
      for (const auto& e : univariate_errors(original, syn, c, cfg.bins)) {
        entries.push_back({{"column", e.column},
                           {"value", e.value},
                           {"count_original", e.count_original},
                           {"count_synthetic", e.count_synthetic},
                           {"abs_error", e.abs_error},
                           {"rel_error", json_number(e.rel_error)},
                           {"composite_error", e.composite_error}});
        comp.push_back(e.composite_error);
      }
    }
    metrics["univariate"] = {{"entries", entries},
                             {"median_composite_error", detail::median_of(comp)}};
    summary["univariate"] = detail::median_of(comp);
  }

  if (cfg.enabled("correlation") && columns.size() >= 2) {
    json pairs = json::array();
    std::vector<double> diffs;
    for (const auto& d : correlation_diffs(original, store, columns)) {
      pairs.push_back({{"columns", {d.column_a, d.column_b}},
                       {"tau_original", d.tau_original},
                       {"tau_synthetic", d.tau_synthetic},
                       {"diff", d.diff},
                       {"flagged", d.flagged}});
      if (!d.flagged) diffs.push_back(d.diff);
    }
    metrics["correlation"] = {{"pairs", pairs},
                              {"median_diff", detail::median_of(diffs)}};
    summary["correlation"] = detail::median_of(diffs);
  }

  if (cfg.enabled("k_marginal")) {
    const std::size_t k = std::min<std::size_t>(3, columns.size());
    const auto marginals =
        sample_marginals(columns, k, cfg.marginal_count, cfg.seed);
    const auto km = k_marginal_score(original, store, marginals, cfg.bins);
    json sets = json::array();
    for (const auto& m : km.marginals) {
      sets.push_back({{"columns", m.columns},
                      {"density_diff", m.density_diff},
                      {"score", m.score}});
    }
    json out{{"marginals", sets},
             {"score", km.score},
             {"mean_score", km.mean_score}};
    if (cfg.sampling_trials > 0) {
      const auto se = sampling_equivalence(
          original, static_cast<double>(km.score), marginals,
          cfg.sampling_rates, cfg.sampling_trials, cfg.seed, cfg.bins);
      json curve = json::array();
      for (std::size_t i = 0; i < se.rates.size(); ++i) {
        curve.push_back({{"rate", se.rates[i]}, {"mean_score", se.mean_scores[i]}});
      }
      out["sampling_curve"] = curve;
      out["sampling_equivalent"] = se.equivalent_rate;
    }
    metrics["k_marginal"] = out;
    summary["k_marginal"] = km.score;
  }

  if (cfg.enabled("regression") && !cfg.regressions.empty()) {
    json results = json::array();
    std::vector<double> errors;
    for (const auto& spec : cfg.regressions) {
      const Dataset syn = store.fetch(detail::regression_columns(spec));
      for (const auto& r :
           regression_slope_error(original, syn, spec.x, spec.y, spec.groups)) {
        results.push_back({{"x", spec.x},
                           {"y", spec.y},
                           {"group", r.label},
                           {"slope_original", r.slope_original},
                           {"slope_synthetic", json_number(r.slope_synthetic)},
                           {"error", json_number(r.error)},
                           {"rows_original", r.rows_original},
                           {"rows_synthetic", r.rows_synthetic},
                           {"flagged", r.flagged}});
        if (!r.flagged && r.error) errors.push_back(*r.error);
      }
    }
    metrics["regression"] = {{"results", results},
                             {"median_error", detail::median_of(errors)}};
    summary["regression"] = detail::median_of(errors);
  }

  if (cfg.enabled("pmse")) {
    std::vector<Dataset> tables;
    for (const auto& [key, e] : store.entries()) tables.push_back(store.load(key));
    const auto r = pmse(original, tables, cfg.pmse);
    json per = json::array();
    for (const auto& t : r.tables) {
      per.push_back({{"columns", t.columns},
                     {"pmse", t.pmse},
                     {"synthetic_fraction", t.synthetic_fraction}});
    }
    metrics["pmse"] = {{"tables", per}, {"average", r.average}};
    summary["pmse"] = r.average;
  }

  if (cfg.enabled("pca")) {
    try {
      const auto r = pca_compare(original, store.fetch(columns));
      json comps = json::array();
      for (const auto& c : r.components) {
        comps.push_back({{"features", c.features},
                         {"loadings", c.loadings},
                         {"eigenvalue", c.eigenvalue},
                         {"ks", c.ks}});
      }
      metrics["pca"] = {{"components", comps}, {"ks_score", r.ks_score}};
      summary["pca"] = r.ks_score;
    } catch (const DegenerateInputError& e) {
      metrics["pca"] = {{"skipped", e.what()}};
    }
  }

  if (cfg.enabled("inconsistencies") && !cfg.rules.empty()) {
    const auto r = count_inconsistencies(store, cfg.rules, original.schema());
    json rules = json::array();
    for (const auto& c : r.rules) {
      rules.push_back({{"name", c.rule.name},
                       {"colA", c.rule.a.column},
                       {"predA", c.rule.a.to_json()},
                       {"colB", c.rule.b.column},
                       {"predB", c.rule.b.to_json()},
                       {"count", c.count}});
      if (count_violations(original, c.rule) > 0) {
        warnings.push_back("rule '" + c.rule.name +
                           "' is violated by the original data");
      }
    }
    metrics["inconsistencies"] = {{"rules", rules},
                                  {"violated_rules", r.violated_rules},
                                  {"violating_rows", r.violating_rows}};
    summary["inconsistencies"] = r.violated_rules;
  }

  if (cfg.enabled("privacy")) {
    AttackConfig attack = cfg.attack.value_or(AttackConfig{});
    if (!cfg.attack) attack.seed = cfg.seed;
    bool configured = true;
    try {
      attack.resolve(original.schema());
    } catch (const ValidationError&) {
      if (cfg.attack) throw;
      configured = false;  // no default quasi-identifiers in this schema
    }
    if (configured && !attack.targets.empty()) {
      json attacks = json::array();
      std::vector<double> pis;
      for (const auto& r : qi_attack(original, store, attack)) {
        json a{{"target", r.target},
               {"precision", json_number(r.precision)},
               {"baseline", r.baseline},
               {"coverage", r.coverage},
               {"match_count", r.match_count},
               {"flagged", r.flagged}};
        if (r.improvement) {
          a["improvement"] = json_number(r.improvement->value);
          a["improvement_flagged"] = r.improvement->flagged;
          a["classification"] = r.improvement->classification;
          if (!r.improvement->flagged) pis.push_back(r.improvement->value);
        } else {
          a["improvement"] = nullptr;
        }
        attacks.push_back(std::move(a));
      }
      const auto full = full_match_count(original, store.fetch(columns));
      metrics["privacy"] = {{"config", attack.to_json()},
                            {"attacks", attacks},
                            {"median_improvement", detail::median_of(pis)},
                            {"full_match", {{"count", full.count},
                                            {"percent", full.percent}}}};
    } else {
      metrics["privacy"] = {{"skipped", "no quasi-identifiers configured"}};
    }
  }

  return {{"technique", technique},
          {"rows_original", original.row_count()},
          {"metrics", metrics},
          {"summary", summary},
          {"warnings", warnings}};
}

// ---------------------------------------------------------------------------
// Comparison

struct ComparisonOutput {
  nlohmann::json comparison;
  std::string plot_csv;  // measure,technique,value,improvement_factor
  std::vector<std::string> warnings;
};

// Improvement factors of every report against the reference report, over
// the summary metrics that all reports share.
inline ComparisonOutput compare_reports(const std::vector<nlohmann::json>& reports,
                                        const std::string& reference) {
  if (reports.size() < 2) {
    throw ValidationError("compare: need at least two reports");
  }
  std::map<std::string, const nlohmann::json*> by_name;
  for (const auto& r : reports) {
    const auto name = r.at("technique").get<std::string>();
    if (!by_name.emplace(name, &r).second) {
      throw ValidationError("compare: technique '" + name + "' appears twice");
    }
  }
  if (!by_name.contains(reference)) {
    throw ValidationError("compare: reference '" + reference + "' not found");
  }
  ComparisonOutput out;
  std::set<std::string> shared;
  bool first = true;
  std::set<std::string> every;
  for (const auto& [name, r] : by_name) {
    std::set<std::string> have;
    for (const auto& [m, v] : r->at("summary").items()) {
      if (perfect_scores().contains(m) && !v.is_null()) have.insert(m);
    }
    every.insert(have.begin(), have.end());
    if (first) {
      shared = have;
      first = false;
    } else {
      std::set<std::string> both;
      std::set_intersection(shared.begin(), shared.end(), have.begin(),
                            have.end(), std::inserter(both, both.end()));
      shared = std::move(both);
    }
  }
  for (const auto& m : every) {
    if (!shared.contains(m)) {
      out.warnings.push_back("metric '" + m +
                             "' is not in every report; skipped");
    }
  }

  std::ostringstream csv_out;
  csv::write_record(csv_out,
                    {"measure", "technique", "value", "improvement_factor"});
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& m : shared) {
    const double perfect = perfect_scores().at(m);
    const double ref =
        number_from_json(by_name.at(reference)->at("summary").at(m));
    nlohmann::json techniques = nlohmann::json::object();
    for (const auto& [name, r] : by_name) {
      const double value = number_from_json(r->at("summary").at(m));
      const auto f = improvement_factor(perfect, ref, value);
      techniques[name] = {{"value", json_number(value)},
                          {"delta", json_number(f.delta_alternative)},
                          {"improvement_factor", json_number(f.value)}};
      csv::write_record(csv_out, {m, name, detail::format_real(value),
                                  format_improvement(f.value)});
    }
    metrics[m] = {{"perfect", perfect}, {"techniques", techniques}};
  }
  out.comparison = {{"reference", reference},
                    {"metrics", metrics},
                    {"warnings", out.warnings}};
  out.plot_csv = csv_out.str();
  return out;
}

// ---------------------------------------------------------------------------
// Commands

struct SynthesizeOptions {
  std::string input;
  std::string schema;
  std::string plan;
  std::string store;
  std::optional<std::string> salt_hex;
  std::uint64_t seed = 0;
  double avg_threshold = 5.0;
  std::int64_t abs_threshold = 3;
  double noise_sd = 1.4;
  int max_tree_dim = 4;
  int jobs = 1;
  std::optional<std::string> debug_dump;  // forest dump, for testing only
};

struct SynthesizeResult {
  bool up_to_date = false;
  std::size_t tables = 0;
  std::string run_digest;
};

// Salt used when none is given: a digest of the input bytes and the seed,
// so reruns over the same input stay sticky.
inline Bytes default_salt(std::string_view input_bytes, std::uint64_t seed) {
  KeyWriter w;
  w.str("synthmark-default-salt").str(input_bytes).u64(seed);
  const auto d = digest256(w.bytes());
  return Bytes(d.begin(), d.end());
}

inline SynthesizeResult cmd_synthesize(const SynthesizeOptions& opt,
                                       std::ostream& log) {
  const Schema schema = load_schema(opt.schema);
  const std::string input_bytes = read_bytes(opt.input);
  const Dataset ds = load_csv(opt.input, schema);
  const SynthesisPlan plan = parse_plan(read_json_file(opt.plan), schema);
  if (opt.max_tree_dim < 2) throw ValidationError("max-tree-dim must be >= 2");

  AnonParams params;
  params.avg_suppress_threshold = opt.avg_threshold;
  params.abs_suppress_threshold = opt.abs_threshold;
  params.noise_sd = opt.noise_sd;
  params.salt = opt.salt_hex ? bytes_from_hex(*opt.salt_hex)
                             : default_salt(input_bytes, opt.seed);
  params.validate();

  KeyWriter w;
  w.u64(kStoreFormat).str(hex_string(digest256(input_bytes)));
  w.str(schema_to_json(schema).dump()).str(params.params_hash());
  w.raw(digest256(params.salt)).i64(opt.max_tree_dim);
  for (const auto& combo : plan.combinations) w.str(combination_key(combo));
  SynthesizeResult result;
  result.run_digest = hex_string(digest256(w.bytes()));

  const std::filesystem::path dir(opt.store);
  const auto manifest_path = dir / "manifest.json";
  if (!opt.debug_dump && std::filesystem::exists(manifest_path)) {
    try {
      const auto manifest = read_json_file(manifest_path.string());
      if (manifest.value("run_digest", "") == result.run_digest &&
          manifest.value("complete", false)) {
        const auto store = SynTableStore::open(dir, schema, ds.encoding_ptr());
        result.up_to_date = true;
        result.tables = store.size();
        log << "up-to-date: " << result.tables << " tables in " << dir.string()
            << "\n";
        return result;
      }
    } catch (const ValidationError&) {
      // Unreadable or inconsistent store: rebuild it.
    }
  }

  RunOptions run;
  run.max_tree_dim = opt.max_tree_dim;
  run.jobs = opt.jobs;
  run.on_table = [&log](const std::string& key, double secs) {
    log << "  " << key << ": " << secs << " s\n";
  };
  nlohmann::json extra{{"format", kStoreFormat},
                       {"run_digest", result.run_digest},
                       {"params_hash", params.params_hash()},
                       {"salt_fingerprint", params.salt_fingerprint()},
                       {"params",
                        {{"avg_suppress_threshold", params.avg_suppress_threshold},
                         {"abs_suppress_threshold", params.abs_suppress_threshold},
                         {"noise_sd", params.noise_sd},
                         {"max_tree_dim", opt.max_tree_dim}}}};
  const auto start = std::chrono::steady_clock::now();
  SynTableStore store;
  try {
    run_plan(ds, plan, params, run, store);
  } catch (...) {
    extra["complete"] = false;
    store.write(dir, extra);
    throw;
  }
  extra["complete"] = true;
  store.write(dir, extra);
  result.tables = store.size();
  const double total = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  log << "synthesized " << result.tables << " tables (" << plan.total_columns()
      << " columns) in " << total << " s\n";

  if (opt.debug_dump) {
    TreeBuilder builder(ds, params);
    TreeCache cache(builder);
    nlohmann::json dump = nlohmann::json::object();
    for (const auto& combo : plan.combinations) {
      if (combo.size() > static_cast<std::size_t>(opt.max_tree_dim)) continue;
      dump.update(forest_debug_dump(build_forest(cache, combo, opt.max_tree_dim)));
    }
    write_text(*opt.debug_dump, dump.dump(2) + "\n");
  }
  return result;
}

struct MeasureOptions {
  std::string original;
  std::string schema;
  std::optional<std::string> store;  // store directory
  std::optional<std::string> table;  // or one synthetic CSV
  std::string technique = "synthetic";
  FetchPolicy policy = FetchPolicy::exact;
  std::optional<std::string> config;
  std::optional<std::vector<std::string>> metrics;
  std::optional<std::string> rules;
  std::optional<std::string> attack;
  std::optional<std::uint64_t> seed;
  std::string out;
};

inline nlohmann::json cmd_measure(const MeasureOptions& opt) {
  const Schema schema = load_schema(opt.schema);
  const Dataset original = load_csv(opt.original, schema);
  MeasureConfig cfg = opt.config ? MeasureConfig::from_json(read_json_file(*opt.config))
                                 : MeasureConfig{};
  if (opt.metrics) cfg.set_metrics(*opt.metrics);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.rules) cfg.rules = parse_rules(read_json_file(*opt.rules));
  if (opt.attack) cfg.attack = AttackConfig::from_json(read_json_file(*opt.attack));

  if (opt.store.has_value() == opt.table.has_value()) {
    throw ValidationError("measure: give exactly one of --store and --table");
  }
  SynTableStore store;
  if (opt.store) {
    store = SynTableStore::open(*opt.store, schema, original.encoding_ptr(),
                                opt.policy);
  } else {
    // A single table answers every column set by projection.
    store = SynTableStore(FetchPolicy::project_from_superset);
    store.put(load_table(*opt.table, schema, &original.encoding()));
  }
  const auto report = measure_report(original, store, cfg, opt.technique);
  if (!opt.out.empty()) write_text(opt.out, report.dump(2) + "\n");
  return report;
}

struct CompareOptions {
  std::vector<std::string> reports;
  std::string reference;
  std::string out;
  std::string plot_csv;
};

inline ComparisonOutput cmd_compare(const CompareOptions& opt,
                                    std::ostream& log) {
  std::vector<nlohmann::json> reports;
  for (const auto& path : opt.reports) reports.push_back(read_json_file(path));
  auto out = compare_reports(reports, opt.reference);
  for (const auto& w : out.warnings) log << "warning: " << w << "\n";
  if (!opt.out.empty()) write_text(opt.out, out.comparison.dump(2) + "\n");
  if (!opt.plot_csv.empty()) write_text(opt.plot_csv, out.plot_csv);
  return out;
}

}  // namespace synthmark
