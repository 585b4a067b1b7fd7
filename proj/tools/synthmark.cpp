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

#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "synthmark.hpp"

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace synthmark;
  CLI::App app{"synthmark: anonymized multi-table synthesis and utility/privacy measurement"};
  app.require_subcommand(1);

  SynthesizeOptions syn;
  std::string salt_hex;
  auto* s = app.add_subcommand("synthesize", "Synthesize a store of tables");
  s->add_option("--input", syn.input, "Original CSV")->required();
  s->add_option("--schema", syn.schema, "Schema JSON")->required();
  s->add_option("--plan", syn.plan, "Plan JSON (column combinations)")->required();
  s->add_option("--store", syn.store, "Output store directory")->required();
  s->add_option("--seed", syn.seed, "Seed for the default salt");
  s->add_option("--salt-hex", salt_hex, "Noise salt as hex");
  s->add_option("--avg-thresh", syn.avg_threshold, "Mean suppression threshold");
  s->add_option("--abs-thresh", syn.abs_threshold, "Hard suppression floor");
  s->add_option("--noise-sd", syn.noise_sd, "Noise standard deviation");
  s->add_option("--max-tree-dim", syn.max_tree_dim, "Widest tree per forest");
  s->add_option("--jobs", syn.jobs, "Worker threads");
#ifndef NDEBUG
  std::string dump_path;
  s->add_option("--debug-dump", dump_path,
                "Write node counts of every forest (debug builds only)");
#endif

  MeasureOptions meas;
  std::string store_dir, table_path, policy = "exact", metric_list, config,
                                     rules, attack;
  std::uint64_t seed = 0;
  auto* m = app.add_subcommand("measure", "Measure synthetic tables");
  m->add_option("--original", meas.original, "Original CSV")->required();
  m->add_option("--schema", meas.schema, "Schema JSON")->required();
  auto* store_opt = m->add_option("--store", store_dir, "Store directory");
  auto* table_opt = m->add_option("--table", table_path, "Single synthetic CSV");
  store_opt->excludes(table_opt);
  m->add_option("--policy", policy, "Fetch policy: exact|project")
      ->check(CLI::IsMember({"exact", "project"}));
  m->add_option("--technique", meas.technique, "Technique name in the report");
  m->add_option("--config", config, "Measurement config JSON");
  m->add_option("--metrics", metric_list, "Comma-separated metric names");
  m->add_option("--rules", rules, "Inconsistency rules JSON");
  m->add_option("--attack", attack, "Attack config JSON");
  auto* seed_opt = m->add_option("--seed", seed, "Seed for marginal sampling and the attack split");
  m->add_option("--out", meas.out, "Report JSON path")->required();

  CompareOptions cmp;
  auto* c = app.add_subcommand("compare", "Improvement factors across reports");
  c->add_option("reports", cmp.reports, "Report JSON files")->required();
  c->add_option("--reference", cmp.reference, "Reference technique")->required();
  c->add_option("--out", cmp.out, "Comparison JSON path")->required();
  c->add_option("--plot-csv", cmp.plot_csv, "Plot data CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) {
      if (!salt_hex.empty()) syn.salt_hex = salt_hex;
#ifndef NDEBUG
      if (!dump_path.empty()) syn.debug_dump = dump_path;
#endif
      cmd_synthesize(syn, std::cout);
    } else if (*m) {
      if (!store_dir.empty()) meas.store = store_dir;
      if (!table_path.empty()) meas.table = table_path;
      meas.policy = parse_fetch_policy(policy);
      if (!config.empty()) meas.config = config;
      if (!metric_list.empty()) meas.metrics = split_list(metric_list);
      if (!rules.empty()) meas.rules = rules;
      if (!attack.empty()) meas.attack = attack;
      if (seed_opt->count() > 0) meas.seed = seed;
      cmd_measure(meas);
      std::cout << "wrote " << meas.out << "\n";
    } else if (*c) {
      cmd_compare(cmp, std::cerr);
      std::cout << "wrote " << cmp.out << "\n";
    }
  } catch (const MissingTableError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DegenerateInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
