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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

namespace synthmark {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("synthmark-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

void write_dataset(const Dataset& ds, const fs::path& csv_path, const fs::path& schema_path) {
  std::ofstream out(csv_path, std::ios::binary);
  write_csv(out, ds);
  write_text(schema_path, schema_to_json(ds.schema()).dump(2));
}

SynTableStore full_table_store(const Dataset& ds) {
  SynTableStore store(FetchPolicy::project_from_superset);
  store.put(ds);
  return store;
}

MeasureConfig quick_config(const Dataset& ds) {
  MeasureConfig cfg;
  cfg.marginal_count = 20;
  cfg.sampling_trials = 2;
  cfg.rules = parse_rules(nlohmann::json::parse(R"([
    {"colA": "EDU", "predA": {"op": "==", "value": "99"},
     "colB": "SEX", "predB": {"op": "non_null"}}])"));
  (void)ds;
  return cfg;
}

TEST(Store, WriteOpenRoundTrip) {
  const Dataset ds = testing::chained_categorical(1, 80, 3, 4);
  const auto store = testing::copies_store(ds, testing::subsets_up_to(ds.data_columns(), 2));
  TempDir dir;
  store.write(dir / "store", {{"complete", true}});
  const auto reopened = SynTableStore::open(dir / "store", ds.schema(), ds.encoding_ptr());
  ASSERT_EQ(reopened.keys(), store.keys());
  for (const auto& k : store.keys()) EXPECT_TRUE(reopened.load(k) == store.load(k)) << k;
  EXPECT_EQ(reopened.manifest().at("complete"), true);
}

TEST(Store, FetchPolicies) {
  const Dataset ds = testing::chained_categorical(2, 40, 3, 3);
  SynTableStore exact;
  exact.put(ds.project({"A", "B", "C"}));
  try {
    exact.fetch({"B", "A"});
    FAIL();
  } catch (const MissingTableError& e) {
    EXPECT_EQ(e.key(), "A+B");
    EXPECT_NE(std::string(e.what()).find("A+B"), std::string::npos);
  }
  SynTableStore projecting(FetchPolicy::project_from_superset);
  projecting.put(ds.project({"A", "B", "C"}));
  projecting.put(ds.project({"A", "B"}));
  EXPECT_EQ(*projecting.resolve({"B"}), "A+B");
  EXPECT_TRUE(projecting.fetch({"C", "A"}) == ds.project({"C", "A"}));
  EXPECT_THROW(parse_fetch_policy("nearest"), ValidationError);
}

TEST(Measure, IdentityReportIsPerfect) {
  const Dataset ds = testing::census_like(3, 500);
  const auto report = measure_report(ds, full_table_store(ds), quick_config(ds), "copy");
  const auto& s = report.at("summary");
  EXPECT_EQ(s.at("univariate").get<double>(), 0);
  EXPECT_EQ(s.at("correlation").get<double>(), 0);
  EXPECT_EQ(s.at("k_marginal").get<std::int64_t>(), 1000);
  EXPECT_LT(s.at("pmse").get<double>(), 1e-3);
  EXPECT_EQ(s.at("pca").get<double>(), 0);
  EXPECT_EQ(s.at("inconsistencies").get<std::int64_t>(), 0);
  EXPECT_EQ(report.at("metrics").at("privacy").at("full_match").at("percent").get<double>(),
            report.at("metrics").at("privacy").at("full_match").at("count").get<double>() / 5.0);
}

TEST(Measure, RegressionAndDeterminism) {
  const Dataset ds = testing::mixed_dataset(4, 300);
  auto cfg = MeasureConfig::from_json(nlohmann::json::parse(R"({
    "metrics": ["regression", "k_marginal"], "marginals": 5, "sampling_trials": 1,
    "regressions": [{"x": "X", "y": "Y", "groups": [
      {"label": "all"},
      {"label": "g2", "filters": [{"column": "G", "op": "==", "value": "g2"}]}]}]})"));
  const auto a = measure_report(ds, full_table_store(ds), cfg, "copy").dump(2);
  const auto b = measure_report(ds, full_table_store(ds), cfg, "copy").dump(2);
  EXPECT_EQ(a, b);
  const auto report = nlohmann::json::parse(a);
  EXPECT_EQ(report.at("summary").at("regression").get<double>(), 0);
  EXPECT_FALSE(report.at("summary").contains("pmse"));
  EXPECT_THROW(MeasureConfig::from_json(nlohmann::json::parse(R"({"metrics": ["speed"]})")),
               ValidationError);
}

TEST(Measure, MissingPairTableUnderExactPolicy) {
  const Dataset ds = testing::chained_categorical(5, 60, 3, 3);
  SynTableStore store;
  for (const auto& c : ds.data_columns()) store.put(ds.project({c}));
  MeasureConfig cfg;
  cfg.set_metrics({"correlation"});
  try {
    measure_report(ds, store, cfg, "x");
    FAIL();
  } catch (const MissingTableError& e) {
    EXPECT_EQ(e.key(), "A+B");
  }
}

nlohmann::json summary_report(const std::string& name, double km, double uni) {
  return {{"technique", name}, {"summary", {{"k_marginal", km}, {"univariate", uni}}}};
}

TEST(Compare, ImprovementFactors) {
  const auto out = compare_reports(
      {summary_report("sdx", 956, 2), summary_report("other", 801, 4),
       summary_report("pram", 700, 0)},
      "sdx");
  const auto& km = out.comparison.at("metrics").at("k_marginal").at("techniques");
  EXPECT_NEAR(km.at("other").at("improvement_factor").get<double>(), 199.0 / 44.0, 1e-12);
  EXPECT_NEAR(km.at("other").at("improvement_factor").get<double>(), 4.5, 0.05);
  EXPECT_EQ(km.at("sdx").at("improvement_factor").get<double>(), 1.0);
  const auto& uni = out.comparison.at("metrics").at("univariate").at("techniques");
  EXPECT_EQ(uni.at("pram").at("improvement_factor"), "-inf");
  EXPECT_DOUBLE_EQ(uni.at("other").at("improvement_factor").get<double>(), 2.0);
  EXPECT_NE(out.plot_csv.find("univariate,pram,0,-inf"), std::string::npos);
  EXPECT_TRUE(out.warnings.empty());

  nlohmann::json partial{{"technique", "lean"}, {"summary", {{"k_marginal", 900}}}};
  const auto mixed = compare_reports({summary_report("sdx", 956, 2), partial}, "sdx");
  EXPECT_FALSE(mixed.comparison.at("metrics").contains("univariate"));
  ASSERT_EQ(mixed.warnings.size(), 1u);
  EXPECT_THROW(compare_reports({partial, partial}, "lean"), ValidationError);
  EXPECT_THROW(compare_reports({summary_report("a", 1, 1), partial}, "zzz"), ValidationError);
}

TEST(Synthesize, SmallPlanAndUpToDateRerun) {
  TempDir dir;
  const Dataset ds = testing::mixed_dataset(6, 200).project({"G", "H", "X", "D"});
  write_dataset(ds, dir / "in.csv", dir / "schema.json");
  write_text(dir / "plan.json", R"([{"all_subsets_of_size": 1}, {"all_subsets_of_size": 2}])");
  SynthesizeOptions opt;
  opt.input = (dir / "in.csv").string();
  opt.schema = (dir / "schema.json").string();
  opt.plan = (dir / "plan.json").string();
  opt.store = (dir / "store").string();
  opt.seed = 3;
  std::ostringstream log;
  const auto first = cmd_synthesize(opt, log);
  EXPECT_EQ(first.tables, 10u);
  EXPECT_FALSE(first.up_to_date);
  const std::string before = read_bytes((dir / "store" / "G+X.csv").string());
  const auto second = cmd_synthesize(opt, log);
  EXPECT_TRUE(second.up_to_date);
  EXPECT_EQ(second.run_digest, first.run_digest);

  // Forced rebuild into a fresh directory reproduces the same bytes.
  opt.store = (dir / "again").string();
  cmd_synthesize(opt, log);
  EXPECT_EQ(read_bytes((dir / "again" / "G+X.csv").string()), before);
  EXPECT_EQ(read_bytes((dir / "again" / "manifest.json").string()),
            read_bytes((dir / "store" / "manifest.json").string()));

  write_text(dir / "bad.json", R"([["G", "NOPE"]])");
  opt.plan = (dir / "bad.json").string();
  try {
    cmd_synthesize(opt, log);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("NOPE"), std::string::npos);
  }
}

#if defined(SYNTHMARK_CLI)
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SYNTHMARK_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  TempDir dir;
  const Dataset ds = testing::census_like(7, 300);
  write_dataset(ds, dir / "in.csv", dir / "schema.json");
  write_text(dir / "plan.json", R"([{"all_subsets_of_size": 1}])");
  const std::string in = (dir / "in.csv").string();
  const std::string schema = (dir / "schema.json").string();
  const std::string store = (dir / "store").string();
  EXPECT_EQ(run_cli("synthesize --input " + in + " --schema " + schema + " --plan " +
                    (dir / "plan.json").string() + " --store " + store + " --seed 1"),
            0);
  const std::string measure =
      "measure --original " + in + " --schema " + schema + " --store " + store;
  // Pairs are needed for correlation but only single columns were made.
  EXPECT_EQ(run_cli(measure + " --metrics correlation --out " + (dir / "r.json").string()), 3);
  EXPECT_EQ(run_cli(measure + " --metrics univariate --out " + (dir / "r.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "r.json"));
  write_text(dir / "broken.json", "[{");
  EXPECT_EQ(run_cli(measure + " --rules " + (dir / "broken.json").string()), 2);
  EXPECT_EQ(run_cli(measure + " --metrics nonsense"), 2);
  EXPECT_EQ(run_cli("synthesize --input " + (dir / "missing.csv").string() + " --schema " +
                    schema + " --plan " + (dir / "plan.json").string() + " --store " + store),
            2);
  EXPECT_EQ(run_cli("frobnicate"), 2);
}
#endif

}  // namespace
}  // namespace synthmark
