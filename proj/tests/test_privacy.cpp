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

#include <random>

#include "support.hpp"

namespace synthmark {
namespace {

using testing::make_dataset;

TEST(PrecisionImprovement, Arithmetic) {
  EXPECT_DOUBLE_EQ(precision_improvement(1, 0.5).value, 1.0);
  EXPECT_DOUBLE_EQ(precision_improvement(0.25, 0.5).value, -0.5);
  EXPECT_DOUBLE_EQ(precision_improvement(0.4, 0.4).value, 0);
  const auto flat = precision_improvement(0.7, 1.0);
  EXPECT_TRUE(flat.flagged);
  EXPECT_EQ(flat.value, 0);
  EXPECT_EQ(precision_improvement(0.9, 0.5).classification, "weak anonymity");
  EXPECT_EQ(precision_improvement(0.6, 0.5).classification, "strong anonymity");
  EXPECT_EQ(precision_improvement(0.3, 0.5).classification, "no privacy loss");
  double prev = -1e9;
  for (double p = 0; p <= 1.0001; p += 0.05) {
    const double pi = precision_improvement(p, 0.3).value;
    EXPECT_GT(pi, prev);
    EXPECT_LE(pi, 1 + 1e-12);
    prev = pi;
  }
}

TEST(Attack, SelfMatchAndDisjoint) {
  const Dataset ds = testing::census_like(1, 300);
  const auto& qi = testing::census_qi();
  const auto self = attack_target(ds, ds, qi, "INC");
  std::map<std::vector<std::string>, int> tuples;
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    std::vector<std::string> t;
    for (const auto& c : qi) t.push_back(ds.cell_text(r, ds.require(c)));
    ++tuples[t];
  }
  std::size_t unique = 0;
  for (const auto& [t, n] : tuples) unique += n == 1 ? 1 : 0;
  ASSERT_TRUE(self.precision);
  EXPECT_EQ(*self.precision, 1.0);
  EXPECT_DOUBLE_EQ(self.coverage, static_cast<double>(unique) / 300.0);

  std::vector<std::vector<std::string>> other;
  for (int i = 0; i < 20; ++i) {
    other.push_back({"9", "99", "99", "999", "9", "9", "0", "0", "0"});
  }
  const auto none = attack_target(ds, make_dataset(ds.schema(), other), qi, "INC");
  EXPECT_EQ(none.coverage, 0);
  EXPECT_FALSE(none.precision);
  EXPECT_TRUE(none.flagged);
}

TEST(Attack, MatchesEnumerationOracle) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> v(0, 2);
  const std::vector<std::string> qi{"A", "B"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<std::string>> o, s;
    for (int i = 0; i < 20; ++i) {
      o.push_back({std::to_string(v(gen)), std::to_string(v(gen)), std::to_string(v(gen))});
      s.push_back({std::to_string(v(gen)), std::to_string(v(gen)), std::to_string(v(gen))});
    }
    const Dataset od = make_dataset(testing::categorical_schema(3), o);
    const Dataset sd = make_dataset(testing::categorical_schema(3), s);
    const auto got = attack_target(od, sd, qi, "C");
    const auto want = testing::brute_attack(od, sd, qi, "C");
    ASSERT_EQ(got.match_count, want.predictions);
    ASSERT_EQ(got.correct, want.correct);
    EXPECT_DOUBLE_EQ(got.coverage, static_cast<double>(want.predictions) / 20.0);
  }
}

TEST(Baseline, FunctionalAndIndependentTargets) {
  const Dataset ds = testing::census_like(2, 1000);
  const auto& qi = testing::census_qi();
  EXPECT_GE(baseline_precision(ds, qi, "DENS", 0.5, 3), 0.95);
  const double p = baseline_precision(ds, qi, "COIN", 0.5, 3);
  const double sigma = std::sqrt(0.25 * 0.75 / 500.0);
  EXPECT_NEAR(p, 0.25, 3 * sigma + 0.02);
  EXPECT_EQ(baseline_precision(ds, qi, "COIN", 0.5, 3), p);
  EXPECT_THROW(baseline_precision(ds.select_rows(std::vector<std::size_t>{0}), qi, "COIN",
                                  0.5, 3),
               DegenerateInputError);
}

TEST(Attack, ConfigValidation) {
  const Dataset ds = testing::census_like(3, 50);
  AttackConfig cfg;
  cfg.qi = {"SEX", "ZZZ"};
  EXPECT_THROW(cfg.resolve(ds.schema()), ValidationError);
  cfg.qi = {"SEX", "INC"};
  cfg.targets = {"INC"};
  EXPECT_THROW(cfg.resolve(ds.schema()), ValidationError);
  AttackConfig defaults;
  defaults.resolve(ds.schema());
  // Only the default quasi-identifiers present in the table are kept.
  EXPECT_EQ(defaults.qi.size(), 6u);
  EXPECT_EQ(defaults.targets, (std::vector<std::string>{"INC", "DENS", "COIN"}));
}

TEST(Attack, DeterministicOnSynthesizedStore) {
  const Dataset ds = testing::census_like(4, 600);
  AnonParams p;
  p.salt = bytes_from_hex("a1b2");
  SynthesisPlan plan;
  auto cols = testing::census_qi();
  cols.push_back("INC");
  plan.add(cols);
  const auto store = run_plan(ds, plan, p);
  AttackConfig cfg;
  cfg.qi = testing::census_qi();
  cfg.targets = {"INC"};
  cfg.seed = 7;
  const auto a = qi_attack(ds, store, cfg);
  const auto b = qi_attack(ds, store, cfg);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].match_count, b[0].match_count);
  EXPECT_EQ(a[0].correct, b[0].correct);
  EXPECT_EQ(a[0].baseline, b[0].baseline);
  if (a[0].improvement) EXPECT_LT(a[0].improvement->value, 0.5);
}

TEST(FullMatch, OracleAndEdgeCases) {
  const Dataset ds = testing::census_like(5, 200);
  std::vector<std::vector<std::string>> other;
  for (int i = 0; i < 10; ++i) other.push_back({"x", "x", "x", "x", "x", "x", "x", "x", "x"});
  EXPECT_EQ(full_match_count(ds, make_dataset(ds.schema(), other)).count, 0u);

  std::mt19937_64 gen(8);
  std::uniform_int_distribution<int> v(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::vector<std::string>> o, s;
    for (int i = 0; i < 30; ++i) {
      o.push_back({std::to_string(v(gen)), std::to_string(v(gen)), std::to_string(v(gen)),
                   std::to_string(v(gen))});
      s.push_back({std::to_string(v(gen)), std::to_string(v(gen)), std::to_string(v(gen)),
                   std::to_string(v(gen))});
    }
    auto uniques = [](const std::vector<std::vector<std::string>>& rows) {
      std::map<std::vector<std::string>, int> n;
      for (const auto& r : rows) ++n[r];
      std::set<std::vector<std::string>> out;
      for (const auto& [r, c] : n) {
        if (c == 1) out.insert(r);
      }
      return out;
    };
    const auto uo = uniques(o), us = uniques(s);
    std::vector<std::vector<std::string>> both;
    std::set_intersection(uo.begin(), uo.end(), us.begin(), us.end(), std::back_inserter(both));
    const auto schema = testing::categorical_schema(4);
    const auto got = full_match_count(make_dataset(schema, o), make_dataset(schema, s));
    EXPECT_EQ(got.count, both.size());
    EXPECT_DOUBLE_EQ(got.percent, 100.0 * static_cast<double>(both.size()) / 30.0);
  }

  std::vector<std::vector<std::string>> distinct;
  for (int i = 0; i < 25; ++i) distinct.push_back({std::to_string(i), "a"});
  const Dataset d = make_dataset(testing::categorical_schema(2), distinct);
  EXPECT_EQ(full_match_count(d, d).count, 25u);
  EXPECT_DOUBLE_EQ(full_match_count(d, d).percent, 100.0);
  EXPECT_THROW(full_match_count(d, d.project({"A"})), ValidationError);
}

}  // namespace
}  // namespace synthmark
