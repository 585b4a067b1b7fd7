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

#include <cmath>
#include <random>

#include "support.hpp"

namespace synthmark {
namespace {

using testing::make_dataset;

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

// Rebuilds `ds` with one column's values permuted across rows.
Dataset permute_column(const Dataset& ds, const std::string& col, std::uint64_t seed) {
  std::vector<std::size_t> perm(ds.row_count());
  std::iota(perm.begin(), perm.end(), 0);
  Rng(seed).shuffle(perm);
  const std::size_t target = ds.require(col);
  std::vector<std::vector<std::string>> rows(ds.row_count());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t c = 0; c < ds.column_count(); ++c) {
      rows[r].push_back(ds.cell_text(c == target ? perm[r] : r, c));
    }
  }
  return make_dataset(ds.schema(), rows);
}

TEST(Stats, KendallMatchesPairEnumeration) {
  const std::vector<double> up{1, 2, 3, 4, 5};
  const std::vector<double> down{5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(stats::kendall_tau(up, up).tau, 1.0);
  EXPECT_DOUBLE_EQ(stats::kendall_tau(up, down).tau, -1.0);
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> small(0, 6);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(50), y(50);
    for (int i = 0; i < 50; ++i) {
      // Half the trials with heavy ties.
      x[i] = trial % 2 ? small(gen) : z(gen);
      y[i] = trial % 2 ? small(gen) + 0.5 * x[i] : z(gen) + x[i];
    }
    EXPECT_NEAR(stats::kendall_tau(x, y).tau, testing::brute_kendall_tau_b(x, y), 1e-12);
  }
  const std::vector<double> flat(5, 2.0);
  EXPECT_TRUE(stats::kendall_tau(up, flat).degenerate);
  EXPECT_EQ(stats::kendall_tau(up, flat).tau, 0);
}

TEST(Stats, KsAndSlopeMatchOracles) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> a(40 + trial), b(55);
    for (auto& v : a) v = std::round(z(gen) * 4);
    for (auto& v : b) v = std::round(z(gen) * 4 + 1);
    EXPECT_NEAR(stats::ks_statistic(a, b), testing::brute_ks(a, b), 1e-12);
    std::vector<double> y(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) y[i] = 3 * a[i] + z(gen);
    EXPECT_NEAR(*stats::ols_slope(a, y), testing::closed_form_slope(a, y), 1e-9);
  }
  EXPECT_EQ(stats::ks_statistic(std::vector<double>{1, 2}, std::vector<double>{1, 2}), 0);
  EXPECT_FALSE(stats::ols_slope(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}));
}

TEST(Univariate, CountArithmetic) {
  std::vector<std::vector<std::string>> o, s;
  for (int i = 0; i < 1000; ++i) o.push_back({"x"});
  for (int i = 0; i < 990; ++i) s.push_back({"x"});
  s.push_back({"y"});
  const Schema schema{{"c", ColumnKind::categorical, {}, {}, {}}};
  const auto errs = univariate_errors(make_dataset(schema, o), make_dataset(schema, s), "c");
  ASSERT_EQ(errs.size(), 2u);
  EXPECT_EQ(errs[0].value, "x");
  EXPECT_DOUBLE_EQ(errs[0].abs_error, 10);
  EXPECT_DOUBLE_EQ(*errs[0].rel_error, 1.0);
  EXPECT_DOUBLE_EQ(errs[0].composite_error, 1.0);
  EXPECT_FALSE(errs[1].rel_error);
  EXPECT_DOUBLE_EQ(errs[1].composite_error, 1);

  const Dataset mixed = testing::mixed_dataset(1, 300);
  for (const auto& c : mixed.data_columns()) {
    for (const auto& e : univariate_errors(mixed, mixed, c)) EXPECT_EQ(e.composite_error, 0);
  }
}

TEST(Correlation, IdentityAndConstantColumn) {
  const Dataset ds = testing::mixed_dataset(3, 200);
  const auto store = testing::copies_store(ds, testing::subsets_up_to(ds.data_columns(), 2));
  for (const auto& d : correlation_diffs(ds, store, ds.data_columns())) {
    EXPECT_EQ(d.diff, 0) << d.column_a << d.column_b;
  }
  std::vector<std::vector<std::string>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"k", std::to_string(i)});
  const Dataset flat = make_dataset({{"A", ColumnKind::categorical, {}, {}, {}},
                                     {"B", ColumnKind::continuous, {}, {}, {}}},
                                    rows);
  EXPECT_TRUE(correlation_diff(flat, flat, "A", "B").flagged);
}

TEST(KMarginal, IdentityDisjointAndOracle) {
  const Dataset ds = testing::chained_categorical(21, 200, 5, 4);
  const auto marginals = sample_marginals(ds.data_columns(), 3, 6, 4);
  ASSERT_EQ(marginals.size(), 6u);
  const auto copies = testing::copies_store(ds, marginals);
  EXPECT_EQ(k_marginal_score(ds, copies, marginals).score, 1000);

  std::vector<std::vector<std::string>> other;
  for (int i = 0; i < 50; ++i) other.push_back({"w1", "w2", "w3", "w4", "w5"});
  const Dataset disjoint = make_dataset(testing::categorical_schema(5), other);
  EXPECT_EQ(marginal_score(ds, disjoint, {"A", "B", "C"}).score, 0);

  // A noisy synthetic stand-in: a different draw from the same generator.
  const Dataset syn = testing::chained_categorical(22, 170, 5, 4);
  for (const auto& m : marginals) {
    EXPECT_NEAR(marginal_score(ds, syn, m).score, testing::brute_marginal_score(ds, syn, m),
                1e-9);
  }
}

TEST(KMarginal, SamplingEquivalenceEndpoints) {
  const Dataset ds = testing::chained_categorical(5, 300, 4, 3);
  const auto marginals = sample_marginals(ds.data_columns(), 2, 6, 1);
  const auto top = sampling_equivalence(ds, 1000, marginals, default_sampling_rates(), 3, 9);
  EXPECT_EQ(top.equivalent_rate, 90);
  const auto bottom = sampling_equivalence(ds, 0, marginals, default_sampling_rates(), 3, 9);
  EXPECT_EQ(bottom.equivalent_rate, 1);
  for (std::size_t i = 1; i < top.mean_scores.size(); ++i) {
    EXPECT_GE(top.mean_scores[i] + 1e-9, top.mean_scores[i - 1]);
  }
  EXPECT_THROW(sampling_equivalence(ds, 1001, marginals), ValidationError);
}

TEST(Regression, IdentityAndGroups) {
  const Dataset ds = testing::mixed_dataset(6, 400);
  const std::vector<GroupFilter> groups{
      {"all", {}},
      {"g1", {Predicate{"G", PredicateOp::eq, "g1"}}},
      {"big-x", {Predicate{"X", PredicateOp::ge, "30"}}}};
  const auto res = regression_slope_error(ds, ds, "X", "Y", groups);
  ASSERT_EQ(res.size(), 3u);
  for (const auto& r : res) EXPECT_EQ(*r.error, 0) << r.label;
  EXPECT_NEAR(res[0].slope_original,
              testing::closed_form_slope(vec(ds.column("X")), vec(ds.column("Y"))), 1e-9);
  const std::vector<GroupFilter> empty{{"none", {Predicate{"G", PredicateOp::eq, "g9"}}}};
  EXPECT_THROW(regression_slope_error(ds, ds, "X", "Y", empty), DegenerateInputError);
}

TEST(Pmse, IdenticalAndSeparable) {
  const Dataset ds = testing::mixed_dataset(7, 1000);
  EXPECT_LT(pmse_table(ds, ds).pmse, 1e-3);

  std::vector<std::vector<std::string>> a, b;
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<int> d(0, 50);
  for (int i = 0; i < 300; ++i) a.push_back({std::to_string(d(gen)), "p"});
  for (int i = 0; i < 200; ++i) b.push_back({std::to_string(500 + d(gen)), "p"});
  const Schema s{{"X", ColumnKind::continuous, {}, {}, {}},
                 {"K", ColumnKind::categorical, {}, {}, {}}};
  const auto t = pmse_table(make_dataset(s, a), make_dataset(s, b));
  const double c = 200.0 / 500.0;
  EXPECT_DOUBLE_EQ(t.synthetic_fraction, c);
  EXPECT_GT(t.pmse, 0.8 * c * (1 - c));
  EXPECT_LE(t.pmse, c * (1 - c) + 1e-12);
}

TEST(Pca, IdenticalAndShuffled) {
  const Dataset ds = testing::mixed_dataset(8, 500).project({"X", "Y", "D", "G", "H"});
  const auto same = pca_compare(ds, ds);
  EXPECT_EQ(same.ks_score, 0);
  const Dataset shuffled = permute_column(ds, "Y", 3);
  const auto res = pca_compare(ds, shuffled);
  bool any = false;
  for (const auto& pc : res.components) {
    const auto it = std::find(pc.features.begin(), pc.features.end(), "Y");
    if (it == pc.features.end()) continue;
    const double load = std::abs(pc.loadings[static_cast<std::size_t>(it - pc.features.begin())]);
    if (load > 0.3) {
      EXPECT_GT(pc.ks, 0) << "loading " << load;
      any = true;
    }
  }
  EXPECT_TRUE(any);
  EXPECT_GT(res.ks_score, 0);
}

TEST(Inconsistencies, CountsViolations) {
  const auto rules = parse_rules(nlohmann::json::parse(R"([
    {"name": "child veteran", "colA": "AGE", "predA": {"op": "<", "value": 15},
     "colB": "VET", "predB": {"op": "non_null"}}])"));
  ASSERT_EQ(rules.size(), 1u);
  const Schema s{{"AGE", ColumnKind::continuous, {}, {}, {}},
                 {"VET", ColumnKind::categorical, {}, {}, {}}};
  const Dataset bad = make_dataset(s, {{"10", "1"}, {"12", "2"}, {"14", "1"}, {"15", "1"},
                                       {"8", ""}, {"40", "2"}});
  EXPECT_EQ(count_violations(bad, rules[0]), 3);
  const Dataset ok = make_dataset(s, {{"10", ""}, {"40", "1"}});
  EXPECT_EQ(count_violations(ok, rules[0]), 0);

  SynTableStore store;
  store.put(bad);
  const auto res = count_inconsistencies(store, rules, s);
  EXPECT_EQ(res.violating_rows, 3);
  EXPECT_EQ(res.violated_rules, 1);
  EXPECT_THROW(parse_rules(nlohmann::json::parse(R"([{"colA": "AGE"}])")), ValidationError);
}

TEST(ImprovementFactor, ReferenceValues) {
  EXPECT_DOUBLE_EQ(improvement_factor(0, 5, 10).value, 2.0);
  const auto table = improvement_factor(1000, 956, 801);
  EXPECT_DOUBLE_EQ(table.delta_reference, 44);
  EXPECT_DOUBLE_EQ(table.delta_alternative, 199);
  EXPECT_NEAR(table.value, 4.52, 0.005);
  EXPECT_DOUBLE_EQ(improvement_factor(0, 3, 3).value, 1.0);
  EXPECT_DOUBLE_EQ(improvement_factor(0, 0, 0).value, 1.0);
  EXPECT_EQ(improvement_factor(0, 2, 0).value, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(improvement_factor(0, 0, 2).value, std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(improvement_factor(0, 10, 5).value, -2.0);
  EXPECT_EQ(format_improvement(-std::numeric_limits<double>::infinity()), "-inf");
}

}  // namespace
}  // namespace synthmark
