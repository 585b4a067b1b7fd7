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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/metrics.hpp"
#include "synthmark/models.hpp"
#include "synthmark/prf.hpp"
#include "synthmark/store.hpp"

namespace synthmark {

inline const std::vector<std::string>& default_quasi_identifiers() {
  static const std::vector<std::string> names{
      "EDU", "SEX", "RAC1P", "PUMA", "OWN_RENT", "INDP_CAT", "HISP", "MSP"};
  return names;
}

struct AttackConfig {
  std::vector<std::string> qi;
  std::vector<std::string> targets;
  double split = 0.5;  // training fraction for the baseline
  std::uint64_t seed = 0;
  int bins = 10;       // for continuous and datetime columns

  // Fills empty lists from the schema: the default quasi-identifiers that
  // are present, and every other data column as a target. Then validates.
  void resolve(const Schema& schema) {
    std::vector<std::string> data;
    for (const auto& c : schema) {
      if (c.kind != ColumnKind::entity_id) data.push_back(c.name);
    }
    auto known = [&](const std::string& n) {
      return std::find(data.begin(), data.end(), n) != data.end();
    };
    if (qi.empty()) {
      for (const auto& n : default_quasi_identifiers()) {
        if (known(n)) qi.push_back(n);
      }
    }
    if (targets.empty()) {
      for (const auto& n : data) {
        if (std::find(qi.begin(), qi.end(), n) == qi.end()) {
          targets.push_back(n);
        }
      }
    }
    if (qi.empty()) throw ValidationError("attack: no quasi-identifiers");
    for (const auto* list : {&qi, &targets}) {
      std::set<std::string> seen;
      for (const auto& n : *list) {
        if (!known(n)) {
          throw ValidationError("attack: unknown column '" + n + "'");
        }
        if (!seen.insert(n).second) {
          throw ValidationError("attack: column '" + n + "' listed twice");
        }
      }
    }
    for (const auto& t : targets) {
      if (std::find(qi.begin(), qi.end(), t) != qi.end()) {
        throw ValidationError("attack: '" + t +
                              "' is both a quasi-identifier and a target");
      }
    }
    if (!(split > 0 && split < 1)) {
      throw ValidationError("attack: split must lie in (0, 1)");
    }
  }

  static AttackConfig from_json(const nlohmann::json& doc) {
    AttackConfig cfg;
    try {
      if (doc.contains("qi")) cfg.qi = doc.at("qi").get<std::vector<std::string>>();
      if (doc.contains("targets")) {
        cfg.targets = doc.at("targets").get<std::vector<std::string>>();
      }
      if (doc.contains("split")) cfg.split = doc.at("split").get<double>();
      if (doc.contains("seed")) cfg.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("attack config: ") + e.what());
    }
    return cfg;
  }

  nlohmann::json to_json() const {
    return {{"qi", qi}, {"targets", targets}, {"split", split}, {"seed", seed}};
  }
};

struct PrecisionImprovement {
  double value = 0;
  bool flagged = false;  // baseline precision of 1
  std::string classification;
};

inline std::string classify_improvement(double pi) {
  if (pi <= 0) return "no privacy loss";
  if (pi < 0.5) return "strong anonymity";
  return "weak anonymity";
}

inline PrecisionImprovement precision_improvement(double p_attack,
                                                  double p_base) {
  PrecisionImprovement out;
  if (p_base >= 1) {
    out.flagged = true;
    out.value = 0;
  } else {
    out.value = (p_attack - p_base) / (1 - p_base);
  }
  out.classification = classify_improvement(out.value);
  return out;
}

struct AttackResult {
  std::string target;
  std::optional<double> precision;  // absent without predictions
  double baseline = 0;
  std::optional<PrecisionImprovement> improvement;
  double coverage = 0;
  std::size_t match_count = 0;
  std::size_t correct = 0;
  bool flagged = false;  // no predictions were made
};

namespace detail {

// Discrete view of a column for the attack: categorical codes as-is,
// numeric columns in equal-width bins over the original's range.
inline std::vector<std::int64_t> discretize(const Dataset& table,
                                            const std::string& column,
                                            const ColumnBinner& binner) {
  const auto v = table.column(column);
  std::vector<std::int64_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = binner.bin(v[i]);
  return out;
}

struct TupleHash {
  std::size_t operator()(const std::vector<std::int64_t>& t) const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto x : t) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return h;
  }
};

}  // namespace detail

// Attack on one target using a synthetic table that holds qi and target.
inline AttackResult attack_target(const Dataset& original,
                                  const Dataset& synthetic_in,
                                  const std::vector<std::string>& qi,
                                  const std::string& target, int bins = 10) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  std::vector<std::string> cols = qi;
  cols.push_back(target);
  std::vector<std::vector<std::int64_t>> orig_cols, syn_cols;
  for (const auto& c : cols) {
    const ColumnBinner binner(original, c, bins);
    orig_cols.push_back(detail::discretize(original, c, binner));
    syn_cols.push_back(detail::discretize(synthetic, c, binner));
  }
  const std::size_t k = qi.size();
  // QI tuple -> (occurrences, target of the last occurrence)
  std::unordered_map<std::vector<std::int64_t>,
                     std::pair<std::size_t, std::int64_t>, detail::TupleHash>
      index;
  std::vector<std::int64_t> tuple(k);
  for (std::size_t r = 0; r < synthetic.row_count(); ++r) {
    for (std::size_t d = 0; d < k; ++d) tuple[d] = syn_cols[d][r];
    auto& slot = index[tuple];
    ++slot.first;
    slot.second = syn_cols[k][r];
  }
  AttackResult res;
  res.target = target;
  for (std::size_t r = 0; r < original.row_count(); ++r) {
    for (std::size_t d = 0; d < k; ++d) tuple[d] = orig_cols[d][r];
    const auto it = index.find(tuple);
    if (it == index.end() || it->second.first != 1) continue;
    ++res.match_count;
    if (it->second.second == orig_cols[k][r]) ++res.correct;
  }
  if (original.row_count() > 0) {
    res.coverage = static_cast<double>(res.match_count) /
                   static_cast<double>(original.row_count());
  }
  if (res.match_count > 0) {
    res.precision = static_cast<double>(res.correct) /
                    static_cast<double>(res.match_count);
  } else {
    res.flagged = true;
  }
  return res;
}

// Accuracy of an L1-penalized multinomial logistic regression trained on
// one-hot quasi-identifiers over a seeded split of the original. The one-hot
// columns are z-scored with training statistics before fitting.
inline double baseline_precision(const Dataset& original,
                                 const std::vector<std::string>& qi,
                                 const std::string& target, double split,
                                 std::uint64_t seed, int bins = 10) {
  const std::size_t n = original.row_count();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  rng.shuffle(perm);
  const auto n_train = static_cast<std::size_t>(
      std::llround(split * static_cast<double>(n)));
  if (n_train == 0 || n_train >= n) {
    throw DegenerateInputError("baseline: split leaves an empty side");
  }
  const std::size_t n_test = n - n_train;

  const ColumnBinner target_binner(original, target, bins);
  const auto y_all = detail::discretize(original, target, target_binner);
  std::map<std::int64_t, int> classes;
  std::vector<std::size_t> class_count;
  for (std::size_t i = 0; i < n_train; ++i) {
    auto [it, fresh] =
        classes.emplace(y_all[perm[i]], static_cast<int>(classes.size()));
    if (fresh) class_count.push_back(0);
    ++class_count[static_cast<std::size_t>(it->second)];
  }
  auto label_of = [&](std::size_t row) {
    const auto it = classes.find(y_all[row]);
    return it == classes.end() ? -1 : it->second;
  };

  std::vector<int> predicted(n_test);
  if (classes.size() >= 2) {
    // One indicator per (column, level seen in training).
    std::vector<std::pair<std::size_t, std::int64_t>> features;
    std::vector<std::vector<std::int64_t>> qcols;
    for (std::size_t c = 0; c < qi.size(); ++c) {
      const ColumnBinner binner(original, qi[c], bins);
      qcols.push_back(detail::discretize(original, qi[c], binner));
      std::set<std::int64_t> levels;
      for (std::size_t i = 0; i < n_train; ++i) levels.insert(qcols[c][perm[i]]);
      for (auto l : levels) features.emplace_back(c, l);
    }
    const auto p = static_cast<Eigen::Index>(features.size());
    Eigen::MatrixXd x_train(static_cast<Eigen::Index>(n_train), p);
    Eigen::MatrixXd x_test(static_cast<Eigen::Index>(n_test), p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const auto [c, level] = features[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < n; ++i) {
        const double v = qcols[c][perm[i]] == level ? 1.0 : 0.0;
        if (i < n_train) {
          x_train(static_cast<Eigen::Index>(i), j) = v;
        } else {
          x_test(static_cast<Eigen::Index>(i - n_train), j) = v;
        }
      }
      const double mu = x_train.col(j).mean();
      const double sd = std::sqrt(mu * (1 - mu));
      const double scale = sd > 0 ? 1 / sd : 0;
      x_train.col(j) = (x_train.col(j).array() - mu) * scale;
      x_test.col(j) = (x_test.col(j).array() - mu) * scale;
    }
    std::vector<int> labels(n_train);
    for (std::size_t i = 0; i < n_train; ++i) labels[i] = label_of(perm[i]);
    models::L1Multinomial model(0.01, 100);
    model.fit(x_train, labels, static_cast<int>(classes.size()));
    predicted = model.predict(x_test);
  }
  if (classes.size() < 2) {
    const auto majority = static_cast<int>(
        std::max_element(class_count.begin(), class_count.end()) -
        class_count.begin());
    std::fill(predicted.begin(), predicted.end(), majority);
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n_test; ++i) {
    if (predicted[i] == label_of(perm[n_train + i])) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(n_test);
}

// Runs the attack for every target against the store's qi+target table.
inline std::vector<AttackResult> qi_attack(const Dataset& original,
                                           const SynTableStore& store,
                                           AttackConfig cfg) {
  cfg.resolve(original.schema());
  std::vector<AttackResult> out;
  for (const auto& target : cfg.targets) {
    std::vector<std::string> cols = cfg.qi;
    cols.push_back(target);
    const Dataset syn = store.fetch(cols);
    AttackResult r = attack_target(original, syn, cfg.qi, target, cfg.bins);
    r.baseline = baseline_precision(original, cfg.qi, target, cfg.split,
                                    cfg.seed, cfg.bins);
    if (r.precision) r.improvement = precision_improvement(*r.precision, r.baseline);
    out.push_back(std::move(r));
  }
  return out;
}

struct FullMatchResult {
  std::size_t count = 0;
  double percent = 0;
};

// Records that occur exactly once in each table and are identical across
// both, compared on decoded cell text.
inline FullMatchResult full_match_count(const Dataset& original,
                                        const Dataset& synthetic) {
  const auto cols = original.data_columns();
  auto syn_cols = synthetic.data_columns();
  if (std::set(cols.begin(), cols.end()) !=
      std::set(syn_cols.begin(), syn_cols.end())) {
    throw ValidationError("full_match_count: schemas differ");
  }
  auto rows_of = [&](const Dataset& ds) {
    const Dataset t = ds.project(cols);
    std::unordered_map<std::string, std::size_t> counts;
    for (std::size_t r = 0; r < t.row_count(); ++r) {
      std::string key;
      for (std::size_t c = 0; c < cols.size(); ++c) {
        key += t.cell_text(r, c);
        key += '\x1f';
      }
      ++counts[key];
    }
    return counts;
  };
  const auto o = rows_of(original);
  const auto s = rows_of(synthetic);
  FullMatchResult res;
  for (const auto& [key, c] : o) {
    if (c != 1) continue;
    const auto it = s.find(key);
    if (it != s.end() && it->second == 1) ++res.count;
  }
  if (original.row_count() > 0) {
    res.percent = 100.0 * static_cast<double>(res.count) /
                  static_cast<double>(original.row_count());
  }
  return res;
}

}  // namespace synthmark
