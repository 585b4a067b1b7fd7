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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/models.hpp"
#include "synthmark/prf.hpp"
#include "synthmark/stats.hpp"
#include "synthmark/store.hpp"

namespace synthmark {

// Maps the values of one column to bin indices. Categorical codes are their
// own bins; continuous and datetime values fall into equal-width bins over
// the original's observed range, with out-of-range values clamped to the
// edge bins.
class ColumnBinner {
 public:
  ColumnBinner(const Dataset& original, const std::string& column,
               int bins = 100)
      : column_(column), schema_(original.column_schema(column)) {
    categorical_ = schema_.kind == ColumnKind::categorical ||
                   schema_.kind == ColumnKind::entity_id;
    if (!categorical_) {
      const auto values = original.column(column);
      bins_ = std::max(1, bins);
      if (!values.empty()) {
        const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        lo_ = *lo;
        hi_ = *hi;
      }
    }
  }

  std::int64_t bin(double v) const {
    if (categorical_) return static_cast<std::int64_t>(v);
    if (hi_ <= lo_) return 0;
    const double pos = (v - lo_) / (hi_ - lo_) * bins_;
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::floor(pos)),
                                    0, bins_ - 1);
  }

  std::string label(std::int64_t bin, const Dataset& original) const {
    if (categorical_) {
      return original.value_text(schema_, static_cast<double>(bin));
    }
    if (hi_ <= lo_) return original.value_text(schema_, lo_);
    const double width = (hi_ - lo_) / bins_;
    return "[" + original.value_text(schema_, lo_ + width * bin) + "," +
           original.value_text(schema_, lo_ + width * (bin + 1)) +
           (bin == bins_ - 1 ? "]" : ")");
  }

  const std::string& column() const { return column_; }

 private:
  std::string column_;
  ColumnSchema schema_;
  bool categorical_ = false;
  int bins_ = 1;
  double lo_ = 0;
  double hi_ = 0;
};

struct UnivariateError {
  std::string column;
  std::string value;
  std::int64_t count_original = 0;
  std::int64_t count_synthetic = 0;
  double abs_error = 0;
  std::optional<double> rel_error;  // percent; absent when C_o == 0
  double composite_error = 0;
};

// Per-value (or per-bin) count errors for one column. One entry for every
// value present in either table.
inline std::vector<UnivariateError> univariate_errors(
    const Dataset& original, const Dataset& synthetic_in,
    const std::string& column, int bins = 100) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  if (!original.has_column(column) || !synthetic.has_column(column)) {
    throw ValidationError("univariate_errors: column '" + column +
                          "' missing");
  }
  const ColumnBinner binner(original, column, bins);
  std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> counts;
  for (double v : original.column(column)) ++counts[binner.bin(v)].first;
  for (double v : synthetic.column(column)) ++counts[binner.bin(v)].second;
  std::vector<UnivariateError> out;
  for (const auto& [b, c] : counts) {
    UnivariateError e;
    e.column = column;
    e.value = binner.label(b, original);
    e.count_original = c.first;
    e.count_synthetic = c.second;
    e.abs_error = static_cast<double>(std::llabs(c.first - c.second));
    if (c.first > 0) {
      e.rel_error = 100.0 * e.abs_error / static_cast<double>(c.first);
      e.composite_error = std::min(e.abs_error, *e.rel_error);
    } else {
      e.composite_error = e.abs_error;
    }
    out.push_back(std::move(e));
  }
  return out;
}

struct CorrelationDiff {
  std::string column_a;
  std::string column_b;
  double tau_original = 0;
  double tau_synthetic = 0;
  double diff = 0;
  // The original has a constant column; excluded from medians.
  bool flagged = false;
};

inline CorrelationDiff correlation_diff(const Dataset& original,
                                        const Dataset& synthetic_in,
                                        const std::string& a,
                                        const std::string& b) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  CorrelationDiff d;
  d.column_a = a;
  d.column_b = b;
  if (original.row_count() < 2) {
    d.flagged = true;
    return d;
  }
  const auto to = stats::kendall_tau(original.column(a), original.column(b));
  d.tau_original = to.tau;
  d.flagged = to.degenerate;
  if (synthetic.row_count() >= 2) {
    d.tau_synthetic =
        stats::kendall_tau(synthetic.column(a), synthetic.column(b)).tau;
  }
  d.diff = std::abs(d.tau_original - d.tau_synthetic);
  return d;
}

// Kendall tau difference for every unordered pair of `columns`, each pair
// read from the store's table for that pair.
inline std::vector<CorrelationDiff> correlation_diffs(
    const Dataset& original, const SynTableStore& store,
    std::vector<std::string> columns) {
  std::sort(columns.begin(), columns.end());
  std::vector<CorrelationDiff> out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const Dataset syn = store.fetch({columns[i], columns[j]});
      out.push_back(correlation_diff(original, syn, columns[i], columns[j]));
    }
  }
  return out;
}

struct MarginalScore {
  std::vector<std::string> columns;
  double density_diff = 0;  // sum over cells of |d_o - d_s|, in [0, 2]
  double score = 0;         // 1000 * (1 - density_diff / 2)
};

struct KMarginalResult {
  std::vector<MarginalScore> marginals;
  std::int64_t score = 0;  // mean per-set score, rounded
  double mean_score = 0;
};

// Density difference of one marginal. Counts are compared as
// |c_o * N_s - c_s * N_o| in integers, so the result is exact up to the
// final division.
inline MarginalScore marginal_score(const Dataset& original,
                                    const Dataset& synthetic_in,
                                    const std::vector<std::string>& columns,
                                    int bins = 100) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  std::vector<ColumnBinner> binners;
  for (const auto& c : columns) binners.emplace_back(original, c, bins);
  using Cell = std::vector<std::int64_t>;
  std::map<Cell, std::pair<std::int64_t, std::int64_t>> cells;
  auto tally = [&](const Dataset& ds, bool orig) {
    std::vector<std::span<const double>> cols;
    for (const auto& c : columns) cols.push_back(ds.column(c));
    Cell cell(columns.size());
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
      for (std::size_t d = 0; d < columns.size(); ++d) {
        cell[d] = binners[d].bin(cols[d][r]);
      }
      auto& slot = cells[cell];
      (orig ? slot.first : slot.second) += 1;
    }
  };
  tally(original, true);
  tally(synthetic, false);
  const auto n_o = static_cast<std::int64_t>(original.row_count());
  const auto n_s = static_cast<std::int64_t>(synthetic.row_count());
  MarginalScore m;
  m.columns = columns;
  if (n_o == 0) throw DegenerateInputError("marginal_score: empty original");
  if (n_s == 0) {
    m.density_diff = 2;
    m.score = 0;
    return m;
  }
  std::int64_t total = 0;
  for (const auto& [cell, c] : cells) {
    total += std::llabs(c.first * n_s - c.second * n_o);
  }
  const double denom = static_cast<double>(n_o) * static_cast<double>(n_s);
  m.density_diff = static_cast<double>(total) / denom;
  m.score = 1000.0 - 500.0 * static_cast<double>(total) / denom;
  return m;
}

inline KMarginalResult k_marginal_score(
    const Dataset& original, const SynTableStore& store,
    const std::vector<std::vector<std::string>>& marginals, int bins = 100) {
  KMarginalResult result;
  double sum = 0;
  for (const auto& cols : marginals) {
    const Dataset syn = store.fetch(cols);
    result.marginals.push_back(marginal_score(original, syn, cols, bins));
    sum += result.marginals.back().score;
  }
  if (!marginals.empty()) {
    result.mean_score = sum / static_cast<double>(marginals.size());
    result.score = std::llround(result.mean_score);
  }
  return result;
}

// Seeded sample without replacement of `count` k-column sets, returned in
// lexicographic order. All sets when count >= C(n, k).
inline std::vector<std::vector<std::string>> sample_marginals(
    std::vector<std::string> columns, std::size_t k, std::size_t count,
    std::uint64_t seed) {
  std::sort(columns.begin(), columns.end());
  std::vector<std::vector<std::string>> all;
  detail::for_each_subset(columns, k, [&](const auto& s) { all.push_back(s); });
  if (count < all.size()) {
    Rng rng(seed);
    rng.shuffle(all);
    all.resize(count);
    std::sort(all.begin(), all.end());
  }
  return all;
}

inline const std::vector<double>& default_sampling_rates() {
  static const std::vector<double> rates{1, 5, 10, 20, 30, 40, 50, 75, 90};
  return rates;
}

struct SamplingEquivalence {
  std::vector<double> rates;
  std::vector<double> mean_scores;  // per rate
  double equivalent_rate = 0;
};

// Scores seeded subsamples of the original against the original at each
// rate. Trial t draws one permutation and takes its prefixes, so samples at
// higher rates contain those at lower ones. The equivalent rate is the
// largest whose mean sampled score does not exceed `score` (the lowest rate
// when none qualifies).
inline SamplingEquivalence sampling_equivalence(
    const Dataset& original, double score,
    const std::vector<std::vector<std::string>>& marginals,
    std::vector<double> rates = default_sampling_rates(), int trials = 5,
    std::uint64_t seed = 0, int bins = 100) {
  if (score < 0 || score > 1000) {
    throw ValidationError("sampling_equivalence: score outside [0, 1000]");
  }
  if (rates.empty()) throw ValidationError("sampling_equivalence: no rates");
  std::sort(rates.begin(), rates.end());
  SamplingEquivalence out;
  out.rates = rates;
  out.mean_scores.assign(rates.size(), 0);
  const std::size_t n = original.row_count();
  for (int t = 0; t < trials; ++t) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(t));
    rng.shuffle(perm);
    for (std::size_t i = 0; i < rates.size(); ++i) {
      const auto take = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::llround(rates[i] / 100.0 * n)), 1,
          std::max<std::size_t>(n, 1));
      const Dataset sample = original.select_rows(
          std::span<const std::size_t>(perm.data(), std::min(take, n)));
      double sum = 0;
      for (const auto& cols : marginals) {
        sum += marginal_score(original, sample, cols, bins).score;
      }
      out.mean_scores[i] +=
          marginals.empty() ? 1000 : sum / static_cast<double>(marginals.size());
    }
  }
  for (auto& s : out.mean_scores) s /= std::max(trials, 1);
  out.equivalent_rate = rates.front();
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (out.mean_scores[i] <= score) out.equivalent_rate = rates[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predicates (inconsistency rules and regression groups)

enum class PredicateOp { lt, le, gt, ge, eq, ne, is_null, non_null };

inline PredicateOp parse_predicate_op(std::string_view op) {
  if (op == "<") return PredicateOp::lt;
  if (op == "<=" || op == "≤") return PredicateOp::le;
  if (op == ">") return PredicateOp::gt;
  if (op == ">=" || op == "≥") return PredicateOp::ge;
  if (op == "==" || op == "=") return PredicateOp::eq;
  if (op == "!=") return PredicateOp::ne;
  if (op == "is_null") return PredicateOp::is_null;
  if (op == "non_null") return PredicateOp::non_null;
  throw ValidationError("unknown predicate op '" + std::string(op) + "'");
}

inline std::string_view to_string(PredicateOp op) {
  switch (op) {
    case PredicateOp::lt: return "<";
    case PredicateOp::le: return "<=";
    case PredicateOp::gt: return ">";
    case PredicateOp::ge: return ">=";
    case PredicateOp::eq: return "==";
    case PredicateOp::ne: return "!=";
    case PredicateOp::is_null: return "is_null";
    case PredicateOp::non_null: return "non_null";
  }
  return "?";
}

// A test on one decoded cell. Null means an empty cell; continuous and
// datetime cells are never null. Ordering on categorical cells is numeric
// when both sides parse as numbers and lexicographic otherwise.
struct Predicate {
  std::string column;
  PredicateOp op = PredicateOp::eq;
  std::string value;

  static Predicate from_json(const std::string& column,
                             const nlohmann::json& doc) {
    Predicate p;
    p.column = column;
    p.op = parse_predicate_op(doc.at("op").get<std::string>());
    if (doc.contains("value")) {
      const auto& v = doc.at("value");
      p.value = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return p;
  }
  nlohmann::json to_json() const {
    nlohmann::json doc{{"op", std::string(to_string(op))}};
    if (op != PredicateOp::is_null && op != PredicateOp::non_null) {
      doc["value"] = value;
    }
    return doc;
  }
};

namespace detail {

template <class T>
bool compare(PredicateOp op, const T& a, const T& b) {
  switch (op) {
    case PredicateOp::lt: return a < b;
    case PredicateOp::le: return a <= b;
    case PredicateOp::gt: return a > b;
    case PredicateOp::ge: return a >= b;
    case PredicateOp::eq: return a == b;
    case PredicateOp::ne: return a != b;
    default: return false;
  }
}

inline bool eval_text(const Predicate& p, const std::string& cell) {
  if (p.op == PredicateOp::is_null) return cell.empty();
  if (p.op == PredicateOp::non_null) return !cell.empty();
  if (p.op == PredicateOp::eq) return cell == p.value;
  if (p.op == PredicateOp::ne) return cell != p.value;
  const auto a = parse_real(cell);
  const auto b = parse_real(p.value);
  if (a && b) return compare(p.op, *a, *b);
  return compare(p.op, cell, p.value);
}

}  // namespace detail

// Predicate bound to one table's column: categorical columns get a per-code
// lookup, numeric columns a direct comparison.
class BoundPredicate {
 public:
  BoundPredicate(const Predicate& p, const Dataset& table)
      : predicate_(p), values_(table.column(p.column)) {
    const auto& col = table.column_schema(p.column);
    kind_ = col.kind;
    if (kind_ == ColumnKind::categorical || kind_ == ColumnKind::entity_id) {
      const auto* book = table.encoding().codebook(p.column);
      if (book) {
        for (const auto& v : book->values) {
          by_code_.push_back(detail::eval_text(p, v));
        }
      }
    } else if (p.op != PredicateOp::is_null && p.op != PredicateOp::non_null) {
      std::optional<double> v;
      if (kind_ == ColumnKind::datetime) {
        if (auto dt = detail::parse_datetime(p.value)) v = dt->first;
      } else {
        v = detail::parse_real(p.value);
      }
      if (!v) {
        throw ValidationError("predicate on '" + p.column +
                              "': value '" + p.value + "' is not numeric");
      }
      threshold_ = *v;
    }
  }

  bool operator()(std::size_t row) const {
    const double v = values_[row];
    if (kind_ == ColumnKind::categorical || kind_ == ColumnKind::entity_id) {
      const auto code = static_cast<std::size_t>(v);
      return code < by_code_.size() && by_code_[code];
    }
    if (predicate_.op == PredicateOp::is_null) return false;
    if (predicate_.op == PredicateOp::non_null) return true;
    return detail::compare(predicate_.op, v, threshold_);
  }

 private:
  Predicate predicate_;
  std::span<const double> values_;
  ColumnKind kind_ = ColumnKind::continuous;
  std::vector<bool> by_code_;
  double threshold_ = 0;
};

// ---------------------------------------------------------------------------
// Regression slope error

struct GroupFilter {
  std::string label;
  std::vector<Predicate> predicates;  // conjunction
};

struct RegressionResult {
  std::string label;
  double slope_original = 0;
  std::optional<double> slope_synthetic;
  std::optional<double> error;
  std::size_t rows_original = 0;
  std::size_t rows_synthetic = 0;
  // Fewer than 3 synthetic rows, or no synthetic slope.
  bool flagged = false;
};

namespace detail {

inline std::vector<std::size_t> select(const Dataset& table,
                                       const std::vector<Predicate>& preds) {
  std::vector<BoundPredicate> bound;
  for (const auto& p : preds) bound.emplace_back(p, table);
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (std::all_of(bound.begin(), bound.end(),
                    [&](const auto& b) { return b(r); })) {
      rows.push_back(r);
    }
  }
  return rows;
}

inline std::pair<std::vector<double>, std::vector<double>> gather(
    const Dataset& t, const std::vector<std::size_t>& rows,
    const std::string& x, const std::string& y) {
  std::pair<std::vector<double>, std::vector<double>> out;
  const auto xs = t.column(x);
  const auto ys = t.column(y);
  for (auto r : rows) {
    out.first.push_back(xs[r]);
    out.second.push_back(ys[r]);
  }
  return out;
}

}  // namespace detail

inline std::vector<RegressionResult> regression_slope_error(
    const Dataset& original, const Dataset& synthetic_in, const std::string& x,
    const std::string& y, const std::vector<GroupFilter>& groups) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  for (const auto& c : {x, y}) {
    if (!original.has_column(c) || !synthetic.has_column(c)) {
      throw ValidationError("regression: column '" + c + "' missing");
    }
  }
  std::vector<GroupFilter> all = groups;
  if (all.empty()) all.push_back({"all", {}});
  std::vector<RegressionResult> out;
  for (const auto& g : all) {
    RegressionResult r;
    r.label = g.label;
    const auto orig_rows = detail::select(original, g.predicates);
    if (orig_rows.size() < 3) {
      throw DegenerateInputError("regression: group '" + g.label +
                                 "' selects fewer than 3 original rows");
    }
    const auto [ox, oy] = detail::gather(original, orig_rows, x, y);
    const auto so = stats::ols_slope(ox, oy);
    if (!so) {
      throw DegenerateInputError("regression: group '" + g.label +
                                 "' has no spread in '" + x + "'");
    }
    r.slope_original = *so;
    r.rows_original = orig_rows.size();
    const auto syn_rows = detail::select(synthetic, g.predicates);
    r.rows_synthetic = syn_rows.size();
    const auto [sx, sy] = detail::gather(synthetic, syn_rows, x, y);
    r.slope_synthetic = stats::ols_slope(sx, sy);
    if (r.slope_synthetic) {
      r.error = std::abs(r.slope_original - *r.slope_synthetic);
    }
    r.flagged = syn_rows.size() < 3 || !r.slope_synthetic;
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Propensity mean squared error

struct PmseTable {
  std::vector<std::string> columns;
  double pmse = 0;
  double synthetic_fraction = 0;
};

struct PmseResult {
  std::vector<PmseTable> tables;
  double average = 0;
};

struct PmseOptions {
  int max_levels = 20;       // per categorical column, the rest pooled
  int max_features = 400;    // interactions dropped beyond this
  double l2 = 1e-4;
};

namespace detail {

// Design matrix over pooled rows: one-hot categorical levels (most frequent
// first, rarer levels pooled) and standardized numeric columns, plus
// pairwise products across different columns when they fit the budget.
inline Eigen::MatrixXd propensity_design(const Dataset& a, const Dataset& b,
                                         const std::vector<std::string>& cols,
                                         const PmseOptions& opt) {
  const Eigen::Index n =
      static_cast<Eigen::Index>(a.row_count() + b.row_count());
  std::vector<Eigen::VectorXd> features;
  std::vector<std::size_t> owner;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto& col = a.column_schema(cols[c]);
    std::vector<double> v(a.column(cols[c]).begin(), a.column(cols[c]).end());
    const auto vb = b.column(cols[c]);
    v.insert(v.end(), vb.begin(), vb.end());
    if (col.kind == ColumnKind::categorical ||
        col.kind == ColumnKind::entity_id) {
      std::map<double, std::int64_t> freq;
      for (double x : v) ++freq[x];
      std::vector<std::pair<std::int64_t, double>> ranked;
      for (const auto& [code, f] : freq) ranked.emplace_back(-f, code);
      std::sort(ranked.begin(), ranked.end());
      const std::size_t keep = std::min<std::size_t>(
          ranked.size(), static_cast<std::size_t>(opt.max_levels));
      // With every level kept, the last is the implicit baseline.
      const std::size_t emit = keep == ranked.size() ? keep - 1 : keep;
      for (std::size_t l = 0; l < emit; ++l) {
        Eigen::VectorXd f(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          f(i) = v[static_cast<std::size_t>(i)] == ranked[l].second ? 1 : 0;
        }
        features.push_back(std::move(f));
        owner.push_back(c);
      }
    } else {
      Eigen::Map<const Eigen::VectorXd> m(v.data(), n);
      const double mu = m.mean();
      const double sd = std::sqrt((m.array() - mu).square().mean());
      if (sd > 0) {
        features.push_back((m.array() - mu) / sd);
        owner.push_back(c);
      }
    }
  }
  const std::size_t main = features.size();
  std::size_t inter = 0;
  for (std::size_t i = 0; i < main; ++i) {
    for (std::size_t j = i + 1; j < main; ++j) {
      if (owner[i] != owner[j]) ++inter;
    }
  }
  const bool with_interactions =
      main + inter <= static_cast<std::size_t>(opt.max_features);
  Eigen::MatrixXd x(n, static_cast<Eigen::Index>(
                           main + (with_interactions ? inter : 0)));
  Eigen::Index k = 0;
  for (const auto& f : features) x.col(k++) = f;
  if (with_interactions) {
    for (std::size_t i = 0; i < main; ++i) {
      for (std::size_t j = i + 1; j < main; ++j) {
        if (owner[i] != owner[j]) {
          x.col(k++) = features[i].cwiseProduct(features[j]);
        }
      }
    }
  }
  return x;
}

}  // namespace detail

inline PmseTable pmse_table(const Dataset& original, const Dataset& synthetic_in,
                            const PmseOptions& opt = {}) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  PmseTable t;
  t.columns = synthetic.data_columns();
  for (const auto& c : t.columns) {
    if (!original.has_column(c)) {
      throw ValidationError("pmse: column '" + c + "' not in the original");
    }
  }
  const Dataset orig = original.project(t.columns);
  const Dataset syn = synthetic.project(t.columns);
  const double n_o = static_cast<double>(orig.row_count());
  const double n_s = static_cast<double>(syn.row_count());
  if (n_o == 0 || n_s == 0) {
    throw DegenerateInputError("pmse: pooled data has a single class (" +
                               combination_key(t.columns) + ")");
  }
  const double c = n_s / (n_o + n_s);
  t.synthetic_fraction = c;
  const Eigen::MatrixXd x = detail::propensity_design(orig, syn, t.columns, opt);
  Eigen::VectorXd y(x.rows());
  y.head(orig.row_count()).setZero();
  y.tail(syn.row_count()).setOnes();
  models::L2Logistic model(opt.l2);
  model.fit(x, y);
  const Eigen::VectorXd p = model.predict(x);
  t.pmse = (p.array() - c).square().mean();
  return t;
}

// One pmse per synthetic table; the multi-table score is their mean.
inline PmseResult pmse(const Dataset& original,
                       const std::vector<Dataset>& synthetic_tables,
                       const PmseOptions& opt = {}) {
  PmseResult r;
  double sum = 0;
  for (const auto& t : synthetic_tables) {
    r.tables.push_back(pmse_table(original, t, opt));
    sum += r.tables.back().pmse;
  }
  if (!r.tables.empty()) r.average = sum / static_cast<double>(r.tables.size());
  return r;
}

// ---------------------------------------------------------------------------
// PCA comparison

struct PcaComponent {
  std::vector<std::string> features;
  std::vector<double> loadings;
  double eigenvalue = 0;
  double ks = 0;
};

struct PcaResult {
  std::vector<PcaComponent> components;
  double ks_score = 0;  // mean KS statistic
};

// Principal components of the original's z-scored columns, each truncated
// to its largest-magnitude loadings and renormalized; both tables are
// projected with the original's means and deviations and compared with the
// two-sample KS statistic.
inline PcaResult pca_compare(const Dataset& original, const Dataset& synthetic_in,
                             int n_components = 5, int features_per_pc = 5) {
  const Dataset synthetic = recode_like(synthetic_in, original);
  std::vector<std::string> cols;
  std::vector<double> means, sds;
  for (const auto& name : original.data_columns()) {
    if (!synthetic.has_column(name)) {
      throw ValidationError("pca: synthetic table lacks column '" + name +
                            "'");
    }
    const auto v = original.column(name);
    if (v.empty()) continue;
    const double mu = stats::mean(v);
    double var = 0;
    for (double x : v) var += (x - mu) * (x - mu);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    if (sd > 0) {
      cols.push_back(name);
      means.push_back(mu);
      sds.push_back(sd);
    }
  }
  if (cols.size() < static_cast<std::size_t>(n_components) || cols.empty()) {
    throw DegenerateInputError(
        "pca: fewer than " + std::to_string(n_components) +
        " non-degenerate columns");
  }
  if (synthetic.row_count() == 0) {
    throw DegenerateInputError("pca: empty synthetic table");
  }
  auto standardized = [&](const Dataset& ds) {
    Eigen::MatrixXd z(static_cast<Eigen::Index>(ds.row_count()),
                      static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto v = ds.column(cols[c]);
      for (std::size_t r = 0; r < v.size(); ++r) {
        z(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            (v[r] - means[c]) / sds[c];
      }
    }
    return z;
  };
  const Eigen::MatrixXd zo = standardized(original);
  const Eigen::MatrixXd zs = standardized(synthetic);
  const Eigen::MatrixXd cov =
      zo.transpose() * zo / static_cast<double>(zo.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::Index p = cov.rows();

  PcaResult result;
  const auto keep = static_cast<std::size_t>(
      std::min<Eigen::Index>(features_per_pc, p));
  for (int k = 0; k < n_components; ++k) {
    const Eigen::Index idx = p - 1 - k;  // eigenvalues ascend
    const Eigen::VectorXd v = eig.eigenvectors().col(idx);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                       return std::abs(v(a)) > std::abs(v(b));
                     });
    order.resize(keep);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
    for (auto i : order) w(i) = v(i);
    w.normalize();
    if (w(order.front()) < 0) w = -w;

    PcaComponent comp;
    comp.eigenvalue = eig.eigenvalues()(idx);
    std::sort(order.begin(), order.end());
    for (auto i : order) {
      comp.features.push_back(cols[static_cast<std::size_t>(i)]);
      comp.loadings.push_back(w(i));
    }
    const Eigen::VectorXd po = zo * w;
    const Eigen::VectorXd ps = zs * w;
    comp.ks = stats::ks_statistic(std::span(po.data(), po.size()),
                                  std::span(ps.data(), ps.size()));
    result.ks_score += comp.ks;
    result.components.push_back(std::move(comp));
  }
  result.ks_score /= n_components;
  return result;
}

// ---------------------------------------------------------------------------
// Inconsistencies

// Two conditions that can never hold together in valid data.
struct InconsistencyRule {
  std::string name;
  Predicate a;
  Predicate b;
};

struct InconsistencyCount {
  InconsistencyRule rule;
  std::int64_t count = 0;
};

struct InconsistencyResult {
  std::vector<InconsistencyCount> rules;
  std::int64_t violated_rules = 0;  // rules with at least one row
  std::int64_t violating_rows = 0;
};

// Rules file: JSON list of {colA, predA: {op, value}, colB, predB, [name]}.
inline std::vector<InconsistencyRule> parse_rules(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ValidationError("rules: expected a JSON list");
  std::vector<InconsistencyRule> rules;
  for (const auto& e : doc) {
    try {
      InconsistencyRule r;
      r.a = Predicate::from_json(e.at("colA").get<std::string>(),
                                 e.at("predA"));
      r.b = Predicate::from_json(e.at("colB").get<std::string>(),
                                 e.at("predB"));
      r.name = e.contains("name") ? e.at("name").get<std::string>()
                                  : r.a.column + "+" + r.b.column;
      rules.push_back(std::move(r));
    } catch (const nlohmann::json::exception& ex) {
      throw ValidationError("rules: bad entry " + e.dump() + ": " +
                            ex.what());
    }
  }
  return rules;
}

inline std::int64_t count_violations(const Dataset& table,
                                     const InconsistencyRule& rule) {
  const BoundPredicate pa(rule.a, table);
  const BoundPredicate pb(rule.b, table);
  std::int64_t n = 0;
  for (std::size_t r = 0; r < table.row_count(); ++r) {
    if (pa(r) && pb(r)) ++n;
  }
  return n;
}

// Each rule is checked on the table holding its two columns.
inline InconsistencyResult count_inconsistencies(
    const SynTableStore& store, const std::vector<InconsistencyRule>& rules,
    const Schema& schema) {
  InconsistencyResult out;
  for (const auto& rule : rules) {
    for (const auto* c : {&rule.a.column, &rule.b.column}) {
      if (std::none_of(schema.begin(), schema.end(),
                       [&](const auto& s) { return s.name == *c; })) {
        throw ValidationError("rule '" + rule.name +
                              "' references unknown column '" + *c + "'");
      }
    }
    std::vector<std::string> cols{rule.a.column};
    if (rule.b.column != rule.a.column) cols.push_back(rule.b.column);
    const Dataset table = store.fetch(cols);
    InconsistencyCount c{rule, count_violations(table, rule)};
    if (c.count > 0) ++out.violated_rules;
    out.violating_rows += c.count;
    out.rules.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Improvement factor

struct ImprovementFactor {
  double perfect = 0;
  double delta_reference = 0;
  double delta_alternative = 0;
  // delta_alt / delta_ref when the alternative is no better, else
  // -delta_ref / delta_alt. Infinite when one side is perfect.
  double value = 1;
};

inline ImprovementFactor improvement_factor(double perfect, double reference,
                                            double alternative) {
  ImprovementFactor f;
  f.perfect = perfect;
  f.delta_reference = std::abs(perfect - reference);
  f.delta_alternative = std::abs(perfect - alternative);
  const double dr = f.delta_reference;
  const double da = f.delta_alternative;
  if (dr == 0 && da == 0) {
    f.value = 1;
  } else if (da >= dr) {
    f.value = dr == 0 ? std::numeric_limits<double>::infinity() : da / dr;
  } else {
    f.value = da == 0 ? -std::numeric_limits<double>::infinity() : -dr / da;
  }
  return f;
}

inline std::string format_improvement(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return detail::format_real(value);
}

}  // namespace synthmark
