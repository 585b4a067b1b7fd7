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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/prf.hpp"

namespace synthmark {

// A range whose size is a power of two and whose lower bound is an integer
// multiple of that size: [index * 2^exponent, (index + 1) * 2^exponent).
// A singleton holds exactly one point.
//
// Zero is an edge of every aligned range, so a root range spanning zero
// is instead aligned to half its size ([-4, 4) rather than [-8, 8)); its
// halves are aligned again. Only roots are half-aligned.
struct SnappedInterval {
  bool singleton = false;
  bool half_aligned = false;
  int exponent = 0;
  std::int64_t index = 0;  // in units of the alignment
  double point = 0;

  static SnappedInterval make_singleton(double value) {
    SnappedInterval s;
    s.singleton = true;
    s.point = value;
    return s;
  }
  static SnappedInterval make(int exponent, std::int64_t index) {
    SnappedInterval s;
    s.exponent = exponent;
    s.index = index;
    return s;
  }
  static SnappedInterval make_half_aligned(int exponent, std::int64_t index) {
    SnappedInterval s = make(exponent, index);
    s.half_aligned = true;
    return s;
  }

  double size() const { return singleton ? 0.0 : std::ldexp(1.0, exponent); }
  double offset() const {
    return singleton ? point
                     : std::ldexp(static_cast<double>(index),
                                  half_aligned ? exponent - 1 : exponent);
  }
  double lower() const { return offset(); }
  double upper() const { return singleton ? point : offset() + size(); }
  double middle() const { return singleton ? point : offset() + size() / 2; }

  bool contains(double v) const {
    return singleton ? v == point : (v >= lower() && v < upper());
  }
  // True when `inner` lies entirely within this interval.
  bool covers(const SnappedInterval& inner) const {
    if (singleton) return inner.singleton && inner.point == point;
    if (inner.singleton) return contains(inner.point);
    if (inner.exponent > exponent) return false;
    return inner.lower() >= lower() && inner.upper() <= upper();
  }

  std::pair<SnappedInterval, SnappedInterval> halves() const {
    if (half_aligned) {
      return {make(exponent - 1, index), make(exponent - 1, index + 1)};
    }
    return {make(exponent - 1, index * 2), make(exponent - 1, index * 2 + 1)};
  }

  bool operator==(const SnappedInterval& o) const {
    if (singleton != o.singleton) return false;
    return singleton ? point == o.point
                     : (exponent == o.exponent && index == o.index &&
                        half_aligned == o.half_aligned);
  }

  std::string to_string() const {
    if (singleton) return "{" + detail::format_real(point) + "}";
    return "[" + detail::format_real(lower()) + "," +
           detail::format_real(upper()) + ")";
  }
};

// Smallest snapped interval that contains every value. A single distinct
// value gives a singleton.
inline SnappedInterval snap_root_interval(std::span<const double> values) {
  if (values.empty()) throw ValidationError("snap_root_interval: no values");
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw ValidationError("snap_root_interval: non-finite value");
  }
  if (lo == hi) return SnappedInterval::make_singleton(lo);
  int exponent = std::ilogb(hi - lo);
  while (true) {
    const double aligned = std::floor(std::ldexp(lo, -exponent));
    if (std::ldexp(aligned + 1, exponent) > hi) {
      return SnappedInterval::make(exponent,
                                   static_cast<std::int64_t>(aligned));
    }
    const double half = std::floor(std::ldexp(lo, 1 - exponent));
    if (lo < 0 && hi >= 0 && std::ldexp(half + 2, exponent - 1) > hi) {
      return SnappedInterval::make_half_aligned(
          exponent, static_cast<std::int64_t>(half));
    }
    ++exponent;
  }
}

struct AnonParams {
  double avg_suppress_threshold = 5.0;
  std::int64_t abs_suppress_threshold = 3;
  double noise_sd = 1.4;
  Bytes salt;

  void validate() const {
    if (abs_suppress_threshold < 1) {
      throw ValidationError("abs_suppress_threshold must be >= 1");
    }
    if (avg_suppress_threshold <
        static_cast<double>(abs_suppress_threshold)) {
      throw ValidationError(
          "avg_suppress_threshold must be >= abs_suppress_threshold");
    }
    if (!(noise_sd > 0) || !std::isfinite(noise_sd)) {
      throw ValidationError("noise_sd must be > 0");
    }
  }

  // Fingerprint of everything but the salt.
  std::string params_hash() const {
    KeyWriter w;
    w.f64(avg_suppress_threshold).i64(abs_suppress_threshold).f64(noise_sd);
    const auto d = digest256(w.bytes());
    return hex_string(std::span(d).first(16));
  }
  std::string salt_fingerprint() const {
    const auto d = digest256(salt);
    return hex_string(std::span(d).first(8));
  }
};

// (column, interval) pairs in ascending column-name order.
using NodeKey = std::vector<std::pair<std::string, SnappedInterval>>;

inline Bytes node_key_bytes(const NodeKey& key) {
  KeyWriter w;
  w.u64(key.size());
  for (const auto& [name, iv] : key) {
    w.str(name).u8(iv.singleton ? 1 : (iv.half_aligned ? 2 : 0));
    if (iv.singleton) {
      w.f64(iv.point);
    } else {
      w.i64(iv.exponent).i64(iv.index);
    }
  }
  return w.bytes();
}

inline std::string node_key_text(const NodeKey& key) {
  std::string out;
  for (const auto& [name, iv] : key) {
    if (!out.empty()) out += ';';
    out += name + "=" + iv.to_string();
  }
  return out;
}

// Zero-mean normal draw with standard deviation `sd`; a pure function of
// (salt, key).
inline double sticky_noise(const Prf& prf, const NodeKey& key, double sd) {
  return sd * prf.normal("noise", node_key_bytes(key));
}

inline double sticky_noise(std::span<const std::uint8_t> salt,
                           const NodeKey& key, double sd) {
  return sticky_noise(Prf(salt), key, sd);
}

// Noisy suppression threshold centred on avg_suppress_threshold, never
// below abs_suppress_threshold. Drawn independently of the count noise.
inline double suppression_threshold(const Prf& prf, const NodeKey& key,
                                    const AnonParams& params) {
  const double t = params.avg_suppress_threshold +
                   params.noise_sd * prf.normal("threshold", node_key_bytes(key));
  return std::max(t, static_cast<double>(params.abs_suppress_threshold));
}

inline double suppression_threshold(std::span<const std::uint8_t> salt,
                                    const NodeKey& key,
                                    const AnonParams& params) {
  return suppression_threshold(Prf(salt), key, params);
}

struct TreeNode {
  std::vector<SnappedInterval> intervals;  // one per tree column
  std::int64_t true_entity_count = 0;
  double noisy_count = 0;
  bool suppressed = false;
  int split_dimension = -1;
  std::array<std::int32_t, 2> children{-1, -1};
  // Per dimension: the value shared by every row in the node, if any.
  std::vector<std::optional<double>> single_value;

  bool is_leaf() const { return children[0] < 0; }
};

// One anonymized search tree. nodes[0] is the root; children of a split
// node are stored by index, suppressed children included.
struct Tree {
  std::vector<std::string> columns;  // sorted
  std::vector<TreeNode> nodes;

  const TreeNode& root() const { return nodes.front(); }

  NodeKey key(const TreeNode& node) const {
    NodeKey k;
    k.reserve(columns.size());
    for (std::size_t d = 0; d < columns.size(); ++d) {
      k.emplace_back(columns[d], node.intervals[d]);
    }
    return k;
  }
};

using TreePtr = std::shared_ptr<const Tree>;

inline std::vector<std::string> canonical_columns(
    std::vector<std::string> columns) {
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  return columns;
}

inline std::string combination_key(const std::vector<std::string>& columns) {
  std::string out;
  for (const auto& c : canonical_columns(columns)) {
    if (!out.empty()) out += '+';
    out += c;
  }
  return out;
}

// Shared, immutable inputs for building any tree over one dataset. Root
// intervals are snapped from whole columns, so a column has the same root
// range in every tree that contains it.
class TreeBuilder {
 public:
  TreeBuilder(const Dataset& ds, AnonParams params)
      : matrix_(encode_numeric(ds)),
        params_(std::move(params)),
        prf_(params_.salt),
        encoding_(ds.encoding_ptr()) {
    params_.validate();
    for (std::size_t c = 0; c < matrix_.names.size(); ++c) {
      const auto& name = matrix_.names[c];
      column_index_.emplace(name, c);
      const auto& col = ds.column_schema(name);
      kinds_.emplace(name, col.kind);
      schema_.emplace(name, col);
      if (ds.row_count() > 0) {
        const auto values = matrix_.values.col(static_cast<Eigen::Index>(c));
        roots_.emplace(name, snap_root_interval(std::span<const double>(
                                 values.data(), values.size())));
      }
    }
    has_entity_column_ = ds.entity_column().has_value();
  }

  const AnonParams& params() const { return params_; }
  const Prf& prf() const { return prf_; }
  const NumericMatrix& matrix() const { return matrix_; }
  const EncodingPtr& encoding() const { return encoding_; }
  std::size_t row_count() const {
    return static_cast<std::size_t>(matrix_.values.rows());
  }
  ColumnKind kind(const std::string& column) const {
    return kinds_.at(column);
  }
  const ColumnSchema& column_schema(const std::string& column) const {
    column_index(column);
    return schema_.at(column);
  }
  std::size_t column_index(const std::string& column) const {
    auto it = column_index_.find(column);
    if (it == column_index_.end()) {
      throw ValidationError("unknown or entity column '" + column + "'");
    }
    return it->second;
  }

  Tree build(const std::vector<std::string>& requested) const {
    if (requested.empty()) throw ValidationError("build_tree: no columns");
    Tree tree;
    tree.columns = canonical_columns(requested);
    const std::size_t dims = tree.columns.size();
    std::vector<std::size_t> col_idx;
    for (const auto& name : tree.columns) col_idx.push_back(column_index(name));

    std::vector<std::uint32_t> all_rows(row_count());
    for (std::size_t r = 0; r < all_rows.size(); ++r) {
      all_rows[r] = static_cast<std::uint32_t>(r);
    }

    TreeNode root;
    for (const auto& name : tree.columns) {
      root.intervals.push_back(row_count() ? roots_.at(name)
                                           : SnappedInterval::make_singleton(0));
    }
    root.true_entity_count = entity_count(all_rows);
    fill_single_values(root, all_rows, col_idx);
    const NodeKey root_key = tree.key(root);
    root.suppressed = static_cast<double>(root.true_entity_count) <
                      suppression_threshold(prf_, root_key, params_);
    root.noisy_count = noisy(root.true_entity_count, root_key);
    tree.nodes.push_back(std::move(root));
    if (tree.nodes[0].suppressed) return tree;

    struct Pending {
      std::int32_t node;
      std::vector<std::uint32_t> rows;
      int last_dim;
    };
    std::vector<Pending> stack;
    stack.push_back({0, std::move(all_rows), -1});
    while (!stack.empty()) {
      Pending item = std::move(stack.back());
      stack.pop_back();
      // Round-robin over the dimensions after the parent's split dimension.
      for (std::size_t step = 1; step <= dims; ++step) {
        const int dim = static_cast<int>(
            (static_cast<std::size_t>(item.last_dim + 1) + step - 1) % dims);
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(item.node)];
        if (!splittable(node, static_cast<std::size_t>(dim))) continue;

        const double mid = node.intervals[dim].middle();
        std::array<std::vector<std::uint32_t>, 2> parts;
        const std::size_t c = col_idx[static_cast<std::size_t>(dim)];
        for (auto r : item.rows) {
          const double v = matrix_.values(r, static_cast<Eigen::Index>(c));
          parts[v < mid ? 0 : 1].push_back(r);
        }
        const auto [lo_iv, hi_iv] = node.intervals[dim].halves();
        std::array<TreeNode, 2> kids;
        bool any_kept = false;
        for (int side = 0; side < 2; ++side) {
          TreeNode& kid = kids[side];
          kid.intervals = node.intervals;
          kid.intervals[dim] = side == 0 ? lo_iv : hi_iv;
          kid.true_entity_count = entity_count(parts[side]);
          const NodeKey key = tree.key(kid);
          kid.suppressed = static_cast<double>(kid.true_entity_count) <
                           suppression_threshold(prf_, key, params_);
          if (!kid.suppressed) {
            kid.noisy_count = noisy(kid.true_entity_count, key);
            fill_single_values(kid, parts[side], col_idx);
            any_kept = true;
          }
        }
        // A split that keeps nothing is not taken; try the next dimension.
        if (!any_kept) continue;

        const auto base = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes[static_cast<std::size_t>(item.node)].split_dimension = dim;
        tree.nodes[static_cast<std::size_t>(item.node)].children = {base,
                                                                     base + 1};
        for (int side = 0; side < 2; ++side) {
          const bool keep = !kids[side].suppressed;
          tree.nodes.push_back(std::move(kids[side]));
          if (keep) {
            stack.push_back({base + side, std::move(parts[side]), dim});
          }
        }
        break;
      }
    }
    return tree;
  }

 private:
  // Nodes stop splitting along a dimension once it is a singleton, once all
  // their rows share one value there, or once halving would go below the
  // resolution of a double.
  bool splittable(const TreeNode& node, std::size_t dim) const {
    const auto& iv = node.intervals[dim];
    if (iv.singleton || node.single_value[dim]) return false;
    const double magnitude = std::max(std::abs(iv.lower()), std::abs(iv.upper()));
    if (magnitude > 0 && iv.exponent - 1 < std::ilogb(magnitude) - 50) {
      return false;
    }
    return iv.exponent > -1000;
  }

  void fill_single_values(TreeNode& node, std::span<const std::uint32_t> rows,
                          const std::vector<std::size_t>& col_idx) const {
    node.single_value.assign(col_idx.size(), std::nullopt);
    if (rows.empty()) return;
    for (std::size_t d = 0; d < col_idx.size(); ++d) {
      const auto c = static_cast<Eigen::Index>(col_idx[d]);
      const double first = matrix_.values(rows.front(), c);
      bool same = true;
      for (auto r : rows) {
        if (matrix_.values(r, c) != first) {
          same = false;
          break;
        }
      }
      if (same) node.single_value[d] = first;
    }
  }

  std::int64_t entity_count(std::span<const std::uint32_t> rows) const {
    if (!has_entity_column_) return static_cast<std::int64_t>(rows.size());
    std::vector<std::int64_t> ids;
    ids.reserve(rows.size());
    for (auto r : rows) ids.push_back(matrix_.entity_of_row[r]);
    std::sort(ids.begin(), ids.end());
    return std::unique(ids.begin(), ids.end()) - ids.begin();
  }

  double noisy(std::int64_t count, const NodeKey& key) const {
    return std::max(0.0, static_cast<double>(count) +
                             sticky_noise(prf_, key, params_.noise_sd));
  }

  NumericMatrix matrix_;
  AnonParams params_;
  Prf prf_;
  EncodingPtr encoding_;
  bool has_entity_column_ = false;
  std::map<std::string, std::size_t> column_index_;
  std::map<std::string, ColumnKind> kinds_;
  std::map<std::string, ColumnSchema> schema_;
  std::map<std::string, SnappedInterval> roots_;
};

inline Tree build_tree(const Dataset& ds,
                       const std::vector<std::string>& columns,
                       const AnonParams& params) {
  return TreeBuilder(ds, params).build(columns);
}

// Memoizes trees by column set so that forests over overlapping
// combinations reuse each other's trees. Safe for concurrent callers.
class TreeCache {
 public:
  explicit TreeCache(const TreeBuilder& builder) : builder_(builder) {}

  const TreeBuilder& builder() const { return builder_; }

  TreePtr get(const std::vector<std::string>& columns) {
    const auto key = canonical_columns(columns);
    std::promise<TreePtr> promise;
    std::shared_future<TreePtr> future;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = trees_.find(key);
      if (it == trees_.end()) {
        future = promise.get_future().share();
        trees_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const Tree>(builder_.build(key)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

 private:
  const TreeBuilder& builder_;
  std::mutex mutex_;
  std::map<std::vector<std::string>, std::shared_future<TreePtr>> trees_;
};

// Every tree over a subset of `columns` of size <= max_tree_dim.
struct Forest {
  std::vector<std::string> columns;  // sorted
  Schema schema;                     // schemas of `columns`, same order
  EncodingPtr encoding;
  int max_tree_dim = 4;
  std::map<std::vector<std::string>, TreePtr> trees;

  const Tree* find(const std::vector<std::string>& subset) const {
    auto it = trees.find(canonical_columns(subset));
    return it == trees.end() ? nullptr : it->second.get();
  }
  const Tree* full_tree() const { return find(columns); }
};

namespace detail {

template <class Fn>
void for_each_subset(const std::vector<std::string>& items, std::size_t size,
                     Fn&& fn) {
  if (size == 0 || size > items.size()) return;
  std::vector<std::size_t> idx(size);
  for (std::size_t i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    std::vector<std::string> subset;
    for (auto i : idx) subset.push_back(items[i]);
    fn(subset);
    std::size_t i = size;
    while (i > 0 && idx[i - 1] == items.size() - size + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < size; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

inline Forest build_forest(TreeCache& cache,
                           const std::vector<std::string>& columns,
                           int max_tree_dim = 4) {
  if (columns.empty()) throw ValidationError("build_forest: no columns");
  if (max_tree_dim < 1) throw ValidationError("max_tree_dim must be >= 1");
  Forest forest;
  forest.columns = canonical_columns(columns);
  forest.max_tree_dim = max_tree_dim;
  for (const auto& name : forest.columns) {
    forest.schema.push_back(cache.builder().column_schema(name));
  }
  forest.encoding = cache.builder().encoding();
  const std::size_t top =
      std::min(forest.columns.size(), static_cast<std::size_t>(max_tree_dim));
  for (std::size_t k = 1; k <= top; ++k) {
    detail::for_each_subset(forest.columns, k, [&](const auto& subset) {
      forest.trees.emplace(subset, cache.get(subset));
    });
  }
  return forest;
}

inline Forest build_forest(const Dataset& ds,
                           const std::vector<std::string>& columns,
                           const AnonParams& params, int max_tree_dim = 4) {
  TreeBuilder builder(ds, params);
  TreeCache cache(builder);
  return build_forest(cache, columns, max_tree_dim);
}

// Debug view of a forest: every node's key with its true and noisy counts.
// Carries raw counts, so it is for inspection and testing only.
inline nlohmann::json forest_debug_dump(const Forest& forest) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [cols, tree] : forest.trees) {
    for (const auto& node : tree->nodes) {
      nlohmann::json entry{{"true_count", node.true_entity_count},
                           {"suppressed", node.suppressed}};
      entry["noisy_count"] = node.suppressed ? 0.0 : node.noisy_count;
      out[node_key_text(tree->key(node))] = std::move(entry);
    }
  }
  return out;
}

}  // namespace synthmark
