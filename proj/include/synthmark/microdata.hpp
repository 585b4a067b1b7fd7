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
#include <atomic>
#include <cmath>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/forest.hpp"
#include "synthmark/prf.hpp"
#include "synthmark/stats.hpp"
#include "synthmark/store.hpp"

namespace synthmark {

// Column combinations to synthesize, each sorted, without duplicates.
struct SynthesisPlan {
  std::vector<std::vector<std::string>> combinations;

  void add(std::vector<std::string> columns) {
    columns = canonical_columns(std::move(columns));
    if (std::find(combinations.begin(), combinations.end(), columns) ==
        combinations.end()) {
      combinations.push_back(std::move(columns));
    }
  }
  std::size_t total_columns() const {
    std::size_t total = 0;
    for (const auto& c : combinations) total += c.size();
    return total;
  }
};

// Plan file: a JSON list whose entries are column-name arrays or
// {"all_subsets_of_size": k} (every k-subset of the data columns).
inline SynthesisPlan parse_plan(const nlohmann::json& doc,
                                const Schema& schema) {
  if (!doc.is_array()) throw ValidationError("plan: expected a JSON list");
  std::vector<std::string> data_columns;
  std::set<std::string> known;
  for (const auto& col : schema) {
    if (col.kind == ColumnKind::entity_id) continue;
    data_columns.push_back(col.name);
    known.insert(col.name);
  }
  SynthesisPlan plan;
  for (const auto& entry : doc) {
    if (entry.is_object() && entry.contains("all_subsets_of_size")) {
      const int k = entry.at("all_subsets_of_size").get<int>();
      if (k < 1 || static_cast<std::size_t>(k) > data_columns.size()) {
        throw ValidationError("plan: all_subsets_of_size " +
                              std::to_string(k) + " is out of range");
      }
      detail::for_each_subset(data_columns, static_cast<std::size_t>(k),
                              [&](const auto& subset) { plan.add(subset); });
    } else if (entry.is_array()) {
      auto columns = entry.get<std::vector<std::string>>();
      if (columns.empty()) throw ValidationError("plan: empty combination");
      for (const auto& c : columns) {
        if (!known.contains(c)) {
          throw ValidationError("plan: unknown column '" + c + "'");
        }
      }
      if (canonical_columns(columns).size() != columns.size()) {
        throw ValidationError("plan: combination repeats a column");
      }
      plan.add(std::move(columns));
    } else {
      throw ValidationError("plan: bad entry " + entry.dump());
    }
  }
  return plan;
}

namespace detail {

// A region of one dimension that synthetic values are drawn from.
struct Piece {
  SnappedInterval interval;
  std::optional<double> value;  // every source row had this value
  double weight = 1;
};

inline void collect_leaves(const Tree& tree, std::int32_t index,
                           std::vector<Piece>& out) {
  const TreeNode& node = tree.nodes[static_cast<std::size_t>(index)];
  if (node.suppressed) return;
  if (node.is_leaf()) {
    out.push_back({node.intervals[0], node.single_value[0], node.noisy_count});
    return;
  }
  collect_leaves(tree, node.children[0], out);
  collect_leaves(tree, node.children[1], out);
}

// Sub-ranges of `target` taken from a one-dimensional tree, weighted by
// their noisy counts. Falls back to `target` itself when the tree has no
// finer information there.
inline std::vector<Piece> refine(const Tree& one_dim,
                                 const SnappedInterval& target) {
  std::int32_t index = 0;
  while (true) {
    const TreeNode& node = one_dim.nodes[static_cast<std::size_t>(index)];
    const auto& iv = node.intervals[0];
    if (node.suppressed) return {{target, std::nullopt, 1}};
    if (target.covers(iv)) {
      std::vector<Piece> pieces;
      collect_leaves(one_dim, index, pieces);
      double total = 0;
      for (const auto& p : pieces) total += p.weight;
      if (pieces.empty() || total <= 0) return {{target, std::nullopt, 1}};
      return pieces;
    }
    if (!iv.covers(target)) return {{target, std::nullopt, 1}};
    if (node.is_leaf()) {
      if (node.single_value[0] && target.contains(*node.single_value[0])) {
        return {{target, node.single_value[0], 1}};
      }
      return {{target, std::nullopt, 1}};
    }
    const auto& lo = one_dim.nodes[static_cast<std::size_t>(node.children[0])];
    index = lo.intervals[0].covers(target) ? node.children[0]
                                           : node.children[1];
  }
}

inline double draw_in(const Piece& piece, ColumnKind kind,
                      std::size_t category_count, Rng& rng) {
  if (piece.value) return *piece.value;
  const auto& iv = piece.interval;
  if (iv.singleton) return iv.point;
  if (kind == ColumnKind::categorical) {
    const double k = static_cast<double>(category_count);
    double first = std::max(0.0, std::ceil(iv.lower()));
    double last = std::min(k - 1, std::ceil(iv.upper()) - 1);
    if (first > last) return std::clamp(std::round(iv.middle()), 0.0, k - 1);
    const auto span = static_cast<std::uint64_t>(last - first) + 1;
    return first + static_cast<double>(rng.below(span));
  }
  const double v = iv.lower() + rng.uniform() * iv.size();
  return kind == ColumnKind::datetime ? std::floor(v) : v;
}

inline std::uint64_t seed_for(const Prf& prf, std::string_view domain,
                              const std::vector<std::string>& columns) {
  KeyWriter w;
  for (const auto& c : columns) w.str(c);
  return prf.u64(domain, w.bytes());
}

}  // namespace detail

// Where each synthetic row came from: the full-dimension leaf box and, per
// dimension, the range its value was drawn from.
struct SynthesisTrace {
  std::vector<std::vector<SnappedInterval>> leaf_box;
  std::vector<std::vector<SnappedInterval>> value_range;
};

// Emits round(noisy_count) rows for every kept leaf of the full-dimension
// tree. Within a leaf each value is drawn from the one-dimensional tree's
// kept nodes inside the leaf's range, in proportion to their noisy counts.
// A split node with a suppressed child also emits the part of its own
// noisy count that its kept children leave uncovered.
inline Dataset synthesize_table(const Forest& forest, const AnonParams& params,
                                SynthesisTrace* trace = nullptr) {
  const Tree* full = forest.full_tree();
  if (!full) {
    throw ValidationError("synthesize_table: forest has no full-dimension "
                          "tree for " + combination_key(forest.columns));
  }
  const std::size_t dims = forest.columns.size();
  std::vector<const Tree*> one_dim(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    one_dim[d] = forest.find({forest.columns[d]});
    if (!one_dim[d]) {
      throw ValidationError("synthesize_table: forest has no tree for '" +
                            forest.columns[d] + "'");
    }
  }
  const Prf prf(params.salt);
  std::vector<std::size_t> categories(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    categories[d] = forest.encoding->category_count(forest.columns[d]);
  }

  std::vector<std::vector<double>> columns(dims);
  SynthesisTrace local;
  auto emit = [&](const TreeNode& node, double count, std::string_view domain) {
    const double rows = std::nearbyint(count);
    if (rows <= 0) return;
    std::vector<std::vector<detail::Piece>> pieces(dims);
    std::vector<std::vector<double>> cumulative(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      if (node.single_value[d]) {
        pieces[d] = {{node.intervals[d], node.single_value[d], 1}};
      } else if (dims == 1 && node.is_leaf()) {
        pieces[d] = {{node.intervals[d], std::nullopt, 1}};
      } else {
        pieces[d] = detail::refine(*one_dim[d], node.intervals[d]);
      }
      double acc = 0;
      for (const auto& p : pieces[d]) {
        acc += p.weight;
        cumulative[d].push_back(acc);
      }
    }
    Rng rng(prf.u64(domain, node_key_bytes(full->key(node))));
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(rows); ++i) {
      std::vector<SnappedInterval> ranges;
      for (std::size_t d = 0; d < dims; ++d) {
        std::size_t pick = 0;
        if (pieces[d].size() > 1) {
          const double u = rng.uniform() * cumulative[d].back();
          pick = static_cast<std::size_t>(
              std::upper_bound(cumulative[d].begin(), cumulative[d].end(), u) -
              cumulative[d].begin());
          pick = std::min(pick, pieces[d].size() - 1);
        }
        const auto& piece = pieces[d][pick];
        columns[d].push_back(detail::draw_in(
            piece, forest.schema[d].kind, categories[d], rng));
        if (trace) ranges.push_back(piece.interval);
      }
      if (trace) {
        local.leaf_box.push_back(node.intervals);
        local.value_range.push_back(std::move(ranges));
      }
    }
  };
  for (const auto& node : full->nodes) {
    if (node.suppressed) continue;
    if (node.is_leaf()) {
      emit(node, node.noisy_count, "place");
      continue;
    }
    // Rows of suppressed children are not lost: whatever the kept
    // children do not account for is spread over the whole node.
    const auto& lo = full->nodes[static_cast<std::size_t>(node.children[0])];
    const auto& hi = full->nodes[static_cast<std::size_t>(node.children[1])];
    if (!lo.suppressed && !hi.suppressed) continue;
    double kept = 0;
    for (const auto* child : {&lo, &hi}) {
      if (!child->suppressed) kept += child->noisy_count;
    }
    emit(node, node.noisy_count - kept, "remainder");
  }

  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffler(detail::seed_for(prf, "shuffle", forest.columns));
  shuffler.shuffle(order);
  for (auto& col : columns) {
    std::vector<double> shuffled(n);
    for (std::size_t i = 0; i < n; ++i) shuffled[i] = col[order[i]];
    col = std::move(shuffled);
  }
  if (trace) {
    trace->leaf_box.clear();
    trace->value_range.clear();
    for (auto i : order) {
      trace->leaf_box.push_back(local.leaf_box[i]);
      trace->value_range.push_back(local.value_range[i]);
    }
  }
  return Dataset(forest.schema, std::move(columns), forest.encoding);
}

// Partition of a wide combination into low-dimensional clusters. Cluster i
// (i > 0) is synthesized together with its stitch columns, which are drawn
// from the clusters before it; the merged result is built left to right.
struct ClusterPlan {
  std::vector<std::vector<std::string>> clusters;  // disjoint, sorted
  std::vector<std::vector<std::string>> stitch;    // stitch[0] is empty

  std::vector<std::string> table_columns(std::size_t i) const {
    std::vector<std::string> cols = clusters[i];
    cols.insert(cols.end(), stitch[i].begin(), stitch[i].end());
    return canonical_columns(cols);
  }
  std::vector<std::string> all_columns() const {
    std::vector<std::string> cols;
    for (const auto& c : clusters) cols.insert(cols.end(), c.begin(), c.end());
    return canonical_columns(cols);
  }
};

// Pairwise |Kendall tau| between encoded columns; constant columns score 0.
inline std::map<std::pair<std::string, std::string>, double> dependence_matrix(
    const Dataset& ds, const std::vector<std::string>& columns) {
  std::map<std::pair<std::string, std::string>, double> dep;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      double score = 0;
      if (ds.row_count() >= 2) {
        const auto k =
            stats::kendall_tau(ds.column(columns[i]), ds.column(columns[j]));
        score = k.degenerate ? 0 : std::abs(k.tau);
      }
      dep[{columns[i], columns[j]}] = score;
      dep[{columns[j], columns[i]}] = score;
    }
  }
  return dep;
}

// Greedy clustering by pairwise dependence. Each cluster is seeded with the
// most dependent unassigned pair and grown by best average dependence; later
// clusters reserve room for one stitch column (two when the cluster size
// allows it), chosen as the already-placed columns most dependent on the new
// cluster. Every synthesized table has at most max_cluster_dim columns.
inline ClusterPlan plan_clusters(const Dataset& ds,
                                 const std::vector<std::string>& columns,
                                 int max_cluster_dim) {
  const auto cols = canonical_columns(columns);
  if (max_cluster_dim < 2) {
    throw ValidationError("plan_clusters: max_cluster_dim must be >= 2");
  }
  if (cols.size() <= static_cast<std::size_t>(max_cluster_dim)) {
    throw ValidationError(
        "plan_clusters: combination fits in one tree; synthesize it directly");
  }
  const auto dep = dependence_matrix(ds, cols);
  auto score = [&](const std::string& a, const std::string& b) {
    return dep.at({a, b});
  };
  const std::size_t stitch_width = max_cluster_dim >= 4 ? 2 : 1;

  ClusterPlan plan;
  std::vector<std::string> unassigned = cols;
  std::vector<std::string> placed;
  while (!unassigned.empty()) {
    const bool first = plan.clusters.empty();
    const std::size_t core_size =
        first ? static_cast<std::size_t>(max_cluster_dim)
              : static_cast<std::size_t>(max_cluster_dim) - stitch_width;
    std::vector<std::string> cluster;
    if (core_size >= 2 && unassigned.size() >= 2) {
      double best = -1;
      std::pair<std::string, std::string> seed;
      for (std::size_t i = 0; i < unassigned.size(); ++i) {
        for (std::size_t j = i + 1; j < unassigned.size(); ++j) {
          const double s = score(unassigned[i], unassigned[j]);
          if (s > best) {
            best = s;
            seed = {unassigned[i], unassigned[j]};
          }
        }
      }
      cluster = {seed.first, seed.second};
    } else {
      // A lone column: take the one most tied to the rest of the data.
      double best = -1;
      std::string pick;
      for (const auto& c : unassigned) {
        double total = 0;
        for (const auto& o : cols) {
          if (o != c) total += score(c, o);
        }
        if (total > best) {
          best = total;
          pick = c;
        }
      }
      cluster = {pick};
    }
    std::erase_if(unassigned, [&](const std::string& c) {
      return std::find(cluster.begin(), cluster.end(), c) != cluster.end();
    });
    while (cluster.size() < core_size && !unassigned.empty()) {
      double best = -1;
      std::string pick;
      for (const auto& c : unassigned) {
        double total = 0;
        for (const auto& m : cluster) total += score(c, m);
        const double avg = total / static_cast<double>(cluster.size());
        if (avg > best) {
          best = avg;
          pick = c;
        }
      }
      cluster.push_back(pick);
      std::erase(unassigned, pick);
    }

    std::vector<std::string> stitch;
    if (!first) {
      std::vector<std::pair<double, std::string>> ranked;
      for (const auto& p : placed) {
        double total = 0;
        for (const auto& m : cluster) total += score(p, m);
        ranked.emplace_back(-total / static_cast<double>(cluster.size()), p);
      }
      std::sort(ranked.begin(), ranked.end());
      for (std::size_t i = 0; i < std::min(stitch_width, ranked.size()); ++i) {
        stitch.push_back(ranked[i].second);
      }
    }
    placed.insert(placed.end(), cluster.begin(), cluster.end());
    plan.clusters.push_back(canonical_columns(cluster));
    plan.stitch.push_back(canonical_columns(stitch));
  }
  return plan;
}

namespace detail {

// Row order sorted by the given columns, ties broken by a seeded shuffle.
inline std::vector<std::size_t> stitch_order(
    const Dataset& table, const std::vector<std::string>& keys, Rng& rng) {
  std::vector<std::size_t> order(table.row_count());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::vector<std::span<const double>> cols;
  for (const auto& k : keys) cols.push_back(table.column(k));
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     for (const auto& col : cols) {
                       if (col[a] != col[b]) return col[a] < col[b];
                     }
                     return false;
                   });
  return order;
}

}  // namespace detail

// Merges per-cluster tables left to right. Both sides are sorted on the
// stitch columns and aligned row by row; when the right table has a
// different row count it is resampled (seeded) to the left's count. Stitch
// values come from the left table.
inline Dataset stitch(const std::vector<Dataset>& tables,
                      const ClusterPlan& plan, std::uint64_t seed = 0) {
  if (tables.empty()) throw ValidationError("stitch: no tables");
  if (tables.size() != plan.clusters.size()) {
    throw ValidationError("stitch: table count does not match the plan");
  }
  Dataset merged = tables.front();
  Rng rng(seed);
  for (std::size_t i = 1; i < tables.size(); ++i) {
    const auto& keys = plan.stitch[i];
    const Dataset& right_full = tables[i];
    for (const auto& k : keys) {
      if (!merged.has_column(k) || !right_full.has_column(k)) {
        throw ValidationError("stitch: stitch column '" + k +
                              "' missing from a table");
      }
    }
    const std::size_t m = right_full.row_count();
    // Nothing to align against an empty side.
    const std::size_t n = m == 0 ? 0 : merged.row_count();
    std::vector<std::size_t> pick;
    if (m == n) {
      pick.resize(m);
      std::iota(pick.begin(), pick.end(), 0);
    } else if (m > n) {
      std::vector<std::size_t> all(m);
      std::iota(all.begin(), all.end(), 0);
      rng.shuffle(all);
      pick.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
    } else {
      pick.resize(m);
      std::iota(pick.begin(), pick.end(), 0);
      if (m > 0) {
        while (pick.size() < n) pick.push_back(rng.below(m));
      }
    }
    const Dataset right = right_full.select_rows(pick);

    const auto left_order = detail::stitch_order(merged, keys, rng);
    const auto right_order = detail::stitch_order(right, keys, rng);

    std::vector<std::string> out_cols = merged.data_columns();
    for (const auto& c : right.data_columns()) {
      if (!merged.has_column(c)) out_cols.push_back(c);
    }
    out_cols = canonical_columns(out_cols);
    Schema schema;
    std::vector<std::vector<double>> columns;
    for (const auto& c : out_cols) {
      const bool from_left = merged.has_column(c);
      const Dataset& src = from_left ? merged : right;
      schema.push_back(src.column_schema(c));
      const auto values = src.column(c);
      const auto& order = from_left ? left_order : right_order;
      std::vector<double> col;
      col.reserve(n);
      for (std::size_t r = 0; r < n; ++r) col.push_back(values[order[r]]);
      columns.push_back(std::move(col));
    }
    merged = Dataset(std::move(schema), std::move(columns),
                     merged.encoding_ptr());
  }
  return merged;
}

struct RunOptions {
  int max_tree_dim = 4;
  int jobs = 1;
  // Called after each combination with its key and wall-clock seconds.
  std::function<void(const std::string&, double)> on_table;
};

// Synthesizes every combination of the plan into `store`. Combinations up
// to max_tree_dim columns get a forest of their own; wider ones are
// clustered, synthesized per cluster and stitched. On failure the tables
// finished so far stay in `store` and the error propagates.
inline void run_plan(const Dataset& ds, const SynthesisPlan& plan,
                     const AnonParams& params, const RunOptions& options,
                     SynTableStore& store) {
  TreeBuilder builder(ds, params);
  TreeCache cache(builder);
  const Prf prf(params.salt);

  auto synthesize_one = [&](const std::vector<std::string>& combo) {
    if (combo.size() <= static_cast<std::size_t>(options.max_tree_dim)) {
      return synthesize_table(build_forest(cache, combo, options.max_tree_dim),
                              params);
    }
    const ClusterPlan clusters =
        plan_clusters(ds, combo, std::max(2, options.max_tree_dim));
    std::vector<Dataset> parts;
    for (std::size_t i = 0; i < clusters.clusters.size(); ++i) {
      const auto cols = clusters.table_columns(i);
      parts.push_back(synthesize_table(
          build_forest(cache, cols, std::max<int>(options.max_tree_dim,
                                                  static_cast<int>(cols.size()))),
          params));
    }
    return stitch(parts, clusters, detail::seed_for(prf, "stitch", combo));
  };

  std::mutex store_mutex;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.combinations.size()) return;
      {
        std::lock_guard lock(store_mutex);
        if (failure) return;
      }
      const auto& combo = plan.combinations[i];
      const auto start = std::chrono::steady_clock::now();
      try {
        Dataset table = synthesize_one(combo);
        const double secs = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        std::lock_guard lock(store_mutex);
        store.put(std::move(table));
        if (options.on_table) options.on_table(combination_key(combo), secs);
      } catch (...) {
        std::lock_guard lock(store_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  const int jobs = std::max(1, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (int j = 0; j < jobs; ++j) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

inline SynTableStore run_plan(const Dataset& ds, const SynthesisPlan& plan,
                              const AnonParams& params,
                              const RunOptions& options = {}) {
  SynTableStore store;
  run_plan(ds, plan, params, options, store);
  return store;
}

}  // namespace synthmark
