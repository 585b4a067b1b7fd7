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

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "synthmark/data_model.hpp"
#include "synthmark/error.hpp"
#include "synthmark/forest.hpp"

namespace synthmark {

enum class FetchPolicy { exact, project_from_superset };

inline FetchPolicy parse_fetch_policy(std::string_view text) {
  if (text == "exact") return FetchPolicy::exact;
  if (text == "project" || text == "project_from_superset") {
    return FetchPolicy::project_from_superset;
  }
  throw ValidationError("unknown fetch policy '" + std::string(text) + "'");
}

// Map from column set to synthetic table. Tables are held in memory or
// loaded lazily from a store directory (one CSV per combination plus
// manifest.json). Keys are the sorted column names joined by '+'.
class SynTableStore {
 public:
  struct Entry {
    std::vector<std::string> columns;  // sorted
    std::filesystem::path file;        // empty for in-memory tables
    std::size_t rows = 0;
    std::shared_ptr<const Dataset> table;
  };

  SynTableStore() = default;
  explicit SynTableStore(FetchPolicy policy) : policy_(policy) {}

  // Opens a store directory. Tables are decoded with the original's schema
  // and encoding so that codes line up with the original data.
  static SynTableStore open(const std::filesystem::path& dir,
                            const Schema& original_schema,
                            EncodingPtr base_encoding,
                            FetchPolicy policy = FetchPolicy::exact) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) {
      throw ValidationError("store: cannot open " + manifest_path.string());
    }
    nlohmann::json manifest;
    try {
      in >> manifest;
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError("store: invalid manifest: " +
                            std::string(e.what()));
    }
    SynTableStore store(policy);
    store.schema_ = original_schema;
    store.base_encoding_ = std::move(base_encoding);
    store.manifest_ = manifest;
    for (const auto& [key, info] : manifest.at("tables").items()) {
      Entry e;
      e.columns = info.at("columns").get<std::vector<std::string>>();
      e.file = dir / info.at("file").get<std::string>();
      e.rows = info.at("rows").get<std::size_t>();
      if (combination_key(e.columns) != key) {
        throw ValidationError("store: manifest key '" + key +
                              "' does not match its columns");
      }
      if (!std::filesystem::exists(e.file)) {
        throw ValidationError("store: missing table file " + e.file.string());
      }
      store.entries_.emplace(key, std::move(e));
    }
    return store;
  }

  FetchPolicy policy() const { return policy_; }
  void set_policy(FetchPolicy policy) { policy_ = policy; }
  const nlohmann::json& manifest() const { return manifest_; }

  void put(Dataset table) {
    Entry e;
    e.columns = canonical_columns(table.data_columns());
    const auto key = combination_key(e.columns);
    e.rows = table.row_count();
    e.table = std::make_shared<const Dataset>(table.project(e.columns));
    entries_[key] = std::move(e);
  }

  std::size_t size() const { return entries_.size(); }
  bool contains(const std::vector<std::string>& columns) const {
    return entries_.contains(combination_key(columns));
  }
  std::vector<std::string> keys() const {
    std::vector<std::string> out;
    for (const auto& [key, e] : entries_) out.push_back(key);
    return out;
  }
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Key of the table that would serve `columns` under the current policy,
  // or nullopt. Superset projection picks the smallest superset, breaking
  // ties by key order.
  std::optional<std::string> resolve(
      const std::vector<std::string>& columns) const {
    const auto wanted = canonical_columns(columns);
    const auto key = combination_key(wanted);
    if (entries_.contains(key)) return key;
    if (policy_ == FetchPolicy::exact) return std::nullopt;
    std::optional<std::string> best;
    std::size_t best_size = 0;
    for (const auto& [k, e] : entries_) {
      if (!std::includes(e.columns.begin(), e.columns.end(), wanted.begin(),
                         wanted.end())) {
        continue;
      }
      if (!best || e.columns.size() < best_size) {
        best = k;
        best_size = e.columns.size();
      }
    }
    return best;
  }

  // The synthetic table restricted to `columns`, in the requested order.
  Dataset fetch(const std::vector<std::string>& columns) const {
    const auto key = resolve(columns);
    if (!key) throw MissingTableError(combination_key(columns));
    return load(*key).project(columns);
  }

  Dataset load(const std::string& key) const {
    const Entry& e = entries_.at(key);
    if (e.table) return *e.table;
    std::lock_guard lock(cache_->mutex);
    auto it = cache_->tables.find(key);
    if (it != cache_->tables.end()) return *it->second;
    Schema schema;
    for (const auto& name : e.columns) {
      auto col = std::find_if(schema_.begin(), schema_.end(),
                              [&](const auto& c) { return c.name == name; });
      if (col == schema_.end()) {
        throw ValidationError("store: table '" + key +
                              "' has column '" + name +
                              "' not in the original schema");
      }
      schema.push_back(*col);
    }
    auto table = std::make_shared<const Dataset>(
        load_csv(e.file.string(), schema, base_encoding_.get()));
    cache_->tables.emplace(key, table);
    return *table;
  }

  // Writes every table as CSV and a manifest. `extra` fields are merged
  // into the manifest (params hash, salt fingerprint, completeness, ...).
  void write(const std::filesystem::path& dir,
             const nlohmann::json& extra) const {
    std::filesystem::create_directories(dir);
    nlohmann::json tables = nlohmann::json::object();
    nlohmann::json combos = nlohmann::json::array();
    for (const auto& [key, e] : entries_) {
      const std::string file = key + ".csv";
      const Dataset table = load(key);
      std::ofstream out(dir / file, std::ios::binary);
      if (!out) throw ValidationError("store: cannot write " + file);
      write_csv(out, table);
      tables[key] = {{"columns", e.columns},
                     {"file", file},
                     {"rows", table.row_count()}};
      combos.push_back(e.columns);
    }
    nlohmann::json manifest = extra;
    manifest["tables"] = tables;
    manifest["combinations"] = combos;
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
  }

 private:
  FetchPolicy policy_ = FetchPolicy::exact;
  std::map<std::string, Entry> entries_;
  Schema schema_;
  EncodingPtr base_encoding_;
  nlohmann::json manifest_;
  struct Cache {
    std::mutex mutex;
    std::map<std::string, std::shared_ptr<const Dataset>> tables;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace synthmark
