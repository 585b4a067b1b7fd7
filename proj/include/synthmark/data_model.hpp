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

#include <Eigen/Core>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "synthmark/csv.hpp"
#include "synthmark/error.hpp"

namespace synthmark {

enum class ColumnKind { continuous, categorical, datetime, entity_id };

inline std::string_view to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous:
      return "continuous";
    case ColumnKind::categorical:
      return "categorical";
    case ColumnKind::datetime:
      return "datetime";
    case ColumnKind::entity_id:
      return "entity_id";
  }
  return "?";
}

inline ColumnKind parse_column_kind(std::string_view text) {
  if (text == "continuous") return ColumnKind::continuous;
  if (text == "categorical") return ColumnKind::categorical;
  if (text == "datetime") return ColumnKind::datetime;
  if (text == "entity_id") return ColumnKind::entity_id;
  throw ValidationError("unknown column kind '" + std::string(text) + "'");
}

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  // Declared domain. Continuous: closed [min, max]. Categorical: the value
  // list, which also fixes the code order.
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> values;

  bool operator==(const ColumnSchema&) const = default;
};

using Schema = std::vector<ColumnSchema>;

inline void validate_schema(const Schema& schema) {
  std::set<std::string> names;
  int entity_columns = 0;
  for (const auto& col : schema) {
    if (col.name.empty()) throw ValidationError("schema: empty column name");
    if (!names.insert(col.name).second) {
      throw ValidationError("schema: duplicate column name '" + col.name +
                            "'");
    }
    if (col.kind == ColumnKind::entity_id) ++entity_columns;
    if (col.min && col.max && *col.min > *col.max) {
      throw ValidationError("schema: column '" + col.name +
                            "' has min > max");
    }
    if (!col.values.empty()) {
      std::set<std::string> distinct(col.values.begin(), col.values.end());
      if (distinct.size() != col.values.size()) {
        throw ValidationError("schema: column '" + col.name +
                              "' declares duplicate values");
      }
    }
  }
  if (entity_columns > 1) {
    throw ValidationError("schema: more than one entity_id column");
  }
}

// Schema file: JSON list of {"name", "kind", optional "domain"}. The domain
// is {"min": x, "max": y} for continuous columns and a list of strings for
// categorical columns.
inline Schema parse_schema(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ValidationError("schema: expected a JSON list");
  Schema schema;
  for (const auto& entry : doc) {
    if (!entry.is_object() || !entry.contains("name") ||
        !entry.contains("kind")) {
      throw ValidationError("schema: each entry needs 'name' and 'kind'");
    }
    ColumnSchema col;
    col.name = entry.at("name").get<std::string>();
    col.kind = parse_column_kind(entry.at("kind").get<std::string>());
    if (entry.contains("domain")) {
      const auto& domain = entry.at("domain");
      if (domain.is_array()) {
        if (domain.empty()) {
          throw ValidationError("schema: column '" + col.name +
                                "' declares an empty value list");
        }
        for (const auto& v : domain) {
          col.values.push_back(v.is_string() ? v.get<std::string>()
                                             : v.dump());
        }
      } else if (domain.is_object()) {
        if (domain.contains("min")) col.min = domain.at("min").get<double>();
        if (domain.contains("max")) col.max = domain.at("max").get<double>();
      } else {
        throw ValidationError("schema: bad domain for column '" + col.name +
                              "'");
      }
    }
    schema.push_back(std::move(col));
  }
  validate_schema(schema);
  return schema;
}

inline Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schema file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("schema: invalid JSON in " + path + ": " +
                          e.what());
  }
  return parse_schema(doc);
}

inline nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& col : schema) {
    nlohmann::json entry{{"name", col.name},
                         {"kind", std::string(to_string(col.kind))}};
    if (!col.values.empty()) entry["domain"] = col.values;
    if (col.min || col.max) {
      nlohmann::json domain = nlohmann::json::object();
      if (col.min) domain["min"] = *col.min;
      if (col.max) domain["max"] = *col.max;
      entry["domain"] = domain;
    }
    doc.push_back(std::move(entry));
  }
  return doc;
}

namespace detail {

inline std::optional<double> parse_real(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::string format_real(double value) {
  if (value == 0) value = 0;  // no "-0"
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

// Accepts YYYY-MM-DD, optionally followed by 'T' or ' ' and HH:MM[:SS[.f]],
// optionally terminated by 'Z'. Returns seconds since the Unix epoch (UTC)
// and whether a time-of-day part was present.
inline std::optional<std::pair<double, bool>> parse_datetime(
    std::string_view text) {
  auto digits = [&](std::size_t pos, std::size_t n) -> std::optional<int> {
    if (pos + n > text.size()) return std::nullopt;
    int v = 0;
    for (std::size_t i = pos; i < pos + n; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
  auto y = digits(0, 4);
  auto mo = digits(5, 2);
  auto d = digits(8, 2);
  if (!y || !mo || !d || text.size() < 10 || text[4] != '-' ||
      text[7] != '-') {
    return std::nullopt;
  }
  using namespace std::chrono;
  const year_month_day ymd{year{*y}, month{static_cast<unsigned>(*mo)},
                           day{static_cast<unsigned>(*d)}};
  if (!ymd.ok()) return std::nullopt;
  double seconds =
      static_cast<double>(sys_days{ymd}.time_since_epoch().count()) * 86400.0;
  if (text.size() == 10) return std::make_pair(seconds, false);
  if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
  auto hh = digits(11, 2);
  auto mm = digits(14, 2);
  if (!hh || !mm || text.size() < 16 || text[13] != ':' || *hh > 23 ||
      *mm > 59) {
    return std::nullopt;
  }
  seconds += *hh * 3600.0 + *mm * 60.0;
  if (text.size() > 16) {
    if (text[16] != ':') return std::nullopt;
    auto frac = parse_real(text.substr(17));
    if (!frac || *frac < 0 || *frac >= 61) return std::nullopt;
    seconds += *frac;
  }
  return std::make_pair(seconds, true);
}

inline std::string format_datetime(double seconds, bool date_only) {
  using namespace std::chrono;
  const auto whole = static_cast<std::int64_t>(std::llround(seconds));
  const auto day_index =
      static_cast<std::int64_t>(std::floor(static_cast<double>(whole) / 86400));
  const std::int64_t secs_of_day = whole - day_index * 86400;
  const year_month_day ymd{sys_days{days{day_index}}};
  char buf[48];
  if (date_only) {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()));
  } else {
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d",
                  int(ymd.year()), unsigned(ymd.month()),
                  unsigned(ymd.day()), int(secs_of_day / 3600),
                  int(secs_of_day / 60 % 60), int(secs_of_day % 60));
  }
  return buf;
}

}  // namespace detail

// Value <-> number mapping for the non-continuous columns of one schema.
// Categorical and entity_id columns map each distinct string to an integer
// code 0..k-1 in first-appearance order (declared order when the schema
// lists the values). Datetime columns map to seconds since the epoch.
class ColumnEncoding {
 public:
  struct Codebook {
    std::vector<std::string> values;
    std::unordered_map<std::string, std::int64_t> codes;

    std::int64_t code_for(const std::string& value) {
      auto [it, inserted] =
          codes.emplace(value, static_cast<std::int64_t>(values.size()));
      if (inserted) values.push_back(value);
      return it->second;
    }
    std::optional<std::int64_t> find(const std::string& value) const {
      auto it = codes.find(value);
      if (it == codes.end()) return std::nullopt;
      return it->second;
    }
  };

  const Codebook* codebook(const std::string& column) const {
    auto it = codebooks_.find(column);
    return it == codebooks_.end() ? nullptr : &it->second;
  }
  Codebook& mutable_codebook(const std::string& column) {
    return codebooks_[column];
  }

  // Date-only columns print as YYYY-MM-DD.
  bool date_only(const std::string& column) const {
    auto it = date_only_.find(column);
    return it == date_only_.end() ? false : it->second;
  }
  void set_date_only(const std::string& column, bool value) {
    date_only_[column] = value;
  }

  std::size_t category_count(const std::string& column) const {
    const auto* book = codebook(column);
    return book ? book->values.size() : 0;
  }

  bool operator==(const ColumnEncoding& other) const {
    if (date_only_ != other.date_only_) return false;
    if (codebooks_.size() != other.codebooks_.size()) return false;
    for (const auto& [name, book] : codebooks_) {
      const auto* theirs = other.codebook(name);
      if (!theirs || theirs->values != book.values) return false;
    }
    return true;
  }

 private:
  std::map<std::string, Codebook> codebooks_;
  std::map<std::string, bool> date_only_;
};

using EncodingPtr = std::shared_ptr<const ColumnEncoding>;

// Typed columnar table. Every cell is held in its numeric encoding; the
// shared ColumnEncoding decodes categorical, entity and datetime cells.
// Immutable once built.
class Dataset {
 public:
  Dataset() : encoding_(std::make_shared<ColumnEncoding>()) {}

  Dataset(Schema schema, std::vector<std::vector<double>> columns,
          EncodingPtr encoding)
      : schema_(std::move(schema)),
        columns_(std::move(columns)),
        encoding_(std::move(encoding)) {
    if (!encoding_) encoding_ = std::make_shared<ColumnEncoding>();
    if (schema_.size() != columns_.size()) {
      throw ValidationError("dataset: schema/column count mismatch");
    }
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& col : columns_) {
      if (col.size() != rows_) {
        throw ValidationError("dataset: ragged columns");
      }
    }
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      index_.emplace(schema_[i].name, i);
    }
  }

  const Schema& schema() const { return schema_; }
  std::size_t row_count() const { return rows_; }
  std::size_t column_count() const { return schema_.size(); }
  const ColumnEncoding& encoding() const { return *encoding_; }
  const EncodingPtr& encoding_ptr() const { return encoding_; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool has_column(const std::string& name) const {
    return index_.contains(name);
  }
  std::size_t require(const std::string& name) const {
    auto idx = index_of(name);
    if (!idx) throw ValidationError("unknown column '" + name + "'");
    return *idx;
  }

  std::span<const double> column(std::size_t i) const { return columns_[i]; }
  std::span<const double> column(const std::string& name) const {
    return columns_[require(name)];
  }
  const ColumnSchema& column_schema(const std::string& name) const {
    return schema_[require(name)];
  }

  std::optional<std::size_t> entity_column() const {
    for (std::size_t i = 0; i < schema_.size(); ++i) {
      if (schema_[i].kind == ColumnKind::entity_id) return i;
    }
    return std::nullopt;
  }

  // Names of the columns that take part in synthesis and measurement.
  std::vector<std::string> data_columns() const {
    std::vector<std::string> names;
    for (const auto& col : schema_) {
      if (col.kind != ColumnKind::entity_id) names.push_back(col.name);
    }
    return names;
  }

  std::string cell_text(std::size_t row, std::size_t col) const {
    return value_text(schema_[col], columns_[col][row]);
  }

  std::string value_text(const ColumnSchema& col, double value) const {
    switch (col.kind) {
      case ColumnKind::continuous:
        return detail::format_real(value);
      case ColumnKind::datetime:
        return detail::format_datetime(value, encoding_->date_only(col.name));
      case ColumnKind::categorical:
      case ColumnKind::entity_id: {
        const auto* book = encoding_->codebook(col.name);
        const auto code = static_cast<std::int64_t>(value);
        if (!book || code < 0 ||
            code >= static_cast<std::int64_t>(book->values.size())) {
          return detail::format_real(value);
        }
        return book->values[static_cast<std::size_t>(code)];
      }
    }
    return {};
  }

  // Columns in the requested order; the encoding is shared.
  Dataset project(const std::vector<std::string>& names) const {
    Schema schema;
    std::vector<std::vector<double>> columns;
    for (const auto& name : names) {
      const auto idx = require(name);
      schema.push_back(schema_[idx]);
      columns.push_back(columns_[idx]);
    }
    return Dataset(std::move(schema), std::move(columns), encoding_);
  }

  Dataset select_rows(std::span<const std::size_t> rows) const {
    std::vector<std::vector<double>> columns(columns_.size());
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      columns[c].reserve(rows.size());
      for (auto r : rows) columns[c].push_back(columns_[c][r]);
    }
    return Dataset(schema_, std::move(columns), encoding_);
  }

  // Cell-wise equality on decoded values, so two datasets with different
  // (but consistent) encodings compare equal.
  bool operator==(const Dataset& other) const {
    if (rows_ != other.rows_ || schema_.size() != other.schema_.size()) {
      return false;
    }
    for (std::size_t c = 0; c < schema_.size(); ++c) {
      if (schema_[c].name != other.schema_[c].name ||
          schema_[c].kind != other.schema_[c].kind) {
        return false;
      }
      const bool numeric = schema_[c].kind == ColumnKind::continuous ||
                           schema_[c].kind == ColumnKind::datetime;
      const bool same_codes = encoding_ == other.encoding_;
      for (std::size_t r = 0; r < rows_; ++r) {
        if (numeric || same_codes) {
          if (columns_[c][r] != other.columns_[c][r]) return false;
        } else if (cell_text(r, c) != other.cell_text(r, c)) {
          return false;
        }
      }
    }
    return true;
  }

 private:
  Schema schema_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
  EncodingPtr encoding_;
  std::unordered_map<std::string, std::size_t> index_;
};

// `ds` with its categorical codes rewritten into `reference`'s codebooks, so
// equal labels carry equal codes in both. Labels the reference never saw
// are appended after its own.
inline Dataset recode_like(const Dataset& ds, const Dataset& reference) {
  if (ds.encoding_ptr() == reference.encoding_ptr()) return ds;
  auto encoding = std::make_shared<ColumnEncoding>(reference.encoding());
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < ds.column_count(); ++c) {
    const auto& col = ds.schema()[c];
    const auto src = ds.column(c);
    columns.emplace_back(src.begin(), src.end());
    if (col.kind != ColumnKind::categorical &&
        col.kind != ColumnKind::entity_id) {
      continue;
    }
    const auto* theirs = ds.encoding().codebook(col.name);
    if (!theirs) continue;
    auto& book = encoding->mutable_codebook(col.name);
    std::vector<double> remap;
    for (const auto& label : theirs->values) {
      remap.push_back(static_cast<double>(book.code_for(label)));
    }
    for (auto& v : columns.back()) {
      if (v >= 0 && v < static_cast<double>(remap.size())) {
        v = remap[static_cast<std::size_t>(v)];
      }
    }
  }
  return Dataset(ds.schema(), std::move(columns), std::move(encoding));
}

// Builds a Dataset from string records whose header lists the schema names
// in any order. With a base encoding, known categories keep their codes and
// new ones are appended after them.
inline Dataset dataset_from_records(const Schema& schema,
                                    const csv::Record& header,
                                    std::span<const csv::Record> records,
                                    const ColumnEncoding* base = nullptr) {
  validate_schema(schema);
  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!position.emplace(header[i], i).second) {
      throw ValidationError("csv: duplicate header '" + header[i] + "'");
    }
  }
  for (const auto& col : schema) {
    if (!position.contains(col.name)) {
      throw ValidationError("csv: missing column '" + col.name + "'");
    }
  }
  if (header.size() != schema.size()) {
    for (const auto& name : header) {
      if (std::none_of(schema.begin(), schema.end(),
                       [&](const auto& c) { return c.name == name; })) {
        throw ValidationError("csv: column '" + name +
                              "' is not in the schema");
      }
    }
  }

  auto encoding =
      base ? std::make_shared<ColumnEncoding>(*base)
           : std::make_shared<ColumnEncoding>();
  std::vector<std::vector<double>> columns(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema[c];
    const std::size_t src = position.at(col.name);
    auto& out = columns[c];
    out.reserve(records.size());
    ColumnEncoding::Codebook* book = nullptr;
    if (col.kind == ColumnKind::categorical ||
        col.kind == ColumnKind::entity_id) {
      book = &encoding->mutable_codebook(col.name);
      for (const auto& v : col.values) book->code_for(v);
    }
    bool any_time = false;
    for (std::size_t r = 0; r < records.size(); ++r) {
      const auto& rec = records[r];
      if (rec.size() != header.size()) {
        throw ValidationError("csv: row " + std::to_string(r + 1) + " has " +
                              std::to_string(rec.size()) +
                              " fields, expected " +
                              std::to_string(header.size()));
      }
      const std::string& cell = rec[src];
      auto cell_error = [&](std::string_view what) {
        return ValidationError("csv: row " + std::to_string(r + 1) +
                               ", column '" + col.name + "': " +
                               std::string(what) + " '" + cell + "'");
      };
      switch (col.kind) {
        case ColumnKind::continuous: {
          auto v = detail::parse_real(cell);
          if (!v) throw cell_error("unparseable continuous value");
          if (!base && ((col.min && *v < *col.min) ||
                        (col.max && *v > *col.max))) {
            throw cell_error("value outside declared domain");
          }
          out.push_back(*v);
          break;
        }
        case ColumnKind::datetime: {
          auto v = detail::parse_datetime(cell);
          if (!v) throw cell_error("unparseable datetime value");
          any_time = any_time || v->second;
          out.push_back(v->first);
          break;
        }
        case ColumnKind::categorical:
        case ColumnKind::entity_id: {
          if (!col.values.empty() && !base && !book->find(cell)) {
            throw cell_error("value outside declared domain");
          }
          out.push_back(static_cast<double>(book->code_for(cell)));
          break;
        }
      }
    }
    // A synthetic load keeps the original's output format.
    if (col.kind == ColumnKind::datetime && !base) {
      encoding->set_date_only(col.name, !any_time);
    }
  }
  return Dataset(schema, std::move(columns), std::move(encoding));
}

// Loads a CSV whose header matches the schema names as a set; columns come
// back in schema order.
inline Dataset load_csv(const std::string& path, const Schema& schema,
                        const ColumnEncoding* base = nullptr) {
  auto records = csv::read_file(path);
  if (records.empty()) throw ValidationError("csv: missing header row");
  const csv::Record header = records.front();
  return dataset_from_records(
      schema, header, std::span<const csv::Record>(records).subspan(1), base);
}

inline void write_csv(std::ostream& out, const Dataset& ds) {
  csv::Record header;
  for (const auto& col : ds.schema()) header.push_back(col.name);
  csv::write_record(out, header);
  csv::Record rec(ds.column_count());
  for (std::size_t r = 0; r < ds.row_count(); ++r) {
    for (std::size_t c = 0; c < ds.column_count(); ++c) {
      rec[c] = ds.cell_text(r, c);
    }
    csv::write_record(out, rec);
  }
}

// Numeric view used for tree building: one column per non-entity schema
// column, plus the owning entity of every row.
struct NumericMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // row_count x names.size()
  std::vector<std::int64_t> entity_of_row;
};

inline NumericMatrix encode_numeric(const Dataset& ds) {
  NumericMatrix m;
  m.names = ds.data_columns();
  m.values.resize(static_cast<Eigen::Index>(ds.row_count()),
                  static_cast<Eigen::Index>(m.names.size()));
  for (std::size_t c = 0; c < m.names.size(); ++c) {
    const auto col = ds.column(m.names[c]);
    for (std::size_t r = 0; r < col.size(); ++r) {
      m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          col[r];
    }
  }
  m.entity_of_row.resize(ds.row_count());
  if (auto ent = ds.entity_column()) {
    const auto col = ds.column(*ent);
    for (std::size_t r = 0; r < col.size(); ++r) {
      m.entity_of_row[r] = static_cast<std::int64_t>(col[r]);
    }
  } else {
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
      m.entity_of_row[r] = static_cast<std::int64_t>(r);
    }
  }
  return m;
}

// Inverse of encode_numeric for the non-entity columns. Categorical cells
// round to the nearest code; codes outside the codebook clamp to the nearest
// valid code and bump *clamped. Datetime cells round to whole seconds.
inline Dataset decode_rows(const Eigen::MatrixXd& matrix, EncodingPtr encoding,
                           const Schema& schema,
                           std::size_t* clamped = nullptr) {
  Schema data_schema;
  for (const auto& col : schema) {
    if (col.kind != ColumnKind::entity_id) data_schema.push_back(col);
  }
  if (static_cast<std::size_t>(matrix.cols()) != data_schema.size()) {
    throw ValidationError("decode_rows: matrix has " +
                          std::to_string(matrix.cols()) +
                          " columns, schema expects " +
                          std::to_string(data_schema.size()));
  }
  std::vector<std::vector<double>> columns(data_schema.size());
  for (std::size_t c = 0; c < data_schema.size(); ++c) {
    const auto& col = data_schema[c];
    auto& out = columns[c];
    out.reserve(static_cast<std::size_t>(matrix.rows()));
    const auto k = static_cast<double>(encoding->category_count(col.name));
    for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
      double v = matrix(r, static_cast<Eigen::Index>(c));
      if (col.kind == ColumnKind::categorical) {
        v = std::nearbyint(v);
        if (k > 0 && (v < 0 || v > k - 1)) {
          v = std::clamp(v, 0.0, k - 1);
          if (clamped) ++*clamped;
        }
      } else if (col.kind == ColumnKind::datetime) {
        v = std::nearbyint(v);
      }
      out.push_back(v);
    }
  }
  return Dataset(std::move(data_schema), std::move(columns),
                 std::move(encoding));
}

}  // namespace synthmark
