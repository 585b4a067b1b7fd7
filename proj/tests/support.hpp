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

// Dataset builders and brute-force reference implementations shared by the
// test binaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "synthmark.hpp"

namespace synthmark::testing {

inline Dataset make_dataset(const Schema& schema,
                            const std::vector<std::vector<std::string>>& rows) {
  csv::Record header;
  for (const auto& c : schema) header.push_back(c.name);
  std::vector<csv::Record> records(rows.begin(), rows.end());
  return dataset_from_records(schema, header, records);
}

inline Schema categorical_schema(std::size_t columns) {
  Schema s;
  for (std::size_t i = 0; i < columns; ++i) {
    s.push_back({std::string(1, static_cast<char>('A' + i)),
                 ColumnKind::categorical, {}, {}, {}});
  }
  return s;
}

// Categorical columns A, B, ... where each column copies the previous one
// with probability `dependence` and is uniform over `levels` otherwise.
inline Dataset chained_categorical(std::uint64_t seed, std::size_t rows,
                                   std::size_t columns, int levels,
                                   double dependence = 0.6) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<std::string>> data(rows);
  for (auto& row : data) {
    int prev = level(gen);
    for (std::size_t c = 0; c < columns; ++c) {
      const int v = (c > 0 && u(gen) < dependence) ? prev : level(gen);
      row.push_back("v" + std::to_string(v));
      prev = v;
    }
  }
  return make_dataset(categorical_schema(columns), data);
}

// Mixed table: categorical G, H plus continuous X (integers) and Y = 2X +
// noise, and a datetime D.
inline Dataset mixed_dataset(std::uint64_t seed, std::size_t rows) {
  Schema s{{"G", ColumnKind::categorical, {}, {}, {}},
           {"H", ColumnKind::categorical, {}, {}, {}},
           {"X", ColumnKind::continuous, {}, {}, {}},
           {"Y", ColumnKind::continuous, {}, {}, {}},
           {"D", ColumnKind::datetime, {}, {}, {}}};
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> g(0, 3), x(0, 60), day(1, 28);
  std::normal_distribution<double> noise(0, 5);
  std::vector<std::vector<std::string>> data;
  for (std::size_t i = 0; i < rows; ++i) {
    const int gv = g(gen);
    const int xv = x(gen) + 10 * gv;
    const double yv = std::round(2.0 * xv + noise(gen));
    const int hv = (xv > 40) ? 1 : (g(gen) == 0 ? 1 : 0);
    char date[32];
    std::snprintf(date, sizeof date, "2020-%02d-%02d", 1 + gv * 3, day(gen));
    data.push_back({"g" + std::to_string(gv), "h" + std::to_string(hv),
                    std::to_string(xv), detail::format_real(yv), date});
  }
  return make_dataset(s, data);
}

// Person-level table with six categorical quasi-identifiers and three
// targets: INC (skewed, leans on EDU), DENS (a function of OWN_RENT) and COIN
// (independent, uniform over 4 values).
inline Dataset census_like(std::uint64_t seed, std::size_t rows) {
  Schema s;
  for (const char* c : {"SEX", "EDU", "RAC1P", "PUMA", "OWN_RENT", "HISP",
                        "INC", "DENS", "COIN"}) {
    s.push_back({c, ColumnKind::categorical, {}, {}, {}});
  }
  std::mt19937_64 gen(seed);
  std::discrete_distribution<int> edu{1, 2, 4, 8, 10, 8, 6, 4, 3, 2, 1, 1};
  std::discrete_distribution<int> race{30, 6, 3, 2, 1, 1, 1, 1};
  std::uniform_int_distribution<int> puma(0, 19), two(0, 1), four(0, 3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::vector<std::string>> data;
  for (std::size_t i = 0; i < rows; ++i) {
    const int e = edu(gen);
    const int p = puma(gen);
    const int inc = u(gen) < 0.5 ? std::min(4, e / 3) : four(gen);
    const int own = two(gen);
    data.push_back({std::to_string(two(gen)), std::to_string(e),
                    std::to_string(race(gen) + 1), std::to_string(100 + p),
                    std::to_string(own), u(gen) < 0.15 ? "1" : "0",
                    std::to_string(inc), own ? "urban" : "rural",
                    std::to_string(four(gen))});
  }
  return make_dataset(s, data);
}

inline const std::vector<std::string>& census_qi() {
  static const std::vector<std::string> qi{"SEX",      "EDU",  "RAC1P",
                                           "PUMA", "OWN_RENT", "HISP"};
  return qi;
}

// Store holding exact copies of `ds` for every combination.
inline SynTableStore copies_store(
    const Dataset& ds, const std::vector<std::vector<std::string>>& combos) {
  SynTableStore store;
  for (const auto& c : combos) store.put(ds.project(c));
  return store;
}

inline std::vector<std::vector<std::string>> subsets_up_to(
    const std::vector<std::string>& columns, std::size_t k) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t size = 1; size <= k; ++size) {
    detail::for_each_subset(canonical_columns(columns), size,
                            [&](const auto& s) { out.push_back(s); });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracles

inline double brute_kendall_tau_b(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  double concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const double denom = std::sqrt((concordant + discordant + tie_x) *
                                 (concordant + discordant + tie_y));
  return denom == 0 ? 0 : (concordant - discordant) / denom;
}

inline double brute_ks(std::vector<double> a, std::vector<double> b) {
  std::vector<double> points = a;
  points.insert(points.end(), b.begin(), b.end());
  double best = 0;
  for (double t : points) {
    const double fa =
        static_cast<double>(std::count_if(a.begin(), a.end(),
                                          [&](double v) { return v <= t; })) /
        static_cast<double>(a.size());
    const double fb =
        static_cast<double>(std::count_if(b.begin(), b.end(),
                                          [&](double v) { return v <= t; })) /
        static_cast<double>(b.size());
    best = std::max(best, std::abs(fa - fb));
  }
  return best;
}

inline double closed_form_slope(const std::vector<double>& x,
                                const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

// Cell-by-cell recount of a categorical marginal: 1000 * (1 - TV).
inline double brute_marginal_score(const Dataset& orig, const Dataset& syn,
                                   const std::vector<std::string>& cols) {
  auto hist = [&](const Dataset& d) {
    std::map<std::vector<std::string>, double> h;
    for (std::size_t r = 0; r < d.row_count(); ++r) {
      std::vector<std::string> cell;
      for (const auto& c : cols) cell.push_back(d.cell_text(r, d.require(c)));
      h[cell] += 1.0 / static_cast<double>(d.row_count());
    }
    return h;
  };
  const auto ho = hist(orig);
  const auto hs = hist(syn);
  std::set<std::vector<std::string>> cells;
  for (const auto& [k, v] : ho) cells.insert(k);
  for (const auto& [k, v] : hs) cells.insert(k);
  double sum = 0;
  for (const auto& k : cells) {
    const double a = ho.contains(k) ? ho.at(k) : 0;
    const double b = hs.contains(k) ? hs.at(k) : 0;
    sum += std::abs(a - b);
  }
  return 1000.0 * (1.0 - sum / 2.0);
}

struct BruteAttack {
  std::size_t predictions = 0;
  std::size_t correct = 0;
};

// For each original row, enumerate every synthetic row with the same QI
// values; predict only when exactly one exists.
inline BruteAttack brute_attack(const Dataset& orig, const Dataset& syn,
                                const std::vector<std::string>& qi,
                                const std::string& target) {
  BruteAttack out;
  for (std::size_t r = 0; r < orig.row_count(); ++r) {
    std::size_t matches = 0, last = 0;
    for (std::size_t s = 0; s < syn.row_count(); ++s) {
      bool same = true;
      for (const auto& c : qi) {
        if (orig.cell_text(r, orig.require(c)) !=
            syn.cell_text(s, syn.require(c))) {
          same = false;
          break;
        }
      }
      if (same) {
        ++matches;
        last = s;
      }
    }
    if (matches == 1) {
      ++out.predictions;
      if (orig.cell_text(r, orig.require(target)) ==
          syn.cell_text(last, syn.require(target))) {
        ++out.correct;
      }
    }
  }
  return out;
}

}  // namespace synthmark::testing
