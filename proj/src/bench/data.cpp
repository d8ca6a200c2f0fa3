/*
 * Copyright (c) 2026 The hrforest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * SPDX-License-Identifier: Apache-2.0
 */

#include "hrf/bench/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "hrf/error.hpp"
#include "hrf/util/json_fields.hpp"

namespace hrf::bench {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += ch;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

ColumnKind kind_from_string(const std::string& s, const std::string& path) {
  if (s == "continuous") return ColumnKind::kContinuous;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "label") return ColumnKind::kLabel;
  if (s == "ignore") return ColumnKind::kIgnore;
  throw ConfigError(path + ": unknown column type '" + s + "'");
}

std::string kind_to_string(ColumnKind k) {
  switch (k) {
    case ColumnKind::kContinuous: return "continuous";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kLabel: return "label";
    case ColumnKind::kIgnore: return "ignore";
  }
  return "ignore";
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size() || !std::isfinite(v)) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw DataError("row " + std::to_string(row + 1) + ", column '" + column + "': non-numeric value '" + cell +
                    "'");
  }
}

}  // namespace

Schema Schema::from_json(const nlohmann::json& j) {
  Schema s;
  const auto& cols = json_fields::member(j, "columns", "schema");
  if (!cols.is_array()) throw ConfigError("schema.columns: expected an array");
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const std::string path = "schema.columns[" + std::to_string(i) + "]";
    ColumnSpec c;
    c.name = json_fields::get<std::string>(cols[i], "name", path);
    c.kind = kind_from_string(json_fields::get<std::string>(cols[i], "type", path), path + ".type");
    s.columns.push_back(c);
  }
  s.task = task_from_string(json_fields::get_or<std::string>(j, "task", "schema", "classification"));
  s.positive_class = json_fields::get_or<std::string>(j, "positive_class", "schema", "");
  s.label_column();
  return s;
}

nlohmann::json Schema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) cols.push_back({{"name", c.name}, {"type", kind_to_string(c.kind)}});
  nlohmann::json j{{"columns", cols}, {"task", to_string(task)}};
  if (!positive_class.empty()) j["positive_class"] = positive_class;
  return j;
}

const ColumnSpec& Schema::label_column() const {
  const ColumnSpec* found = nullptr;
  for (const auto& c : columns) {
    if (c.kind == ColumnKind::kLabel) {
      if (found) throw ConfigError("schema: more than one label column");
      found = &c;
    }
  }
  if (!found) throw ConfigError("schema: no label column");
  return *found;
}

RawTable parse_csv(std::istream& in) {
  RawTable t;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (t.header.empty()) {
      t.header = split_line(line);
      continue;
    }
    auto cells = split_line(line);
    if (cells.size() != t.header.size()) {
      throw DataError("CSV row " + std::to_string(t.rows.size() + 2) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(t.header.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.header.empty()) throw DataError("CSV input has no header row");
  return t;
}

RawTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  return parse_csv(in);
}

void write_csv(std::ostream& out, const RawTable& table) {
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      if (cells[i].find_first_of(",\"") != std::string::npos) {
        std::string escaped;
        for (char ch : cells[i]) escaped += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        out << '"' << escaped << '"';
      } else {
        out << cells[i];
      }
    }
    out << '\n';
  };
  emit(table.header);
  for (const auto& r : table.rows) emit(r);
}

void Preprocessor::fit(const RawTable& table, const Schema& schema, const std::vector<std::size_t>& rows) {
  if (rows.empty()) throw DataError("preprocessing: no training rows");
  schema_ = schema;
  columns_.clear();
  feature_names_.clear();
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < table.header.size(); ++i) position[table.header[i]] = i;
  for (const auto& spec : schema.columns) {
    auto it = position.find(spec.name);
    if (it == position.end()) throw DataError("schema column '" + spec.name + "' not found in CSV header");
    const std::size_t src = it->second;
    if (spec.kind == ColumnKind::kIgnore) continue;
    if (spec.kind == ColumnKind::kLabel) {
      label_source_ = src;
      continue;
    }
    Column col;
    col.source = src;
    col.kind = spec.kind;
    if (spec.kind == ColumnKind::kContinuous) {
      col.lo = std::numeric_limits<double>::infinity();
      col.hi = -col.lo;
      for (auto r : rows) {
        const double v = parse_number(table.rows[r][src], r, spec.name);
        col.lo = std::min(col.lo, v);
        col.hi = std::max(col.hi, v);
      }
    } else {
      std::set<std::string> values;
      for (auto r : rows) values.insert(table.rows[r][src]);
      const double denom = values.size() > 1 ? static_cast<double>(values.size() - 1) : 1.0;
      double code = 0;
      for (const auto& v : values) col.codes[v] = code++ / denom;
    }
    columns_.push_back(std::move(col));
    feature_names_.push_back(spec.name);
  }
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    bool known = false;
    for (const auto& spec : schema.columns) known = known || spec.name == table.header[i];
    if (!known) throw DataError("CSV column '" + table.header[i] + "' is not declared in the schema");
  }
  classes_.clear();
  class_index_.clear();
  if (schema.task == Task::kClassification) {
    std::set<std::string> labels;
    for (auto r : rows) labels.insert(table.rows[r][label_source_]);
    std::vector<std::string> ordered(labels.begin(), labels.end());
    if (!schema.positive_class.empty()) {
      auto it = std::find(ordered.begin(), ordered.end(), schema.positive_class);
      if (it == ordered.end()) {
        throw DataError("positive class '" + schema.positive_class + "' does not occur in the training split");
      }
      ordered.erase(it);
      ordered.push_back(schema.positive_class);
    }
    if (ordered.size() < 2) throw DataError("classification needs at least two classes in the training split");
    classes_ = ordered;
    for (std::size_t i = 0; i < classes_.size(); ++i) class_index_[classes_[i]] = static_cast<int>(i);
  }
}

Dataset Preprocessor::transform(const RawTable& table, const std::vector<std::size_t>& rows,
                                std::size_t* unseen) const {
  Dataset d;
  d.task = schema_.task;
  d.num_features = columns_.size();
  d.num_classes = schema_.task == Task::kClassification ? static_cast<int>(classes_.size()) : 1;
  d.feature_names = feature_names_;
  d.class_names = classes_;
  std::vector<double> x(columns_.size());
  for (auto r : rows) {
    const auto& cells = table.rows[r];
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const auto& col = columns_[c];
      const std::string& cell = cells[col.source];
      if (col.kind == ColumnKind::kContinuous) {
        const double v = parse_number(cell, r, feature_names_[c]);
        const double span = col.hi - col.lo;
        x[c] = span > 0 ? std::clamp((v - col.lo) / span, 0.0, 1.0) : 0.0;
      } else {
        auto it = col.codes.find(cell);
        if (it == col.codes.end()) {
          x[c] = kUnseenCategory;
          if (unseen) ++*unseen;
        } else {
          x[c] = it->second;
        }
      }
    }
    double target;
    const std::string& label = cells[label_source_];
    if (schema_.task == Task::kClassification) {
      auto it = class_index_.find(label);
      if (it == class_index_.end()) throw DataError("row " + std::to_string(r + 1) + ": unknown class '" + label + "'");
      target = it->second;
    } else {
      target = parse_number(label, r, "label");
    }
    d.add_row(x, target);
  }
  return d;
}

nlohmann::json Preprocessor::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    nlohmann::json j{{"name", feature_names_[c]}, {"type", kind_to_string(columns_[c].kind)}};
    if (columns_[c].kind == ColumnKind::kContinuous) {
      j["min"] = columns_[c].lo;
      j["max"] = columns_[c].hi;
    } else {
      j["codes"] = columns_[c].codes;
    }
    cols.push_back(std::move(j));
  }
  return {{"columns", cols}, {"classes", classes_}, {"unseen_category_value", kUnseenCategory}};
}

SplitIndices split_rows(std::size_t rows, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw ConfigError("split ratio must be in (0,1)");
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(rows)));
  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cut));
  s.validation.assign(order.begin() + static_cast<std::ptrdiff_t>(cut), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

LoadedData load_table(const RawTable& table, const Schema& schema, double train_ratio, std::uint64_t seed) {
  const auto split = split_rows(table.rows.size(), train_ratio, seed);
  LoadedData out;
  out.preprocessor.fit(table, schema, split.train);
  out.train = out.preprocessor.transform(table, split.train);
  out.validation = out.preprocessor.transform(table, split.validation, &out.unseen_categories);
  return out;
}

LoadedData load_csv(const std::string& path, const Schema& schema, double train_ratio, std::uint64_t seed,
                    const std::string& validation_path) {
  const RawTable table = read_csv(path);
  if (validation_path.empty()) return load_table(table, schema, train_ratio, seed);
  const RawTable val = read_csv(validation_path);
  if (val.header != table.header) throw DataError("validation CSV header differs from the training CSV");
  std::vector<std::size_t> all(table.rows.size()), all_val(val.rows.size());
  std::iota(all.begin(), all.end(), 0);
  std::iota(all_val.begin(), all_val.end(), 0);
  LoadedData out;
  out.preprocessor.fit(table, schema, all);
  out.train = out.preprocessor.transform(table, all);
  out.validation = out.preprocessor.transform(val, all_val, &out.unseen_categories);
  return out;
}

RawTable make_synthetic(const SyntheticSpec& spec) {
  if (spec.grid < 2) throw ConfigError("synthetic grid must be at least 2");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RawTable t;
  t.header = {"x0", "x1"};
  for (std::size_t i = 0; i < spec.noise_features; ++i) t.header.push_back("noise" + std::to_string(i));
  for (std::size_t i = 0; i < spec.categorical_features; ++i) t.header.push_back("cat" + std::to_string(i));
  t.header.push_back("label");
  const std::vector<std::string> categories{"alpha", "beta", "gamma", "delta"};
  for (std::size_t r = 0; r < spec.rows; ++r) {
    std::vector<std::string> row;
    const double x0 = unit(rng), x1 = unit(rng);
    const int cell = static_cast<int>(std::floor(x0 * spec.grid)) + static_cast<int>(std::floor(x1 * spec.grid));
    const int label = cell % 2;
    std::ostringstream a, b;
    a.precision(6);
    b.precision(6);
    a << std::fixed << x0;
    b << std::fixed << x1;
    row.push_back(a.str());
    row.push_back(b.str());
    for (std::size_t i = 0; i < spec.noise_features; ++i) {
      std::ostringstream s;
      s.precision(6);
      s << std::fixed << unit(rng) * 100.0;
      row.push_back(s.str());
    }
    for (std::size_t i = 0; i < spec.categorical_features; ++i) {
      // Category index leans toward the label with probability 0.3.
      std::size_t c = rng() % categories.size();
      if (unit(rng) < 0.3) c = static_cast<std::size_t>(label) * 2 + (rng() % 2);
      row.push_back(categories[c]);
    }
    row.push_back(label ? "pos" : "neg");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Schema synthetic_schema(const SyntheticSpec& spec) {
  Schema s;
  s.columns = {{"x0", ColumnKind::kContinuous}, {"x1", ColumnKind::kContinuous}};
  for (std::size_t i = 0; i < spec.noise_features; ++i) {
    s.columns.push_back({"noise" + std::to_string(i), ColumnKind::kContinuous});
  }
  for (std::size_t i = 0; i < spec.categorical_features; ++i) {
    s.columns.push_back({"cat" + std::to_string(i), ColumnKind::kCategorical});
  }
  s.columns.push_back({"label", ColumnKind::kLabel});
  s.positive_class = "pos";
  return s;
}

}  // namespace hrf::bench
