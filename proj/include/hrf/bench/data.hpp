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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hrf/forest/dataset.hpp"
#include "json.hpp"

namespace hrf::bench {

enum class ColumnKind { kContinuous, kCategorical, kLabel, kIgnore };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kContinuous;
};

struct Schema {
  std::vector<ColumnSpec> columns;
  Task task = Task::kClassification;
  // Class value treated as positive for precision and recall; also fixes its
  // index to 1 in binary problems.
  std::string positive_class;

  static Schema from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  const ColumnSpec& label_column() const;
};

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Comma-separated with a header row; cells are whitespace-trimmed and double
// quotes delimit cells containing commas.
RawTable parse_csv(std::istream& in);
RawTable read_csv(const std::string& path);
void write_csv(std::ostream& out, const RawTable& table);

// Fitted on the training split: min-max ranges for continuous columns,
// lexicographic codes for categorical ones and the class list for the label.
class Preprocessor {
 public:
  // Value assigned to categories not seen during fitting.
  static constexpr double kUnseenCategory = 1.0;

  Preprocessor() = default;
  void fit(const RawTable& table, const Schema& schema, const std::vector<std::size_t>& rows);
  // Continuous values are clipped to [0,1]; unseen categories map to
  // kUnseenCategory and are counted in `unseen` when provided.
  Dataset transform(const RawTable& table, const std::vector<std::size_t>& rows,
                    std::size_t* unseen = nullptr) const;

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& classes() const { return classes_; }
  nlohmann::json to_json() const;

 private:
  struct Column {
    std::size_t source = 0;
    ColumnKind kind = ColumnKind::kContinuous;
    double lo = 0.0, hi = 1.0;
    std::map<std::string, double> codes;
  };

  Schema schema_;
  std::vector<Column> columns_;
  std::size_t label_source_ = 0;
  std::vector<std::string> feature_names_;
  std::vector<std::string> classes_;
  std::map<std::string, int> class_index_;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded shuffle split; `train_ratio` of the rows go to training.
SplitIndices split_rows(std::size_t rows, double train_ratio, std::uint64_t seed);

struct LoadedData {
  Dataset train;
  Dataset validation;
  Preprocessor preprocessor;
  std::size_t unseen_categories = 0;
};

// Reads, splits and preprocesses. When `validation_path` is non-empty the
// whole primary file trains and the second file validates.
LoadedData load_csv(const std::string& path, const Schema& schema, double train_ratio, std::uint64_t seed,
                    const std::string& validation_path = "");
LoadedData load_table(const RawTable& table, const Schema& schema, double train_ratio, std::uint64_t seed);

// XOR-grid classification data: two informative coordinates whose checkerboard
// cell parity is the label, plus uniform noise columns and categorical columns
// whose distribution depends weakly on the label.
struct SyntheticSpec {
  std::size_t rows = 5000;
  int grid = 3;
  std::size_t noise_features = 2;
  std::size_t categorical_features = 2;
  std::uint64_t seed = 7;
};

RawTable make_synthetic(const SyntheticSpec& spec);
Schema synthetic_schema(const SyntheticSpec& spec);

}  // namespace hrf::bench
