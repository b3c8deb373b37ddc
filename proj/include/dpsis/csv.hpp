//
// Copyright 2026 The dpsis Authors
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
//

#ifndef DPSIS_CSV_HPP_
#define DPSIS_CSV_HPP_

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpsis/dataset.hpp"
#include "dpsis/errors.hpp"

namespace dpsis {

namespace internal {

inline std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    cells.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline std::optional<double> ParseReal(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty())
    return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string FormatExact(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace internal

// Loads a comma-separated table, one row per individual. The first line is
// a header iff any of its cells is non-numeric. `target` is matched against
// header names first, then parsed as a 0-based column index. Line numbers in
// errors are 1-based file lines.
inline Dataset LoadCsv(const std::string& path, const std::string& target) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open CSV file: " + path);

  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (internal::Trim(line).empty()) continue;
    const auto cells = internal::SplitCommas(line);
    if (line_no == 1) {
      bool numeric = true;
      for (auto c : cells) numeric = numeric && internal::ParseReal(c).has_value();
      if (!numeric) {
        for (auto c : cells) header.emplace_back(c);
        width = cells.size();
        continue;
      }
    }
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw ParseError(path + ": row " + std::to_string(line_no) + " has " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width),
                       line_no);
    }
    std::vector<double> row(width);
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = internal::ParseReal(cells[c]);
      if (!v) {
        const std::string col =
            header.empty() ? std::to_string(c) : header[c];
        throw ParseError(path + ": row " + std::to_string(line_no) +
                             ", column " + col + ": cannot parse '" +
                             std::string(cells[c]) + "' as a finite number",
                         line_no, col);
      }
      row[c] = *v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  std::optional<std::size_t> target_col;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == target) target_col = c;
  if (!target_col) {
    std::size_t idx = 0;
    const auto [ptr, ec] =
        std::from_chars(target.data(), target.data() + target.size(), idx);
    if (ec == std::errc() && ptr == target.data() + target.size() && idx < width)
      target_col = idx;
  }
  if (!target_col) throw ParseError(path + ": no target column '" + target + "'");
  if (width < 2) throw ParseError(path + ": no feature columns besides target");

  Dataset ds;
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 1);
  ds.X.resize(n, d);
  ds.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (c == *target_col)
        ds.y[i] = rows[i][c];
      else
        ds.X(i, j++) = rows[i][c];
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != *target_col) ds.feature_names.push_back(header[c]);
  return ds;
}

// Writes features then the target as the last column, with a header row.
// Values use shortest round-trip formatting so LoadCsv reproduces them.
inline void WriteCsv(const Dataset& ds, const std::string& path,
                     const std::string& target_name = "y") {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write CSV file: " + path);
  for (std::size_t j = 0; j < ds.features(); ++j)
    out << (ds.feature_names.empty() ? "x" + std::to_string(j)
                                     : ds.feature_names[j])
        << ',';
  out << target_name << '\n';
  for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.X.cols(); ++j)
      out << internal::FormatExact(ds.X(i, j)) << ',';
    out << internal::FormatExact(ds.y[i]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

// Plain `key = value` text, one pair per line, `#` starts a comment.
using KeyValues = std::map<std::string, std::string>;

inline void WriteKeyValues(const KeyValues& kv, const std::string& path,
                           const std::string& comment = {}) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  if (!comment.empty()) out << "# " << comment << '\n';
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
  if (!out) throw IoError("write failed: " + path);
}

inline KeyValues ReadKeyValues(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = s.substr(0, hash);
    s = internal::Trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ParseError(path + ": line " + std::to_string(line_no) +
                           ": expected 'key = value'",
                       line_no);
    kv[std::string(internal::Trim(s.substr(0, eq)))] =
        std::string(internal::Trim(s.substr(eq + 1)));
  }
  return kv;
}

inline std::string JoinIndices(const std::vector<std::size_t>& idx,
                               char sep = ' ') {
  std::string s;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(idx[i]);
  }
  return s;
}

// Sidecar describing how a synthetic dataset was produced.
inline KeyValues SyntheticMetadata(const Dataset& ds, const std::string& kind,
                                   const KeyValues& spec) {
  KeyValues kv = spec;
  kv["kind"] = kind;
  kv["rows"] = std::to_string(ds.rows());
  kv["features"] = std::to_string(ds.features());
  kv["preprocessed"] = ds.preprocessed ? "true" : "false";
  kv["true_support"] = JoinIndices(ds.true_support);
  std::string weights;
  for (std::size_t j : ds.true_support) {
    if (!weights.empty()) weights += ' ';
    weights += internal::FormatExact(ds.true_weights[static_cast<Eigen::Index>(j)]);
  }
  kv["true_weights"] = weights;
  return kv;
}

}  // namespace dpsis

#endif  // DPSIS_CSV_HPP_
