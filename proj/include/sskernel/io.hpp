// Copyright 2026 sskernel contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <Eigen/Dense>

#include "sskernel/grid.hpp"
#include "sskernel/processes.hpp"
#include "sskernel/sysid.hpp"

namespace sskernel::io {

/// Round-trip-exact decimal form (17 significant digits).
inline std::string format_number(double value) {
  char buf[40];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf, static_cast<std::size_t>(len));
}

inline double parse_number(std::string_view text, const std::string& where) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw std::runtime_error(where + ": cannot parse number '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw std::runtime_error(where + ": non-finite value");
  return value;
}

inline std::vector<std::string> split(std::string_view line, char sep = ',') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& cell : out) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
  }
  return out;
}

/// Numeric CSV with a header row; columns addressed by name.
class CsvTable {
 public:
  static CsvTable read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open file");
    return parse(in, path);
  }

  static CsvTable parse(std::istream& in, const std::string& source) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw std::runtime_error(source + ": empty file (missing header)");
    ++line_no;
    table.header_ = split(line);
    for (std::size_t c = 0; c < table.header_.size(); ++c) {
      if (table.header_[c].empty()) {
        throw std::runtime_error(source + ":1: empty column name");
      }
      if (!table.index_.emplace(table.header_[c], c).second) {
        throw std::runtime_error(source + ":1: duplicate column '" + table.header_[c] + "'");
      }
    }
    table.columns_.resize(table.header_.size());
    while (std::getline(in, line)) {
      ++line_no;
      const std::string where = source + ":" + std::to_string(line_no);
      if (line.empty() || line == "\r") {
        // A single trailing newline is fine; blank rows inside the data are not.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw std::runtime_error(where + ": empty row");
      }
      const auto cells = split(line);
      if (cells.size() != table.header_.size()) {
        throw std::runtime_error(where + ": expected " + std::to_string(table.header_.size()) +
                                 " fields, found " + std::to_string(cells.size()));
      }
      for (std::size_t c = 0; c < cells.size(); ++c) {
        table.columns_[c].push_back(parse_number(cells[c], where));
      }
    }
    if (table.columns_.empty() || table.columns_.front().empty()) {
      throw std::runtime_error(source + ": no data rows");
    }
    return table;
  }

  const std::vector<double>& column(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) throw std::runtime_error("CSV is missing required column '" + name + "'");
    return columns_[it->second];
  }

  bool has_column(const std::string& name) const { return index_.count(name) != 0; }
  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  const std::vector<std::string>& header() const { return header_; }

 private:
  std::vector<std::string> header_;
  std::map<std::string, std::size_t> index_;
  std::vector<std::vector<double>> columns_;
};

/// Reads a `t,u,y` record.
inline IODataset read_io_dataset(const std::string& path) {
  const auto table = CsvTable::read(path);
  try {
    return IODataset(TimeGrid(table.column("t")), table.column("u"), table.column("y"));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

/// `t,path_0,...,path_{k-1}`, one row per grid instant.
inline void write_paths(std::ostream& out, const ProcessPaths& paths) {
  out << 't';
  for (Eigen::Index p = 0; p < paths.n_paths(); ++p) out << ",path_" << p;
  out << '\n';
  std::string row;
  for (Eigen::Index i = 0; i < paths.n_points(); ++i) {
    row = format_number(paths.grid()[static_cast<std::size_t>(i)]);
    for (Eigen::Index p = 0; p < paths.n_paths(); ++p) {
      row += ',';
      row += format_number(paths.values()(p, i));
    }
    row += '\n';
    out << row;
  }
}

/// Full matrix, row-major, no header.
inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_number(m(i, j));
    }
    out << '\n';
  }
}

/// `k,t,f_mean,f_std`
inline void write_estimate(std::ostream& out, const EstimationResult& result, double period) {
  out << "k,t,f_mean,f_std\n";
  for (Eigen::Index k = 0; k < result.f_mean.size(); ++k) {
    out << k << ',' << format_number(static_cast<double>(k) * period) << ','
        << format_number(result.f_mean(k)) << ',' << format_number(result.f_std(k)) << '\n';
  }
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

/**
 * Grid source:
 *   "uniform:n,Ts"  n points spaced Ts
 *   "csv:file"      the `t` column of a CSV file
 *   "0,0.5,1.2"     inline list
 */
inline TimeGrid parse_grid(const std::string& spec) {
  try {
    if (spec.rfind("uniform:", 0) == 0) {
      const auto parts = split(std::string_view(spec).substr(8));
      if (parts.size() != 2) throw std::runtime_error("uniform grid expects 'uniform:n,Ts'");
      const double n = parse_number(parts[0], "grid");
      if (n < 1 || n != std::floor(n) || n > 1e8) {
        throw std::runtime_error("uniform grid size must be a positive integer");
      }
      return TimeGrid::uniform(static_cast<std::size_t>(n), parse_number(parts[1], "grid"));
    }
    if (spec.rfind("csv:", 0) == 0) {
      return TimeGrid(CsvTable::read(spec.substr(4)).column("t"));
    }
    std::vector<double> times;
    for (const auto& cell : split(spec)) times.push_back(parse_number(cell, "grid"));
    return TimeGrid(std::move(times));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid grid: ") + e.what());
  }
}

}  // namespace sskernel::io
