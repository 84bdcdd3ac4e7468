#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "srmlab/core.hpp"

namespace srmlab {

/// Shortest representation that round-trips the double exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc()) throw numeric_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_double: bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open file for write: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Sample CSV: header "x1,...,xk,y", one observation per row.
// ---------------------------------------------------------------------------
inline LabeledSample read_sample_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) throw std::invalid_argument("sample csv: need a header and rows");
  const auto header = split_csv_line(lines[0]);
  if (header.size() < 2 || header.back() != "y")
    throw std::invalid_argument("sample csv: header must be x1,...,xk,y");
  const int k = static_cast<int>(header.size()) - 1;
  for (int i = 0; i < k; ++i)
    if (header[i] != "x" + std::to_string(i + 1))
      throw std::invalid_argument("sample csv: header must be x1,...,xk,y");
  std::vector<Point> xs;
  std::vector<double> ys;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (static_cast<int>(cells.size()) != k + 1)
      throw std::invalid_argument("sample csv: row " + std::to_string(r) + " has wrong arity");
    Point x(k);
    for (int i = 0; i < k; ++i) x[i] = parse_double(cells[i]);
    xs.push_back(std::move(x));
    ys.push_back(parse_double(cells[k]));
  }
  return LabeledSample(std::move(xs), std::move(ys));
}

inline std::string sample_to_csv(const LabeledSample& s) {
  std::string out;
  for (int i = 0; i < s.dim(); ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "y\n";
  for (int r = 0; r < s.n(); ++r) {
    for (double c : s.x(r)) out += format_double(c) + ",";
    out += format_double(s.y(r)) + "\n";
  }
  return out;
}

/// Square numeric CSV without a header (distance matrices).
inline Mat read_matrix_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) throw std::invalid_argument("matrix csv: empty file");
  const int m = static_cast<int>(lines.size());
  Mat out(m, m);
  for (int r = 0; r < m; ++r) {
    const auto cells = split_csv_line(lines[r]);
    if (static_cast<int>(cells.size()) != m)
      throw std::invalid_argument("matrix csv: row " + std::to_string(r) +
                                  " has wrong arity (matrix must be square)");
    for (int c = 0; c < m; ++c) out(r, c) = parse_double(cells[c]);
  }
  return out;
}

}  // namespace srmlab
