// csv.hpp - minimal comma-separated file reading
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace saev::csv {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    // trim surrounding whitespace
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

struct Row {
  std::size_t line_no = 0;  // 1-based, includes any header line
  std::vector<std::string> fields;
};

// Reads all non-empty rows. If `skip_header` the first row is dropped.
inline std::vector<Row> read_file(const std::string& path, bool skip_header = false) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::vector<Row> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty() || line[0] == '#') continue;
    rows.push_back({n, split_line(line)});
  }
  if (skip_header && !rows.empty()) rows.erase(rows.begin());
  return rows;
}

}  // namespace saev::csv
