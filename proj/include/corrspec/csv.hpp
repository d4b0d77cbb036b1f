#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "corrspec/common.hpp"

namespace corrspec {

/// Shortest exact decimal form that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

inline bool parse_double(const std::string& field, double& out) {
  if (field.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(field, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == field.size();
}

/// Splits one CSV line on commas. No quoting support: symbols, dates and
/// sector labels in this toolkit are comma-free by construction.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += fields[i];
  }
  return line;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, "cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Errc::io_error, "cannot open output file: " + path);
  return out;
}

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace corrspec
