#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "corrspec/returns.hpp"
#include "corrspec/rng.hpp"

namespace helpers {

using corrspec::Matrix;
using corrspec::ReturnPanel;

/// Wraps a raw row-major table as an (unnormalized) return panel with
/// generated symbol/date labels.
inline ReturnPanel panel_from_rows(const std::vector<std::vector<double>>& rows) {
  ReturnPanel panel;
  const std::size_t n = rows.size();
  const std::size_t t = rows.front().size();
  panel.returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  for (std::size_t i = 0; i < n; ++i) {
    panel.symbols.push_back("S" + std::to_string(i + 1));
    panel.sectors.push_back("Miscellaneous");
    for (std::size_t j = 0; j < t; ++j) {
      panel.returns(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  for (std::size_t j = 0; j < t; ++j) panel.dates.push_back("D" + std::to_string(j + 1));
  return panel;
}

/// Random symmetric matrix with entries in [-1, 1].
inline Matrix random_symmetric(int n, corrspec::Rng& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = 2.0 * rng.uniform() - 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = 2.0 * rng.uniform() - 1.0;
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

/// Fresh scratch directory under the system temp root; removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("corrspec_test_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace helpers
