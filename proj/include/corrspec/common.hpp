#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace corrspec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr const char* kVersion = "corrspec 0.1.0";

/// Error codes double as CLI exit codes. Values are part of the CLI
/// contract; do not renumber.
enum class Errc : int {
  io_error = 2,
  parse_error = 3,
  empty_universe = 4,
  insufficient_overlap = 5,
  fill_cap_exceeded = 6,
  zero_volatility = 7,
  lag_too_large = 8,
  not_normalized = 9,
  invalid_q = 10,
  not_symmetric = 11,
  no_convergence = 12,
  not_unit_norm = 13,
  index_out_of_range = 14,
  ns_out_of_range = 15,
  correlation_out_of_range = 16,
  invalid_distance_matrix = 17,
  window_out_of_bounds = 18,
  panel_too_short = 19,
  invalid_spec = 20,
  bad_argument = 21,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::io_error: return "io-error";
    case Errc::parse_error: return "parse-error";
    case Errc::empty_universe: return "empty-universe";
    case Errc::insufficient_overlap: return "insufficient-overlap";
    case Errc::fill_cap_exceeded: return "fill-cap-exceeded";
    case Errc::zero_volatility: return "zero-volatility";
    case Errc::lag_too_large: return "lag-too-large";
    case Errc::not_normalized: return "not-normalized";
    case Errc::invalid_q: return "invalid-Q";
    case Errc::not_symmetric: return "not-symmetric";
    case Errc::no_convergence: return "no-convergence";
    case Errc::not_unit_norm: return "not-unit-norm";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::ns_out_of_range: return "ns-out-of-range";
    case Errc::correlation_out_of_range: return "correlation-out-of-range";
    case Errc::invalid_distance_matrix: return "invalid-distance-matrix";
    case Errc::window_out_of_bounds: return "window-out-of-bounds";
    case Errc::panel_too_short: return "panel-too-short";
    case Errc::invalid_spec: return "invalid-spec";
    case Errc::bad_argument: return "bad-argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace corrspec
