#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/csv.hpp"

namespace corrspec {

/// Resolved parameters of one CLI run. The flat key=value serialization is
/// lossless (doubles round-trip exactly) and uses the CLI's long option
/// names, so a dumped config reproduces the run.
struct RunConfig {
  std::string command;
  std::string input;
  std::string sectors_path;
  std::string output_dir = "corrspec_out";
  std::string format = "long";     // long | wide
  std::string calendar = "union";  // union | intersection
  double fill_cap = 0.06;
  int lag = 1;
  std::uint64_t seed = 42;

  int bins = 50;          // eigenvalue histogram
  int pt_bins = 25;       // Porter-Thomas histogram
  int element_bins = 100; // component element distributions
  int vectors = 3;        // eigenvectors detailed in spectrum reports
  int top_k = 10;         // top contributing symbols per eigenvector

  int ns = 0;             // sector eigenvalue count; 0 with ns_auto unset = not chosen
  bool ns_auto = false;

  std::string kind = "mst";  // network kind: mst | threshold
  double cth = 0.09;
  bool cth_sweep = false;

  int window_T = 1250;        // overlap window length
  std::string taus = "125,250,500";  // overlap lags, comma-separated
  int k_vectors = 10;         // overlap rank
  int roll_T = 125;     // rolling window length
  int roll_dt = 21;     // rolling step
  int top = 50;         // rolling report size

  int n_stocks = 201;              // synth
  int n_days = 2608;               // synth
  double beta = 0.3;               // synth market loading
  double sigma = 1.0;              // synth idiosyncratic level
  std::string sectors_spec = "";   // synth "members:loading,..." list

  std::vector<std::pair<std::string, std::string>> to_kv() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("input", input);
    kv.emplace_back("sectors-file", sectors_path);
    kv.emplace_back("out", output_dir);
    kv.emplace_back("format", format);
    kv.emplace_back("calendar", calendar);
    kv.emplace_back("fill-cap", format_double(fill_cap));
    kv.emplace_back("lag", std::to_string(lag));
    kv.emplace_back("seed", std::to_string(seed));
    kv.emplace_back("bins", std::to_string(bins));
    kv.emplace_back("pt-bins", std::to_string(pt_bins));
    kv.emplace_back("element-bins", std::to_string(element_bins));
    kv.emplace_back("vectors", std::to_string(vectors));
    kv.emplace_back("top-k", std::to_string(top_k));
    kv.emplace_back("ns", ns_auto ? "auto" : (ns >= 1 ? std::to_string(ns) : ""));
    kv.emplace_back("kind", kind);
    kv.emplace_back("cth", cth_sweep ? "sweep" : format_double(cth));
    kv.emplace_back("window", std::to_string(window_T));
    kv.emplace_back("tau", taus);
    kv.emplace_back("k", std::to_string(k_vectors));
    kv.emplace_back("roll-window", std::to_string(roll_T));
    kv.emplace_back("roll-step", std::to_string(roll_dt));
    kv.emplace_back("top", std::to_string(top));
    kv.emplace_back("stocks", std::to_string(n_stocks));
    kv.emplace_back("days", std::to_string(n_days));
    kv.emplace_back("beta", format_double(beta));
    kv.emplace_back("sigma", format_double(sigma));
    kv.emplace_back("sectors", sectors_spec);
    return kv;
  }

  /// INI-style dump: a `[command]` section holding key=value lines, loadable
  /// back through the CLI's --config option. The nested temporal modes use
  /// dotted sections (temporal.overlap) to match the subcommand tree.
  void serialize(std::ostream& out) const {
    if (!command.empty()) out << "[" << section_name(command) << "]\n";
    for (const auto& [key, value] : to_kv()) out << key << "=" << value << "\n";
  }

  static std::string section_name(const std::string& cmd) {
    if (cmd.rfind("temporal-", 0) == 0) return "temporal." + cmd.substr(9);
    return cmd;
  }

  static std::string command_name(const std::string& section) {
    if (section.rfind("temporal.", 0) == 0) return "temporal-" + section.substr(9);
    return section;
  }

  static RunConfig parse(std::istream& in) {
    RunConfig cfg;
    std::string line;
    std::size_t line_no = 0;
    auto to_int = [&](const std::string& v) {
      try {
        return std::stoi(v);
      } catch (const std::exception&) {
        fail(Errc::parse_error, "config line " + std::to_string(line_no) + ": bad integer " + v);
      }
    };
    auto to_dbl = [&](const std::string& v) {
      double d = 0.0;
      if (!parse_double(v, d)) {
        fail(Errc::parse_error, "config line " + std::to_string(line_no) + ": bad number " + v);
      }
      return d;
    };
    while (std::getline(in, line)) {
      ++line_no;
      const std::string text = trim(line);
      if (text.empty() || text[0] == '#') continue;
      if (text.front() == '[' && text.back() == ']') {
        cfg.command = command_name(trim(text.substr(1, text.size() - 2)));
        continue;
      }
      const auto eq = text.find('=');
      if (eq == std::string::npos) {
        fail(Errc::parse_error, "config line " + std::to_string(line_no) + ": expected key=value");
      }
      const std::string key = trim(text.substr(0, eq));
      const std::string value = trim(text.substr(eq + 1));
      if (key == "input") cfg.input = value;
      else if (key == "sectors-file") cfg.sectors_path = value;
      else if (key == "out") cfg.output_dir = value;
      else if (key == "format") cfg.format = value;
      else if (key == "calendar") cfg.calendar = value;
      else if (key == "fill-cap") cfg.fill_cap = to_dbl(value);
      else if (key == "lag") cfg.lag = to_int(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "bins") cfg.bins = to_int(value);
      else if (key == "pt-bins") cfg.pt_bins = to_int(value);
      else if (key == "element-bins") cfg.element_bins = to_int(value);
      else if (key == "vectors") cfg.vectors = to_int(value);
      else if (key == "top-k") cfg.top_k = to_int(value);
      else if (key == "ns") {
        cfg.ns_auto = value == "auto";
        cfg.ns = (value.empty() || cfg.ns_auto) ? 0 : to_int(value);
      }
      else if (key == "kind") cfg.kind = value;
      else if (key == "cth") {
        cfg.cth_sweep = value == "sweep";
        if (!cfg.cth_sweep) cfg.cth = to_dbl(value);
      }
      else if (key == "window") cfg.window_T = to_int(value);
      else if (key == "tau") cfg.taus = value;
      else if (key == "k") cfg.k_vectors = to_int(value);
      else if (key == "roll-window") cfg.roll_T = to_int(value);
      else if (key == "roll-step") cfg.roll_dt = to_int(value);
      else if (key == "top") cfg.top = to_int(value);
      else if (key == "stocks") cfg.n_stocks = to_int(value);
      else if (key == "days") cfg.n_days = to_int(value);
      else if (key == "beta") cfg.beta = to_dbl(value);
      else if (key == "sigma") cfg.sigma = to_dbl(value);
      else if (key == "sectors") cfg.sectors_spec = value;
      else fail(Errc::parse_error, "config line " + std::to_string(line_no) + ": unknown key " + key);
    }
    return cfg;
  }

  bool operator==(const RunConfig&) const = default;
};

}  // namespace corrspec
