#include <catch2/catch.hpp>

#include <sstream>

#include "corrspec/cli_config.hpp"

using namespace corrspec;

TEST_CASE("run config round-trips through its key=value form losslessly", "[cli]") {
  RunConfig cfg;
  cfg.command = "pipeline";
  cfg.input = "prices.csv";
  cfg.sectors_path = "sectors.csv";
  cfg.output_dir = "out";
  cfg.format = "wide";
  cfg.calendar = "intersection";
  cfg.fill_cap = 0.0625;
  cfg.lag = 2;
  cfg.seed = 987654321;
  cfg.bins = 41;
  cfg.ns = 5;
  cfg.kind = "threshold";
  cfg.cth = 0.09;
  cfg.window_T = 1250;
  cfg.taus = "125,250,500";
  cfg.beta = 0.30000000000000004;  // must survive exactly
  cfg.sectors_spec = "12:0.25,17:0.25";

  std::ostringstream out;
  cfg.serialize(out);
  std::istringstream in(out.str());
  RunConfig parsed = RunConfig::parse(in);
  CHECK(parsed == cfg);

  // The ns and cth keys use the CLI's own syntax ('auto', 'sweep').
  RunConfig flags;
  flags.ns_auto = true;
  flags.cth_sweep = true;
  std::ostringstream out2;
  flags.serialize(out2);
  CHECK(out2.str().find("ns=auto") != std::string::npos);
  CHECK(out2.str().find("cth=sweep") != std::string::npos);
  std::istringstream in2(out2.str());
  RunConfig parsed2 = RunConfig::parse(in2);
  CHECK(parsed2 == flags);
}

TEST_CASE("config parsing skips comments and rejects unknown keys", "[cli]") {
  std::istringstream good("# comment\n\nseed=7\nbeta=0.5\n");
  RunConfig cfg = RunConfig::parse(good);
  CHECK(cfg.seed == 7);
  CHECK(cfg.beta == 0.5);

  std::istringstream unknown("nonsense=1\n");
  CHECK_THROWS_MATCHES(RunConfig::parse(unknown), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::parse_error; }));
  std::istringstream malformed("seed\n");
  CHECK_THROWS_MATCHES(RunConfig::parse(malformed), Error,
                       Catch::Matchers::Predicate<Error>(
                           [](const Error& e) { return e.code() == Errc::parse_error; }));
}
