// Command-line front end: ingest -> returns -> correlate -> spectrum ->
// decompose -> network -> temporal, plus a synthetic-market generator and a
// `pipeline` command that runs the whole correlation-analysis chain and
// emits figure-ready CSV files. Every run writes a manifest with
// parameters, seed and content hashes beside its outputs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrspec/cli_config.hpp"
#include "corrspec/corrspec.hpp"
#include "corrspec/manifest.hpp"

namespace fs = std::filesystem;
using namespace corrspec;

namespace {

// ---------------------------------------------------------------------------
// Output plumbing
// ---------------------------------------------------------------------------

class Emitter {
 public:
  Emitter(std::string dir, Manifest& manifest) : dir_(std::move(dir)), manifest_(manifest) {
    fs::create_directories(dir_);
  }

  template <typename Writer>
  void file(const std::string& name, Writer&& writer) {
    const std::string full = path(name);
    {
      std::ofstream out = open_output(full);
      writer(out);
      if (!out) fail(Errc::io_error, "failed while writing " + full);
    }
    manifest_.add_output(name, full);
  }

  void graph(const MarketGraph& g, GraphFormat format, const std::string& name) {
    export_graph(g, format, path(name));
    manifest_.add_output(name, path(name));
  }

  std::string path(const std::string& name) const { return dir_ + "/" + name; }

 private:
  std::string dir_;
  Manifest& manifest_;
};

void write_wide(std::ofstream& out, const std::vector<std::string>& dates,
                const std::vector<std::string>& symbols, const Matrix& values) {
  out << "date";
  for (const auto& s : symbols) out << "," << s;
  out << "\n";
  for (Eigen::Index t = 0; t < values.cols(); ++t) {
    out << dates[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < values.rows(); ++i) out << "," << format_double(values(i, t));
    out << "\n";
  }
}

void write_matrix(std::ofstream& out, const std::vector<std::string>& symbols,
                  const Matrix& values) {
  out << "symbol";
  for (const auto& s : symbols) out << "," << s;
  out << "\n";
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    out << symbols[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << "," << format_double(values(i, j));
    out << "\n";
  }
}

void write_histogram(std::ofstream& out, const Histogram& h) {
  out << "bin_center,count,density\n";
  for (int i = 0; i < h.bins(); ++i) {
    out << format_double(h.center(i)) << "," << h.counts[static_cast<std::size_t>(i)] << ","
        << format_double(h.density(i)) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Shared stages
// ---------------------------------------------------------------------------

CsvLayout layout_of(const RunConfig& cfg) {
  if (cfg.format == "long") return CsvLayout::long_csv;
  if (cfg.format == "wide") return CsvLayout::wide_csv;
  fail(Errc::bad_argument, "unknown input format: " + cfg.format);
}

Calendar calendar_of(const RunConfig& cfg) {
  if (cfg.calendar == "union") return Calendar::union_dates;
  if (cfg.calendar == "intersection") return Calendar::intersection;
  fail(Errc::bad_argument, "unknown calendar: " + cfg.calendar);
}

PricePanel ingest_panel(const RunConfig& cfg, Manifest& manifest,
                        std::vector<std::string>* warnings = nullptr) {
  if (cfg.input.empty()) fail(Errc::bad_argument, "no --input file given");
  LoadResult loaded = load_prices(cfg.input, layout_of(cfg));
  manifest.add_input(cfg.input);
  if (!cfg.sectors_path.empty()) {
    apply_sector_map(loaded.series, load_sector_map(cfg.sectors_path));
    manifest.add_input(cfg.sectors_path);
  }
  for (const auto& w : loaded.warnings) std::cerr << "corrspec: warning: " << w << "\n";
  if (warnings) *warnings = loaded.warnings;
  return align_panel(loaded.series, calendar_of(cfg), cfg.fill_cap);
}

ReturnPanel normalized_returns(const RunConfig& cfg, const PricePanel& panel) {
  return normalize(log_returns(panel, cfg.lag));
}

int resolve_ns(const RunConfig& cfg, const SpectralDecomposition& dec, const RmtLaw& law,
               Manifest& manifest) {
  const NsSuggestion suggestion = suggest_ns(dec, law);
  manifest.note("ns_suggested", std::to_string(suggestion.suggested));
  manifest.note("ns_rationale", std::to_string(suggestion.rationale));
  std::cerr << "corrspec: suggested n_s = " << suggestion.suggested << " ("
            << suggestion.rationale << " eigenvalues above the bulk besides the market)";
  if (!suggestion.note.empty()) std::cerr << "; " << suggestion.note;
  std::cerr << "\n";
  if (cfg.ns_auto) {
    manifest.note("ns_used", std::to_string(suggestion.suggested));
    return suggestion.suggested;
  }
  if (cfg.ns >= 1) {
    manifest.note("ns_used", std::to_string(cfg.ns));
    return cfg.ns;
  }
  fail(Errc::bad_argument,
       "choose the sector eigenvalue count: pass --ns <int> or --ns auto to accept the "
       "suggestion");
}

void emit_returns(Emitter& emit, const ReturnPanel& r) {
  emit.file("returns_normalized.csv",
            [&](std::ofstream& out) { write_wide(out, r.dates, r.symbols, r.returns); });
  emit.file("returns_stats.csv", [&](std::ofstream& out) {
    out << "symbol,mean,sigma\n";
    for (Eigen::Index i = 0; i < r.n_stocks(); ++i) {
      out << r.symbols[static_cast<std::size_t>(i)] << "," << format_double(r.per_stock_mean(i))
          << "," << format_double(r.per_stock_sigma(i)) << "\n";
    }
  });
}

struct CorrelateOutput {
  CorrelationMatrix c;
  SpectralDecomposition dec;
  RmtLaw law;
};

CorrelateOutput emit_correlate(Emitter& emit, const RunConfig& cfg, Manifest& manifest,
                               const ReturnPanel& r) {
  CorrelateOutput result{correlation_matrix(r), {}, {}};
  result.dec = eigendecompose(result.c);
  result.law = mp_bounds(result.c.q);
  manifest.note("q", format_double(result.c.q));
  manifest.note("lambda_min", format_double(result.law.lambda_min));
  manifest.note("lambda_max", format_double(result.law.lambda_max));
  manifest.note("lambda_0", format_double(result.dec.eigenvalues(0)));

  emit.file("correlation.csv",
            [&](std::ofstream& out) { write_matrix(out, result.c.symbols, result.c.values); });
  emit.file("eigenvalues.csv", [&](std::ofstream& out) {
    out << "rank,eigenvalue\n";
    for (Eigen::Index j = 0; j < result.dec.size(); ++j) {
      out << j << "," << format_double(result.dec.eigenvalues(j)) << "\n";
    }
  });
  std::vector<double> values(result.dec.eigenvalues.data(),
                             result.dec.eigenvalues.data() + result.dec.size());
  emit.file("eigenvalue_density.csv", [&](std::ofstream& out) {
    write_histogram(out, eigenvalue_histogram(values, result.law, cfg.bins));
  });
  emit.file("mp_curve.csv", [&](std::ofstream& out) {
    out << "lambda,density\n";
    for (const auto& [lambda, density] : mp_curve(result.law)) {
      out << format_double(lambda) << "," << format_double(density) << "\n";
    }
  });
  const CorrelationMatrix surrogate = surrogate_correlation(r, cfg.seed);
  const SpectralDecomposition surrogate_dec = eigendecompose(surrogate);
  std::vector<double> surrogate_values(surrogate_dec.eigenvalues.data(),
                                       surrogate_dec.eigenvalues.data() + surrogate_dec.size());
  emit.file("surrogate_density.csv", [&](std::ofstream& out) {
    write_histogram(out, eigenvalue_histogram(surrogate_values, result.law, cfg.bins));
  });
  return result;
}

void emit_spectrum(Emitter& emit, const RunConfig& cfg, Manifest& manifest,
                   const CorrelateOutput& co, const std::map<std::string, std::string>& sectors) {
  const SpectralDecomposition& dec = co.dec;
  const SpectrumReport report = classify_spectrum(dec, co.law);
  manifest.note("deviating_above", std::to_string(report.deviating_above.size()));
  manifest.note("deviating_below", std::to_string(report.deviating_below.size()));

  emit.file("spectrum_report.csv", [&](std::ofstream& out) {
    out << "rank,eigenvalue,class\n";
    auto tag = [&](int j) {
      for (int a : report.deviating_above)
        if (a == j) return "above";
      for (int b : report.deviating_below)
        if (b == j) return "below";
      return "bulk";
    };
    for (Eigen::Index j = 0; j < dec.size(); ++j) {
      out << j << "," << format_double(dec.eigenvalues(j)) << "," << tag(static_cast<int>(j))
          << "\n";
    }
  });

  emit.file("ipr_profile.csv", [&](std::ofstream& out) {
    out << "eigenvalue,ipr\n";
    for (const auto& [lambda, value] : ipr_profile(dec)) {
      out << format_double(lambda) << "," << format_double(value) << "\n";
    }
  });

  // Porter-Thomas histograms for the market mode and a few bulk vectors
  // spread across the bulk.
  std::vector<int> chosen{0};
  if (!report.bulk.empty()) {
    const std::size_t n = report.bulk.size();
    for (std::size_t quarter = 1; quarter <= 3; ++quarter) {
      chosen.push_back(report.bulk[std::min(n - 1, quarter * n / 4)]);
    }
  }
  emit.file("porter_thomas.csv", [&](std::ofstream& out) {
    out << "vector,bin_center,count,density\n";
    for (int j : chosen) {
      const PorterThomasResult pt = porter_thomas_test(display_components(dec, j), cfg.pt_bins);
      for (int b = 0; b < pt.histogram.bins(); ++b) {
        out << j << "," << format_double(pt.histogram.center(b)) << ","
            << pt.histogram.counts[static_cast<std::size_t>(b)] << ","
            << format_double(pt.histogram.density(b)) << "\n";
      }
    }
  });
  emit.file("porter_thomas_ks.csv", [&](std::ofstream& out) {
    out << "vector,eigenvalue,ks\n";
    for (int j : chosen) {
      const PorterThomasResult pt = porter_thomas_test(display_components(dec, j), cfg.pt_bins);
      out << j << "," << format_double(dec.eigenvalues(j)) << ","
          << format_double(pt.ks_statistic) << "\n";
    }
  });

  // Sector composition for the leading eigenvectors.
  const int detail = std::min<int>(cfg.vectors, static_cast<int>(dec.size()));
  emit.file("sector_composition.csv", [&](std::ofstream& out) {
    out << "vector,sector,weight,share,energy_share\n";
    for (int j = 0; j < detail; ++j) {
      for (const auto& sw : sector_composition(dec, j, sectors, cfg.top_k).by_sector) {
        out << j << "," << sw.sector << "," << format_double(sw.weight) << ","
            << format_double(sw.share) << "," << format_double(sw.energy_share) << "\n";
      }
    }
  });
  emit.file("top_contributors.csv", [&](std::ofstream& out) {
    out << "vector,rank,symbol,component_abs\n";
    for (int j = 0; j < detail; ++j) {
      const SectorComposition comp = sector_composition(dec, j, sectors, cfg.top_k);
      int rank = 1;
      for (const auto& [symbol, weight] : comp.top) {
        out << j << "," << rank++ << "," << symbol << "," << format_double(weight) << "\n";
      }
    }
  });
}

CorrelationComponents emit_decompose(Emitter& emit, const RunConfig& cfg, Manifest& manifest,
                                     const CorrelateOutput& co) {
  const int ns = resolve_ns(cfg, co.dec, co.law, manifest);
  CorrelationComponents parts = decompose(co.dec, ns);
  emit.file("component_market.csv",
            [&](std::ofstream& out) { write_matrix(out, parts.symbols, parts.market); });
  emit.file("component_sector.csv",
            [&](std::ofstream& out) { write_matrix(out, parts.symbols, parts.sector); });
  emit.file("component_random.csv",
            [&](std::ofstream& out) { write_matrix(out, parts.symbols, parts.random); });
  emit.file("element_distribution_full.csv", [&](std::ofstream& out) {
    write_histogram(out, element_distribution(co.c.values, cfg.element_bins));
  });
  emit.file("element_distribution_market.csv", [&](std::ofstream& out) {
    write_histogram(out, element_distribution(parts.market, cfg.element_bins));
  });
  emit.file("element_distribution_sector.csv", [&](std::ofstream& out) {
    write_histogram(out, element_distribution(parts.sector, cfg.element_bins));
  });
  emit.file("element_distribution_random.csv", [&](std::ofstream& out) {
    write_histogram(out, element_distribution(parts.random, cfg.element_bins));
  });
  return parts;
}

void emit_mst(Emitter& emit, const CorrelateOutput& co,
              const std::map<std::string, std::string>& sectors) {
  const MarketGraph mst =
      minimum_spanning_tree(mantegna_distance(co.c), make_nodes(co.c.symbols, sectors));
  emit.graph(mst, GraphFormat::edge_csv, "mst_edges.csv");
  emit.graph(mst, GraphFormat::pajek_net, "mst.net");
  emit.graph(mst, GraphFormat::dot, "mst.dot");
}

void emit_threshold(Emitter& emit, const RunConfig& cfg, Manifest& manifest,
                    const CorrelationComponents& parts,
                    const std::map<std::string, std::string>& sectors) {
  const std::vector<GraphNode> nodes = make_nodes(parts.symbols, sectors);
  double c_th = cfg.cth;
  if (cfg.cth_sweep) {
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(i * 0.01);
    std::vector<std::string> reference;
    for (const auto& node : nodes) reference.push_back(node.sector);
    const SweepResult sweep = sweep_threshold(parts.sector, nodes, grid, reference);
    emit.file("threshold_sweep.csv", [&](std::ofstream& out) {
      out << "c_th,components,largest_component,clusters_3plus,ari\n";
      for (const auto& row : sweep.rows) {
        out << format_double(row.c_th) << "," << row.n_components << ","
            << row.largest_component << "," << row.clusters_3plus << ","
            << format_double(row.ari) << "\n";
      }
    });
    c_th = sweep.best_cth;
    manifest.note("cth_best", format_double(c_th));
  }
  manifest.note("cth_used", format_double(c_th));
  const MarketGraph net = threshold_network(parts.sector, nodes, c_th);
  emit.graph(net, GraphFormat::edge_csv, "threshold_edges.csv");
  emit.graph(net, GraphFormat::pajek_net, "threshold.net");
  emit.graph(net, GraphFormat::dot, "threshold.dot");
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

void run_ingest(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  std::vector<std::string> warnings;
  const PricePanel panel = ingest_panel(cfg, manifest, &warnings);
  emit.file("aligned_prices.csv",
            [&](std::ofstream& out) { write_wide(out, panel.dates, panel.symbols, panel.prices); });
  emit.file("fill_mask.csv", [&](std::ofstream& out) {
    out << "date";
    for (const auto& s : panel.symbols) out << "," << s;
    out << "\n";
    for (Eigen::Index t = 0; t < panel.n_days(); ++t) {
      out << panel.dates[static_cast<std::size_t>(t)];
      for (Eigen::Index i = 0; i < panel.n_stocks(); ++i) out << "," << (panel.fill_mask(i, t) ? 1 : 0);
      out << "\n";
    }
  });
  emit.file("sectors.csv", [&](std::ofstream& out) {
    out << "symbol,sector\n";
    for (std::size_t i = 0; i < panel.symbols.size(); ++i) {
      out << panel.symbols[i] << "," << panel.sectors[i] << "\n";
    }
  });
  emit.file("ingest_report.csv", [&](std::ofstream& out) {
    out << "kind,detail\n";
    for (const auto& symbol : panel.excluded) out << "excluded," << symbol << "\n";
    for (const auto& warning : warnings) out << "rejected," << warning << "\n";
  });
  manifest.write(emit.path("manifest_ingest.json"));
}

void run_returns(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const ReturnPanel r = normalized_returns(cfg, ingest_panel(cfg, manifest));
  emit_returns(emit, r);
  manifest.write(emit.path("manifest_returns.json"));
}

void run_correlate(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const ReturnPanel r = normalized_returns(cfg, ingest_panel(cfg, manifest));
  emit_correlate(emit, cfg, manifest, r);
  manifest.write(emit.path("manifest_correlate.json"));
}

void run_spectrum(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const PricePanel panel = ingest_panel(cfg, manifest);
  const ReturnPanel r = normalized_returns(cfg, panel);
  const CorrelateOutput co = emit_correlate(emit, cfg, manifest, r);
  emit_spectrum(emit, cfg, manifest, co, panel.sector_map());
  manifest.write(emit.path("manifest_spectrum.json"));
}

void run_decompose(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const PricePanel panel = ingest_panel(cfg, manifest);
  const ReturnPanel r = normalized_returns(cfg, panel);
  CorrelateOutput co{correlation_matrix(r), {}, {}};
  co.dec = eigendecompose(co.c);
  co.law = mp_bounds(co.c.q);
  emit_decompose(emit, cfg, manifest, co);
  manifest.write(emit.path("manifest_decompose.json"));
}

void run_network(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const PricePanel panel = ingest_panel(cfg, manifest);
  const ReturnPanel r = normalized_returns(cfg, panel);
  CorrelateOutput co{correlation_matrix(r), {}, {}};
  co.dec = eigendecompose(co.c);
  co.law = mp_bounds(co.c.q);
  if (cfg.kind == "mst") {
    emit_mst(emit, co, panel.sector_map());
  } else if (cfg.kind == "threshold") {
    const CorrelationComponents parts = decompose(co.dec, resolve_ns(cfg, co.dec, co.law, manifest));
    emit_threshold(emit, cfg, manifest, parts, panel.sector_map());
  } else {
    fail(Errc::bad_argument, "unknown network kind: " + cfg.kind);
  }
  manifest.write(emit.path("manifest_network.json"));
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> values;
  for (const auto& piece : split_csv_line(text)) {
    try {
      values.push_back(std::stoi(trim(piece)));
    } catch (const std::exception&) {
      fail(Errc::bad_argument, "bad integer list entry '" + piece + "'");
    }
  }
  return values;
}

void run_temporal_overlap(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const ReturnPanel r = normalized_returns(cfg, ingest_panel(cfg, manifest));
  for (int tau : parse_int_list(cfg.taus)) {
    const OverlapMatrix o = overlap_matrix(r, 0, cfg.window_T, tau, cfg.k_vectors);
    const std::string suffix = "tau" + std::to_string(tau) + ".csv";
    emit.file("overlap_" + suffix, [&](std::ofstream& out) {
      out << "row";
      for (int j = 0; j < cfg.k_vectors; ++j) out << ",v" << j;
      out << "\n";
      for (Eigen::Index i = 0; i < o.values.rows(); ++i) {
        out << i;
        for (Eigen::Index j = 0; j < o.values.cols(); ++j)
          out << "," << format_double(o.values(i, j));
        out << "\n";
      }
    });
    emit.file("overlap_abs_" + suffix, [&](std::ofstream& out) {
      const Matrix mag = o.magnitudes();
      out << "row";
      for (int j = 0; j < cfg.k_vectors; ++j) out << ",v" << j;
      out << "\n";
      for (Eigen::Index i = 0; i < mag.rows(); ++i) {
        out << i;
        for (Eigen::Index j = 0; j < mag.cols(); ++j) out << "," << format_double(mag(i, j));
        out << "\n";
      }
    });
  }
  manifest.write(emit.path("manifest_temporal_overlap.json"));
}

void run_temporal_rolling(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const ReturnPanel r = normalized_returns(cfg, ingest_panel(cfg, manifest));
  const MarketModeTrack track = rolling_market_mode(r, cfg.roll_T, cfg.roll_dt);
  const Lambda0Series series = lambda0_series(track);
  manifest.note("pearson_lambda0_vs_mean_corr", format_double(series.pearson_lambda_vs_mean));

  const std::size_t keep =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.top, 0)),
                            track.consistency_rank.size());
  std::map<std::string, Eigen::Index> row_of;
  for (Eigen::Index i = 0; i < track.contributions.rows(); ++i) {
    row_of[track.symbols[static_cast<std::size_t>(i)]] = i;
  }
  emit.file("market_mode_track.csv", [&](std::ofstream& out) {
    out << "window,symbol,contribution_abs\n";
    for (Eigen::Index m = 0; m < track.n_windows(); ++m) {
      for (std::size_t rank = 0; rank < keep; ++rank) {
        const std::string& symbol = track.consistency_rank[rank];
        out << track.window_dates[static_cast<std::size_t>(m)] << "," << symbol << ","
            << format_double(std::abs(track.contributions(row_of[symbol], m))) << "\n";
      }
    }
  });
  emit.file("lambda0_series.csv", [&](std::ofstream& out) {
    out << "window,lambda0,mean_offdiagonal_correlation\n";
    for (const auto& point : series.points) {
      out << point.window << "," << format_double(point.lambda0) << ","
          << format_double(point.mean_corr) << "\n";
    }
  });
  emit.file("consistency_rank.csv", [&](std::ofstream& out) {
    out << "rank,symbol,mean_contribution_abs\n";
    for (std::size_t rank = 0; rank < track.consistency_rank.size(); ++rank) {
      const std::string& symbol = track.consistency_rank[rank];
      out << rank + 1 << "," << symbol << ","
          << format_double(track.contributions.row(row_of[symbol]).cwiseAbs().mean()) << "\n";
    }
  });
  manifest.write(emit.path("manifest_temporal_rolling.json"));
}

std::vector<SectorSpec> parse_sectors_spec(const std::string& text) {
  std::vector<SectorSpec> sectors;
  if (trim(text).empty()) return sectors;
  for (const auto& piece : split_csv_line(text)) {
    const auto colon = piece.find(':');
    double loading = 0.0;
    if (colon == std::string::npos || !parse_double(trim(piece.substr(colon + 1)), loading)) {
      fail(Errc::bad_argument, "bad sector spec '" + piece + "' (want members:loading)");
    }
    int members = 0;
    try {
      members = std::stoi(trim(piece.substr(0, colon)));
    } catch (const std::exception&) {
      fail(Errc::bad_argument, "bad sector member count in '" + piece + "'");
    }
    sectors.push_back({members, loading});
  }
  return sectors;
}

void run_synth(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  FactorModelSpec spec;
  spec.n_stocks = cfg.n_stocks;
  spec.n_days = cfg.n_days;
  spec.market_beta = {cfg.beta};
  spec.sectors = parse_sectors_spec(cfg.sectors_spec);
  spec.idiosyncratic_sigma = cfg.sigma;
  spec.seed = cfg.seed;
  const SyntheticMarket market = generate(spec);
  const PricePanel prices = price_panel_from_returns(market.raw_returns, 100.0, "D000000");

  // Long-format ingest file, sector label included, so the synthetic market
  // exercises the real input path end to end.
  emit.file("synth_prices.csv", [&](std::ofstream& out) {
    out << "date,symbol,close,sector\n";
    for (Eigen::Index t = 0; t < prices.n_days(); ++t) {
      for (Eigen::Index i = 0; i < prices.n_stocks(); ++i) {
        out << prices.dates[static_cast<std::size_t>(t)] << ","
            << prices.symbols[static_cast<std::size_t>(i)] << ","
            << format_double(prices.prices(i, t)) << ","
            << prices.sectors[static_cast<std::size_t>(i)] << "\n";
      }
    }
  });
  emit.file("truth_sectors.csv", [&](std::ofstream& out) {
    out << "symbol,sector\n";
    for (std::size_t i = 0; i < market.truth.size(); ++i) {
      out << market.returns.symbols[i] << "," << market.truth[i] << "\n";
    }
  });
  emit.file("expected_spectrum.csv", [&](std::ofstream& out) {
    out << "quantity,value\n";
    out << "lambda0," << format_double(market.expected.lambda0) << "\n";
    for (std::size_t s = 0; s < market.expected.sector_lambdas.size(); ++s) {
      out << "sector" << s + 1 << "," << format_double(market.expected.sector_lambdas[s]) << "\n";
    }
  });
  manifest.write(emit.path("manifest_synth.json"));
}

void run_pipeline(const RunConfig& cfg) {
  Manifest manifest(cfg.command, cfg);
  Emitter emit(cfg.output_dir, manifest);
  const PricePanel panel = ingest_panel(cfg, manifest);
  const ReturnPanel r = normalized_returns(cfg, panel);
  const auto sectors = panel.sector_map();

  emit_returns(emit, r);
  const CorrelateOutput co = emit_correlate(emit, cfg, manifest, r);
  emit_spectrum(emit, cfg, manifest, co, sectors);
  const CorrelationComponents parts = emit_decompose(emit, cfg, manifest, co);
  emit_mst(emit, co, sectors);
  emit_threshold(emit, cfg, manifest, parts, sectors);
  manifest.write(emit.path("manifest_pipeline.json"));
}

void add_io_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--input", cfg.input, "price CSV file")->required();
  cmd->add_option("--format", cfg.format, "input layout: long | wide")
      ->check(CLI::IsMember({"long", "wide"}));
  cmd->add_option("--sectors-file", cfg.sectors_path, "optional symbol,sector CSV");
  cmd->add_option("--calendar", cfg.calendar, "alignment calendar: union | intersection")
      ->check(CLI::IsMember({"union", "intersection"}));
  cmd->add_option("--fill-cap", cfg.fill_cap, "max forward-fill fraction per stock");
  cmd->add_option("--lag", cfg.lag, "return lag in trading days");
  cmd->add_option("--out", cfg.output_dir, "output directory");
  cmd->add_option("--seed", cfg.seed, "seed for every stochastic step");
}

void add_ns_option(CLI::App* cmd, std::string& ns_text) {
  cmd->add_option("--ns", ns_text,
                  "sector eigenvalue count: an integer, or 'auto' to accept the suggestion");
}

void apply_ns_text(const std::string& ns_text, RunConfig& cfg) {
  if (ns_text.empty()) return;
  if (ns_text == "auto") {
    cfg.ns_auto = true;
    return;
  }
  try {
    cfg.ns = std::stoi(ns_text);
  } catch (const std::exception&) {
    fail(Errc::bad_argument, "--ns wants an integer or 'auto', got " + ns_text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral analysis of equity cross-correlations against random-matrix "
               "predictions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "read defaults from an INI config file ([subcommand] sections)");

  RunConfig cfg;
  if (const char* env_out = std::getenv("CORRSPEC_OUTDIR")) cfg.output_dir = env_out;
  std::string ns_text;
  bool dump_config = false;
  std::string cth_text;

  auto* ingest = app.add_subcommand("ingest", "load, align and clean a price panel");
  add_io_options(ingest, cfg);

  auto* returns = app.add_subcommand("returns", "write the normalized log-return panel");
  add_io_options(returns, cfg);

  auto* correlate = app.add_subcommand(
      "correlate", "correlation matrix, eigenvalue density and the random-matrix law");
  add_io_options(correlate, cfg);
  correlate->add_option("--bins", cfg.bins, "eigenvalue histogram bins");

  auto* spectrum = app.add_subcommand(
      "spectrum", "eigenvalues, IPR profile, Porter-Thomas and sector composition");
  add_io_options(spectrum, cfg);
  spectrum->add_option("--bins", cfg.bins, "eigenvalue histogram bins");
  spectrum->add_option("--pt-bins", cfg.pt_bins, "Porter-Thomas histogram bins");
  spectrum->add_option("--vectors", cfg.vectors, "leading eigenvectors to detail");
  spectrum->add_option("--top-k", cfg.top_k, "top contributing symbols per eigenvector");

  auto* decompose_cmd =
      app.add_subcommand("decompose", "split C into market, sector and random parts");
  add_io_options(decompose_cmd, cfg);
  add_ns_option(decompose_cmd, ns_text);
  decompose_cmd->add_option("--element-bins", cfg.element_bins, "element distribution bins");

  auto* network = app.add_subcommand("network", "minimum spanning tree or threshold network");
  add_io_options(network, cfg);
  network->add_option("--kind", cfg.kind, "mst | threshold")
      ->check(CLI::IsMember({"mst", "threshold"}));
  add_ns_option(network, ns_text);
  network->add_option("--cth", cth_text, "threshold value, or 'sweep' to scan a grid");

  auto* temporal = app.add_subcommand("temporal", "time evolution of the correlation structure");
  auto* overlap = temporal->add_subcommand("overlap", "eigenvector overlap across lagged windows");
  add_io_options(overlap, cfg);
  overlap->add_option("--window,--T", cfg.window_T, "window length in trading days");
  overlap->add_option("--tau", cfg.taus, "lags in trading days, comma-separated");
  overlap->add_option("--k", cfg.k_vectors, "number of leading eigenvectors");
  auto* rolling = temporal->add_subcommand("rolling", "market mode across rolling windows");
  add_io_options(rolling, cfg);
  rolling->add_option("--window,--T", cfg.roll_T, "window length in trading days");
  rolling->add_option("--step,--dt", cfg.roll_dt, "window step in trading days");
  rolling->add_option("--top", cfg.top, "stocks kept in the track output");

  auto* synth = app.add_subcommand("synth", "generate a factor-model market as ingestable CSV");
  synth->add_option("--stocks", cfg.n_stocks, "number of stocks");
  synth->add_option("--days", cfg.n_days, "number of price days");
  synth->add_option("--beta", cfg.beta, "market loading (scalar)");
  synth->add_option("--sigma", cfg.sigma, "idiosyncratic noise level");
  synth->add_option("--sectors", cfg.sectors_spec, "sector list members:loading,...");
  synth->add_option("--out", cfg.output_dir, "output directory");
  synth->add_option("--seed", cfg.seed, "generator seed");

  auto* pipeline = app.add_subcommand(
      "pipeline", "run the full chain: returns, correlation, spectrum, decomposition, networks");
  add_io_options(pipeline, cfg);
  pipeline->add_option("--bins", cfg.bins, "eigenvalue histogram bins");
  pipeline->add_option("--pt-bins", cfg.pt_bins, "Porter-Thomas histogram bins");
  pipeline->add_option("--vectors", cfg.vectors, "leading eigenvectors to detail");
  pipeline->add_option("--top-k", cfg.top_k, "top contributing symbols per eigenvector");
  pipeline->add_option("--element-bins", cfg.element_bins, "element distribution bins");
  add_ns_option(pipeline, ns_text);
  pipeline->add_option("--cth", cth_text, "threshold value, or 'sweep' (default)");

  app.add_flag("--dump-config", dump_config, "print the resolved run configuration and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* active = app.get_subcommands().front();
    cfg.command = active->get_name();
    if (cfg.command == "temporal") {
      CLI::App* mode = active->get_subcommands().empty() ? nullptr : active->get_subcommands().front();
      if (mode == nullptr) fail(Errc::bad_argument, "temporal wants a mode: overlap or rolling");
      cfg.command = "temporal-" + mode->get_name();
    }
    apply_ns_text(ns_text, cfg);
    if (!cth_text.empty()) {
      if (cth_text == "sweep") {
        cfg.cth_sweep = true;
      } else if (!parse_double(cth_text, cfg.cth)) {
        fail(Errc::bad_argument, "--cth wants a number or 'sweep', got " + cth_text);
      }
    } else if (cfg.command == "pipeline") {
      cfg.cth_sweep = true;  // pipeline default: pick c* from the sweep
    }
    if ((cfg.command == "pipeline") && !cfg.ns_auto && cfg.ns == 0) {
      cfg.ns_auto = true;  // the pipeline accepts the suggestion unless told otherwise
    }

    if (dump_config) {
      cfg.serialize(std::cout);
      return 0;
    }

    if (cfg.command == "ingest") run_ingest(cfg);
    else if (cfg.command == "returns") run_returns(cfg);
    else if (cfg.command == "correlate") run_correlate(cfg);
    else if (cfg.command == "spectrum") run_spectrum(cfg);
    else if (cfg.command == "decompose") run_decompose(cfg);
    else if (cfg.command == "network") run_network(cfg);
    else if (cfg.command == "temporal-overlap") run_temporal_overlap(cfg);
    else if (cfg.command == "temporal-rolling") run_temporal_rolling(cfg);
    else if (cfg.command == "synth") run_synth(cfg);
    else if (cfg.command == "pipeline") run_pipeline(cfg);
  } catch (const Error& e) {
    std::cerr << "corrspec: error (" << errc_name(e.code()) << "): " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "corrspec: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
