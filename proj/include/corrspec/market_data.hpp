#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/csv.hpp"

namespace corrspec {

/// One stock's dated closing prices. Dates are opaque ordered labels
/// (ISO-8601 sorts correctly); there is no exchange-calendar logic.
struct PriceSeries {
  std::string symbol;
  std::string sector = "Miscellaneous";
  std::vector<std::pair<std::string, double>> observations;  // (date, close), dates strictly increasing
};

enum class CsvLayout { long_csv, wide_csv };
enum class Calendar { union_dates, intersection };

struct LoadResult {
  std::vector<PriceSeries> series;
  std::vector<std::string> warnings;  // one entry per rejected row/cell
};

/// Dense aligned price panel. After align_panel there are no missing
/// entries; forward-filled cells are flagged in fill_mask.
struct PricePanel {
  std::vector<std::string> symbols;
  std::vector<std::string> sectors;  // aligned with symbols
  std::vector<std::string> dates;
  Matrix prices;       // N x T, strictly positive
  BoolArray fill_mask; // N x T, true where forward-filled
  std::vector<std::string> excluded;  // symbols dropped for leading gaps

  Eigen::Index n_stocks() const { return prices.rows(); }
  Eigen::Index n_days() const { return prices.cols(); }

  std::map<std::string, std::string> sector_map() const {
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < symbols.size(); ++i) m[symbols[i]] = sectors[i];
    return m;
  }
};

namespace detail {

inline void note_rejected(LoadResult& result, std::size_t line_no,
                          const std::string& symbol, const std::string& field,
                          const std::string& why) {
  result.warnings.push_back("line " + std::to_string(line_no) + ": rejected price '" +
                            field + "' for " + symbol + " (" + why + ")");
}

inline bool accept_price(const std::string& field, double& price) {
  if (!parse_double(field, price)) return false;
  return price > 0.0 && std::isfinite(price);
}

}  // namespace detail

/// Reads closing prices from disk.
///
/// Long layout: header `date,symbol,close[,sector]`, one observation per
/// row. Wide layout: header `date,SYM1,SYM2,...`, blank cells meaning
/// missing. Rows or cells with non-positive or non-numeric prices are
/// rejected with a per-line warning; structurally malformed lines are a
/// parse error.
inline LoadResult load_prices(const std::string& path, CsvLayout layout) {
  std::ifstream in = open_input(path);
  LoadResult result;

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(Errc::parse_error, path + ": empty file");
  ++line_no;
  const std::vector<std::string> header = split_csv_line(line);

  // Per-symbol observation lists, symbols kept in first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<std::string, double>>> observations;
  std::map<std::string, std::string> sectors;
  auto slot = [&](const std::string& symbol) -> std::vector<std::pair<std::string, double>>& {
    auto it = index.find(symbol);
    if (it == index.end()) {
      it = index.emplace(symbol, order.size()).first;
      order.push_back(symbol);
      observations.emplace_back();
    }
    return observations[it->second];
  };

  if (layout == CsvLayout::long_csv) {
    if (header.size() < 3 || header.size() > 4 || to_lower(trim(header[0])) != "date" ||
        to_lower(trim(header[1])) != "symbol" || to_lower(trim(header[2])) != "close") {
      fail(Errc::parse_error, path + ": line 1: expected header date,symbol,close[,sector]");
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != header.size()) {
        fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
      }
      const std::string date = trim(fields[0]);
      const std::string symbol = trim(fields[1]);
      if (date.empty() || symbol.empty()) {
        fail(Errc::parse_error,
             path + ": line " + std::to_string(line_no) + ": empty date or symbol");
      }
      double price = 0.0;
      if (!detail::accept_price(trim(fields[2]), price)) {
        detail::note_rejected(result, line_no, symbol, trim(fields[2]),
                              "non-numeric or non-positive");
        continue;
      }
      slot(symbol).emplace_back(date, price);
      if (fields.size() == 4) {
        const std::string sector = trim(fields[3]);
        if (!sector.empty()) sectors[symbol] = sector;
      }
    }
  } else {
    if (header.size() < 2 || to_lower(trim(header[0])) != "date") {
      fail(Errc::parse_error, path + ": line 1: expected header date,SYM1,SYM2,...");
    }
    std::vector<std::string> wide_symbols;
    for (std::size_t i = 1; i < header.size(); ++i) {
      const std::string symbol = trim(header[i]);
      if (symbol.empty()) {
        fail(Errc::parse_error, path + ": line 1: empty symbol column " + std::to_string(i + 1));
      }
      if (index.count(symbol)) {
        fail(Errc::parse_error, path + ": line 1: duplicate symbol column " + symbol);
      }
      slot(symbol);
      wide_symbols.push_back(symbol);
    }
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != header.size()) {
        fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": expected " +
                                    std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
      }
      const std::string date = trim(fields[0]);
      if (date.empty()) {
        fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": empty date");
      }
      for (std::size_t i = 1; i < fields.size(); ++i) {
        const std::string cell = trim(fields[i]);
        if (cell.empty()) continue;  // missing observation
        double price = 0.0;
        if (!detail::accept_price(cell, price)) {
          detail::note_rejected(result, line_no, wide_symbols[i - 1], cell,
                                "non-numeric or non-positive");
          continue;
        }
        observations[i - 1].emplace_back(date, price);
      }
    }
  }

  for (std::size_t i = 0; i < order.size(); ++i) {
    if (observations[i].empty()) continue;
    PriceSeries series;
    series.symbol = order[i];
    auto sec = sectors.find(order[i]);
    if (sec != sectors.end()) series.sector = sec->second;
    series.observations = std::move(observations[i]);
    std::stable_sort(series.observations.begin(), series.observations.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t k = 1; k < series.observations.size(); ++k) {
      if (series.observations[k].first == series.observations[k - 1].first) {
        fail(Errc::parse_error, path + ": duplicate date " + series.observations[k].first +
                                    " for symbol " + series.symbol);
      }
    }
    result.series.push_back(std::move(series));
  }
  if (result.series.empty()) fail(Errc::empty_universe, path + ": no usable price series");
  return result;
}

/// Optional sector map file: CSV `symbol,sector`.
inline std::map<std::string, std::string> load_sector_map(const std::string& path) {
  std::ifstream in = open_input(path);
  std::map<std::string, std::string> map;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) fail(Errc::parse_error, path + ": empty file");
  ++line_no;
  const auto header = split_csv_line(line);
  if (header.size() != 2 || to_lower(trim(header[0])) != "symbol" ||
      to_lower(trim(header[1])) != "sector") {
    fail(Errc::parse_error, path + ": line 1: expected header symbol,sector");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) {
      fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": expected 2 fields");
    }
    const std::string symbol = trim(fields[0]);
    const std::string sector = trim(fields[1]);
    if (!symbol.empty() && !sector.empty()) map[symbol] = sector;
  }
  return map;
}

inline void apply_sector_map(std::vector<PriceSeries>& series,
                             const std::map<std::string, std::string>& map) {
  for (auto& s : series) {
    auto it = map.find(s.symbol);
    if (it != map.end()) s.sector = it->second;
  }
}

/// Aligns price series onto a common calendar.
///
/// Under the union calendar a symbol missing a date carries the last known
/// price forward and the fill mask is set. Forward-fill only: symbols with
/// calendar dates before their first observation are excluded (reported in
/// the result) rather than back-filled. A stock whose fill fraction would
/// exceed `fill_cap` of the panel length is an error.
inline PricePanel align_panel(const std::vector<PriceSeries>& series, Calendar calendar,
                              double fill_cap = 0.06) {
  if (series.size() < 2) {
    fail(Errc::insufficient_overlap, "align_panel needs at least 2 series, got " +
                                         std::to_string(series.size()));
  }
  if (!(fill_cap >= 0.0 && fill_cap <= 1.0)) {
    fail(Errc::bad_argument, "fill cap must lie in [0, 1]");
  }
  for (const auto& s : series) {
    if (s.symbol.empty()) fail(Errc::bad_argument, "price series with empty symbol");
    if (s.observations.empty()) {
      fail(Errc::insufficient_overlap, s.symbol + " has no observations");
    }
  }

  // Build the calendar.
  std::vector<std::string> dates;
  if (calendar == Calendar::union_dates) {
    std::set<std::string> all;
    for (const auto& s : series)
      for (const auto& [date, price] : s.observations) all.insert(date);
    dates.assign(all.begin(), all.end());
  } else {
    std::map<std::string, std::size_t> hits;
    for (const auto& s : series)
      for (const auto& [date, price] : s.observations) ++hits[date];
    for (const auto& [date, count] : hits)
      if (count == series.size()) dates.push_back(date);
  }
  if (dates.size() < 2) {
    fail(Errc::insufficient_overlap,
         "aligned calendar has " + std::to_string(dates.size()) + " dates (need >= 2)");
  }
  const std::size_t T = dates.size();

  PricePanel panel;
  panel.dates = dates;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> masks;
  std::vector<std::string> over_cap;
  std::vector<double> over_cap_fraction;

  for (const auto& s : series) {
    if (s.observations.front().first > dates.front()) {
      panel.excluded.push_back(s.symbol);  // leading gap: no back-fill
      continue;
    }
    std::vector<double> row(T, 0.0);
    std::vector<bool> mask(T, false);
    std::size_t obs = 0;
    double last = 0.0;
    std::size_t fills = 0;
    for (std::size_t t = 0; t < T; ++t) {
      while (obs < s.observations.size() && s.observations[obs].first < dates[t]) ++obs;
      if (obs < s.observations.size() && s.observations[obs].first == dates[t]) {
        last = s.observations[obs].second;
        ++obs;
      } else {
        mask[t] = true;
        ++fills;
      }
      row[t] = last;
    }
    const double fraction = static_cast<double>(fills) / static_cast<double>(T);
    if (fraction > fill_cap) {
      over_cap.push_back(s.symbol);
      over_cap_fraction.push_back(fraction);
      continue;
    }
    panel.symbols.push_back(s.symbol);
    panel.sectors.push_back(s.sector);
    rows.push_back(std::move(row));
    masks.push_back(std::move(mask));
  }

  if (!over_cap.empty()) {
    std::string msg = "fill cap " + std::to_string(fill_cap) + " exceeded by:";
    for (std::size_t i = 0; i < over_cap.size(); ++i) {
      msg += " " + over_cap[i] + " (" + std::to_string(over_cap_fraction[i]) + ")";
    }
    fail(Errc::fill_cap_exceeded, msg);
  }
  if (panel.symbols.size() < 2) {
    fail(Errc::insufficient_overlap,
         "fewer than 2 symbols remain after alignment (excluded " +
             std::to_string(panel.excluded.size()) + " for leading gaps)");
  }

  const Eigen::Index n = static_cast<Eigen::Index>(panel.symbols.size());
  const Eigen::Index t_len = static_cast<Eigen::Index>(T);
  panel.prices.resize(n, t_len);
  panel.fill_mask.resize(n, t_len);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index t = 0; t < t_len; ++t) {
      panel.prices(i, t) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
      panel.fill_mask(i, t) = masks[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)];
    }
  }
  return panel;
}

/// Inverse of alignment for an already-dense panel (fill flags are not
/// representable in a plain series and are dropped).
inline std::vector<PriceSeries> panel_to_series(const PricePanel& panel) {
  std::vector<PriceSeries> series;
  for (std::size_t i = 0; i < panel.symbols.size(); ++i) {
    PriceSeries s;
    s.symbol = panel.symbols[i];
    s.sector = panel.sectors[i];
    for (std::size_t t = 0; t < panel.dates.size(); ++t) {
      s.observations.emplace_back(panel.dates[t],
                                  panel.prices(static_cast<Eigen::Index>(i),
                                               static_cast<Eigen::Index>(t)));
    }
    series.push_back(std::move(s));
  }
  return series;
}

}  // namespace corrspec
