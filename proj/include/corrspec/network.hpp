#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "corrspec/common.hpp"
#include "corrspec/correlation.hpp"
#include "corrspec/csv.hpp"
#include "corrspec/stats.hpp"

namespace corrspec {

struct GraphNode {
  std::string symbol;
  std::string sector = "Miscellaneous";
};

struct GraphEdge {
  int src = 0;  // src < dst always
  int dst = 0;
  double weight = 0.0;
};

enum class GraphKind { mst, threshold };
enum class GraphFormat { pajek_net, dot, edge_csv };

/// Undirected stock-interaction graph: either a minimum spanning tree over
/// Mantegna distances or a thresholded adjacency network over a sector
/// component. No self-loops, no duplicate edges; isolated nodes are
/// retained.
struct MarketGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  GraphKind kind = GraphKind::threshold;

  double total_weight() const {
    double w = 0.0;
    for (const auto& e : edges) w += e.weight;
    return w;
  }
};

/// Union-find with path halving and union by size; ties go to the smaller
/// root index so merges are deterministic.
class DisjointSet {
 public:
  explicit DisjointSet(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  bool unite(int a, int b) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (size_[static_cast<std::size_t>(ra)] < size_[static_cast<std::size_t>(rb)] ||
        (size_[static_cast<std::size_t>(ra)] == size_[static_cast<std::size_t>(rb)] && rb < ra)) {
      std::swap(ra, rb);
    }
    parent_[static_cast<std::size_t>(rb)] = ra;
    size_[static_cast<std::size_t>(ra)] += size_[static_cast<std::size_t>(rb)];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

inline std::vector<GraphNode> make_nodes(const std::vector<std::string>& symbols,
                                         const std::map<std::string, std::string>& sectors) {
  std::vector<GraphNode> nodes;
  nodes.reserve(symbols.size());
  for (const auto& symbol : symbols) {
    auto it = sectors.find(symbol);
    nodes.push_back({symbol, it == sectors.end() ? "Miscellaneous" : it->second});
  }
  return nodes;
}

/// Mantegna metric d_ij = sqrt(2 (1 - C_ij)): 0 for perfectly correlated
/// pairs, sqrt(2) for uncorrelated, 2 for perfectly anticorrelated.
inline Matrix mantegna_distance(const CorrelationMatrix& c) {
  const Eigen::Index n = c.size();
  Matrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double corr = c.values(i, j);
      if (std::abs(corr) > 1.0 + 1e-9) {
        fail(Errc::correlation_out_of_range,
             "correlation out of [-1, 1]: C(" + std::to_string(i) + "," + std::to_string(j) +
                 ") = " + format_double(corr));
      }
      const double arg = std::max(0.0, 2.0 * (1.0 - corr));
      const double dist = std::sqrt(arg);
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

/// Kruskal over all N(N-1)/2 candidate edges, ties broken by lexicographic
/// (i, j) so the tree is deterministic.
inline MarketGraph minimum_spanning_tree(const Matrix& d, std::vector<GraphNode> nodes) {
  const Eigen::Index n = d.rows();
  if (n < 2 || d.cols() != n) {
    fail(Errc::invalid_distance_matrix, "distance matrix must be square with N >= 2");
  }
  if (static_cast<Eigen::Index>(nodes.size()) != n) {
    fail(Errc::bad_argument, "node list does not match distance matrix size");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(d(i, i)) > 1e-12) {
      fail(Errc::invalid_distance_matrix, "nonzero diagonal at " + std::to_string(i));
    }
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        fail(Errc::invalid_distance_matrix, "negative or non-finite distance at (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
      }
      if (std::abs(d(i, j) - d(j, i)) > 1e-12) {
        fail(Errc::invalid_distance_matrix, "asymmetric distance at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
      }
    }
  }

  std::vector<GraphEdge> candidates;
  candidates.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      candidates.push_back({static_cast<int>(i), static_cast<int>(j), d(i, j)});
  std::sort(candidates.begin(), candidates.end(), [](const GraphEdge& a, const GraphEdge& b) {
    if (a.weight != b.weight) return a.weight < b.weight;
    if (a.src != b.src) return a.src < b.src;
    return a.dst < b.dst;
  });

  MarketGraph g;
  g.nodes = std::move(nodes);
  g.kind = GraphKind::mst;
  DisjointSet dsu(static_cast<int>(n));
  for (const auto& e : candidates) {
    if (dsu.unite(e.src, e.dst)) {
      g.edges.push_back(e);
      if (static_cast<Eigen::Index>(g.edges.size()) == n - 1) break;
    }
  }
  return g;
}

/// Adjacency by strict threshold: an edge (i, j) exists iff M_ij > c_th.
inline MarketGraph threshold_network(const Matrix& sector_component,
                                     std::vector<GraphNode> nodes, double c_th) {
  const Eigen::Index n = sector_component.rows();
  if (n < 1 || sector_component.cols() != n) {
    fail(Errc::bad_argument, "threshold_network needs a square matrix");
  }
  if (static_cast<Eigen::Index>(nodes.size()) != n) {
    fail(Errc::bad_argument, "node list does not match matrix size");
  }
  MarketGraph g;
  g.nodes = std::move(nodes);
  g.kind = GraphKind::threshold;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (sector_component(i, j) > c_th) {
        g.edges.push_back({static_cast<int>(i), static_cast<int>(j), sector_component(i, j)});
      }
    }
  }
  return g;
}

/// Node -> component id from the graph's edges; ids are assigned in order
/// of each component's first node.
inline std::vector<int> connected_components(const MarketGraph& g) {
  const int n = static_cast<int>(g.nodes.size());
  DisjointSet dsu(n);
  for (const auto& e : g.edges) dsu.unite(e.src, e.dst);
  std::vector<int> component(static_cast<std::size_t>(n), -1);
  std::map<int, int> ids;
  for (int i = 0; i < n; ++i) {
    const int root = dsu.find(i);
    auto it = ids.emplace(root, static_cast<int>(ids.size())).first;
    component[static_cast<std::size_t>(i)] = it->second;
  }
  return component;
}

/// Connected-component partition scored against reference labels with the
/// adjusted Rand index.
struct ClusterScore {
  std::vector<int> partition;
  double agreement = 0.0;
};

inline ClusterScore score_partition(const MarketGraph& g,
                                    const std::vector<std::string>& reference_labels) {
  if (reference_labels.size() != g.nodes.size()) {
    fail(Errc::bad_argument, "reference labels do not match node count");
  }
  ClusterScore score;
  score.partition = connected_components(g);
  score.agreement = adjusted_rand_index(score.partition, reference_labels);
  return score;
}

struct SweepRow {
  double c_th = 0.0;
  int n_components = 0;
  int largest_component = 0;
  int clusters_3plus = 0;  // components of size >= 3
  double ari = 0.0;        // meaningful only when a reference was given
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double best_cth = 0.0;
  bool has_reference = false;
};

/// Scores every threshold in the grid. With reference labels the
/// recommended c* maximizes the ARI; without, it maximizes the number of
/// non-singleton clusters of size >= 3. Ties go to the larger threshold.
inline SweepResult sweep_threshold(const Matrix& sector_component,
                                   const std::vector<GraphNode>& nodes,
                                   const std::vector<double>& grid,
                                   const std::vector<std::string>& reference_labels = {}) {
  if (grid.empty()) fail(Errc::bad_argument, "threshold sweep needs a non-empty grid");
  SweepResult result;
  result.has_reference = !reference_labels.empty();
  if (result.has_reference && reference_labels.size() != nodes.size()) {
    fail(Errc::bad_argument, "reference labels do not match node count");
  }

  double best_score = -2.0;
  for (double c_th : grid) {
    const MarketGraph g = threshold_network(sector_component, nodes, c_th);
    const std::vector<int> component = connected_components(g);
    std::map<int, int> sizes;
    for (int id : component) ++sizes[id];
    SweepRow row;
    row.c_th = c_th;
    row.n_components = static_cast<int>(sizes.size());
    for (const auto& [id, size] : sizes) {
      row.largest_component = std::max(row.largest_component, size);
      if (size >= 3) ++row.clusters_3plus;
    }
    if (result.has_reference) {
      row.ari = adjusted_rand_index(component, reference_labels);
    }
    const double score = result.has_reference ? row.ari : static_cast<double>(row.clusters_3plus);
    if (score > best_score || (score == best_score && c_th > result.best_cth)) {
      best_score = score;
      result.best_cth = c_th;
    }
    result.rows.push_back(row);
  }
  return result;
}

namespace detail {

/// Fixed palette for DOT fill colors, assigned to sectors in sorted order.
inline const std::array<const char*, 10>& dot_palette() {
  static const std::array<const char*, 10> palette = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
      "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return palette;
}

}  // namespace detail

/// Writes the graph to disk.
///
/// pajek-net: `*Vertices N` with quoted labels, then `*Edges` with 1-based
/// endpoints and weights. dot: undirected graph with the sector encoded as
/// the node fill color. edge-csv: `src,dst,weight` with symbol names.
inline void export_graph(const MarketGraph& g, GraphFormat format, const std::string& path) {
  std::ofstream out = open_output(path);
  switch (format) {
    case GraphFormat::pajek_net: {
      out << "*Vertices " << g.nodes.size() << "\n";
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        out << (i + 1) << " \"" << g.nodes[i].symbol << "\"\n";
      }
      out << "*Edges\n";
      for (const auto& e : g.edges) {
        out << (e.src + 1) << " " << (e.dst + 1) << " " << format_double(e.weight) << "\n";
      }
      break;
    }
    case GraphFormat::dot: {
      std::map<std::string, std::size_t> palette_index;
      for (const auto& node : g.nodes) palette_index.emplace(node.sector, 0);
      std::size_t next = 0;
      for (auto& [sector, idx] : palette_index) idx = next++ % detail::dot_palette().size();
      out << "graph market {\n";
      out << "  node [style=filled];\n";
      for (const auto& node : g.nodes) {
        out << "  \"" << node.symbol << "\" [fillcolor=\""
            << detail::dot_palette()[palette_index[node.sector]] << "\", sector=\""
            << node.sector << "\"];\n";
      }
      for (const auto& e : g.edges) {
        out << "  \"" << g.nodes[static_cast<std::size_t>(e.src)].symbol << "\" -- \""
            << g.nodes[static_cast<std::size_t>(e.dst)].symbol << "\" [weight=\""
            << format_double(e.weight) << "\"];\n";
      }
      out << "}\n";
      break;
    }
    case GraphFormat::edge_csv: {
      out << "src,dst,weight\n";
      for (const auto& e : g.edges) {
        out << g.nodes[static_cast<std::size_t>(e.src)].symbol << ","
            << g.nodes[static_cast<std::size_t>(e.dst)].symbol << ","
            << format_double(e.weight) << "\n";
      }
      break;
    }
  }
  if (!out) fail(Errc::io_error, "failed while writing " + path);
}

/// Re-imports an edge-csv export. Nodes appear in order of first mention;
/// sector labels are not part of the format.
inline MarketGraph import_edge_csv(const std::string& path,
                                   GraphKind kind = GraphKind::threshold) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"src", "dst", "weight"}) {
    fail(Errc::parse_error, path + ": expected header src,dst,weight");
  }
  MarketGraph g;
  g.kind = kind;
  std::map<std::string, int> index;
  auto node_id = [&](const std::string& symbol) {
    auto it = index.find(symbol);
    if (it == index.end()) {
      it = index.emplace(symbol, static_cast<int>(g.nodes.size())).first;
      g.nodes.push_back({symbol, "Miscellaneous"});
    }
    return it->second;
  };
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    double weight = 0.0;
    if (fields.size() != 3 || !parse_double(fields[2], weight)) {
      fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": bad edge row");
    }
    int a = node_id(trim(fields[0]));
    int b = node_id(trim(fields[1]));
    if (a == b) fail(Errc::parse_error, path + ": line " + std::to_string(line_no) + ": self-loop");
    if (a > b) std::swap(a, b);
    g.edges.push_back({a, b, weight});
  }
  return g;
}

}  // namespace corrspec
