#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prodspace/annotation.hpp"
#include "prodspace/metrics.hpp"
#include "prodspace/trade_data.hpp"

namespace prodspace::space {

enum class Comparator { Inclusive, Strict };

struct Node {
  std::string code;
  std::string name;
  trade::SectorClass sector = trade::SectorClass::Other;
  std::optional<double> sophistication;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  std::size_t source = 0;  // source < target
  std::size_t target = 0;
  double weight = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Thresholded product space. Components hold node indices, sorted, and are
/// ordered by size descending then by first index. `isolated` lists nodes
/// without any edge.
struct SpaceGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;  // sorted by (source, target)
  double threshold = 0.45;
  Comparator comparator = Comparator::Inclusive;
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> isolated;

  friend bool operator==(const SpaceGraph&, const SpaceGraph&) = default;
};

/// Edge (i,j), i != j, iff phi_ij >= threshold (or > for Strict).
/// Throws InvalidArgument unless 0 < threshold <= 1.
SpaceGraph build_graph(const metrics::ProximityMatrix& phi, double threshold,
                       Comparator comparator = Comparator::Inclusive);

/// Fills node names, sectors and sophistication values.
void attach_attributes(SpaceGraph& g, const trade::ProductRegistry& registry,
                       const metrics::SophisticationVector* soph = nullptr);

/// Recomputes components and the isolated set from nodes and edges.
void compute_components(SpaceGraph& g);

struct PercolationPoint {
  double threshold = 0.0;
  double giant_fraction = 0.0;
  std::size_t giant_size = 0;
  std::size_t edge_count = 0;
};

/// Giant-component fraction per threshold, relative to the number of nodes
/// that have an edge at the smallest grid value. The grid must be strictly
/// ascending within (0,1].
std::vector<PercolationPoint> percolation_sweep(const metrics::ProximityMatrix& phi,
                                                std::span<const double> thresholds,
                                                Comparator comparator = Comparator::Inclusive);

/// Largest grid threshold whose giant fraction is still >= 0.5.
std::optional<double> percolation_threshold(std::span<const PercolationPoint> curve);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct LayoutOptions {
  int iterations = 300;
  double ideal_edge_length = 1.0;
};

/// coordinates[i] belongs to g.nodes[i]. The grid block holds the isolated
/// nodes, sorted by code, to the right of the connected region.
struct LayoutResult {
  std::vector<Point> coordinates;
  std::vector<std::size_t> grid_block;
  double connected_min_x = 0.0, connected_max_x = 0.0;
  double connected_min_y = 0.0, connected_max_y = 0.0;
  double grid_min_x = 0.0;
};

/// Seeded force-directed placement (Fruchterman-Reingold) of connected nodes.
LayoutResult layout(const SpaceGraph& g, std::uint64_t seed, const LayoutOptions& options = {});

enum class ExportFormat { EdgeListCsv, NodeLinkJson, Gexf };

ExportFormat parse_export_format(std::string_view name);
std::string_view file_extension(ExportFormat format) noexcept;

/// Serializes the graph. When given, `annotations` must cover exactly the
/// graph's nodes (any order). Output is byte-stable for fixed inputs.
std::string export_graph(const SpaceGraph& g, std::span<const NodeAnnotation> annotations,
                         ExportFormat format, const LayoutResult* coords = nullptr);
std::string export_graph(const SpaceGraph& g, ExportFormat format);

/// Parses node-link JSON written by export_graph.
SpaceGraph import_graph_json(std::string_view json);

std::string percolation_csv(std::span<const PercolationPoint> curve);
std::string layout_csv(const SpaceGraph& g, const LayoutResult& coords);

}  // namespace prodspace::space
