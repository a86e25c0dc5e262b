#include <algorithm>
#include <map>
#include <tuple>
#include <unordered_map>

#include <fmt/format.h>

#include "json.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"
#include "prodspace/product_space.hpp"
#include "prodspace/version.hpp"

namespace prodspace::space {

using nlohmann::ordered_json;

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(ch);
    }
  }
  return out;
}

std::string_view comparator_name(Comparator c) {
  return c == Comparator::Inclusive ? "inclusive" : "strict";
}

// Annotation per node index; throws unless the annotations match the nodes.
std::vector<const NodeAnnotation*> index_annotations(const SpaceGraph& g,
                                                     std::span<const NodeAnnotation> annotations) {
  std::vector<const NodeAnnotation*> out(g.nodes.size(), nullptr);
  if (annotations.empty()) return out;
  if (annotations.size() != g.nodes.size())
    throw InvalidArgument("export_graph: annotations must cover exactly the graph's nodes");
  std::unordered_map<std::string_view, std::size_t> by_code;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) by_code.emplace(g.nodes[i].code, i);
  for (const auto& a : annotations) {
    auto it = by_code.find(a.product);
    if (it == by_code.end() || out[it->second])
      throw InvalidArgument("export_graph: annotation for '" + a.product +
                            "' is unknown or duplicated");
    out[it->second] = &a;
  }
  return out;
}

std::string edge_list_csv(const SpaceGraph& g) {
  std::string out = "source,target,weight\n";
  for (const auto& e : g.edges) {
    out += csv::escape_field(g.nodes[e.source].code);
    out += ',';
    out += csv::escape_field(g.nodes[e.target].code);
    out += ',';
    out += csv::format_double(e.weight);
    out += '\n';
  }
  return out;
}

std::string node_link_json(const SpaceGraph& g, const std::vector<const NodeAnnotation*>& ann,
                           const LayoutResult* coords) {
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    ordered_json j;
    j["id"] = n.code;
    j["name"] = n.name;
    j["sector"] = trade::to_string(n.sector);
    j["soph"] = n.sophistication ? ordered_json(*n.sophistication) : ordered_json(nullptr);
    if (const auto* a = ann[i]) {
      if (a->tier) j["tier"] = to_string(*a->tier);
      if (a->size_value) j["size"] = *a->size_value;
      if (a->growth) j["growth"] = to_string(*a->growth);
      if (a->decile) j["decile"] = *a->decile;
    }
    if (coords) {
      j["x"] = coords->coordinates[i].x;
      j["y"] = coords->coordinates[i].y;
    }
    nodes.push_back(std::move(j));
  }
  ordered_json links = ordered_json::array();
  for (const auto& e : g.edges)
    links.push_back({{"source", g.nodes[e.source].code},
                     {"target", g.nodes[e.target].code},
                     {"weight", e.weight}});
  ordered_json doc;
  doc["directed"] = false;
  doc["threshold"] = g.threshold;
  doc["comparator"] = comparator_name(g.comparator);
  doc["nodes"] = std::move(nodes);
  doc["links"] = std::move(links);
  return doc.dump(2) + "\n";
}

std::string gexf(const SpaceGraph& g, const std::vector<const NodeAnnotation*>& ann,
                 const LayoutResult* coords) {
  const bool annotated = std::any_of(ann.begin(), ann.end(), [](auto* a) { return a != nullptr; });
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<gexf xmlns=\"http://www.gexf.net/1.2draft\" "
         "xmlns:viz=\"http://www.gexf.net/1.2draft/viz\" version=\"1.2\">\n";
  out += fmt::format("  <meta>\n    <creator>prodspace {}</creator>\n", kVersion);
  out += fmt::format("    <description>Product space, proximity threshold {} ({})</description>\n",
                     csv::format_double(g.threshold), comparator_name(g.comparator));
  out += "  </meta>\n";
  out += "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n";
  out += "    <attributes class=\"node\">\n";
  out += "      <attribute id=\"name\" title=\"name\" type=\"string\"/>\n";
  out += "      <attribute id=\"sector\" title=\"sector\" type=\"string\"/>\n";
  out += "      <attribute id=\"sophistication\" title=\"sophistication\" type=\"double\"/>\n";
  if (annotated) {
    out += "      <attribute id=\"tier\" title=\"tier\" type=\"string\"/>\n";
    out += "      <attribute id=\"size_value\" title=\"size_value\" type=\"double\"/>\n";
    out += "      <attribute id=\"growth\" title=\"growth\" type=\"string\"/>\n";
    out += "      <attribute id=\"decile\" title=\"decile\" type=\"integer\"/>\n";
  }
  out += "    </attributes>\n";

  out += fmt::format("    <nodes count=\"{}\">\n", g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& n = g.nodes[i];
    const std::string label = n.name.empty() ? n.code : n.name;
    out += fmt::format("      <node id=\"{}\" label=\"{}\">\n", xml_escape(n.code), xml_escape(label));
    out += "        <attvalues>\n";
    auto attr = [&out](std::string_view key, std::string_view value) {
      out += fmt::format("          <attvalue for=\"{}\" value=\"{}\"/>\n", key, xml_escape(value));
    };
    attr("name", n.name);
    attr("sector", trade::to_string(n.sector));
    if (n.sophistication) attr("sophistication", csv::format_double(*n.sophistication));
    if (const auto* a = ann[i]) {
      if (a->tier) attr("tier", to_string(*a->tier));
      if (a->size_value) attr("size_value", csv::format_double(*a->size_value));
      if (a->growth) attr("growth", to_string(*a->growth));
      if (a->decile) attr("decile", std::to_string(*a->decile));
    }
    out += "        </attvalues>\n";
    if (coords) {
      out += fmt::format("        <viz:position x=\"{}\" y=\"{}\" z=\"0\"/>\n",
                         csv::format_double(coords->coordinates[i].x),
                         csv::format_double(coords->coordinates[i].y));
    }
    out += "      </node>\n";
  }
  out += "    </nodes>\n";

  out += fmt::format("    <edges count=\"{}\">\n", g.edges.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& edge = g.edges[e];
    out += fmt::format("      <edge id=\"{}\" source=\"{}\" target=\"{}\" weight=\"{}\"/>\n", e,
                       xml_escape(g.nodes[edge.source].code), xml_escape(g.nodes[edge.target].code),
                       csv::format_double(edge.weight));
  }
  out += "    </edges>\n";
  out += "  </graph>\n</gexf>\n";
  return out;
}

}  // namespace

ExportFormat parse_export_format(std::string_view name) {
  if (name == "csv" || name == "edge-list" || name == "edgelist") return ExportFormat::EdgeListCsv;
  if (name == "json" || name == "node-link") return ExportFormat::NodeLinkJson;
  if (name == "gexf") return ExportFormat::Gexf;
  throw InvalidArgument("unknown graph export format '" + std::string(name) + "'");
}

std::string_view file_extension(ExportFormat format) noexcept {
  switch (format) {
    case ExportFormat::EdgeListCsv:
      return ".csv";
    case ExportFormat::NodeLinkJson:
      return ".json";
    case ExportFormat::Gexf:
      return ".gexf";
  }
  return "";
}

std::string export_graph(const SpaceGraph& g, std::span<const NodeAnnotation> annotations,
                         ExportFormat format, const LayoutResult* coords) {
  const auto ann = index_annotations(g, annotations);
  if (coords && coords->coordinates.size() != g.nodes.size())
    throw InvalidArgument("export_graph: layout does not match the graph");
  switch (format) {
    case ExportFormat::EdgeListCsv:
      return edge_list_csv(g);
    case ExportFormat::NodeLinkJson:
      return node_link_json(g, ann, coords);
    case ExportFormat::Gexf:
      return gexf(g, ann, coords);
  }
  throw InvalidArgument("export_graph: unknown format");
}

std::string export_graph(const SpaceGraph& g, ExportFormat format) {
  return export_graph(g, {}, format, nullptr);
}

SpaceGraph import_graph_json(std::string_view text) {
  SpaceGraph g;
  try {
    const auto doc = ordered_json::parse(text);
    g.threshold = doc.at("threshold").get<double>();
    g.comparator = doc.value("comparator", "inclusive") == "strict" ? Comparator::Strict
                                                                     : Comparator::Inclusive;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.code = jn.at("id").get<std::string>();
      n.name = jn.value("name", "");
      n.sector = trade::sector_from_string(jn.value("sector", "Other"));
      if (jn.contains("soph") && !jn["soph"].is_null()) n.sophistication = jn["soph"].get<double>();
      if (!index.emplace(n.code, g.nodes.size()).second)
        throw InvalidArgument("duplicate node id '" + n.code + "'");
      g.nodes.push_back(std::move(n));
    }
    for (const auto& jl : doc.at("links")) {
      const auto s = index.at(jl.at("source").get<std::string>());
      const auto t = index.at(jl.at("target").get<std::string>());
      g.edges.push_back(Edge{std::min(s, t), std::max(s, t), jl.at("weight").get<double>()});
    }
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("invalid node-link JSON: ") + e.what());
  } catch (const std::out_of_range&) {
    throw DataError("invalid node-link JSON: link refers to an unknown node");
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.source, a.target) < std::tie(b.source, b.target);
  });
  compute_components(g);
  return g;
}

std::string percolation_csv(std::span<const PercolationPoint> curve) {
  std::string out = "threshold,giant_fraction,giant_size,edge_count\n";
  for (const auto& pt : curve)
    out += fmt::format("{},{},{},{}\n", csv::format_double(pt.threshold),
                       csv::format_double(pt.giant_fraction), pt.giant_size, pt.edge_count);
  return out;
}

std::string layout_csv(const SpaceGraph& g, const LayoutResult& coords) {
  std::vector<bool> in_grid(g.nodes.size(), false);
  for (auto v : coords.grid_block) in_grid[v] = true;
  std::string out = "id,x,y,grid\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    out += fmt::format("{},{},{},{}\n", csv::escape_field(g.nodes[i].code),
                       csv::format_double(coords.coordinates[i].x),
                       csv::format_double(coords.coordinates[i].y), in_grid[i] ? 1 : 0);
  return out;
}

}  // namespace prodspace::space
