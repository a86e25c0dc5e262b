#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "prodspace/error.hpp"
#include "prodspace/product_space.hpp"
#include "support/fixtures.hpp"

using namespace prodspace;
using namespace prodspace::space;

namespace {

metrics::ProximityMatrix toy_phi() {
  return metrics::proximity(metrics::binarize(metrics::rca(fixtures::toy1()), 1.0));
}

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

TEST_CASE("build_graph on TOY1") {
  const auto g = build_graph(toy_phi(), 0.45);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0] == Edge{0, 1, 0.5});
  CHECK(g.isolated == std::vector<std::size_t>{2});
  CHECK(g.components == std::vector<std::vector<std::size_t>>{{0, 1}});

  const auto none = build_graph(toy_phi(), 0.6);
  CHECK(none.edges.empty());
  CHECK(none.isolated == std::vector<std::size_t>{0, 1, 2});
  CHECK(none.components.empty());

  CHECK(build_graph(toy_phi(), 0.5).edges.size() == 1);
  CHECK(build_graph(toy_phi(), 0.5, Comparator::Strict).edges.empty());
  CHECK_THROWS_AS(build_graph(toy_phi(), 0.0), InvalidArgument);
  CHECK_THROWS_AS(build_graph(toy_phi(), 1.5), InvalidArgument);
}

TEST_CASE("threshold 1 keeps exactly the duplicate-exporter pair") {
  metrics::MMatrix m;
  m.countries = {"X", "Y", "Z"};
  m.products = {"a", "b", "c"};
  m.bits = DenseMatrix<std::uint8_t>(3, 3, 0);
  m.bits(0, 0) = m.bits(0, 1) = m.bits(1, 0) = m.bits(1, 1) = 1;
  m.bits(1, 2) = m.bits(2, 2) = 1;
  const auto g = build_graph(metrics::proximity(m), 1.0);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].source == 0);
  CHECK(g.edges[0].target == 1);
}

TEST_CASE("thresholding is a monotone filtration and components partition the nodes") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = metrics::proximity(fixtures::random_m(rng, 12, 15, 0.35));
    std::size_t prev_edges = SIZE_MAX, prev_isolated = 0;
    for (double t = 0.05; t <= 1.0; t += 0.05) {
      const auto g = build_graph(phi, t);
      CHECK(g.edges.size() <= prev_edges);
      CHECK(g.isolated.size() >= prev_isolated);
      prev_edges = g.edges.size();
      prev_isolated = g.isolated.size();
      std::size_t covered = g.isolated.size();
      std::set<std::size_t> seen(g.isolated.begin(), g.isolated.end());
      for (const auto& comp : g.components) {
        covered += comp.size();
        seen.insert(comp.begin(), comp.end());
      }
      CHECK(covered == g.nodes.size());
      CHECK(seen.size() == g.nodes.size());
      for (const auto& e : g.edges) {
        CHECK(e.weight >= t);
        CHECK(e.source != e.target);
      }
    }
  }
}

TEST_CASE("percolation_sweep") {
  const std::vector<double> grid = {0.4, 0.6};
  const auto curve = percolation_sweep(toy_phi(), grid);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].giant_fraction == 1.0);
  CHECK(curve[1].giant_fraction == 0.0);
  CHECK(curve[0].edge_count == 1);
  CHECK(curve[1].edge_count == 0);
  CHECK(percolation_threshold(curve) == 0.4);

  metrics::ProximityMatrix zero;
  zero.products = {"a", "b", "c"};
  zero.values = DenseMatrix<double>(3, 3, 0.0);
  for (const auto& pt : percolation_sweep(zero, grid)) CHECK(pt.giant_fraction == 0.0);
  CHECK_FALSE(percolation_threshold(percolation_sweep(zero, grid)));

  const std::vector<double> low = {0.01};
  CHECK(percolation_sweep(toy_phi(), low)[0].edge_count == 1);

  CHECK_THROWS_AS(percolation_sweep(toy_phi(), std::vector<double>{}), InvalidArgument);
  CHECK_THROWS_AS(percolation_sweep(toy_phi(), std::vector<double>{0.6, 0.4}), InvalidArgument);
  CHECK_THROWS_AS(percolation_sweep(toy_phi(), std::vector<double>{0.0, 0.4}), InvalidArgument);
}

TEST_CASE("percolation curve agrees with build_graph and is monotone") {
  std::mt19937_64 rng(8);
  std::vector<double> grid;
  for (int k = 1; k <= 20; ++k) grid.push_back(k * 0.05);
  for (int trial = 0; trial < 15; ++trial) {
    const auto phi = metrics::proximity(fixtures::random_m(rng, 12, 15, 0.4));
    const auto curve = percolation_sweep(phi, grid);
    const auto base = build_graph(phi, grid.front());
    const std::size_t denom = base.nodes.size() - base.isolated.size();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const auto g = build_graph(phi, grid[k]);
      CHECK(curve[k].edge_count == g.edges.size());
      const std::size_t giant = g.components.empty() ? 0 : g.components.front().size();
      CHECK(curve[k].giant_size == giant);
      CHECK(curve[k].giant_fraction == (denom ? double(giant) / double(denom) : 0.0));
      if (k > 0) {
        CHECK(curve[k].giant_fraction <= curve[k - 1].giant_fraction);
        CHECK(curve[k].edge_count <= curve[k - 1].edge_count);
      }
    }
  }
}

TEST_CASE("layout is seed-deterministic and keeps the grid apart") {
  const auto g = build_graph(toy_phi(), 0.45);
  const auto a = layout(g, 42);
  const auto b = layout(g, 42);
  CHECK(a.coordinates == b.coordinates);
  CHECK(a.grid_block == std::vector<std::size_t>{2});
  const double pq = dist(a.coordinates[0], a.coordinates[1]);
  CHECK(pq < dist(a.coordinates[0], a.coordinates[2]));
  CHECK(pq < dist(a.coordinates[1], a.coordinates[2]));
  CHECK(a.coordinates[2].x > a.connected_max_x);

  std::mt19937_64 rng(13);
  const auto phi = metrics::proximity(fixtures::random_m(rng, 12, 15, 0.3));
  const auto big = build_graph(phi, 0.45);
  const auto lay = layout(big, 7);
  for (auto v : lay.grid_block) CHECK(lay.coordinates[v].x > lay.connected_max_x);
  for (std::size_t i = 1; i < lay.grid_block.size(); ++i)
    CHECK(big.nodes[lay.grid_block[i - 1]].code < big.nodes[lay.grid_block[i]].code);
  for (const auto& p : lay.coordinates) {
    CHECK(std::isfinite(p.x));
    CHECK(std::isfinite(p.y));
  }
}

TEST_CASE("edge-list CSV export") {
  const auto g = build_graph(toy_phi(), 0.45);
  CHECK(export_graph(g, ExportFormat::EdgeListCsv) == "source,target,weight\np,q,0.5\n");
  const auto empty = build_graph(toy_phi(), 0.9);
  CHECK(export_graph(empty, ExportFormat::EdgeListCsv) == "source,target,weight\n");
}

TEST_CASE("node-link JSON round-trips") {
  std::mt19937_64 rng(17);
  const auto m = fixtures::random_m(rng, 12, 15, 0.35);
  auto g = build_graph(metrics::proximity(m), 0.3);
  trade::ProductRegistry reg;
  const auto soph = metrics::sophistication(m, 4);
  attach_attributes(g, reg, &soph);
  const auto text = export_graph(g, ExportFormat::NodeLinkJson);
  CHECK(import_graph_json(text) == g);
  CHECK(export_graph(import_graph_json(text), ExportFormat::NodeLinkJson) == text);
  CHECK_THROWS_AS(import_graph_json("{\"nodes\": 3}"), DataError);
}

TEST_CASE("GEXF export carries attributes and is byte-stable") {
  auto g = build_graph(toy_phi(), 0.45);
  std::vector<NodeAnnotation> ann(3);
  ann[0] = {"p", Tier::Strong, 10.0, Growth::Increased, std::nullopt};
  ann[1] = {"q", Tier::Marginal, std::nullopt, std::nullopt, 1};
  ann[2] = {"r", Tier::Absent, std::nullopt, std::nullopt, 10};
  const auto lay = layout(g, 1);
  const auto x = export_graph(g, ann, ExportFormat::Gexf, &lay);
  CHECK(x == export_graph(g, ann, ExportFormat::Gexf, &lay));
  CHECK(x.find("version=\"1.2\"") != std::string::npos);
  CHECK(x.find("<edge id=\"0\" source=\"p\" target=\"q\" weight=\"0.5\"/>") != std::string::npos);
  CHECK(x.find("<attvalue for=\"tier\" value=\"strong\"/>") != std::string::npos);
  CHECK(x.find("<attvalue for=\"decile\" value=\"10\"/>") != std::string::npos);
  CHECK(x.find("viz:position") != std::string::npos);

  std::vector<NodeAnnotation> partial(ann.begin(), ann.begin() + 2);
  CHECK_THROWS_AS(export_graph(g, partial, ExportFormat::Gexf), InvalidArgument);
  ann[2].product = "p";
  CHECK_THROWS_AS(export_graph(g, ann, ExportFormat::Gexf), InvalidArgument);
  CHECK_THROWS_AS(parse_export_format("svg"), InvalidArgument);
}

TEST_CASE("GEXF escapes XML-special names") {
  auto g = build_graph(toy_phi(), 0.45);
  g.nodes[0].name = "Fish & <chips> \"fresh\"";
  const auto x = export_graph(g, ExportFormat::Gexf);
  CHECK(x.find("Fish &amp; &lt;chips&gt; &quot;fresh&quot;") != std::string::npos);
}
