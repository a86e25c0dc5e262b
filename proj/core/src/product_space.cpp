#include "prodspace/product_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "prodspace/error.hpp"

namespace prodspace::space {

namespace {

bool passes(double weight, double threshold, Comparator cmp) {
  return cmp == Comparator::Inclusive ? weight >= threshold : weight > threshold;
}

void check_threshold(double t) {
  if (!(t > 0.0 && t <= 1.0))
    throw InvalidArgument("proximity threshold must lie in (0, 1]");
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns the size of the merged set.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return size_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return size_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

}  // namespace

SpaceGraph build_graph(const metrics::ProximityMatrix& phi, double threshold, Comparator comparator) {
  check_threshold(threshold);
  const std::size_t n = phi.products.size();
  if (phi.values.rows() != n || phi.values.cols() != n)
    throw InvalidArgument("build_graph: proximity matrix dimensions do not match its products");

  SpaceGraph g;
  g.threshold = threshold;
  g.comparator = comparator;
  g.nodes.reserve(n);
  for (const auto& code : phi.products) g.nodes.push_back(Node{code, "", trade::sector_or_other(code), {}});
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = phi.values.row(i);
    for (std::size_t j = i + 1; j < n; ++j)
      if (passes(row[j], threshold, comparator)) g.edges.push_back(Edge{i, j, row[j]});
  }
  compute_components(g);
  return g;
}

void attach_attributes(SpaceGraph& g, const trade::ProductRegistry& registry,
                       const metrics::SophisticationVector* soph) {
  for (auto& node : g.nodes) {
    auto info = registry.resolve(node.code);
    node.name = std::move(info.name);
    node.sector = info.sector;
    node.sophistication.reset();
    if (soph) {
      auto it = std::lower_bound(soph->products.begin(), soph->products.end(), node.code);
      if (it != soph->products.end() && *it == node.code)
        node.sophistication = soph->values[static_cast<std::size_t>(it - soph->products.begin())];
    }
  }
}

void compute_components(SpaceGraph& g) {
  const std::size_t n = g.nodes.size();
  DisjointSets sets(n);
  std::vector<bool> touched(n, false);
  for (const auto& e : g.edges) {
    if (e.source >= n || e.target >= n || e.source == e.target)
      throw InvalidArgument("graph has an edge with an invalid endpoint");
    sets.unite(e.source, e.target);
    touched[e.source] = touched[e.target] = true;
  }

  g.components.clear();
  g.isolated.clear();
  std::vector<std::size_t> slot(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    if (!touched[v]) {
      g.isolated.push_back(v);
      continue;
    }
    const std::size_t root = sets.find(v);
    if (slot[root] == n) {
      slot[root] = g.components.size();
      g.components.emplace_back();
    }
    g.components[slot[root]].push_back(v);
  }
  std::stable_sort(g.components.begin(), g.components.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::vector<PercolationPoint> percolation_sweep(const metrics::ProximityMatrix& phi,
                                                std::span<const double> thresholds,
                                                Comparator comparator) {
  if (thresholds.empty()) throw InvalidArgument("percolation_sweep: empty threshold grid");
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    check_threshold(thresholds[i]);
    if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
      throw InvalidArgument("percolation_sweep: grid must be strictly ascending");
  }

  const std::size_t n = phi.products.size();
  std::vector<Edge> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = phi.values.row(i);
    for (std::size_t j = i + 1; j < n; ++j)
      if (passes(row[j], thresholds.front(), comparator)) candidates.push_back(Edge{i, j, row[j]});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Edge& a, const Edge& b) { return a.weight > b.weight; });

  std::vector<bool> touched(n, false);
  for (const auto& e : candidates) touched[e.source] = touched[e.target] = true;
  const auto base = static_cast<std::size_t>(std::count(touched.begin(), touched.end(), true));

  // Add edges from the highest threshold down.
  std::vector<PercolationPoint> curve(thresholds.size());
  DisjointSets sets(n);
  std::size_t added = 0;
  std::size_t giant = 0;
  for (std::size_t k = thresholds.size(); k-- > 0;) {
    const double t = thresholds[k];
    while (added < candidates.size() && passes(candidates[added].weight, t, comparator)) {
      giant = std::max(giant, sets.unite(candidates[added].source, candidates[added].target));
      ++added;
    }
    curve[k].threshold = t;
    curve[k].edge_count = added;
    curve[k].giant_size = giant;
    curve[k].giant_fraction = base == 0 ? 0.0 : static_cast<double>(giant) / static_cast<double>(base);
  }
  return curve;
}

std::optional<double> percolation_threshold(std::span<const PercolationPoint> curve) {
  std::optional<double> best;
  for (const auto& pt : curve)
    if (pt.giant_fraction >= 0.5 && (!best || pt.threshold > *best)) best = pt.threshold;
  return best;
}

LayoutResult layout(const SpaceGraph& g, std::uint64_t seed, const LayoutOptions& options) {
  const std::size_t n = g.nodes.size();
  const double k = options.ideal_edge_length;
  LayoutResult out;
  out.coordinates.assign(n, Point{});

  std::vector<std::size_t> connected;
  {
    std::vector<bool> iso(n, false);
    for (auto v : g.isolated) iso[v] = true;
    for (std::size_t v = 0; v < n; ++v)
      if (!iso[v]) connected.push_back(v);
  }

  const std::size_t m = connected.size();
  if (m > 0) {
    std::vector<std::size_t> local(n, m);
    for (std::size_t a = 0; a < m; ++a) local[connected[a]] = a;

    std::mt19937_64 rng(seed);
    const double side = std::sqrt(static_cast<double>(m)) * k;
    std::uniform_real_distribution<double> coord(0.0, side);
    std::vector<double> x(m), y(m);
    for (std::size_t a = 0; a < m; ++a) {
      x[a] = coord(rng);
      y[a] = coord(rng);
    }

    const double centre = side / 2.0;
    const double gravity = 0.05 / std::max(1.0, std::sqrt(static_cast<double>(m)));
    double temperature = side / 10.0 + k;
    const double cooling = temperature / std::max(1, options.iterations);
    std::vector<double> dx(m), dy(m);
    for (int it = 0; it < options.iterations; ++it) {
      std::fill(dx.begin(), dx.end(), 0.0);
      std::fill(dy.begin(), dy.end(), 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
          const double ddx = x[a] - x[b];
          const double ddy = y[a] - y[b];
          const double dist = std::max(std::hypot(ddx, ddy), 1e-9);
          const double force = k * k / dist;
          dx[a] += ddx / dist * force;
          dy[a] += ddy / dist * force;
          dx[b] -= ddx / dist * force;
          dy[b] -= ddy / dist * force;
        }
      }
      for (const auto& e : g.edges) {
        const std::size_t a = local[e.source];
        const std::size_t b = local[e.target];
        const double ddx = x[a] - x[b];
        const double ddy = y[a] - y[b];
        const double dist = std::max(std::hypot(ddx, ddy), 1e-9);
        const double force = dist * dist / k * e.weight;
        dx[a] -= ddx / dist * force;
        dy[a] -= ddy / dist * force;
        dx[b] += ddx / dist * force;
        dy[b] += ddy / dist * force;
      }
      for (std::size_t a = 0; a < m; ++a) {
        dx[a] -= (x[a] - centre) * gravity;
        dy[a] -= (y[a] - centre) * gravity;
        const double len = std::hypot(dx[a], dy[a]);
        if (len > 0.0) {
          const double step = std::min(len, temperature);
          x[a] += dx[a] / len * step;
          y[a] += dy[a] / len * step;
        }
      }
      temperature = std::max(temperature - cooling, 0.01 * k);
    }

    out.connected_min_x = *std::min_element(x.begin(), x.end());
    out.connected_max_x = *std::max_element(x.begin(), x.end());
    out.connected_min_y = *std::min_element(y.begin(), y.end());
    out.connected_max_y = *std::max_element(y.begin(), y.end());
    for (std::size_t a = 0; a < m; ++a) out.coordinates[connected[a]] = Point{x[a], y[a]};
  }

  // Isolated nodes: a grid to the right of the connected region, by code.
  out.grid_block = g.isolated;
  std::sort(out.grid_block.begin(), out.grid_block.end(),
            [&](auto a, auto b) { return g.nodes[a].code < g.nodes[b].code; });
  out.grid_min_x = m > 0 ? out.connected_max_x + 2.0 * k : 0.0;
  const auto columns = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(out.grid_block.size()))));
  for (std::size_t i = 0; i < out.grid_block.size(); ++i) {
    const double col = static_cast<double>(i % columns);
    const double row = static_cast<double>(i / columns);
    out.coordinates[out.grid_block[i]] = Point{out.grid_min_x + col * k, out.connected_min_y + row * k};
  }
  return out;
}

}  // namespace prodspace::space
