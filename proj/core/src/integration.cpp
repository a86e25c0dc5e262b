#include "prodspace/integration.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "json.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::integration {

using nlohmann::ordered_json;

std::string_view to_string(CombineMode mode) noexcept {
  return mode == CombineMode::MaxRca ? "max-rca" : "pooled";
}

CombineMode parse_combine_mode(std::string_view text) {
  if (text == "max-rca" || text == "max" || text == "MaxRca") return CombineMode::MaxRca;
  if (text == "pooled" || text == "pooled-exports" || text == "PooledExports")
    return CombineMode::PooledExports;
  throw InvalidArgument("unknown combine mode '" + std::string(text) + "'");
}

void ScenarioSpec::validate() const {
  if (members.size() < 2) throw InvalidArgument("scenario needs at least two members");
  std::set<std::string> seen(members.begin(), members.end());
  if (seen.size() != members.size()) throw InvalidArgument("scenario members must be distinct");
  if (!(rca_threshold > 0.0) || !(rca_cutoff_for_candidates > 0.0))
    throw InvalidArgument("scenario cutoffs must be positive");
  if (top_n == 0) throw InvalidArgument("scenario top_n must be positive");
}

std::vector<double> combine_max_rca(std::span<const std::span<const double>> rows) {
  if (rows.empty()) throw InvalidArgument("combine_max_rca: no member rows");
  std::vector<double> out(rows.front().begin(), rows.front().end());
  for (const auto& row : rows.subspan(1)) {
    if (row.size() != out.size()) throw InvalidArgument("combine_max_rca: rows are not aligned");
    for (std::size_t p = 0; p < out.size(); ++p) out[p] = std::max(out[p], row[p]);
  }
  return out;
}

std::vector<double> combine_pooled_exports(std::span<const std::string> members,
                                           const trade::ExportMatrix& m) {
  if (members.empty()) throw InvalidArgument("combine_pooled_exports: no members");
  const std::size_t np = m.products.size();
  std::vector<double> pooled(np, 0.0), world_product(np, 0.0);
  double world = 0.0;
  for (std::size_t c = 0; c < m.countries.size(); ++c) {
    const auto row = m.values.row(c);
    for (std::size_t p = 0; p < np; ++p) {
      world_product[p] += row[p];
      world += row[p];
    }
  }
  for (const auto& code : members) {
    const auto c = m.country_index(code);
    if (!c) throw NotFound("combine_pooled_exports: unknown member '" + code + "'");
    const auto row = m.values.row(*c);
    for (std::size_t p = 0; p < np; ++p) pooled[p] += row[p];
  }
  const double pooled_total = std::accumulate(pooled.begin(), pooled.end(), 0.0);
  std::vector<double> out(np, 0.0);
  if (!(pooled_total > 0.0) || !(world > 0.0)) return out;
  for (std::size_t p = 0; p < np; ++p)
    if (world_product[p] > 0.0) out[p] = (pooled[p] / pooled_total) / (world_product[p] / world);
  return out;
}

std::vector<double> density_delta(std::span<const std::uint8_t> member_row,
                                  std::span<const std::uint8_t> regional_row,
                                  const metrics::ProximityMatrix& phi) {
  const auto before = metrics::density("member", member_row, phi);
  const auto after = metrics::density("region", regional_row, phi);
  std::vector<double> out(before.values.size());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = after.values[p] - before.values[p];
  return out;
}

std::vector<GainEntry> rank_density_gains(std::span<const std::string> products,
                                          std::span<const double> deltas,
                                          std::span<const double> member_density,
                                          std::span<const double> member_rca, double cutoff,
                                          std::size_t n, const trade::ProductRegistry* registry) {
  const std::size_t np = products.size();
  if (deltas.size() != np || member_density.size() != np || member_rca.size() != np)
    throw InvalidArgument("rank_density_gains: inputs are not aligned");
  std::vector<std::size_t> order;
  for (std::size_t p = 0; p < np; ++p)
    if (member_rca[p] < cutoff) order.push_back(p);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (deltas[a] != deltas[b]) return deltas[a] > deltas[b];
    return products[a] < products[b];
  });
  if (order.size() > n) order.resize(n);

  std::vector<GainEntry> out;
  out.reserve(order.size());
  for (auto p : order) {
    GainEntry e;
    e.product = products[p];
    if (registry) e.name = registry->resolve(products[p]).name;
    e.delta = deltas[p];
    e.member_density = member_density[p];
    e.regional_density = member_density[p] + deltas[p];
    e.zero_gain = !(deltas[p] > 0.0);
    out.push_back(std::move(e));
  }
  return out;
}

SectorBreakdown sector_decomposition(std::span<const GainEntry> ranked, std::size_t top_n) {
  SectorBreakdown out;
  out.requested = top_n;
  out.count = std::min(top_n, ranked.size());
  if (out.count == 0) return out;
  std::array<std::size_t, 3> counts{};
  for (std::size_t i = 0; i < out.count; ++i)
    ++counts[static_cast<std::size_t>(trade::sector_or_other(ranked[i].product))];
  for (std::size_t k = 0; k < counts.size(); ++k)
    out.fractions[k] = static_cast<double>(counts[k]) / static_cast<double>(out.count);
  return out;
}

namespace {

// RCA row of one country mapped onto `products` (missing products are 0).
std::vector<double> aligned_row(const metrics::RcaMatrix& rca, std::size_t country,
                                const std::vector<std::string>& products) {
  std::vector<double> out(products.size(), 0.0);
  const auto row = rca.values.row(country);
  for (std::size_t p = 0; p < products.size(); ++p)
    if (auto q = rca.product_index(products[p])) out[p] = row[*q];
  return out;
}

std::vector<std::uint8_t> binarize_row(std::span<const double> rca, double threshold) {
  std::vector<std::uint8_t> out(rca.size());
  for (std::size_t p = 0; p < rca.size(); ++p) out[p] = rca[p] >= threshold ? 1 : 0;
  return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec, const trade::ExportMatrix& exports,
                            const metrics::ProximityMatrix& phi,
                            const trade::ProductRegistry& registry) {
  spec.validate();
  const auto rca = metrics::rca(exports);

  ScenarioResult res;
  res.spec = spec;
  res.year = exports.year;
  res.products = phi.products;

  std::vector<std::vector<double>> member_rca;
  for (const auto& code : spec.members) {
    const auto c = rca.country_index(code);
    if (!c) throw NotFound("scenario member '" + code + "' has no exports in " +
                           std::to_string(exports.year));
    member_rca.push_back(aligned_row(rca, *c, res.products));
  }

  if (spec.mode == CombineMode::MaxRca) {
    std::vector<std::span<const double>> rows(member_rca.begin(), member_rca.end());
    res.regional_rca = combine_max_rca(rows);
  } else {
    const auto pooled = combine_pooled_exports(spec.members, exports);
    res.regional_rca.assign(res.products.size(), 0.0);
    for (std::size_t p = 0; p < res.products.size(); ++p)
      if (auto q = exports.product_index(res.products[p])) res.regional_rca[p] = pooled[*q];
  }
  res.regional_m_row = binarize_row(res.regional_rca, spec.rca_threshold);
  res.regional_density = metrics::density("region", res.regional_m_row, phi).values;

  for (std::size_t k = 0; k < spec.members.size(); ++k) {
    MemberResult mr;
    mr.country = spec.members[k];
    mr.m_row = binarize_row(member_rca[k], spec.rca_threshold);
    mr.density = metrics::density(mr.country, mr.m_row, phi).values;
    mr.deltas.resize(res.products.size());
    for (std::size_t p = 0; p < mr.deltas.size(); ++p)
      mr.deltas[p] = res.regional_density[p] - mr.density[p];
    mr.ranking = rank_density_gains(res.products, mr.deltas, mr.density, member_rca[k],
                                    spec.rca_cutoff_for_candidates, spec.top_n, &registry);
    mr.decomposition = sector_decomposition(mr.ranking, spec.top_n);
    res.members.push_back(std::move(mr));
  }
  return res;
}

std::string scenario_json(const ScenarioResult& result) {
  ordered_json spec = {
      {"members", result.spec.members},
      {"mode", to_string(result.spec.mode)},
      {"rca_threshold", result.spec.rca_threshold},
      {"candidate_rca_cutoff", result.spec.rca_cutoff_for_candidates},
      {"top_n", result.spec.top_n},
  };
  ordered_json members = ordered_json::array();
  for (const auto& m : result.members) {
    ordered_json ranking = ordered_json::array();
    for (std::size_t r = 0; r < m.ranking.size(); ++r) {
      const auto& e = m.ranking[r];
      ranking.push_back({{"rank", r + 1},
                         {"code", e.product},
                         {"name", e.name},
                         {"delta", e.delta},
                         {"member_density", e.member_density},
                         {"regional_density", e.regional_density},
                         {"zero_gain", e.zero_gain}});
    }
    ordered_json decomposition;
    for (auto sector : {trade::SectorClass::AgricultureAndFood,
                        trade::SectorClass::TextilesAndGarments, trade::SectorClass::Other})
      decomposition[std::string(trade::to_string(sector))] =
          m.decomposition.fractions[static_cast<std::size_t>(sector)];
    decomposition["count"] = m.decomposition.count;
    decomposition["requested"] = m.decomposition.requested;
    members.push_back({{"country", m.country},
                       {"exported_products", std::count(m.m_row.begin(), m.m_row.end(), 1)},
                       {"ranking", std::move(ranking)},
                       {"decomposition", std::move(decomposition)}});
  }
  ordered_json doc = {
      {"spec", std::move(spec)},
      {"year", result.year},
      {"delta_basis", "member_own_density"},
      {"regional_exported_products",
       std::count(result.regional_m_row.begin(), result.regional_m_row.end(), 1)},
      {"members", std::move(members)},
  };
  return doc.dump(2) + "\n";
}

std::string rankings_csv(const ScenarioResult& result) {
  std::string out = "rank";
  std::size_t rows = 0;
  for (const auto& m : result.members) {
    out += fmt::format(",{0} code,{0} name", m.country);
    rows = std::max(rows, m.ranking.size());
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    out += std::to_string(r + 1);
    for (const auto& m : result.members) {
      if (r < m.ranking.size())
        out += fmt::format(",{},{}", m.ranking[r].product, csv::escape_field(m.ranking[r].name));
      else
        out += ",,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace prodspace::integration
