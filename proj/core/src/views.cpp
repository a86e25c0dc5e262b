#include "prodspace/views.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::views {

namespace {

std::size_t require_country(const metrics::RcaMatrix& rca, std::string_view country) {
  auto c = rca.country_index(country);
  if (!c) throw NotFound("unknown country '" + std::string(country) + "'");
  return *c;
}

// Descending by key, ties by ascending product code.
std::vector<std::size_t> ranked(const std::vector<std::size_t>& candidates,
                                const std::vector<double>& key,
                                const std::vector<std::string>& codes) {
  std::vector<std::size_t> order = candidates;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return codes[a] < codes[b];
  });
  return order;
}

template <typename T>
T lookup_or(const std::vector<std::string>& codes, const std::vector<T>& values,
            std::string_view code, T fallback) {
  auto it = std::lower_bound(codes.begin(), codes.end(), code,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == codes.end() || *it != code) return fallback;
  return values[static_cast<std::size_t>(it - codes.begin())];
}

}  // namespace

std::vector<NodeAnnotation> rca_view(std::string_view country, const metrics::RcaMatrix& rca) {
  const auto row = rca.values.row(require_country(rca, country));
  std::vector<NodeAnnotation> out;
  out.reserve(row.size());
  for (std::size_t p = 0; p < row.size(); ++p) {
    NodeAnnotation a;
    a.product = rca.products[p];
    a.tier = tier_for(row[p]);
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<NodeAnnotation> export_value_view(std::string_view country,
                                              const trade::ExportMatrix& year0,
                                              const trade::ExportMatrix& year1) {
  const auto c1 = year1.country_index(country);
  if (!c1) throw NotFound("unknown country '" + std::string(country) + "'");
  const auto c0 = year0.country_index(country);
  std::vector<NodeAnnotation> out;
  out.reserve(year1.products.size());
  for (std::size_t p = 0; p < year1.products.size(); ++p) {
    const double now = year1.values(*c1, p);
    double before = 0.0;
    if (c0) {
      if (auto p0 = year0.product_index(year1.products[p])) before = year0.values(*c0, *p0);
    }
    NodeAnnotation a;
    a.product = year1.products[p];
    a.size_value = now;
    a.growth = now > before ? Growth::Increased : (now < before ? Growth::Decreased : Growth::Flat);
    out.push_back(std::move(a));
  }
  return out;
}

int decile_for_rank(std::size_t rank, std::size_t n) {
  if (n == 0 || rank >= n) throw InvalidArgument("decile_for_rank: rank out of range");
  if (n >= 10) return 1 + static_cast<int>(rank * 10 / n);
  if (n == 1) return 1;
  return 1 + static_cast<int>(rank * 9 / (n - 1));
}

std::vector<NodeAnnotation> opportunities_view(std::string_view country,
                                               const metrics::DensityVector& dens,
                                               const metrics::RcaMatrix& rca, double cutoff) {
  if (dens.products != rca.products)
    throw InvalidArgument("opportunities_view: density and RCA are not aligned");
  auto out = rca_view(country, rca);
  const auto row = rca.values.row(require_country(rca, country));

  std::vector<std::size_t> eligible;
  for (std::size_t p = 0; p < row.size(); ++p)
    if (row[p] < cutoff) eligible.push_back(p);
  const auto order = ranked(eligible, dens.values, rca.products);
  for (std::size_t r = 0; r < order.size(); ++r) out[order[r]].decile = decile_for_rank(r, order.size());
  return out;
}

CountryProfile build_profile(std::string_view country, const trade::ExportMatrix& exports_y0,
                             const trade::ExportMatrix& exports_y1,
                             const metrics::RcaMatrix& rca_y0, const metrics::RcaMatrix& rca_y1,
                             const metrics::DensityVector& dens,
                             const metrics::SophisticationVector& soph,
                             const trade::ProductRegistry& registry) {
  const auto c1 = exports_y1.country_index(country);
  if (!c1) throw NotFound("unknown country '" + std::string(country) + "'");
  const auto r1 = rca_y1.country_index(country);
  if (!r1) throw NotFound("country '" + std::string(country) + "' missing from RCA matrix");
  const auto c0 = exports_y0.country_index(country);
  const auto r0 = rca_y0.country_index(country);

  CountryProfile prof;
  prof.country = std::string(country);
  prof.year0 = exports_y0.year;
  prof.year1 = exports_y1.year;
  prof.products = exports_y1.products;
  const std::size_t np = prof.products.size();
  prof.names.resize(np);
  prof.rca_y0.assign(np, 0.0);
  prof.rca_y1.assign(np, 0.0);
  prof.exports_y0.assign(np, 0.0);
  prof.exports_y1.assign(np, 0.0);
  prof.density.assign(np, 0.0);
  prof.sophistication.assign(np, std::nullopt);

  const auto shares = metrics::export_shares(exports_y1, country);
  prof.share_y1 = shares.values;

  for (std::size_t p = 0; p < np; ++p) {
    const auto& code = prof.products[p];
    prof.names[p] = registry.resolve(code).name;
    prof.exports_y1[p] = exports_y1.values(*c1, p);
    if (c0)
      if (auto q = exports_y0.product_index(code)) prof.exports_y0[p] = exports_y0.values(*c0, *q);
    if (auto q = rca_y1.product_index(code)) prof.rca_y1[p] = rca_y1.values(*r1, *q);
    if (r0)
      if (auto q = rca_y0.product_index(code)) prof.rca_y0[p] = rca_y0.values(*r0, *q);
    prof.density[p] = lookup_or(dens.products, dens.values, code, 0.0);
    prof.sophistication[p] =
        lookup_or(soph.products, soph.values, code, std::optional<double>{});
  }
  return prof;
}

namespace {

TableRow make_row(const CountryProfile& prof, std::size_t p, int rank) {
  TableRow row;
  row.rank = rank;
  row.product = prof.products[p];
  row.name = prof.names[p];
  row.rca_y0 = prof.rca_y0[p];
  row.rca_y1 = prof.rca_y1[p];
  row.exports_y0 = prof.exports_y0[p];
  row.exports_y1 = prof.exports_y1[p];
  row.share_y1 = prof.share_y1[p];
  row.density = prof.density[p];
  row.sophistication = prof.sophistication[p];
  return row;
}

std::vector<TableRow> take(const CountryProfile& prof, const std::vector<std::size_t>& order,
                           std::size_t n) {
  std::vector<TableRow> rows;
  for (std::size_t r = 0; r < order.size() && r < n; ++r)
    rows.push_back(make_row(prof, order[r], static_cast<int>(r + 1)));
  return rows;
}

}  // namespace

std::vector<TableRow> top_exports_table(const CountryProfile& profile, TableSort sort, int n) {
  if (n <= 0) throw InvalidArgument("top_exports_table: n must be positive");
  std::vector<std::size_t> all(profile.products.size());
  std::iota(all.begin(), all.end(), 0);
  const auto& key = sort == TableSort::ByValue ? profile.exports_y1 : profile.rca_y1;
  return take(profile, ranked(all, key, profile.products), static_cast<std::size_t>(n));
}

std::vector<TableRow> opportunity_table(const CountryProfile& profile, int n,
                                        bool require_soph_above_avg, double cutoff) {
  if (n <= 0) throw InvalidArgument("opportunity_table: n must be positive");
  std::vector<std::size_t> eligible;
  for (std::size_t p = 0; p < profile.products.size(); ++p) {
    if (!(profile.rca_y1[p] < cutoff)) continue;
    if (require_soph_above_avg && !(profile.sophistication[p] && *profile.sophistication[p] > 0.0))
      continue;
    eligible.push_back(p);
  }
  return take(profile, ranked(eligible, profile.density, profile.products),
              static_cast<std::size_t>(n));
}

std::string table_csv(std::span<const TableRow> rows, int year0, int year1) {
  std::string out = fmt::format(
      "RANK,Product Code (HS-6),Product Name,RCA {0},RCA {1},Exports {0},Exports {1},"
      "Export Share {1},Density,Sophistication\n",
      year0, year1);
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.2f},{:.2f},{:.1f},{:.1f},{:.2f}%,{:.6f},{}\n", r.rank, r.product,
                       csv::escape_field(r.name), r.rca_y0, r.rca_y1, r.exports_y0, r.exports_y1,
                       r.share_y1 * 100.0, r.density,
                       r.sophistication ? fmt::format("{:.6f}", *r.sophistication) : "");
  }
  return out;
}

std::vector<ScatterPoint> density_sophistication_scatter(std::span<const ScatterOwner> owners,
                                                         const metrics::ProximityMatrix& phi,
                                                         const metrics::SophisticationVector& soph,
                                                         double cutoff) {
  const std::size_t np = phi.products.size();
  std::vector<std::optional<double>> soph_aligned(np);
  for (std::size_t p = 0; p < np; ++p)
    soph_aligned[p] = lookup_or(soph.products, soph.values, phi.products[p], std::optional<double>{});

  std::vector<ScatterPoint> out;
  for (const auto& owner : owners) {
    if (owner.rca_row.size() != np)
      throw InvalidArgument("scatter: RCA row of '" + owner.label + "' is not aligned");
    const auto dens = metrics::density(owner.label, owner.m_row, phi);
    for (std::size_t p = 0; p < np; ++p) {
      if (!(owner.rca_row[p] < cutoff)) continue;
      out.push_back(ScatterPoint{owner.label, phi.products[p], dens.values[p], soph_aligned[p]});
    }
  }
  return out;
}

std::string scatter_csv(std::span<const ScatterPoint> points) {
  std::string out = "owner,hs6,density,sophistication\n";
  for (const auto& pt : points)
    out += fmt::format("{},{},{},{}\n", csv::escape_field(pt.owner), pt.product,
                       csv::format_double(pt.density),
                       pt.sophistication ? csv::format_double(*pt.sophistication) : "");
  return out;
}

std::string annotations_csv(std::span<const NodeAnnotation> annotations) {
  std::string out = "product,tier,size_value,growth,decile\n";
  for (const auto& a : annotations)
    out += fmt::format("{},{},{},{},{}\n", a.product, a.tier ? to_string(*a.tier) : "",
                       a.size_value ? csv::format_double(*a.size_value) : "",
                       a.growth ? to_string(*a.growth) : "",
                       a.decile ? std::to_string(*a.decile) : "");
  return out;
}

}  // namespace prodspace::views
