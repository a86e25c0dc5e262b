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

namespace prodspace::views {

inline constexpr double kDefaultOpportunityCutoff = 0.1;

/// Tier of every product for `country`. Throws NotFound for unknown countries.
std::vector<NodeAnnotation> rca_view(std::string_view country, const metrics::RcaMatrix& rca);

/// Node size = year-1 exports, colour = growth since year 0. Products are
/// those of `year1`; a product or country missing from `year0` counts as zero.
std::vector<NodeAnnotation> export_value_view(std::string_view country,
                                              const trade::ExportMatrix& year0,
                                              const trade::ExportMatrix& year1);

/// Decile of the rank-th (0-based) item among n ranked items. With n >= 10
/// this is the usual equal-count split; below 10 the items are spread over
/// 1..10 so that the first gets 1 and the last gets 10.
int decile_for_rank(std::size_t rank, std::size_t n);

/// Products with RCA < cutoff get a density decile (1 = highest density,
/// ties broken by code). All products carry their tier.
std::vector<NodeAnnotation> opportunities_view(std::string_view country,
                                               const metrics::DensityVector& dens,
                                               const metrics::RcaMatrix& rca,
                                               double cutoff = kDefaultOpportunityCutoff);

/// Everything the appendix-style tables need for one country, aligned on the
/// products of the year-1 matrix.
struct CountryProfile {
  std::string country;
  int year0 = 0;
  int year1 = 0;
  std::vector<std::string> products;
  std::vector<std::string> names;
  std::vector<double> rca_y0, rca_y1;
  std::vector<double> exports_y0, exports_y1;
  std::vector<double> share_y1;
  std::vector<double> density;
  std::vector<std::optional<double>> sophistication;
};

CountryProfile build_profile(std::string_view country, const trade::ExportMatrix& exports_y0,
                             const trade::ExportMatrix& exports_y1,
                             const metrics::RcaMatrix& rca_y0, const metrics::RcaMatrix& rca_y1,
                             const metrics::DensityVector& dens,
                             const metrics::SophisticationVector& soph,
                             const trade::ProductRegistry& registry);

struct TableRow {
  int rank = 0;
  std::string product;
  std::string name;
  double rca_y0 = 0.0, rca_y1 = 0.0;
  double exports_y0 = 0.0, exports_y1 = 0.0;
  double share_y1 = 0.0;
  double density = 0.0;
  std::optional<double> sophistication;

  friend bool operator==(const TableRow&, const TableRow&) = default;
};

enum class TableSort { ByValue, ByRca };

/// Top-n products by year-1 export value or RCA, descending, ties by code.
std::vector<TableRow> top_exports_table(const CountryProfile& profile, TableSort sort,
                                        int n = 30);

/// Products with year-1 RCA below `cutoff` sorted by density, descending,
/// ties by code. With `require_soph_above_avg` only products whose
/// sophistication is defined and > 0 remain.
std::vector<TableRow> opportunity_table(const CountryProfile& profile, int n = 30,
                                        bool require_soph_above_avg = false,
                                        double cutoff = kDefaultOpportunityCutoff);

/// CSV with the appendix column header; years label the RCA/export columns.
std::string table_csv(std::span<const TableRow> rows, int year0, int year1);

struct ScatterOwner {
  std::string label;
  std::vector<std::uint8_t> m_row;  // aligned with phi.products
  std::vector<double> rca_row;      // aligned with phi.products
};

struct ScatterPoint {
  std::string owner;
  std::string product;
  double density = 0.0;
  std::optional<double> sophistication;
};

/// One point per (owner, product with RCA < cutoff).
std::vector<ScatterPoint> density_sophistication_scatter(std::span<const ScatterOwner> owners,
                                                         const metrics::ProximityMatrix& phi,
                                                         const metrics::SophisticationVector& soph,
                                                         double cutoff = kDefaultOpportunityCutoff);

std::string scatter_csv(std::span<const ScatterPoint> points);

/// `product,tier,size_value,growth,decile`.
std::string annotations_csv(std::span<const NodeAnnotation> annotations);

}  // namespace prodspace::views
