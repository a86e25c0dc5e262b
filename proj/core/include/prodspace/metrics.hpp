#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prodspace/matrix.hpp"
#include "prodspace/trade_data.hpp"

namespace prodspace::metrics {

using trade::ExportMatrix;

/// Balassa revealed comparative advantage, country x product.
struct RcaMatrix {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  DenseMatrix<double> values;
  std::vector<bool> empty_countries;  // zero total exports
  std::vector<bool> empty_products;   // zero world total

  std::optional<std::size_t> country_index(std::string_view code) const;
  std::optional<std::size_t> product_index(std::string_view code) const;
};

/// Binary country x product matrix: bit set iff RCA >= threshold.
struct MMatrix {
  std::vector<std::string> countries;
  std::vector<std::string> products;
  DenseMatrix<std::uint8_t> bits;
  double threshold = 1.0;

  std::optional<std::size_t> country_index(std::string_view code) const;
};

/// Symmetric product x product proximity in [0,1]; diagonal is 1.
struct ProximityMatrix {
  std::vector<std::string> products;
  DenseMatrix<double> values;

  std::optional<std::size_t> product_index(std::string_view code) const;
};

struct ShareVector {
  std::string country;
  std::vector<std::string> products;
  std::vector<double> values;
  bool empty = false;  // country exports nothing
};

struct DensityVector {
  std::string country;
  std::vector<std::string> products;
  std::vector<double> values;
  std::vector<bool> isolated;  // proximity row (off-diagonal) sums to zero
};

/// Method-of-reflections sequences on the matrix with empty rows and columns
/// removed. k_country[n][i] is k_{c,n} for the i-th kept country.
struct ReflectionsState {
  std::vector<std::size_t> kept_countries;  // indices into MMatrix::countries
  std::vector<std::size_t> kept_products;   // indices into MMatrix::products
  std::vector<std::vector<double>> k_country;
  std::vector<std::vector<double>> k_product;
  int depth = 0;
};

struct SophisticationVector {
  std::vector<std::string> products;
  /// Standard deviations from the mean over products; nullopt for products
  /// nobody exports.
  std::vector<std::optional<double>> values;
  int iterations = 0;
  bool degenerate = false;  // zero variance, values are all zero
  bool flipped = false;     // sign was inverted to align with k_{p,1}
  /// Mean absolute rank shift of products between depth N-2 and N, divided
  /// by the product count. Absent for N < 2.
  std::optional<double> ranking_change;
};

RcaMatrix rca(const ExportMatrix& m);

ShareVector export_shares(const ExportMatrix& m, std::string_view country);

MMatrix binarize(const RcaMatrix& r, double threshold = 1.0);

std::vector<std::size_t> diversification(const MMatrix& m);
std::vector<std::size_t> ubiquity(const MMatrix& m);

/// phi_ij = (#countries exporting both) / max(ubiquity_i, ubiquity_j).
/// `workers` = 0 uses the hardware concurrency.
ProximityMatrix proximity(const MMatrix& m, unsigned workers = 0);

/// Element-wise mean over matrices re-aligned onto the union of product
/// codes; a product missing from a year contributes zero for that year.
ProximityMatrix average_proximity(std::span<const ProximityMatrix> mats);

/// Sums several export matrices cell-wise after aligning them on the union
/// of codes. Used for the pooled-years proximity path.
ExportMatrix pool_years(std::span<const ExportMatrix> years);

/// Sum over j != p of phi_pj, per product.
std::vector<double> proximity_strength(const ProximityMatrix& phi);

/// omega_p = sum_{j!=p} M_j phi_pj / sum_{j!=p} phi_pj. Isolated products
/// get 0 and a flag.
DensityVector density(std::string_view country, std::span<const std::uint8_t> m_row,
                      const ProximityMatrix& phi);

/// Densities for every country of `m`, countries x products.
DenseMatrix<double> density_all(const MMatrix& m, const ProximityMatrix& phi,
                                unsigned workers = 0);

ReflectionsState reflections(const MMatrix& m, int iterations);

SophisticationVector sophistication(const MMatrix& m, int iterations = 18);

}  // namespace prodspace::metrics
