#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "prodspace/matrix.hpp"

namespace prodspace::trade {

// ---------------------------------------------------------------------------
// Sectors and code registries
// ---------------------------------------------------------------------------

enum class SectorClass { AgricultureAndFood, TextilesAndGarments, Other };

std::string_view to_string(SectorClass sector) noexcept;
SectorClass sector_from_string(std::string_view text);

/// Zero-pads a numeric HS code to six digits. Throws InvalidArgument when the
/// code is empty, non-numeric or longer than six digits.
std::string canonical_hs6(std::string_view raw);

/// Coarse sector of a six-digit HS code:
///   code < 280000            -> AgricultureAndFood
///   500000 <= code < 680000  -> TextilesAndGarments
///   otherwise                -> Other
SectorClass classify_sector(std::string_view code);

/// Like classify_sector, but codes that are not HS-6 fall into Other.
SectorClass sector_or_other(std::string_view code) noexcept;

struct ProductInfo {
  std::string name;
  SectorClass sector = SectorClass::Other;
};

/// HS-6 code -> (name, sector). Codes missing from the file still resolve,
/// with an empty name and the sector derived from the code (Other for codes
/// that are not HS-6).
class ProductRegistry {
 public:
  ProductRegistry() = default;

  /// CSV with header `hs6,name`.
  static ProductRegistry load(std::istream& in);
  static ProductRegistry load(const std::filesystem::path& path);

  void add(std::string_view code, std::string name);
  ProductInfo resolve(std::string_view code) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::map<std::string, ProductInfo, std::less<>> entries_;
};

struct CountryInfo {
  std::string iso3;
  std::string name;
};

/// Numeric (BACI) country code -> ISO-3.
class CountryRegistry {
 public:
  CountryRegistry() = default;

  /// CSV with header `code,iso3,name`.
  static CountryRegistry load(std::istream& in);
  static CountryRegistry load(const std::filesystem::path& path);

  void add(std::string_view code, std::string iso3, std::string name);
  const CountryInfo* find(std::string_view code) const;
  bool knows_iso3(std::string_view iso3) const;
  std::string name_of(std::string_view iso3) const;
  std::size_t size() const noexcept { return by_code_.size(); }

 private:
  std::map<std::string, CountryInfo, std::less<>> by_code_;
  std::map<std::string, std::string, std::less<>> name_by_iso3_;
};

// ---------------------------------------------------------------------------
// Raw records
// ---------------------------------------------------------------------------

struct TradeRecord {
  int year = 0;
  std::string exporter;
  std::string importer;
  std::string product;  // canonical six-digit HS code
  double value = 0.0;   // thousands of USD
  std::optional<double> quantity;  // tons
  bool exporter_unmapped = false;
  bool importer_unmapped = false;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

struct ColumnNames {
  std::string year = "year";
  std::string exporter = "exporter";
  std::string importer = "importer";
  std::string product = "product";
  std::string value = "value";
  std::string quantity = "quantity";
};

/// Describes how a delimited trade table is laid out.
struct IngestFormat {
  /// 0 detects comma or tab from the header line.
  char delimiter = 0;
  ColumnNames columns;
  /// Also accept BACI short names t,i,j,k,v,q.
  bool accept_baci_aliases = true;
  std::optional<int> min_year;
  std::optional<int> max_year;
  /// Maps numeric codes to ISO-3. Without one, codes are kept as given
  /// (purely numeric codes get an "N" prefix) and no warnings are raised.
  const CountryRegistry* countries = nullptr;

  static IngestFormat baci();
};

enum class Severity { Warning, Error };

struct RowIssue {
  std::size_t line = 0;  // 1-based, header is line 1
  Severity severity = Severity::Error;
  std::string message;
  std::string raw;
};

struct ParseResult {
  std::vector<TradeRecord> records;
  std::vector<RowIssue> issues;

  std::size_t error_count() const;
  std::size_t warning_count() const;
};

/// Parses a delimited trade table. Rows that fail validation go to
/// `issues` with Severity::Error; rows with an unmapped country are kept and
/// reported as warnings. A missing mandatory column throws DataError.
using RecordSink = std::function<void(TradeRecord&&)>;

// Streaming form of parse_trade_records: valid rows go to `sink`, problems
// are returned.
std::vector<RowIssue> scan_trade_records(std::istream& in, const IngestFormat& format,
                                         const RecordSink& sink);

ParseResult parse_trade_records(std::istream& in, const IngestFormat& format = {});

/// Writes the error report as CSV `line,severity,message,raw`.
std::string format_issues_csv(std::span<const RowIssue> issues);

// ---------------------------------------------------------------------------
// Export matrices
// ---------------------------------------------------------------------------

/// Country x product export values (thousands of USD) for one year.
struct ExportMatrix {
  int year = 0;
  std::vector<std::string> countries;  // sorted, unique
  std::vector<std::string> products;   // sorted, unique
  DenseMatrix<double> values;

  std::optional<std::size_t> country_index(std::string_view code) const;
  std::optional<std::size_t> product_index(std::string_view code) const;

  friend bool operator==(const ExportMatrix&, const ExportMatrix&) = default;
};

/// Sums record values per (exporter, product) for `year` over importers.
/// Intra-country flows are skipped. Throws EmptyResult if the year has no
/// usable records.
ExportMatrix aggregate_exports(std::span<const TradeRecord> records, int year);

/// Re-indexes `m` onto the given sorted orderings; absent cells are zero.
/// Every code of `m` carrying a non-zero value must be present in the target.
ExportMatrix realign(const ExportMatrix& m, std::span<const std::string> countries,
                     std::span<const std::string> products);

/// Aggregates several years and aligns them onto the union of observed codes.
std::vector<ExportMatrix> aggregate_years(std::span<const TradeRecord> records,
                                          std::span<const int> years);

struct ValidationReport {
  std::size_t country_count = 0;
  std::size_t product_count = 0;
  double world_total = 0.0;
  std::vector<double> country_totals;
  std::vector<double> product_totals;
  std::vector<std::string> empty_countries;
  std::vector<std::string> empty_products;
  bool orderings_sorted_unique = true;
  bool has_negative = false;

  bool ok() const { return orderings_sorted_unique && !has_negative; }
};

// Incremental counterpart of aggregate_years for inputs too large to hold as
// records. Cell sums are order-independent, matching aggregate_exports.
class ExportAccumulator {
 public:
  explicit ExportAccumulator(std::vector<int> years);
  void add(const TradeRecord& record);
  std::vector<ExportMatrix> finish();

 private:
  static std::uint32_t intern(std::unordered_map<std::string, std::uint32_t>& ids,
                              const std::string& code);
  std::vector<int> years_;
  std::unordered_map<std::string, std::uint32_t> country_ids_, product_ids_;
  std::vector<std::vector<std::pair<std::uint64_t, double>>> cells_;
};

ValidationReport validate_matrix(const ExportMatrix& m);

// ---------------------------------------------------------------------------
// Cache format: exports_<year>.csv (`country,product,value`, non-zero cells,
// sorted) plus exports_<year>.json manifest with orderings and a checksum.
// ---------------------------------------------------------------------------

std::filesystem::path export_cache_path(const std::filesystem::path& dir, int year);
std::filesystem::path export_manifest_path(const std::filesystem::path& dir, int year);

void write_export_cache(const std::filesystem::path& dir, const ExportMatrix& m);
ExportMatrix read_export_cache(const std::filesystem::path& dir, int year);

}  // namespace prodspace::trade
