#include "prodspace/trade_data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <set>
#include <unordered_map>

#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::trade {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// "004" and "4" name the same numeric country.
std::string numeric_key(std::string_view code) {
  auto pos = code.find_first_not_of('0');
  return pos == std::string_view::npos ? std::string("0") : std::string(code.substr(pos));
}

std::optional<std::size_t> sorted_find(const std::vector<std::string>& v, std::string_view key) {
  auto it = std::lower_bound(v.begin(), v.end(), key,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == v.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(SectorClass sector) noexcept {
  switch (sector) {
    case SectorClass::AgricultureAndFood:
      return "AgricultureAndFood";
    case SectorClass::TextilesAndGarments:
      return "TextilesAndGarments";
    case SectorClass::Other:
      return "Other";
  }
  return "Other";
}

SectorClass sector_from_string(std::string_view text) {
  if (text == "AgricultureAndFood") return SectorClass::AgricultureAndFood;
  if (text == "TextilesAndGarments") return SectorClass::TextilesAndGarments;
  if (text == "Other") return SectorClass::Other;
  throw InvalidArgument("unknown sector '" + std::string(text) + "'");
}

std::string canonical_hs6(std::string_view raw) {
  std::string code = trimmed(raw);
  if (!all_digits(code)) throw InvalidArgument("HS code '" + code + "' is not numeric");
  if (code.size() > 6) throw InvalidArgument("HS code '" + code + "' has more than six digits");
  return std::string(6 - code.size(), '0') + code;
}

SectorClass classify_sector(std::string_view code) {
  const std::string canon = canonical_hs6(code);
  const long value = std::stol(canon);
  if (value < 280000) return SectorClass::AgricultureAndFood;
  if (value >= 500000 && value < 680000) return SectorClass::TextilesAndGarments;
  return SectorClass::Other;
}

SectorClass sector_or_other(std::string_view code) noexcept {
  try {
    return classify_sector(code);
  } catch (const std::exception&) {
    return SectorClass::Other;
  }
}

// ---------------------------------------------------------------------------

namespace {

// Index of the first header cell matching one of `names` (case-insensitive),
// or `fallback` when none does.
std::size_t header_index(const std::vector<std::string>& header,
                         std::initializer_list<std::string_view> names, std::size_t fallback) {
  for (std::string_view want : names)
    for (std::size_t i = 0; i < header.size(); ++i)
      if (lower(trimmed(header[i])) == want) return i;
  return fallback;
}

}  // namespace

ProductRegistry ProductRegistry::load(std::istream& in) {
  ProductRegistry reg;
  std::string line;
  if (!std::getline(in, line)) return reg;
  const auto header = csv::split_line(line, ',');
  const std::size_t code_col = header_index(header, {"hs6", "code", "product", "k"}, 0);
  const std::size_t name_col = header_index(header, {"name", "description"}, 1);
  const std::size_t needed = std::max(code_col, name_col) + 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    auto fields = csv::split_line(line, ',');
    if (fields.size() < needed)
      throw DataError("product registry line " + std::to_string(line_no) + ": expected hs6,name");
    try {
      reg.add(fields[code_col], trimmed(fields[name_col]));
    } catch (const InvalidArgument& e) {
      throw DataError("product registry line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return reg;
}

ProductRegistry ProductRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open product registry " + path.string());
  return load(in);
}

void ProductRegistry::add(std::string_view code, std::string name) {
  std::string canon = canonical_hs6(code);
  const SectorClass sector = classify_sector(canon);
  entries_[std::move(canon)] = ProductInfo{std::move(name), sector};
}

ProductInfo ProductRegistry::resolve(std::string_view code) const {
  if (auto it = entries_.find(code); it != entries_.end()) return it->second;
  return ProductInfo{"", sector_or_other(code)};
}

CountryRegistry CountryRegistry::load(std::istream& in) {
  CountryRegistry reg;
  std::string line;
  if (!std::getline(in, line)) return reg;
  const auto header = csv::split_line(line, ',');
  // Accepts `code,iso3,name` as well as the BACI country table layouts.
  const std::size_t code_col = header_index(header, {"code", "country_code"}, 0);
  const std::size_t iso_col =
      header_index(header, {"iso3", "country_iso3", "iso_3digit_alpha", "iso_3"}, 1);
  const std::size_t name_col =
      header_index(header, {"name", "country_name", "country_name_full", "country_name_abbreviation"},
                   header.size() > 2 ? 2 : header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    auto fields = csv::split_line(line, ',');
    if (fields.size() <= std::max(code_col, iso_col))
      throw DataError("country registry line " + std::to_string(line_no) +
                      ": expected code,iso3,name");
    const std::string iso3 = trimmed(fields[iso_col]);
    if (iso3.empty()) continue;  // aggregates without an ISO code
    reg.add(trimmed(fields[code_col]), iso3, name_col < fields.size() ? trimmed(fields[name_col]) : "");
  }
  return reg;
}

CountryRegistry CountryRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open country registry " + path.string());
  return load(in);
}

void CountryRegistry::add(std::string_view code, std::string iso3, std::string name) {
  const std::string key = all_digits(code) ? numeric_key(code) : std::string(code);
  name_by_iso3_[iso3] = name;
  by_code_[key] = CountryInfo{std::move(iso3), std::move(name)};
}

const CountryInfo* CountryRegistry::find(std::string_view code) const {
  const std::string key = all_digits(code) ? numeric_key(code) : std::string(code);
  auto it = by_code_.find(key);
  return it == by_code_.end() ? nullptr : &it->second;
}

bool CountryRegistry::knows_iso3(std::string_view iso3) const {
  return name_by_iso3_.find(iso3) != name_by_iso3_.end();
}

std::string CountryRegistry::name_of(std::string_view iso3) const {
  auto it = name_by_iso3_.find(iso3);
  return it == name_by_iso3_.end() ? std::string() : it->second;
}

// ---------------------------------------------------------------------------

IngestFormat IngestFormat::baci() {
  IngestFormat f;
  f.columns = ColumnNames{"t", "i", "j", "k", "v", "q"};
  return f;
}

std::size_t ParseResult::error_count() const {
  return static_cast<std::size_t>(std::count_if(
      issues.begin(), issues.end(), [](const RowIssue& i) { return i.severity == Severity::Error; }));
}

std::size_t ParseResult::warning_count() const { return issues.size() - error_count(); }

namespace {

enum Column { kYear, kExporter, kImporter, kProduct, kValue, kQuantity, kColumnCount };

struct ColumnMap {
  std::array<std::optional<std::size_t>, kColumnCount> index;
};

ColumnMap map_header(const std::vector<std::string>& header, const IngestFormat& format) {
  const ColumnNames& names = format.columns;
  const std::array<std::string, kColumnCount> primary = {
      lower(names.year),  lower(names.exporter), lower(names.importer),
      lower(names.product), lower(names.value),  lower(names.quantity)};
  static const std::array<std::string, kColumnCount> baci = {"t", "i", "j", "k", "v", "q"};

  ColumnMap map;
  for (std::size_t col = 0; col < header.size(); ++col) {
    std::string name = lower(trimmed(header[col]));
    if (col == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);
    for (int k = 0; k < kColumnCount; ++k) {
      if (map.index[k]) continue;
      if (name == primary[k] || (format.accept_baci_aliases && name == baci[k])) {
        map.index[k] = col;
        break;
      }
    }
  }
  static const std::array<const char*, kColumnCount> label = {"year",    "exporter", "importer",
                                                              "product", "value",    "quantity"};
  for (int k = 0; k < kQuantity; ++k) {
    if (!map.index[k])
      throw DataError(std::string("trade table is missing mandatory column '") + label[k] + "'");
  }
  return map;
}

struct CountryMapping {
  std::string code;
  bool unmapped = false;
};

CountryMapping map_country(std::string_view raw, const CountryRegistry* registry) {
  const std::string code = trimmed(raw);
  const bool numeric = all_digits(code);
  if (registry) {
    if (const CountryInfo* info = registry->find(code)) return {info->iso3, false};
    if (registry->knows_iso3(code)) return {code, false};
    return {numeric ? "N" + numeric_key(code) : code, true};
  }
  return {numeric ? "N" + numeric_key(code) : code, false};
}

}  // namespace

std::vector<RowIssue> scan_trade_records(std::istream& in, const IngestFormat& format,
                                         const RecordSink& sink) {
  std::vector<RowIssue> issues;
  std::string line;
  if (!std::getline(in, line)) throw DataError("trade table has no header row");

  const char delim = format.delimiter != 0 ? format.delimiter
                                           : (line.find('\t') != std::string::npos ? '\t' : ',');
  const ColumnMap cols = map_header(csv::split_line(line, delim), format);
  std::size_t needed = 0;
  for (const auto& idx : cols.index)
    if (idx) needed = std::max(needed, *idx + 1);

  std::size_t line_no = 1;
  auto fail = [&](Severity sev, std::string msg) {
    issues.push_back(RowIssue{line_no, sev, "line " + std::to_string(line_no) + ": " + msg, line});
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    const auto fields = csv::split_line(line, delim);
    if (fields.size() < needed) {
      fail(Severity::Error, "expected at least " + std::to_string(needed) + " fields, got " +
                                std::to_string(fields.size()));
      continue;
    }
    auto field = [&](Column c) -> const std::string& { return fields[*cols.index[c]]; };

    TradeRecord rec;
    long long year = 0;
    if (!csv::parse_int(field(kYear), year)) {
      fail(Severity::Error, "year '" + field(kYear) + "' is not an integer");
      continue;
    }
    rec.year = static_cast<int>(year);
    if ((format.min_year && rec.year < *format.min_year) ||
        (format.max_year && rec.year > *format.max_year)) {
      fail(Severity::Error, "year " + std::to_string(rec.year) + " outside configured range");
      continue;
    }

    try {
      rec.product = canonical_hs6(field(kProduct));
    } catch (const InvalidArgument& e) {
      fail(Severity::Error, e.what());
      continue;
    }

    if (!csv::parse_double(field(kValue), rec.value) || !std::isfinite(rec.value)) {
      fail(Severity::Error, "value '" + field(kValue) + "' is not a number");
      continue;
    }
    if (rec.value < 0.0) {
      fail(Severity::Error, "negative value " + trimmed(field(kValue)));
      continue;
    }

    if (cols.index[kQuantity]) {
      const std::string q = trimmed(field(kQuantity));
      if (!q.empty() && lower(q) != "na") {
        double qty = 0.0;
        if (!csv::parse_double(q, qty) || !std::isfinite(qty)) {
          fail(Severity::Error, "quantity '" + q + "' is not a number");
          continue;
        }
        if (qty < 0.0) {
          fail(Severity::Error, "negative quantity " + q);
          continue;
        }
        rec.quantity = qty;
      }
    }

    const std::string exporter_raw = trimmed(field(kExporter));
    const std::string importer_raw = trimmed(field(kImporter));
    if (exporter_raw.empty() || importer_raw.empty()) {
      fail(Severity::Error, "empty country code");
      continue;
    }
    auto exporter = map_country(exporter_raw, format.countries);
    auto importer = map_country(importer_raw, format.countries);
    rec.exporter = std::move(exporter.code);
    rec.importer = std::move(importer.code);
    rec.exporter_unmapped = exporter.unmapped;
    rec.importer_unmapped = importer.unmapped;
    if (exporter.unmapped) fail(Severity::Warning, "unknown exporter code '" + exporter_raw + "'");
    if (importer.unmapped) fail(Severity::Warning, "unknown importer code '" + importer_raw + "'");

    sink(std::move(rec));
  }
  return issues;
}

ParseResult parse_trade_records(std::istream& in, const IngestFormat& format) {
  ParseResult result;
  result.issues = scan_trade_records(
      in, format, [&](TradeRecord&& rec) { result.records.push_back(std::move(rec)); });
  return result;
}

std::string format_issues_csv(std::span<const RowIssue> issues) {
  std::string out = "line,severity,message,raw\n";
  for (const auto& issue : issues) {
    out += std::to_string(issue.line);
    out += issue.severity == Severity::Error ? ",error," : ",warning,";
    out += csv::escape_field(issue.message);
    out += ',';
    out += csv::escape_field(issue.raw);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> ExportMatrix::country_index(std::string_view code) const {
  return sorted_find(countries, code);
}

std::optional<std::size_t> ExportMatrix::product_index(std::string_view code) const {
  return sorted_find(products, code);
}

ExportMatrix aggregate_exports(std::span<const TradeRecord> records, int year) {
  std::vector<const TradeRecord*> rows;
  for (const auto& r : records)
    if (r.year == year && r.exporter != r.importer) rows.push_back(&r);
  if (rows.empty())
    throw EmptyResult("no export records for year " + std::to_string(year));

  ExportMatrix m;
  m.year = year;
  for (const auto* r : rows) {
    m.countries.push_back(r->exporter);
    m.products.push_back(r->product);
  }
  for (auto* v : {&m.countries, &m.products}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }

  std::unordered_map<std::string_view, std::size_t> cidx, pidx;
  for (std::size_t i = 0; i < m.countries.size(); ++i) cidx.emplace(m.countries[i], i);
  for (std::size_t i = 0; i < m.products.size(); ++i) pidx.emplace(m.products[i], i);

  // Sum each cell's contributions in sorted order so the result does not
  // depend on record order.
  std::vector<std::pair<std::size_t, double>> cells;
  cells.reserve(rows.size());
  const std::size_t np = m.products.size();
  for (const auto* r : rows) cells.emplace_back(cidx.at(r->exporter) * np + pidx.at(r->product), r->value);
  std::sort(cells.begin(), cells.end());

  m.values = DenseMatrix<double>(m.countries.size(), np, 0.0);
  auto data = m.values.data();
  for (const auto& [cell, value] : cells) data[cell] += value;
  return m;
}

ExportMatrix realign(const ExportMatrix& m, std::span<const std::string> countries,
                     std::span<const std::string> products) {
  ExportMatrix out;
  out.year = m.year;
  out.countries.assign(countries.begin(), countries.end());
  out.products.assign(products.begin(), products.end());
  out.values = DenseMatrix<double>(out.countries.size(), out.products.size(), 0.0);

  std::vector<std::optional<std::size_t>> pmap(m.products.size());
  for (std::size_t p = 0; p < m.products.size(); ++p) pmap[p] = out.product_index(m.products[p]);

  for (std::size_t c = 0; c < m.countries.size(); ++c) {
    const auto row = m.values.row(c);
    const auto target = out.country_index(m.countries[c]);
    for (std::size_t p = 0; p < m.products.size(); ++p) {
      if (row[p] == 0.0) continue;
      if (!target || !pmap[p])
        throw InvalidArgument("realign: cell (" + m.countries[c] + ", " + m.products[p] +
                              ") has no place in the target ordering");
      out.values(*target, *pmap[p]) = row[p];
    }
  }
  return out;
}

std::vector<ExportMatrix> aggregate_years(std::span<const TradeRecord> records,
                                          std::span<const int> years) {
  std::vector<ExportMatrix> raw;
  std::set<std::string> countries, products;
  for (int y : years) {
    raw.push_back(aggregate_exports(records, y));
    countries.insert(raw.back().countries.begin(), raw.back().countries.end());
    products.insert(raw.back().products.begin(), raw.back().products.end());
  }
  const std::vector<std::string> cs(countries.begin(), countries.end());
  const std::vector<std::string> ps(products.begin(), products.end());
  std::vector<ExportMatrix> out;
  out.reserve(raw.size());
  for (const auto& m : raw) out.push_back(realign(m, cs, ps));
  return out;
}

ExportAccumulator::ExportAccumulator(std::vector<int> years) : years_(std::move(years)) {
  if (years_.empty()) throw InvalidArgument("ExportAccumulator: no years given");
  cells_.resize(years_.size());
}

std::uint32_t ExportAccumulator::intern(std::unordered_map<std::string, std::uint32_t>& ids,
                                        const std::string& code) {
  const auto [it, inserted] = ids.try_emplace(code, static_cast<std::uint32_t>(ids.size()));
  return it->second;
}

void ExportAccumulator::add(const TradeRecord& r) {
  if (r.exporter == r.importer) return;
  const auto slot = std::find(years_.begin(), years_.end(), r.year);
  if (slot == years_.end()) return;
  const std::uint64_t key =
      (std::uint64_t{intern(country_ids_, r.exporter)} << 32) | intern(product_ids_, r.product);
  cells_[slot - years_.begin()].emplace_back(key, r.value);
}

std::vector<ExportMatrix> ExportAccumulator::finish() {
  for (std::size_t y = 0; y < years_.size(); ++y)
    if (cells_[y].empty())
      throw EmptyResult("no export records for year " + std::to_string(years_[y]));

  auto ordering = [](const std::unordered_map<std::string, std::uint32_t>& ids,
                     std::vector<std::string>& codes, std::vector<std::size_t>& pos) {
    codes.resize(ids.size());
    for (const auto& [code, id] : ids) codes[id] = code;
    std::vector<std::uint32_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return codes[a] < codes[b]; });
    pos.assign(ids.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    std::sort(codes.begin(), codes.end());
  };
  std::vector<std::string> countries, products;
  std::vector<std::size_t> cpos, ppos;
  ordering(country_ids_, countries, cpos);
  ordering(product_ids_, products, ppos);

  // Same summation order as aggregate_exports: by cell, then by value.
  std::vector<ExportMatrix> out;
  out.reserve(years_.size());
  const std::size_t np = products.size();
  for (std::size_t y = 0; y < years_.size(); ++y) {
    auto& cells = cells_[y];
    for (auto& [key, value] : cells)
      key = cpos[key >> 32] * np + ppos[key & 0xffffffffu];
    std::sort(cells.begin(), cells.end());
    ExportMatrix m;
    m.year = years_[y];
    m.countries = countries;
    m.products = products;
    m.values = DenseMatrix<double>(countries.size(), np, 0.0);
    auto data = m.values.data();
    for (const auto& [cell, value] : cells) data[cell] += value;
    cells.clear();
    cells.shrink_to_fit();
    out.push_back(std::move(m));
  }
  return out;
}

ValidationReport validate_matrix(const ExportMatrix& m) {
  ValidationReport r;
  r.country_count = m.countries.size();
  r.product_count = m.products.size();
  r.country_totals.assign(r.country_count, 0.0);
  r.product_totals.assign(r.product_count, 0.0);

  auto sorted_unique = [](const std::vector<std::string>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  r.orderings_sorted_unique = sorted_unique(m.countries) && sorted_unique(m.products) &&
                              m.values.rows() == r.country_count &&
                              m.values.cols() == r.product_count;
  if (!r.orderings_sorted_unique) return r;

  for (std::size_t c = 0; c < r.country_count; ++c) {
    for (std::size_t p = 0; p < r.product_count; ++p) {
      const double v = m.values(c, p);
      if (v < 0.0 || std::isnan(v)) r.has_negative = true;
      r.country_totals[c] += v;
      r.product_totals[p] += v;
    }
  }
  r.world_total = std::accumulate(r.country_totals.begin(), r.country_totals.end(), 0.0);
  for (std::size_t c = 0; c < r.country_count; ++c)
    if (r.country_totals[c] == 0.0) r.empty_countries.push_back(m.countries[c]);
  for (std::size_t p = 0; p < r.product_count; ++p)
    if (r.product_totals[p] == 0.0) r.empty_products.push_back(m.products[p]);
  return r;
}

}  // namespace prodspace::trade
