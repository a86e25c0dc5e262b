#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "prodspace/checksum.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"
#include "prodspace/trade_data.hpp"

namespace prodspace::trade {

using nlohmann::json;

namespace {
constexpr const char* kCacheFormat = "prodspace-exports-v1";
}

std::filesystem::path export_cache_path(const std::filesystem::path& dir, int year) {
  return dir / ("exports_" + std::to_string(year) + ".csv");
}

std::filesystem::path export_manifest_path(const std::filesystem::path& dir, int year) {
  return dir / ("exports_" + std::to_string(year) + ".json");
}

void write_export_cache(const std::filesystem::path& dir, const ExportMatrix& m) {
  std::string body = "country,product,value\n";
  std::size_t nonzero = 0;
  for (std::size_t c = 0; c < m.countries.size(); ++c) {
    const auto row = m.values.row(c);
    for (std::size_t p = 0; p < m.products.size(); ++p) {
      if (row[p] == 0.0) continue;
      ++nonzero;
      body += csv::escape_field(m.countries[c]);
      body += ',';
      body += m.products[p];
      body += ',';
      body += csv::format_double(row[p]);
      body += '\n';
    }
  }
  const auto data_path = export_cache_path(dir, m.year);
  csv::write_file(data_path, body);

  json manifest = {
      {"format", kCacheFormat},
      {"year", m.year},
      {"file", data_path.filename().string()},
      {"n_countries", m.countries.size()},
      {"n_products", m.products.size()},
      {"nonzero", nonzero},
      {"countries", m.countries},
      {"products", m.products},
      {"sha256", sha256_hex(body)},
  };
  csv::write_file(export_manifest_path(dir, m.year), manifest.dump(2) + "\n");
}

ExportMatrix read_export_cache(const std::filesystem::path& dir, int year) {
  const auto manifest_path = export_manifest_path(dir, year);
  if (!std::filesystem::exists(manifest_path))
    throw IoError("no export cache for year " + std::to_string(year) + " in " + dir.string());
  json manifest;
  try {
    manifest = json::parse(csv::read_file(manifest_path));
  } catch (const json::exception& e) {
    throw IoError("corrupt manifest " + manifest_path.string() + ": " + e.what());
  }
  if (manifest.value("format", "") != kCacheFormat)
    throw IoError("unsupported cache format in " + manifest_path.string());

  const std::string body = csv::read_file(export_cache_path(dir, year));
  if (sha256_hex(body) != manifest.at("sha256").get<std::string>())
    throw IoError("checksum mismatch for " + export_cache_path(dir, year).string());

  ExportMatrix m;
  m.year = manifest.at("year").get<int>();
  m.countries = manifest.at("countries").get<std::vector<std::string>>();
  m.products = manifest.at("products").get<std::vector<std::string>>();
  m.values = DenseMatrix<double>(m.countries.size(), m.products.size(), 0.0);

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = csv::split_line(line, ',');
    double value = 0.0;
    const auto c = fields.size() == 3 ? m.country_index(fields[0]) : std::nullopt;
    const auto p = fields.size() == 3 ? m.product_index(fields[1]) : std::nullopt;
    if (!c || !p || !csv::parse_double(fields[2], value))
      throw IoError("malformed cache line " + std::to_string(line_no) + " for year " +
                    std::to_string(year));
    m.values(*c, *p) = value;
  }
  return m;
}

}  // namespace prodspace::trade
