#include "prodspace/tile.hpp"

#include <bit>
#include <cstring>

#include "json.hpp"
#include "prodspace/checksum.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::tile {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "tile files are little-endian; add byte swapping for this target");

namespace {

constexpr const char* kTileFormat = "prodspace-tile-v1";

std::filesystem::path bin_path(const std::filesystem::path& dir, const std::string& name) {
  return dir / (name + ".bin");
}
std::filesystem::path json_path(const std::filesystem::path& dir, const std::string& name) {
  return dir / (name + ".json");
}

template <typename T>
void write_impl(const std::filesystem::path& dir, const std::string& name,
                const DenseMatrix<T>& values, Manifest manifest, const char* dtype) {
  const auto data = values.data();
  std::string_view bytes(reinterpret_cast<const char*>(data.data()), data.size_bytes());
  csv::write_file(bin_path(dir, name), bytes);

  manifest.dtype = dtype;
  manifest.rows = values.rows();
  manifest.cols = values.cols();
  manifest.checksum = sha256_hex(bytes);
  json j = {
      {"format", kTileFormat},
      {"kind", manifest.kind},
      {"dtype", manifest.dtype},
      {"rows", manifest.rows},
      {"cols", manifest.cols},
      {"row_labels", manifest.row_labels},
      {"col_labels", manifest.col_labels},
      {"params", manifest.params},
      {"file", bin_path(dir, name).filename().string()},
      {"sha256", manifest.checksum},
  };
  csv::write_file(json_path(dir, name), j.dump(2) + "\n");
}

template <typename T>
Tile<T> read_impl(const std::filesystem::path& dir, const std::string& name, const char* dtype) {
  Tile<T> t;
  t.manifest = read_manifest(dir, name);
  if (t.manifest.dtype != dtype)
    throw IoError("tile " + name + " has dtype " + t.manifest.dtype + ", expected " + dtype);
  const std::string bytes = csv::read_file(bin_path(dir, name));
  if (bytes.size() != t.manifest.rows * t.manifest.cols * sizeof(T))
    throw IoError("tile " + name + " has the wrong size");
  if (sha256_hex(bytes) != t.manifest.checksum)
    throw IoError("checksum mismatch for tile " + name);
  t.values = DenseMatrix<T>(t.manifest.rows, t.manifest.cols);
  if (!bytes.empty()) std::memcpy(t.values.data().data(), bytes.data(), bytes.size());
  return t;
}

}  // namespace

void write(const std::filesystem::path& dir, const std::string& name,
           const DenseMatrix<double>& values, Manifest manifest) {
  write_impl(dir, name, values, std::move(manifest), "f64");
}

void write(const std::filesystem::path& dir, const std::string& name,
           const DenseMatrix<std::uint8_t>& values, Manifest manifest) {
  write_impl(dir, name, values, std::move(manifest), "u8");
}

Manifest read_manifest(const std::filesystem::path& dir, const std::string& name) {
  const auto path = json_path(dir, name);
  if (!std::filesystem::exists(path)) throw IoError("missing tile manifest " + path.string());
  try {
    const json j = json::parse(csv::read_file(path));
    if (j.value("format", "") != kTileFormat) throw IoError("unsupported tile format in " + path.string());
    Manifest m;
    m.kind = j.at("kind").get<std::string>();
    m.dtype = j.at("dtype").get<std::string>();
    m.rows = j.at("rows").get<std::size_t>();
    m.cols = j.at("cols").get<std::size_t>();
    m.row_labels = j.at("row_labels").get<std::vector<std::string>>();
    m.col_labels = j.at("col_labels").get<std::vector<std::string>>();
    m.params = j.at("params").get<std::map<std::string, std::string>>();
    m.checksum = j.at("sha256").get<std::string>();
    return m;
  } catch (const json::exception& e) {
    throw IoError("corrupt tile manifest " + path.string() + ": " + e.what());
  }
}

Tile<double> read_f64(const std::filesystem::path& dir, const std::string& name) {
  return read_impl<double>(dir, name, "f64");
}

Tile<std::uint8_t> read_u8(const std::filesystem::path& dir, const std::string& name) {
  return read_impl<std::uint8_t>(dir, name, "u8");
}

void save(const std::filesystem::path& dir, const std::string& name,
          const metrics::ProximityMatrix& phi, std::map<std::string, std::string> params) {
  Manifest m;
  m.kind = "proximity";
  m.row_labels = phi.products;
  m.col_labels = phi.products;
  m.params = std::move(params);
  write(dir, name, phi.values, std::move(m));
}

void save(const std::filesystem::path& dir, const std::string& name, const metrics::RcaMatrix& rca,
          std::map<std::string, std::string> params) {
  Manifest m;
  m.kind = "rca";
  m.row_labels = rca.countries;
  m.col_labels = rca.products;
  m.params = std::move(params);
  write(dir, name, rca.values, std::move(m));
}

void save(const std::filesystem::path& dir, const std::string& name, const metrics::MMatrix& mm,
          std::map<std::string, std::string> params) {
  Manifest m;
  m.kind = "m";
  m.row_labels = mm.countries;
  m.col_labels = mm.products;
  params["threshold"] = csv::format_double(mm.threshold);
  m.params = std::move(params);
  write(dir, name, mm.bits, std::move(m));
}

metrics::ProximityMatrix load_proximity(const std::filesystem::path& dir, const std::string& name) {
  auto t = read_f64(dir, name);
  if (t.manifest.kind != "proximity") throw IoError("tile " + name + " is not a proximity matrix");
  metrics::ProximityMatrix phi;
  phi.products = std::move(t.manifest.row_labels);
  phi.values = std::move(t.values);
  return phi;
}

metrics::RcaMatrix load_rca(const std::filesystem::path& dir, const std::string& name) {
  auto t = read_f64(dir, name);
  if (t.manifest.kind != "rca") throw IoError("tile " + name + " is not an RCA matrix");
  metrics::RcaMatrix r;
  r.countries = std::move(t.manifest.row_labels);
  r.products = std::move(t.manifest.col_labels);
  r.values = std::move(t.values);
  // An all-zero row (column) is exactly a country (product) with no exports.
  r.empty_countries.assign(r.countries.size(), true);
  r.empty_products.assign(r.products.size(), true);
  for (std::size_t c = 0; c < r.countries.size(); ++c) {
    const auto row = r.values.row(c);
    for (std::size_t p = 0; p < row.size(); ++p) {
      if (row[p] != 0.0) {
        r.empty_countries[c] = false;
        r.empty_products[p] = false;
      }
    }
  }
  return r;
}

metrics::MMatrix load_m(const std::filesystem::path& dir, const std::string& name) {
  auto t = read_u8(dir, name);
  if (t.manifest.kind != "m") throw IoError("tile " + name + " is not an M matrix");
  metrics::MMatrix m;
  m.countries = std::move(t.manifest.row_labels);
  m.products = std::move(t.manifest.col_labels);
  m.bits = std::move(t.values);
  double threshold = 1.0;
  if (auto it = t.manifest.params.find("threshold");
      it != t.manifest.params.end() && csv::parse_double(it->second, threshold))
    m.threshold = threshold;
  return m;
}

}  // namespace prodspace::tile
