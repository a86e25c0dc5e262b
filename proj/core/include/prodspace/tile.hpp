#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "prodspace/matrix.hpp"
#include "prodspace/metrics.hpp"

namespace prodspace::tile {

/// Dense binary tile: `<name>.bin` holds little-endian row-major cells,
/// `<name>.json` holds the manifest below.
struct Manifest {
  std::string kind;   // free-form, e.g. "rca", "m", "proximity"
  std::string dtype;  // "f64" or "u8"
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::map<std::string, std::string> params;
  std::string checksum;  // sha256 of the .bin file
};

template <typename T>
struct Tile {
  Manifest manifest;
  DenseMatrix<T> values;
};

void write(const std::filesystem::path& dir, const std::string& name,
           const DenseMatrix<double>& values, Manifest manifest);
void write(const std::filesystem::path& dir, const std::string& name,
           const DenseMatrix<std::uint8_t>& values, Manifest manifest);

Manifest read_manifest(const std::filesystem::path& dir, const std::string& name);
Tile<double> read_f64(const std::filesystem::path& dir, const std::string& name);
Tile<std::uint8_t> read_u8(const std::filesystem::path& dir, const std::string& name);

void save(const std::filesystem::path& dir, const std::string& name,
          const metrics::ProximityMatrix& phi, std::map<std::string, std::string> params = {});
void save(const std::filesystem::path& dir, const std::string& name,
          const metrics::RcaMatrix& rca, std::map<std::string, std::string> params = {});
void save(const std::filesystem::path& dir, const std::string& name,
          const metrics::MMatrix& m, std::map<std::string, std::string> params = {});

metrics::ProximityMatrix load_proximity(const std::filesystem::path& dir, const std::string& name);
metrics::RcaMatrix load_rca(const std::filesystem::path& dir, const std::string& name);
metrics::MMatrix load_m(const std::filesystem::path& dir, const std::string& name);

}  // namespace prodspace::tile
