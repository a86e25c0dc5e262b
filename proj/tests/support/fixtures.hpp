#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "prodspace/metrics.hpp"
#include "prodspace/trade_data.hpp"

namespace fixtures {

/// Countries {A,B,C}, products {p,q,r}:
///   A: p=10, B: p=10 q=10, C: q=10 r=80. World total 120.
inline prodspace::trade::ExportMatrix toy1() {
  prodspace::trade::ExportMatrix m;
  m.year = 2005;
  m.countries = {"A", "B", "C"};
  m.products = {"p", "q", "r"};
  m.values = prodspace::DenseMatrix<double>(3, 3, 0.0);
  m.values(0, 0) = 10;
  m.values(1, 0) = 10;
  m.values(1, 1) = 10;
  m.values(2, 1) = 10;
  m.values(2, 2) = 80;
  return m;
}

/// Bilateral records that sum (by hand) to toy1(), plus noise the
/// aggregation must ignore: an intra-country flow and another year.
inline std::vector<prodspace::trade::TradeRecord> toy1_records() {
  using prodspace::trade::TradeRecord;
  auto rec = [](int year, const char* e, const char* i, const char* p, double v) {
    TradeRecord r;
    r.year = year;
    r.exporter = e;
    r.importer = i;
    r.product = p;
    r.value = v;
    return r;
  };
  return {
      rec(2005, "A", "B", "p", 4),  rec(2005, "A", "C", "p", 6),  rec(2005, "B", "A", "p", 10),
      rec(2005, "B", "C", "q", 3),  rec(2005, "B", "A", "q", 7),  rec(2005, "C", "A", "r", 50),
      rec(2005, "C", "B", "r", 30), rec(2005, "C", "A", "q", 10), rec(2005, "C", "C", "r", 999),
      rec(2004, "A", "B", "q", 77),
  };
}

inline std::vector<std::string> codes(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%03zu", prefix, i);
    out.emplace_back(buf);
  }
  return out;
}

/// Sparse random export matrix; roughly `fill` of the cells are positive.
inline prodspace::trade::ExportMatrix random_exports(std::mt19937_64& rng, std::size_t nc,
                                                     std::size_t np, double fill = 0.5) {
  prodspace::trade::ExportMatrix m;
  m.year = 2005;
  m.countries = codes("C", nc);
  m.products = codes("P", np);
  m.values = prodspace::DenseMatrix<double>(nc, np, 0.0);
  std::bernoulli_distribution nonzero(fill);
  std::lognormal_distribution<double> size(3.0, 2.0);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t p = 0; p < np; ++p)
      if (nonzero(rng)) m.values(c, p) = std::round(size(rng) * 100.0) / 100.0 + 0.01;
  m.values(0, 0) += 1.0;  // keep the world total positive
  return m;
}

inline prodspace::metrics::MMatrix random_m(std::mt19937_64& rng, std::size_t nc, std::size_t np,
                                            double fill) {
  prodspace::metrics::MMatrix m;
  m.countries = codes("C", nc);
  m.products = codes("P", np);
  m.bits = prodspace::DenseMatrix<std::uint8_t>(nc, np, 0);
  std::bernoulli_distribution bit(fill);
  for (auto& b : m.bits.data()) b = bit(rng) ? 1 : 0;
  return m;
}

inline oracle::Grid to_grid(const prodspace::DenseMatrix<double>& m) {
  oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

inline oracle::Bits to_bits(const prodspace::DenseMatrix<std::uint8_t>& m) {
  oracle::Bits g(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
  return g;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static std::mt19937_64 rng(std::random_device{}());
  auto dir = std::filesystem::temp_directory_path() /
             ("prodspace-" + tag + "-" + std::to_string(rng() % 1000000000));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures
