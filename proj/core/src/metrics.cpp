#include "prodspace/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "prodspace/error.hpp"

namespace prodspace::metrics {

namespace {

std::optional<std::size_t> sorted_find(const std::vector<std::string>& v, std::string_view key) {
  auto it = std::lower_bound(v.begin(), v.end(), key,
                             [](const std::string& a, std::string_view b) { return a < b; });
  if (it == v.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - v.begin());
}

unsigned resolve_workers(unsigned requested, std::size_t work_items) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, work_items)));
}

// Runs fn(worker, workers) on `workers` threads; the calling thread takes worker 0.
template <typename Fn>
void run_parallel(unsigned workers, Fn&& fn) {
  if (workers <= 1) {
    fn(0u, 1u);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back([&fn, w, workers] { fn(w, workers); });
  fn(0u, workers);
}

}  // namespace

std::optional<std::size_t> RcaMatrix::country_index(std::string_view code) const {
  return sorted_find(countries, code);
}
std::optional<std::size_t> RcaMatrix::product_index(std::string_view code) const {
  return sorted_find(products, code);
}
std::optional<std::size_t> MMatrix::country_index(std::string_view code) const {
  return sorted_find(countries, code);
}
std::optional<std::size_t> ProximityMatrix::product_index(std::string_view code) const {
  return sorted_find(products, code);
}

// ---------------------------------------------------------------------------

RcaMatrix rca(const ExportMatrix& m) {
  const std::size_t nc = m.countries.size();
  const std::size_t np = m.products.size();
  std::vector<double> country_total(nc, 0.0), product_total(np, 0.0);
  double world = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    const auto row = m.values.row(c);
    for (std::size_t p = 0; p < np; ++p) {
      country_total[c] += row[p];
      world += row[p];
    }
  }
  for (std::size_t c = 0; c < nc; ++c) {
    const auto row = m.values.row(c);
    for (std::size_t p = 0; p < np; ++p) product_total[p] += row[p];
  }
  if (!(world > 0.0)) throw DataError("rca: export matrix has no positive value");

  RcaMatrix r;
  r.countries = m.countries;
  r.products = m.products;
  r.values = DenseMatrix<double>(nc, np, 0.0);
  r.empty_countries.resize(nc);
  r.empty_products.resize(np);
  for (std::size_t p = 0; p < np; ++p) r.empty_products[p] = !(product_total[p] > 0.0);
  for (std::size_t c = 0; c < nc; ++c) {
    r.empty_countries[c] = !(country_total[c] > 0.0);
    if (r.empty_countries[c]) continue;
    const auto in = m.values.row(c);
    auto out = r.values.row(c);
    for (std::size_t p = 0; p < np; ++p) {
      if (r.empty_products[p]) continue;
      out[p] = (in[p] / country_total[c]) / (product_total[p] / world);
    }
  }
  return r;
}

ShareVector export_shares(const ExportMatrix& m, std::string_view country) {
  const auto c = m.country_index(country);
  if (!c) throw NotFound("export_shares: unknown country '" + std::string(country) + "'");
  ShareVector s;
  s.country = std::string(country);
  s.products = m.products;
  s.values.assign(m.products.size(), 0.0);
  const auto row = m.values.row(*c);
  const double total = std::accumulate(row.begin(), row.end(), 0.0);
  s.empty = !(total > 0.0);
  if (s.empty) return s;
  for (std::size_t p = 0; p < row.size(); ++p) s.values[p] = row[p] / total;
  return s;
}

MMatrix binarize(const RcaMatrix& r, double threshold) {
  if (!(threshold > 0.0)) throw InvalidArgument("binarize: threshold must be positive");
  MMatrix m;
  m.countries = r.countries;
  m.products = r.products;
  m.threshold = threshold;
  m.bits = DenseMatrix<std::uint8_t>(r.values.rows(), r.values.cols(), 0);
  auto in = r.values.data();
  auto out = m.bits.data();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] >= threshold ? 1 : 0;
  return m;
}

std::vector<std::size_t> diversification(const MMatrix& m) {
  std::vector<std::size_t> out(m.bits.rows(), 0);
  for (std::size_t c = 0; c < m.bits.rows(); ++c) {
    const auto row = m.bits.row(c);
    out[c] = static_cast<std::size_t>(std::count(row.begin(), row.end(), std::uint8_t{1}));
  }
  return out;
}

std::vector<std::size_t> ubiquity(const MMatrix& m) {
  std::vector<std::size_t> out(m.bits.cols(), 0);
  for (std::size_t c = 0; c < m.bits.rows(); ++c) {
    const auto row = m.bits.row(c);
    for (std::size_t p = 0; p < row.size(); ++p) out[p] += row[p];
  }
  return out;
}

// ---------------------------------------------------------------------------

ProximityMatrix proximity(const MMatrix& m, unsigned workers) {
  const std::size_t nc = m.bits.rows();
  const std::size_t np = m.bits.cols();
  const std::size_t words = (nc + 63) / 64;

  // One bitset of exporting countries per product.
  std::vector<std::uint64_t> columns(np * words, 0);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto row = m.bits.row(c);
    for (std::size_t p = 0; p < np; ++p)
      if (row[p]) columns[p * words + c / 64] |= std::uint64_t{1} << (c % 64);
  }
  std::vector<int> ubiq(np, 0);
  for (std::size_t p = 0; p < np; ++p)
    for (std::size_t w = 0; w < words; ++w) ubiq[p] += std::popcount(columns[p * words + w]);

  ProximityMatrix phi;
  phi.products = m.products;
  phi.values = DenseMatrix<double>(np, np, 0.0);
  for (std::size_t p = 0; p < np; ++p) phi.values(p, p) = 1.0;

  // Row i is owned by one worker, which writes (i,j) and (j,i) for j > i.
  run_parallel(resolve_workers(workers, np), [&](unsigned worker, unsigned stride) {
    for (std::size_t i = worker; i < np; i += stride) {
      const std::uint64_t* a = &columns[i * words];
      for (std::size_t j = i + 1; j < np; ++j) {
        const int denom = std::max(ubiq[i], ubiq[j]);
        if (denom == 0) continue;
        const std::uint64_t* b = &columns[j * words];
        int both = 0;
        for (std::size_t w = 0; w < words; ++w) both += std::popcount(a[w] & b[w]);
        if (both == 0) continue;
        const double v = static_cast<double>(both) / denom;
        phi.values(i, j) = v;
        phi.values(j, i) = v;
      }
    }
  });
  return phi;
}

ProximityMatrix average_proximity(std::span<const ProximityMatrix> mats) {
  if (mats.empty()) throw InvalidArgument("average_proximity: no matrices given");
  std::set<std::string> codes;
  for (const auto& m : mats) {
    if (m.values.rows() != m.products.size() || m.values.cols() != m.products.size())
      throw InvalidArgument("average_proximity: matrix dimensions do not match its products");
    codes.insert(m.products.begin(), m.products.end());
  }
  ProximityMatrix out;
  out.products.assign(codes.begin(), codes.end());
  const std::size_t n = out.products.size();
  out.values = DenseMatrix<double>(n, n, 0.0);

  for (const auto& m : mats) {
    std::vector<std::size_t> idx(m.products.size());
    for (std::size_t p = 0; p < idx.size(); ++p) idx[p] = *out.product_index(m.products[p]);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const auto row = m.values.row(i);
      auto dst = out.values.row(idx[i]);
      for (std::size_t j = 0; j < idx.size(); ++j) dst[idx[j]] += row[j];
    }
  }
  const double count = static_cast<double>(mats.size());
  for (double& v : out.values.data()) v /= count;
  for (std::size_t p = 0; p < n; ++p) out.values(p, p) = 1.0;
  return out;
}

ExportMatrix pool_years(std::span<const ExportMatrix> years) {
  if (years.empty()) throw InvalidArgument("pool_years: no matrices given");
  std::set<std::string> cs, ps;
  for (const auto& m : years) {
    cs.insert(m.countries.begin(), m.countries.end());
    ps.insert(m.products.begin(), m.products.end());
  }
  const std::vector<std::string> countries(cs.begin(), cs.end());
  const std::vector<std::string> products(ps.begin(), ps.end());
  ExportMatrix pooled;
  pooled.year = years.back().year;
  pooled.countries = countries;
  pooled.products = products;
  pooled.values = DenseMatrix<double>(countries.size(), products.size(), 0.0);
  for (const auto& m : years) {
    const auto aligned = trade::realign(m, countries, products);
    auto dst = pooled.values.data();
    auto src = aligned.values.data();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  }
  return pooled;
}

// ---------------------------------------------------------------------------

std::vector<double> proximity_strength(const ProximityMatrix& phi) {
  const std::size_t np = phi.products.size();
  std::vector<double> out(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    const auto row = phi.values.row(p);
    double s = 0.0;
    for (std::size_t j = 0; j < np; ++j)
      if (j != p) s += row[j];
    out[p] = s;
  }
  return out;
}

namespace {

void check_aligned(std::size_t row_size, const ProximityMatrix& phi) {
  if (row_size != phi.products.size() || phi.values.rows() != row_size ||
      phi.values.cols() != row_size)
    throw InvalidArgument("density: M row and proximity matrix are not aligned");
}

// acc[p] = sum over exported j != p of phi_pj, accumulated in ascending j.
void accumulate_density(std::span<const std::uint8_t> m_row, const ProximityMatrix& phi,
                        std::span<double> acc) {
  const std::size_t np = m_row.size();
  std::fill(acc.begin(), acc.end(), 0.0);
  for (std::size_t j = 0; j < np; ++j) {
    if (!m_row[j]) continue;
    const auto row = phi.values.row(j);  // symmetric: phi_jp == phi_pj
    for (std::size_t p = 0; p < j; ++p) acc[p] += row[p];
    for (std::size_t p = j + 1; p < np; ++p) acc[p] += row[p];
  }
}

}  // namespace

DensityVector density(std::string_view country, std::span<const std::uint8_t> m_row,
                      const ProximityMatrix& phi) {
  check_aligned(m_row.size(), phi);
  const std::size_t np = m_row.size();
  const auto strength = proximity_strength(phi);
  DensityVector d;
  d.country = std::string(country);
  d.products = phi.products;
  d.values.assign(np, 0.0);
  d.isolated.assign(np, false);
  accumulate_density(m_row, phi, d.values);
  for (std::size_t p = 0; p < np; ++p) {
    if (strength[p] == 0.0) {
      d.isolated[p] = true;
      d.values[p] = 0.0;
    } else {
      d.values[p] /= strength[p];
    }
  }
  return d;
}

DenseMatrix<double> density_all(const MMatrix& m, const ProximityMatrix& phi, unsigned workers) {
  const std::size_t nc = m.bits.rows();
  const std::size_t np = m.bits.cols();
  check_aligned(np, phi);
  const auto strength = proximity_strength(phi);
  DenseMatrix<double> out(nc, np, 0.0);
  run_parallel(resolve_workers(workers, nc), [&](unsigned worker, unsigned stride) {
    for (std::size_t c = worker; c < nc; c += stride) {
      auto row = out.row(c);
      accumulate_density(m.bits.row(c), phi, row);
      for (std::size_t p = 0; p < np; ++p) row[p] = strength[p] == 0.0 ? 0.0 : row[p] / strength[p];
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

ReflectionsState reflections(const MMatrix& m, int iterations) {
  if (iterations < 0) throw InvalidArgument("reflections: depth must be non-negative");
  const auto div = diversification(m);
  const auto ubi = ubiquity(m);
  ReflectionsState s;
  s.depth = iterations;
  for (std::size_t c = 0; c < div.size(); ++c)
    if (div[c] > 0) s.kept_countries.push_back(c);
  for (std::size_t p = 0; p < ubi.size(); ++p)
    if (ubi[p] > 0) s.kept_products.push_back(p);
  if (s.kept_countries.empty() || s.kept_products.empty())
    throw DataError("reflections: M matrix is empty after removing zero rows and columns");

  const std::size_t kc = s.kept_countries.size();
  const std::size_t kp = s.kept_products.size();
  std::vector<double> kc0(kc), kp0(kp);
  for (std::size_t a = 0; a < kc; ++a) kc0[a] = static_cast<double>(div[s.kept_countries[a]]);
  for (std::size_t b = 0; b < kp; ++b) kp0[b] = static_cast<double>(ubi[s.kept_products[b]]);
  s.k_country.push_back(kc0);
  s.k_product.push_back(kp0);

  for (int n = 1; n <= iterations; ++n) {
    const auto& prev_c = s.k_country.back();
    const auto& prev_p = s.k_product.back();
    std::vector<double> next_c(kc), next_p(kp, 0.0);
    for (std::size_t a = 0; a < kc; ++a) {
      const auto row = m.bits.row(s.kept_countries[a]);
      double sum = 0.0;
      for (std::size_t b = 0; b < kp; ++b)
        if (row[s.kept_products[b]]) sum += prev_p[b];
      next_c[a] = sum / kc0[a];
    }
    for (std::size_t a = 0; a < kc; ++a) {
      const auto row = m.bits.row(s.kept_countries[a]);
      for (std::size_t b = 0; b < kp; ++b)
        if (row[s.kept_products[b]]) next_p[b] += prev_c[a];
    }
    for (std::size_t b = 0; b < kp; ++b) next_p[b] /= kp0[b];
    s.k_country.push_back(std::move(next_c));
    s.k_product.push_back(std::move(next_p));
  }
  return s;
}

namespace {

std::vector<std::size_t> ranks_of(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<std::size_t> rank(v.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  return rank;
}

}  // namespace

SophisticationVector sophistication(const MMatrix& m, int iterations) {
  // A depth-1 reference is needed for sign orientation even when N = 0.
  const auto state = reflections(m, std::max(iterations, 1));
  const auto& kp = state.k_product[static_cast<std::size_t>(iterations)];
  const auto& reference = state.k_product[1];
  const std::size_t n = kp.size();

  SophisticationVector out;
  out.products = m.products;
  out.iterations = iterations;
  out.values.assign(m.products.size(), std::nullopt);

  const double mean = std::accumulate(kp.begin(), kp.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double v : kp) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));

  std::vector<double> z(n, 0.0);
  if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
    out.degenerate = true;
  } else {
    for (std::size_t b = 0; b < n; ++b) z[b] = (kp[b] - mean) / sd;
    const double ref_mean =
        std::accumulate(reference.begin(), reference.end(), 0.0) / static_cast<double>(n);
    double cov = 0.0;
    for (std::size_t b = 0; b < n; ++b) cov += z[b] * (reference[b] - ref_mean);
    if (cov < 0.0) {
      out.flipped = true;
      for (double& v : z) v = -v;
    }
  }
  for (std::size_t b = 0; b < n; ++b) out.values[state.kept_products[b]] = z[b];

  if (iterations >= 2) {
    const auto now = ranks_of(kp);
    const auto before = ranks_of(state.k_product[static_cast<std::size_t>(iterations - 2)]);
    double shift = 0.0;
    for (std::size_t b = 0; b < n; ++b)
      shift += std::abs(static_cast<double>(now[b]) - static_cast<double>(before[b]));
    out.ranking_change = shift / static_cast<double>(n) / static_cast<double>(n);
  }
  return out;
}

}  // namespace prodspace::metrics
