// Acceptance suite: one PASS/FAIL/SKIP line per criterion. Exit status is
// non-zero when any criterion fails.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "prodspace/error.hpp"
#include "prodspace/integration.hpp"
#include "prodspace/metrics.hpp"
#include "prodspace/product_space.hpp"
#include "prodspace/trade_data.hpp"
#include "prodspace/views.hpp"
#include "support/fixtures.hpp"
#include "support/oracle.hpp"
#include "support/pipeline.hpp"

using namespace prodspace;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double peak_rss_mb() {
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  return static_cast<double>(ru.ru_maxrss) / 1024.0;  // ru_maxrss is in KiB on Linux
}

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::string detail;
};

/// Collects mismatches; the first few are kept for the report.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (notes_.size() < 5) notes_.push_back(what);
  }
  void close(double got, double want, double tol, const std::string& what) {
    expect(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)),
           fmt::format("{}: got {:.17g}, want {:.17g}", what, got, want));
  }
  bool ok() const { return failures_ == 0; }
  std::size_t checks() const { return checks_; }
  std::string notes() const {
    std::string s;
    for (const auto& n : notes_) s += "; " + n;
    return s;
  }

 private:
  std::size_t checks_ = 0, failures_ = 0;
  std::vector<std::string> notes_;
};

Verdict from(const Checker& c, const std::string& summary) {
  return {c.ok() ? Outcome::Pass : Outcome::Fail,
          fmt::format("{} ({} checks){}", summary, c.checks(), c.notes())};
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<std::size_t> rows(1, 12), cols(1, 15);
  std::uniform_real_distribution<double> fill(0.15, 0.8);
  Checker ck;
  constexpr double kTol = 1e-12;
  int empty_worlds = 0;

  for (int trial = 0; trial < 200; ++trial) {
    const auto x = fixtures::random_exports(rng, rows(rng), cols(rng), fill(rng));
    const auto grid = fixtures::to_grid(x.values);
    const auto tag = [&](const char* what) { return fmt::format("trial {} {}", trial, what); };

    double world = 0.0;
    for (const auto& row : grid) world = std::accumulate(row.begin(), row.end(), world);
    if (world <= 0.0) {
      ++empty_worlds;
      bool threw = false;
      try {
        metrics::rca(x);
      } catch (const DataError&) {
        threw = true;
      }
      ck.expect(threw, tag("empty world must be rejected"));
      continue;
    }

    const auto r = metrics::rca(x);
    const auto r_ref = oracle::rca(grid);
    for (std::size_t c = 0; c < grid.size(); ++c)
      for (std::size_t p = 0; p < grid[c].size(); ++p) ck.close(r.values(c, p), r_ref[c][p], kTol, tag("rca"));

    const auto m = metrics::binarize(r, 1.0);
    const auto m_ref = oracle::binarize(r_ref, 1.0);
    ck.expect(fixtures::to_bits(m.bits) == m_ref, tag("M"));

    const auto div = metrics::diversification(m);
    const auto ubi = metrics::ubiquity(m);
    for (std::size_t c = 0; c < m_ref.size(); ++c)
      ck.expect(div[c] == static_cast<std::size_t>(std::accumulate(m_ref[c].begin(), m_ref[c].end(), 0)),
                tag("diversification"));
    for (std::size_t p = 0; p < ubi.size(); ++p) {
      std::size_t s = 0;
      for (const auto& row : m_ref) s += row[p];
      ck.expect(ubi[p] == s, tag("ubiquity"));
    }

    const auto phi = metrics::proximity(m);
    const auto phi_ref = oracle::proximity(m_ref);
    for (std::size_t i = 0; i < phi_ref.size(); ++i)
      for (std::size_t j = 0; j < phi_ref.size(); ++j)
        ck.close(phi.values(i, j), phi_ref[i][j], kTol, tag("proximity"));

    const auto all = metrics::density_all(m, phi);
    for (std::size_t c = 0; c < m_ref.size(); ++c) {
      const auto [omega, isolated] = oracle::density(m_ref[c], phi_ref);
      const auto d = metrics::density(x.countries[c], m.bits.row(c), phi);
      for (std::size_t p = 0; p < omega.size(); ++p) {
        ck.close(d.values[p], omega[p], kTol, tag("density"));
        ck.close(all(c, p), omega[p], kTol, tag("density_all"));
        ck.expect(d.isolated[p] == isolated[p], tag("isolated flag"));
      }
    }

    const int depth = 8;
    const auto ref = oracle::reflections(m_ref, depth);
    if (ref.countries.empty() || ref.products.empty()) {
      bool threw = false;
      try {
        metrics::reflections(m, depth);
      } catch (const DataError&) {
        threw = true;
      }
      ck.expect(threw, tag("empty M must be rejected by reflections"));
      continue;
    }
    const auto s = metrics::reflections(m, depth);
    ck.expect(s.kept_countries == ref.countries && s.kept_products == ref.products, tag("kept sets"));
    for (int n = 0; n <= depth; ++n) {
      for (std::size_t a = 0; a < ref.kc[n].size(); ++a)
        ck.close(s.k_country[n][a], ref.kc[n][a], kTol, tag("k_c"));
      for (std::size_t b = 0; b < ref.kp[n].size(); ++b)
        ck.close(s.k_product[n][b], ref.kp[n][b], kTol, tag("k_p"));
    }
  }
  const double secs = seconds_since(t0);
  ck.expect(secs < 10.0, fmt::format("runtime {:.2f}s exceeds 10s", secs));
  return from(ck, fmt::format("200 matrices, {} with zero world total, {:.2f}s", empty_worlds, secs));
}

// ---------------------------------------------------------------------------

Verdict toy1_values() {
  Checker ck;
  constexpr double kTol = 1e-9;
  const auto x = fixtures::toy1();
  const auto r = metrics::rca(x);
  ck.close(r.values(0, 0), 6.0, kTol, "RCA A,p");
  ck.close(r.values(1, 0), 3.0, kTol, "RCA B,p");
  ck.close(r.values(1, 1), 3.0, kTol, "RCA B,q");
  ck.close(r.values(2, 2), 4.0 / 3.0, kTol, "RCA C,r");

  const auto m = metrics::binarize(r, 1.0);
  const auto phi = metrics::proximity(m);
  ck.close(phi.values(0, 1), 0.5, kTol, "phi(p,q)");
  const auto dA = metrics::density("A", m.bits.row(0), phi);
  ck.close(dA.values[1], 1.0, kTol, "omega A,q");

  const auto refl = metrics::reflections(m, 1);
  const std::vector<double> kp1 = {1.5, 2.0, 1.0};
  for (std::size_t p = 0; p < 3; ++p) ck.close(refl.k_product[1][p], kp1[p], kTol, "k_p,1");

  const auto soph = metrics::sophistication(m, 1);
  const double z = std::sqrt(1.5);
  const std::vector<double> want = {0.0, z, -z};
  for (std::size_t p = 0; p < 3; ++p) {
    ck.expect(soph.values[p].has_value(), "sophistication defined");
    if (soph.values[p]) ck.close(*soph.values[p], want[p], kTol, "z-score");
  }

  const std::vector<std::string> ab = {"A", "B"};
  ck.close(integration::combine_pooled_exports(ab, x)[0], 4.0, kTol, "pooled RCA_p");

  integration::ScenarioSpec spec;
  spec.members = {"A", "C"};
  const auto res = integration::run_scenario(spec, x, phi, {});
  ck.close(res.members[1].deltas[1], 1.0, kTol, "delta omega C,q");
  return from(ck, "RCA 6/3/4:3, phi 0.5, omega 1, k_p,1, z-scores, pooled RCA 4, delta 1");
}

// ---------------------------------------------------------------------------

Verdict invariants() {
  Checker ck;
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);

  for (int trial = 0; trial < 60; ++trial) {
    const auto x = fixtures::random_exports(rng, 3 + rng() % 10, 3 + rng() % 13, 0.5);
    const auto grid = fixtures::to_grid(x.values);
    double world = 0.0;
    std::vector<double> product_totals(x.products.size(), 0.0);
    for (const auto& row : grid)
      for (std::size_t p = 0; p < row.size(); ++p) {
        world += row[p];
        product_totals[p] += row[p];
      }
    if (world <= 0.0) continue;
    const auto r = metrics::rca(x);

    // Share identity.
    for (std::size_t c = 0; c < x.countries.size(); ++c) {
      if (r.empty_countries[c]) continue;
      double s = 0.0;
      for (std::size_t p = 0; p < x.products.size(); ++p) s += product_totals[p] / world * r.values(c, p);
      ck.close(s, 1.0, 1e-9, "sum of worldshare*RCA");
    }

    // Scale invariance.
    auto scaled = x;
    const double k = scale(rng);
    for (double& v : scaled.values.data()) v *= k;
    const auto rs = metrics::rca(scaled);
    for (std::size_t i = 0; i < r.values.data().size(); ++i)
      ck.close(rs.values.data()[i], r.values.data()[i], 1e-12, "RCA scale invariance");

    // Proximity symmetry and the two conditional bounds.
    const auto m = metrics::binarize(r, 1.0);
    const auto phi = metrics::proximity(m);
    const auto bits = fixtures::to_bits(m.bits);
    const std::size_t np = x.products.size();
    for (std::size_t i = 0; i < np; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        ck.expect(phi.values(i, j) == phi.values(j, i), "proximity symmetry");
        if (i == j) continue;
        int both = 0, ni = 0, nj = 0;
        for (const auto& row : bits) {
          ni += row[i];
          nj += row[j];
          both += row[i] && row[j];
        }
        if (ni) ck.expect(phi.values(i, j) <= static_cast<double>(both) / ni + 1e-15, "phi <= P(j|i)");
        if (nj) ck.expect(phi.values(i, j) <= static_cast<double>(both) / nj + 1e-15, "phi <= P(i|j)");
      }
    }

    // Density range and monotonicity under bit flips 0 -> 1.
    for (std::size_t c = 0; c < x.countries.size(); ++c) {
      auto row = std::vector<std::uint8_t>(m.bits.row(c).begin(), m.bits.row(c).end());
      auto before = metrics::density("c", row, phi).values;
      for (int flip = 0; flip < 4; ++flip) {
        const std::size_t p = rng() % np;
        if (row[p]) continue;
        row[p] = 1;
        const auto after = metrics::density("c", row, phi).values;
        for (std::size_t q = 0; q < np; ++q) {
          ck.expect(after[q] >= 0.0 && after[q] <= 1.0, "density in [0,1]");
          ck.expect(after[q] >= before[q], "density monotone in M row");
        }
        before = after;
      }
    }

    // Scenario: delta >= 0 and regional M = OR of member rows.
    if (x.countries.size() >= 3) {
      integration::ScenarioSpec spec;
      spec.members = {x.countries[0], x.countries[1], x.countries[2]};
      const auto res = integration::run_scenario(spec, x, phi, {});
      std::vector<std::uint8_t> joined(np, 0);
      for (const auto& mem : res.members) {
        for (std::size_t p = 0; p < np; ++p) joined[p] |= mem.m_row[p];
        for (double d : mem.deltas) ck.expect(d >= 0.0, "delta omega >= 0");
      }
      ck.expect(res.regional_m_row == joined, "regional M = OR of members");
    }

    // Percolation curve.
    std::vector<double> grid_t;
    for (int s = 1; s <= 20; ++s) grid_t.push_back(s / 20.0);
    const auto curve = space::percolation_sweep(phi, grid_t);
    for (std::size_t s = 1; s < curve.size(); ++s) {
      ck.expect(curve[s].giant_fraction <= curve[s - 1].giant_fraction, "giant fraction non-increasing");
      ck.expect(curve[s].edge_count <= curve[s - 1].edge_count, "edge count non-increasing");
    }
  }

  using trade::SectorClass;
  const std::pair<const char*, SectorClass> bounds[] = {
      {"279999", SectorClass::AgricultureAndFood}, {"280000", SectorClass::Other},
      {"499999", SectorClass::Other},              {"500000", SectorClass::TextilesAndGarments},
      {"679999", SectorClass::TextilesAndGarments}, {"680000", SectorClass::Other}};
  for (const auto& [code, want] : bounds)
    ck.expect(trade::classify_sector(code) == want, fmt::format("sector of {}", code));

  return from(ck, "share identity, scale invariance, proximity bounds, density monotonicity, "
                  "scenario, percolation, sector boundaries");
}

// ---------------------------------------------------------------------------

Verdict determinism() {
  const auto a = fixtures::temp_dir("accept-a");
  const auto b = fixtures::temp_dir("accept-b");
  Checker ck;
  try {
    const auto first = pipeline::run_all(a, 11);
    const auto second = pipeline::run_all(b, 11);
    for (const auto& [name, body] : first) {
      ck.expect(!body.empty(), name + " is empty");
      ck.expect(second.at(name) == body, name + " differs between runs");
    }
  } catch (const std::exception& e) {
    ck.expect(false, e.what());
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return from(ck, "table CSV, opportunity CSV, GEXF, layout and scenario JSON byte-identical");
}

// ---------------------------------------------------------------------------

Verdict performance() {
  constexpr std::size_t kCountries = 232, kProducts = 5109;
  std::mt19937_64 rng(99);
  std::bernoulli_distribution one(0.10);
  metrics::MMatrix m;
  m.countries = fixtures::codes("C", kCountries);
  m.products = fixtures::codes("P", kProducts);
  m.bits = DenseMatrix<std::uint8_t>(kCountries, kProducts, 0);
  std::size_t ones = 0;
  for (auto& b : m.bits.data()) ones += (b = one(rng) ? 1 : 0);

  Checker ck;
  auto t0 = Clock::now();
  const auto phi = metrics::proximity(m);
  const double t_phi = seconds_since(t0);
  t0 = Clock::now();
  const auto dens = metrics::density_all(m, phi);
  const double t_dens = seconds_since(t0);
  const double peak = peak_rss_mb();

  ck.expect(phi.values.rows() == kProducts && dens.rows() == kCountries, "result shape");
  ck.expect(t_phi < 60.0, fmt::format("proximity took {:.2f}s", t_phi));
  ck.expect(peak < 2048.0, fmt::format("peak RSS {:.0f} MiB", peak));
  ck.expect(t_dens < 5.0, fmt::format("density took {:.2f}s", t_dens));
  return from(ck, fmt::format("{}x{} at {:.1f}% ones: proximity {:.2f}s, density(all) {:.2f}s, peak RSS {:.0f} MiB, "
                              "{} hardware threads",
                              kCountries, kProducts, 100.0 * ones / (kCountries * kProducts), t_phi,
                              t_dens, peak, std::thread::hardware_concurrency()));
}

// ---------------------------------------------------------------------------
// Full-data regression; only runs when PS_BACI_DIR points at the BACI
// 2000-2005 release (trade CSVs plus the country and product code tables).

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return v[i] < v[j]; });
    std::vector<double> r(v.size());
    for (std::size_t k = 0; k < idx.size();) {
      std::size_t e = k;
      while (e + 1 < idx.size() && v[idx[e + 1]] == v[idx[k]]) ++e;
      for (std::size_t t = k; t <= e; ++t) r[idx[t]] = (k + e) / 2.0;
      k = e + 1;
    }
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

Verdict baci_regression() {
  const char* env = std::getenv("PS_BACI_DIR");
  if (!env || !fs::is_directory(env))
    return {Outcome::Skip, "set PS_BACI_DIR to the BACI 2000-2005 directory to run"};

  std::vector<fs::path> trade_files;
  std::optional<fs::path> country_file, product_file;
  for (const auto& e : fs::directory_iterator(env)) {
    const auto name = e.path().filename().string();
    if (e.path().extension() != ".csv") continue;
    if (name.find("country_codes") != std::string::npos) country_file = e.path();
    else if (name.find("product_codes") != std::string::npos) product_file = e.path();
    else trade_files.push_back(e.path());
  }
  std::sort(trade_files.begin(), trade_files.end());
  if (trade_files.empty() || !country_file)
    return {Outcome::Skip, "PS_BACI_DIR lacks trade files or country_codes*.csv"};

  Checker ck;
  const auto countries = trade::CountryRegistry::load(*country_file);
  const auto products = product_file ? trade::ProductRegistry::load(*product_file) : trade::ProductRegistry{};
  trade::IngestFormat format;
  format.countries = &countries;
  const std::vector<int> years = {2000, 2001, 2002, 2003, 2004, 2005};
  trade::ExportAccumulator acc(years);
  for (const auto& f : trade_files) {
    std::ifstream in(f, std::ios::binary);
    trade::scan_trade_records(in, format, [&](trade::TradeRecord&& r) { acc.add(r); });
  }
  const auto x = acc.finish();
  const auto& x2000 = x.front();
  const auto& x2005 = x.back();

  std::vector<metrics::RcaMatrix> rcas;
  std::vector<metrics::ProximityMatrix> phis;
  for (const auto& xy : x) rcas.push_back(metrics::rca(xy));
  for (std::size_t y = 3; y < x.size(); ++y) phis.push_back(metrics::proximity(metrics::binarize(rcas[y])));
  const auto phi = metrics::average_proximity(phis);
  const auto m2005 = metrics::binarize(rcas.back());
  const auto soph = metrics::sophistication(m2005, 18);

  const auto share = metrics::export_shares(x2005, "KEN");
  const auto tea = *x2005.product_index("090240");
  ck.close(share.values[tea] * 100.0, 14.60, 0.05 / 14.60, "KEN 090240 share 2005 (%)");
  const auto ken = *rcas.back().country_index("KEN");
  ck.close(rcas.back().values(ken, tea), 835.0, 0.02, "KEN 090240 RCA 2005");

  const auto dens = metrics::density("KEN", m2005.bits.row(*m2005.country_index("KEN")), phi);
  const auto profile = views::build_profile("KEN", x2000, x2005, rcas.front(), rcas.back(), dens, soph, products);
  const auto opp = views::opportunity_table(profile, 1);
  ck.expect(!opp.empty() && opp[0].product == "071490",
            "KEN top opportunity " + (opp.empty() ? std::string("-") : opp[0].product));
  if (!opp.empty()) ck.close(opp[0].density, 0.1659, 0.05, "KEN top opportunity density");

  integration::ScenarioSpec spec;
  spec.members = {"KEN", "MOZ", "RWA", "TZA", "ZMB"};
  const auto res = integration::run_scenario(spec, x2005, phi, products);
  for (const auto& mem : res.members) {
    if (mem.country == "MOZ")
      ck.expect(!mem.ranking.empty() && mem.ranking[0].product == "130214",
                "MOZ top gain " + (mem.ranking.empty() ? std::string("-") : mem.ranking[0].product));
    if (mem.country != "RWA")
      ck.expect(mem.decomposition.fractions[0] > 0.5,
                fmt::format("{} agriculture share {:.2f}", mem.country, mem.decomposition.fractions[0]));
  }

  // Kenya's 30 largest exports in 2005 with their published sophistication.
  static const std::pair<const char*, double> kReference[] = {
      {"090240", -2.480}, {"060310", -1.860}, {"271000", -1.243}, {"620462", -1.859},
      {"090111", -2.903}, {"070820", -2.000}, {"070810", -1.718}, {"200820", -1.986},
      {"160414", -2.529}, {"620342", -1.739}, {"030420", -1.776}, {"252329", -1.349},
      {"060210", -1.617}, {"283620", -0.220}, {"200559", -1.011}, {"070990", -2.076},
      {"080440", -0.665}, {"030410", -2.063}, {"721049", -0.073}, {"080290", -2.022},
      {"210120", -0.274}, {"300490", 0.496},  {"610462", -2.233}, {"252922", -1.546},
      {"200940", -1.430}, {"410110", -1.772}, {"130214", -2.640}, {"720918", -0.816},
      {"611020", -2.245}, {"121190", -2.209}};
  std::vector<double> ours, theirs;
  for (const auto& [code, value] : kReference) {
    const auto p = std::find(soph.products.begin(), soph.products.end(), code);
    if (p == soph.products.end() || !soph.values[p - soph.products.begin()]) continue;
    ours.push_back(*soph.values[p - soph.products.begin()]);
    theirs.push_back(value);
  }
  const double rho = ours.size() >= 3 ? spearman(ours, theirs) : 0.0;
  ck.expect(rho >= 0.8, fmt::format("sophistication Spearman {:.3f} over {} products", rho, ours.size()));
  return from(ck, fmt::format("{} trade files, Spearman {:.3f}", trade_files.size(), rho));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Verdict()> run;
  };
  // Performance runs first so the peak-memory reading is not inflated by
  // anything else.
  const std::vector<Criterion> criteria = {
      {"performance", performance},
      {"oracle-equivalence", oracle_equivalence},
      {"toy1-fixture", toy1_values},
      {"invariants", invariants},
      {"determinism", determinism},
      {"full-data-regression", baci_regression},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {Outcome::Fail, std::string("exception: ") + e.what()};
    }
    const char* label = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Fail ? "FAIL" : "SKIP";
    if (v.outcome == Outcome::Fail) ++failed;
    std::cout << label << "  " << c.name << "  " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
