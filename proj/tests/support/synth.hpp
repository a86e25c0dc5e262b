#pragma once

// Synthetic bilateral trade tables in the BACI column layout, with enough
// structure (sector-clustered specialisation) that the pipeline produces
// non-trivial proximities, graphs and rankings.

#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace synth {

struct Dataset {
  std::string trade_csv;      // t,i,j,k,v,q
  std::string countries_csv;  // code,iso3,name
  std::string products_csv;   // hs6,name
  std::vector<std::string> iso3;
};

inline Dataset make(std::uint64_t seed, int n_countries = 24, int n_products = 90,
                    int first_year = 2000, int last_year = 2005) {
  std::mt19937_64 rng(seed);
  Dataset d;
  std::ostringstream countries, products, trade;
  countries << "code,iso3,name\n";
  products << "hs6,name\n";
  trade << "t,i,j,k,v,q\n";

  static const char* kNamed[] = {"KEN", "MOZ", "RWA", "TZA", "ZMB"};
  std::vector<int> numeric;
  for (int c = 0; c < n_countries; ++c) {
    const int code = 100 + 4 * c;
    numeric.push_back(code);
    std::string iso = c < 5 ? kNamed[c] : std::string("X") + char('A' + c / 26) + char('A' + c % 26);
    d.iso3.push_back(iso);
    countries << code << ',' << iso << ",Country " << iso << '\n';
  }

  // Spread codes over the three sectors.
  std::vector<int> hs;
  for (int p = 0; p < n_products; ++p) {
    int base = 0;
    switch (p % 3) {
      case 0: base = 10000 + (p / 3) * 2311; break;     // < 280000
      case 1: base = 500000 + (p / 3) * 1709; break;    // textiles
      default: base = 700000 + (p / 3) * 3001; break;   // other
    }
    hs.push_back(base);
    char code[8];
    std::snprintf(code, sizeof code, "%06d", base);
    products << code << ",\"Product " << code << ", synthetic\"\n";
  }

  // Each country leans towards one sector and a random set of products.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::lognormal_distribution<double> size(4.0, 1.5);
  std::vector<std::vector<double>> propensity(n_countries, std::vector<double>(n_products));
  for (int c = 0; c < n_countries; ++c) {
    const int lean = c % 3;
    for (int p = 0; p < n_products; ++p)
      propensity[c][p] = (p % 3 == lean ? 0.55 : 0.12) + 0.1 * unit(rng);
  }

  for (int year = first_year; year <= last_year; ++year) {
    for (int c = 0; c < n_countries; ++c) {
      for (int p = 0; p < n_products; ++p) {
        if (unit(rng) > propensity[c][p]) continue;
        const int partners = 1 + static_cast<int>(unit(rng) * 3);
        for (int k = 0; k < partners; ++k) {
          int j = static_cast<int>(unit(rng) * n_countries);
          if (j == c) j = (j + 1) % n_countries;
          const double v = std::round(size(rng) * 1000.0) / 1000.0;
          trade << year << ',' << numeric[c] << ',' << numeric[j] << ',' << hs[p] << ',' << v
                << ',' << std::round(v * 7.0) / 10.0 << '\n';
        }
      }
    }
  }
  d.trade_csv = trade.str();
  d.countries_csv = countries.str();
  d.products_csv = products.str();
  return d;
}

}  // namespace synth
