#pragma once

// Per-definition reference computations on plain nested vectors. Nothing in
// here touches the library kernels; the tests compare the two.

#include <algorithm>
#include <cstddef>
#include <vector>

namespace oracle {

using Grid = std::vector<std::vector<double>>;
using Bits = std::vector<std::vector<int>>;

inline Grid rca(const Grid& x) {
  const std::size_t nc = x.size();
  const std::size_t np = nc ? x[0].size() : 0;
  double world = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t p = 0; p < np; ++p) world += x[c][p];
  Grid out(nc, std::vector<double>(np, 0.0));
  for (std::size_t c = 0; c < nc; ++c) {
    double country_total = 0.0;
    for (std::size_t p = 0; p < np; ++p) country_total += x[c][p];
    for (std::size_t p = 0; p < np; ++p) {
      double product_total = 0.0;
      for (std::size_t k = 0; k < nc; ++k) product_total += x[k][p];
      if (country_total <= 0.0 || product_total <= 0.0) continue;
      out[c][p] = (x[c][p] / country_total) / (product_total / world);
    }
  }
  return out;
}

inline Bits binarize(const Grid& r, double threshold) {
  Bits out(r.size());
  for (std::size_t c = 0; c < r.size(); ++c)
    for (double v : r[c]) out[c].push_back(v >= threshold ? 1 : 0);
  return out;
}

/// min(P(i|j), P(j|i)) by counting exporters; zero if either product has no
/// exporter. Diagonal 1.
inline Grid proximity(const Bits& m) {
  const std::size_t nc = m.size();
  const std::size_t np = nc ? m[0].size() : 0;
  Grid out(np, std::vector<double>(np, 0.0));
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      if (i == j) {
        out[i][j] = 1.0;
        continue;
      }
      int both = 0, has_i = 0, has_j = 0;
      for (std::size_t c = 0; c < nc; ++c) {
        has_i += m[c][i];
        has_j += m[c][j];
        both += m[c][i] && m[c][j];
      }
      if (has_i == 0 || has_j == 0) continue;
      const double i_given_j = static_cast<double>(both) / has_j;
      const double j_given_i = static_cast<double>(both) / has_i;
      out[i][j] = std::min(i_given_j, j_given_i);
    }
  }
  return out;
}

/// Returns {omega, isolated}.
inline std::pair<std::vector<double>, std::vector<bool>> density(const std::vector<int>& row,
                                                                 const Grid& phi) {
  const std::size_t np = row.size();
  std::vector<double> omega(np, 0.0);
  std::vector<bool> isolated(np, false);
  for (std::size_t p = 0; p < np; ++p) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      if (j == p) continue;
      num += row[j] * phi[p][j];
      den += phi[p][j];
    }
    if (den == 0.0) {
      isolated[p] = true;
    } else {
      omega[p] = num / den;
    }
  }
  return {omega, isolated};
}

struct Reflections {
  std::vector<std::size_t> countries, products;  // kept original indices
  std::vector<std::vector<double>> kc, kp;      // [n][kept index]
};

inline Reflections reflections(const Bits& m, int depth) {
  Reflections out;
  const std::size_t nc = m.size();
  const std::size_t np = nc ? m[0].size() : 0;
  for (std::size_t c = 0; c < nc; ++c) {
    int s = 0;
    for (std::size_t p = 0; p < np; ++p) s += m[c][p];
    if (s > 0) out.countries.push_back(c);
  }
  for (std::size_t p = 0; p < np; ++p) {
    int s = 0;
    for (std::size_t c = 0; c < nc; ++c) s += m[c][p];
    if (s > 0) out.products.push_back(p);
  }
  std::vector<double> kc0, kp0;
  for (auto c : out.countries) {
    double s = 0;
    for (auto p : out.products) s += m[c][p];
    kc0.push_back(s);
  }
  for (auto p : out.products) {
    double s = 0;
    for (auto c : out.countries) s += m[c][p];
    kp0.push_back(s);
  }
  out.kc.push_back(kc0);
  out.kp.push_back(kp0);
  for (int n = 1; n <= depth; ++n) {
    std::vector<double> kc(out.countries.size()), kp(out.products.size());
    for (std::size_t a = 0; a < out.countries.size(); ++a) {
      double s = 0;
      for (std::size_t b = 0; b < out.products.size(); ++b)
        if (m[out.countries[a]][out.products[b]]) s += out.kp[n - 1][b];
      kc[a] = s / kc0[a];
    }
    for (std::size_t b = 0; b < out.products.size(); ++b) {
      double s = 0;
      for (std::size_t a = 0; a < out.countries.size(); ++a)
        if (m[out.countries[a]][out.products[b]]) s += out.kc[n - 1][a];
      kp[b] = s / kp0[b];
    }
    out.kc.push_back(kc);
    out.kp.push_back(kp);
  }
  return out;
}

}  // namespace oracle
