#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prodspace/metrics.hpp"
#include "prodspace/trade_data.hpp"

namespace prodspace::integration {

enum class CombineMode { MaxRca, PooledExports };

std::string_view to_string(CombineMode mode) noexcept;
CombineMode parse_combine_mode(std::string_view text);

struct ScenarioSpec {
  std::vector<std::string> members;
  CombineMode mode = CombineMode::MaxRca;
  double rca_threshold = 1.0;  // binarization of member and regional rows
  double rca_cutoff_for_candidates = 0.5;
  std::size_t top_n = 150;

  /// Throws InvalidArgument: fewer than two members, duplicates, or
  /// non-positive cutoffs.
  void validate() const;
};

/// Element-wise maximum of member RCA rows.
std::vector<double> combine_max_rca(std::span<const std::span<const double>> rows);

/// Treats the members as one exporter (sum of their rows) and recomputes
/// Balassa RCA against the unchanged world totals.
std::vector<double> combine_pooled_exports(std::span<const std::string> members,
                                           const trade::ExportMatrix& m);

/// Density of the regional row minus density of the member row.
std::vector<double> density_delta(std::span<const std::uint8_t> member_row,
                                  std::span<const std::uint8_t> regional_row,
                                  const metrics::ProximityMatrix& phi);

struct GainEntry {
  std::string product;
  std::string name;
  double delta = 0.0;
  double member_density = 0.0;
  double regional_density = 0.0;
  bool zero_gain = false;
};

/// Products whose member RCA is below `cutoff`, by delta descending then
/// code, truncated to n. Zero deltas are kept and flagged.
std::vector<GainEntry> rank_density_gains(std::span<const std::string> products,
                                          std::span<const double> deltas,
                                          std::span<const double> member_density,
                                          std::span<const double> member_rca,
                                          double cutoff, std::size_t n,
                                          const trade::ProductRegistry* registry = nullptr);

struct SectorBreakdown {
  /// Indexed by SectorClass.
  std::array<double, 3> fractions{};
  std::size_t count = 0;  // entries actually classified
  std::size_t requested = 0;
};

SectorBreakdown sector_decomposition(std::span<const GainEntry> ranked, std::size_t top_n);

struct MemberResult {
  std::string country;
  std::vector<std::uint8_t> m_row;
  std::vector<double> density;  // own density before integration
  std::vector<double> deltas;
  std::vector<GainEntry> ranking;
  SectorBreakdown decomposition;
};

struct ScenarioResult {
  ScenarioSpec spec;
  int year = 0;
  std::vector<std::string> products;
  std::vector<double> regional_rca;
  std::vector<std::uint8_t> regional_m_row;
  std::vector<double> regional_density;
  std::vector<MemberResult> members;
};

/// Runs the whole exercise. `exports` and `phi` may have different product
/// orderings; everything is aligned on phi's products.
ScenarioResult run_scenario(const ScenarioSpec& spec, const trade::ExportMatrix& exports,
                            const metrics::ProximityMatrix& phi,
                            const trade::ProductRegistry& registry);

std::string scenario_json(const ScenarioResult& result);

/// Two columns (code, name) per member, one row per rank.
std::string rankings_csv(const ScenarioResult& result);

}  // namespace prodspace::integration
