#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace prodspace {

/// RCA tier of a product for one country: Strong (>= 1), Marginal (>= 0.1),
/// Absent (< 0.1). Bounds are inclusive.
enum class Tier { Strong, Marginal, Absent };

enum class Growth { Increased, Decreased, Flat };

std::string_view to_string(Tier tier) noexcept;
std::string_view to_string(Growth growth) noexcept;
Tier tier_for(double rca) noexcept;

/// Per-node decoration for one country view. Decile 1 is the closest
/// (highest density) tenth of the eligible products.
struct NodeAnnotation {
  std::string product;
  std::optional<Tier> tier;
  std::optional<double> size_value;  // thousands of USD
  std::optional<Growth> growth;
  std::optional<int> decile;

  friend bool operator==(const NodeAnnotation&, const NodeAnnotation&) = default;
};

}  // namespace prodspace
