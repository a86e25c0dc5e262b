#include "prodspace/annotation.hpp"

namespace prodspace {

std::string_view to_string(Tier tier) noexcept {
  switch (tier) {
    case Tier::Strong:
      return "strong";
    case Tier::Marginal:
      return "marginal";
    case Tier::Absent:
      return "absent";
  }
  return "absent";
}

std::string_view to_string(Growth growth) noexcept {
  switch (growth) {
    case Growth::Increased:
      return "increased";
    case Growth::Decreased:
      return "decreased";
    case Growth::Flat:
      return "flat";
  }
  return "flat";
}

Tier tier_for(double rca) noexcept {
  if (rca >= 1.0) return Tier::Strong;
  if (rca >= 0.1) return Tier::Marginal;
  return Tier::Absent;
}

}  // namespace prodspace
