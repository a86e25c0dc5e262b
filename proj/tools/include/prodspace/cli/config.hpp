#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prodspace::cli {

struct YearRange {
  int first = 0;
  int last = 0;
  std::vector<int> list() const;
  friend bool operator==(const YearRange&, const YearRange&) = default;
};

/// Parses "2003:2005" or a single year "2005".
YearRange parse_year_range(std::string_view text);
std::string to_string(const YearRange& years);

struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::optional<YearRange> years;
  double rca_threshold = 1.0;
  double proximity_threshold = 0.45;
  double opportunity_cutoff = 0.1;
  double candidate_cutoff = 0.5;
  int reflections_n = 18;
  std::uint64_t seed = 1;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Values given on the command line; unset fields fall through to the config
/// file, then to the defaults.
struct ConfigOverrides {
  std::optional<std::string> data_dir;
  std::optional<std::string> years;
  std::optional<double> rca_threshold;
  std::optional<double> proximity_threshold;
  std::optional<double> opportunity_cutoff;
  std::optional<double> candidate_cutoff;
  std::optional<int> reflections_n;
  std::optional<std::uint64_t> seed;
};

using WarningSink = std::function<void(const std::string&)>;

/// Resolution order: flag, then config file, then defaults. The data directory
/// additionally honours PS_DATA_DIR (passed in as `env_data_dir`) between the
/// flag and the config file. A flag that contradicts the config file wins and
/// produces a warning.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                         const ConfigOverrides& flags,
                         const std::optional<std::string>& env_data_dir,
                         const WarningSink& warn);

/// Parses a JSON config document. Unknown keys are rejected.
ConfigOverrides parse_config_text(std::string_view text);

}  // namespace prodspace::cli
