#include "prodspace/cli/config.hpp"

#include <cmath>

#include <fmt/format.h>

#include "json.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::cli {

using nlohmann::json;

std::vector<int> YearRange::list() const {
  std::vector<int> out;
  for (int y = first; y <= last; ++y) out.push_back(y);
  return out;
}

YearRange parse_year_range(std::string_view text) {
  const auto colon = text.find(':');
  long long a = 0, b = 0;
  const bool ok = colon == std::string_view::npos
                      ? csv::parse_int(text, a) && (b = a, true)
                      : csv::parse_int(text.substr(0, colon), a) &&
                            csv::parse_int(text.substr(colon + 1), b);
  if (!ok) throw InvalidArgument(fmt::format("invalid year range '{}' (expected A:B)", text));
  if (a > b) throw InvalidArgument(fmt::format("year range '{}' is empty", text));
  return {static_cast<int>(a), static_cast<int>(b)};
}

std::string to_string(const YearRange& years) {
  return fmt::format("{}:{}", years.first, years.last);
}

void RunConfig::validate() const {
  auto unit = [](const char* name, double v) {
    if (!(v > 0.0 && v <= 1.0))
      throw InvalidArgument(fmt::format("{} must lie in (0, 1], got {}", name, v));
  };
  if (!(rca_threshold > 0.0) || !std::isfinite(rca_threshold))
    throw InvalidArgument(fmt::format("rca_threshold must be positive, got {}", rca_threshold));
  unit("proximity_threshold", proximity_threshold);
  if (!(opportunity_cutoff > 0.0) || !std::isfinite(opportunity_cutoff))
    throw InvalidArgument("opportunity_cutoff must be positive");
  if (!(candidate_cutoff > 0.0) || !std::isfinite(candidate_cutoff))
    throw InvalidArgument("candidate_cutoff must be positive");
  if (reflections_n < 0) throw InvalidArgument("reflections_n must be non-negative");
  if (years && years->first > years->last) throw InvalidArgument("years must be non-empty");
}

ConfigOverrides parse_config_text(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("config file must hold a JSON object");

  ConfigOverrides c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "data_dir") c.data_dir = value.get<std::string>();
      else if (key == "years") {
        if (value.is_array()) {
          const auto ys = value.get<std::vector<int>>();
          if (ys.size() != 2) throw InvalidArgument("config 'years' must be [first, last]");
          c.years = fmt::format("{}:{}", ys[0], ys[1]);
        } else if (value.is_number_integer()) {
          c.years = std::to_string(value.get<int>());
        } else {
          c.years = value.get<std::string>();
        }
      }
      else if (key == "rca_threshold") c.rca_threshold = value.get<double>();
      else if (key == "proximity_threshold") c.proximity_threshold = value.get<double>();
      else if (key == "opportunity_cutoff") c.opportunity_cutoff = value.get<double>();
      else if (key == "candidate_cutoff") c.candidate_cutoff = value.get<double>();
      else if (key == "reflections_n") c.reflections_n = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw InvalidArgument(fmt::format("unknown config key '{}'", key));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad value in config file: ") + e.what());
  }
  return c;
}

namespace {

template <typename T>
std::string show(const T& v) {
  if constexpr (std::is_same_v<T, std::string>) return v;
  else if constexpr (std::is_floating_point_v<T>) return csv::format_double(v);
  else return std::to_string(v);
}

template <typename T>
void merge(const char* flag, const std::optional<T>& from_flag, const std::optional<T>& from_file,
           T& target, const WarningSink& warn) {
  if (from_file) target = *from_file;
  if (from_flag) {
    if (from_file && !(*from_file == *from_flag) && warn)
      warn(fmt::format("--{} {} overrides config file value {}", flag, show(*from_flag),
                       show(*from_file)));
    target = *from_flag;
  }
}

}  // namespace

RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                         const ConfigOverrides& flags,
                         const std::optional<std::string>& env_data_dir,
                         const WarningSink& warn) {
  ConfigOverrides file;
  if (config_file) {
    if (!std::filesystem::exists(*config_file))
      throw InvalidArgument("config file not found: " + config_file->string());
    file = parse_config_text(csv::read_file(*config_file));
  }

  RunConfig cfg;
  std::string data_dir = cfg.data_dir.string();
  if (env_data_dir && !env_data_dir->empty()) {
    // The environment outranks the file but stays below an explicit flag.
    file.data_dir = *env_data_dir;
  }
  merge("data-dir", flags.data_dir, file.data_dir, data_dir, warn);
  cfg.data_dir = data_dir;

  std::string years;
  merge("years", flags.years, file.years, years, warn);
  if (!years.empty()) cfg.years = parse_year_range(years);

  merge("rca-threshold", flags.rca_threshold, file.rca_threshold, cfg.rca_threshold, warn);
  merge("proximity-threshold", flags.proximity_threshold, file.proximity_threshold,
        cfg.proximity_threshold, warn);
  merge("opportunity-cutoff", flags.opportunity_cutoff, file.opportunity_cutoff,
        cfg.opportunity_cutoff, warn);
  merge("candidate-cutoff", flags.candidate_cutoff, file.candidate_cutoff, cfg.candidate_cutoff,
        warn);
  merge("reflections", flags.reflections_n, file.reflections_n, cfg.reflections_n, warn);
  merge("seed", flags.seed, file.seed, cfg.seed, warn);
  cfg.validate();
  return cfg;
}

}  // namespace prodspace::cli
