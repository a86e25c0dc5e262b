#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "prodspace/cli/config.hpp"
#include "prodspace/cli/manifest.hpp"
#include "prodspace/error.hpp"
#include "prodspace/metrics.hpp"
#include "prodspace/trade_data.hpp"

namespace prodspace::cli {

namespace fs = std::filesystem;

/// A cache the command depends on has not been built yet (exit code 3).
struct MissingPrerequisite : Error {
  using Error::Error;
};

struct Context {
  RunConfig config;
  std::string config_json;  // resolved config as recorded in manifests
  unsigned threads = 0;
  bool quiet = false;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;

  void info(const std::string& msg) const;
  void warn(const std::string& msg) const;
};

std::string config_json(const RunConfig& cfg);

fs::path ingest_dir(const RunConfig& cfg);
fs::path metrics_dir(const RunConfig& cfg, const std::string& stage);
fs::path default_out_dir(const RunConfig& cfg, const std::string& name);

/// Digest of a file, labelled by its path relative to `base` when inside it.
FileDigest digest(const fs::path& base, const fs::path& file);

RunManifest require_manifest(const fs::path& dir, const std::string& hint);

std::string join_years(const std::vector<int>& years);
std::vector<int> split_years(const std::string& text);

/// Years present in the ingest cache.
std::vector<int> ingested_years(const RunConfig& cfg);
/// Years the metrics stages cover: the configured range (which must have been
/// ingested) or everything ingested.
std::vector<int> metric_years(const RunConfig& cfg);
/// Years covered by the RCA stage cache.
std::vector<int> cached_metric_years(const RunConfig& cfg);

trade::ExportMatrix load_exports(const RunConfig& cfg, int year);
FileDigest exports_digest(const RunConfig& cfg, int year);
trade::ProductRegistry load_products(const RunConfig& cfg);
std::vector<FileDigest> registry_digests(const RunConfig& cfg);

metrics::RcaMatrix load_rca(const RunConfig& cfg, int year);
metrics::MMatrix load_m(const RunConfig& cfg, int year);
metrics::ProximityMatrix load_proximity(const RunConfig& cfg);
metrics::SophisticationVector load_sophistication(const RunConfig& cfg);
FileDigest rca_digest(const RunConfig& cfg, int year);
FileDigest m_digest(const RunConfig& cfg, int year);
FileDigest proximity_digest(const RunConfig& cfg);
FileDigest sophistication_digest(const RunConfig& cfg);

std::string sophistication_json(const metrics::SophisticationVector& soph, int year);
metrics::SophisticationVector parse_sophistication(const std::string& text);

using TextOutputs = std::vector<std::pair<std::string, std::string>>;

/// Runs `produce` into `dir` unless the manifest there already matches
/// `expected`; on success records output digests in a fresh manifest. Returns
/// false on a cache hit.
bool run_cached(const Context& ctx, const fs::path& dir, RunManifest expected,
                const std::function<std::vector<std::string>()>& produce);

/// Same, for commands whose outputs are in-memory text files.
bool emit_cached(const Context& ctx, const fs::path& dir, RunManifest expected,
                 const std::function<TextOutputs()>& produce);

RunManifest base_manifest(const Context& ctx, const std::string& command);

}  // namespace prodspace::cli
