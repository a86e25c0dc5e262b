#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace prodspace::cli {

struct FileDigest {
  std::string path;  // relative to the manifest's directory or the data directory
  std::string sha256;
  friend bool operator==(const FileDigest&, const FileDigest&) = default;
};

/// Provenance record written as `manifest.json` next to a command's outputs.
/// Deliberately free of timestamps and absolute paths so identical runs give
/// identical manifests.
struct RunManifest {
  std::string command;
  std::string version;
  /// Full resolved configuration (serialized JSON object text).
  std::string config;
  /// The parameters this output actually depends on; used for cache hits.
  std::map<std::string, std::string> params;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
};

inline constexpr const char* kManifestName = "manifest.json";

std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest(const std::string& text);
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
std::optional<RunManifest> read_manifest(const std::filesystem::path& dir);

/// Output files whose checksum no longer matches (or that are missing).
std::vector<std::string> verify_outputs(const std::filesystem::path& dir, const RunManifest& m);

/// True when `dir` already holds a manifest for the same command, version,
/// params and inputs, and every listed output still verifies.
bool up_to_date(const std::filesystem::path& dir, const RunManifest& expected);

}  // namespace prodspace::cli
