#include "prodspace/cli/manifest.hpp"

#include "json.hpp"
#include "prodspace/checksum.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/error.hpp"

namespace prodspace::cli {

using nlohmann::ordered_json;

namespace {

ordered_json digests(const std::vector<FileDigest>& files) {
  ordered_json arr = ordered_json::array();
  for (const auto& f : files) arr.push_back({{"path", f.path}, {"sha256", f.sha256}});
  return arr;
}

std::vector<FileDigest> parse_digests(const ordered_json& arr) {
  std::vector<FileDigest> out;
  for (const auto& f : arr)
    out.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>()});
  return out;
}

}  // namespace

std::string manifest_json(const RunManifest& m) {
  ordered_json doc;
  doc["tool"] = "prodspace";
  doc["version"] = m.version;
  doc["command"] = m.command;
  doc["config"] = m.config.empty() ? ordered_json::object() : ordered_json::parse(m.config);
  doc["params"] = ordered_json::object();
  for (const auto& [k, v] : m.params) doc["params"][k] = v;
  doc["inputs"] = digests(m.inputs);
  doc["outputs"] = digests(m.outputs);
  return doc.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  try {
    const auto doc = ordered_json::parse(text);
    RunManifest m;
    m.version = doc.at("version").get<std::string>();
    m.command = doc.at("command").get<std::string>();
    m.config = doc.at("config").dump();
    for (const auto& [k, v] : doc.at("params").items()) m.params[k] = v.get<std::string>();
    m.inputs = parse_digests(doc.at("inputs"));
    m.outputs = parse_digests(doc.at("outputs"));
    return m;
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
  csv::write_file(dir / kManifestName, manifest_json(m));
}

std::optional<RunManifest> read_manifest(const std::filesystem::path& dir) {
  const auto path = dir / kManifestName;
  if (!std::filesystem::exists(path)) return std::nullopt;
  return parse_manifest(csv::read_file(path));
}

std::vector<std::string> verify_outputs(const std::filesystem::path& dir, const RunManifest& m) {
  std::vector<std::string> bad;
  for (const auto& f : m.outputs) {
    const auto path = dir / f.path;
    if (!std::filesystem::exists(path) || sha256_file(path) != f.sha256) bad.push_back(f.path);
  }
  return bad;
}

bool up_to_date(const std::filesystem::path& dir, const RunManifest& expected) {
  std::optional<RunManifest> have;
  try {
    have = read_manifest(dir);
  } catch (const IoError&) {
    return false;
  }
  if (!have) return false;
  return have->command == expected.command && have->version == expected.version &&
         have->params == expected.params && have->inputs == expected.inputs &&
         !have->outputs.empty() && verify_outputs(dir, *have).empty();
}

}  // namespace prodspace::cli
