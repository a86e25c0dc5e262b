#include "workspace.hpp"

#include <algorithm>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "prodspace/checksum.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/tile.hpp"
#include "prodspace/version.hpp"

namespace prodspace::cli {

using nlohmann::json;
using nlohmann::ordered_json;

void Context::info(const std::string& msg) const {
  if (!quiet && out) *out << msg << '\n';
}

void Context::warn(const std::string& msg) const {
  if (err) *err << "prodspace: warning: " << msg << '\n';
}

std::string config_json(const RunConfig& cfg) {
  // The data directory is left out on purpose: a manifest must not change
  // when the same inputs are processed from another location.
  ordered_json j;
  j["years"] = cfg.years ? json(to_string(*cfg.years)) : json(nullptr);
  j["rca_threshold"] = cfg.rca_threshold;
  j["proximity_threshold"] = cfg.proximity_threshold;
  j["opportunity_cutoff"] = cfg.opportunity_cutoff;
  j["candidate_cutoff"] = cfg.candidate_cutoff;
  j["reflections_n"] = cfg.reflections_n;
  j["seed"] = cfg.seed;
  return j.dump();
}

fs::path ingest_dir(const RunConfig& cfg) { return cfg.data_dir / "ingest"; }

fs::path metrics_dir(const RunConfig& cfg, const std::string& stage) {
  return cfg.data_dir / "metrics" / stage;
}

fs::path default_out_dir(const RunConfig& cfg, const std::string& name) {
  return cfg.data_dir / "out" / name;
}

FileDigest digest(const fs::path& base, const fs::path& file) {
  if (!fs::exists(file)) throw IoError("missing input file " + file.string());
  std::string label = file.lexically_relative(base).generic_string();
  if (label.empty() || label.rfind("..", 0) == 0) label = file.filename().generic_string();
  return {label, sha256_file(file)};
}

RunManifest require_manifest(const fs::path& dir, const std::string& hint) {
  auto m = read_manifest(dir);
  if (!m) throw MissingPrerequisite(fmt::format("no cache in {}; {}", dir.string(), hint));
  return *m;
}

std::string join_years(const std::vector<int>& years) { return fmt::format("{}", fmt::join(years, ",")); }

std::vector<int> split_years(const std::string& text) {
  std::vector<int> out;
  for (const auto& f : csv::split_line(text, ',')) {
    long long y = 0;
    if (!csv::parse_int(f, y)) throw IoError("bad year list '" + text + "' in manifest");
    out.push_back(static_cast<int>(y));
  }
  return out;
}

namespace {

const char* kIngestHint = "run `prodspace ingest --input <trade.csv> --years A:B` first";
const char* kRcaHint = "run `prodspace metrics --stage rca` first";
const char* kProximityHint = "run `prodspace metrics --stage proximity` first";
const char* kSophHint = "run `prodspace metrics --stage sophistication` first";

std::vector<int> years_param(const RunManifest& m, const fs::path& dir) {
  const auto it = m.params.find("years");
  if (it == m.params.end()) throw IoError("manifest in " + dir.string() + " lists no years");
  return split_years(it->second);
}

}  // namespace

std::vector<int> ingested_years(const RunConfig& cfg) {
  const auto dir = ingest_dir(cfg);
  return years_param(require_manifest(dir, kIngestHint), dir);
}

std::vector<int> metric_years(const RunConfig& cfg) {
  const auto have = ingested_years(cfg);
  if (!cfg.years) return have;
  const auto want = cfg.years->list();
  for (int y : want) {
    if (std::find(have.begin(), have.end(), y) == have.end())
      throw MissingPrerequisite(fmt::format(
          "year {} has not been ingested (cache holds {}); run `prodspace ingest --years {}` first",
          y, join_years(have), to_string(*cfg.years)));
  }
  return want;
}

std::vector<int> cached_metric_years(const RunConfig& cfg) {
  const auto dir = metrics_dir(cfg, "rca");
  return years_param(require_manifest(dir, kRcaHint), dir);
}

trade::ExportMatrix load_exports(const RunConfig& cfg, int year) {
  const auto dir = ingest_dir(cfg);
  if (!fs::exists(trade::export_manifest_path(dir, year)))
    throw MissingPrerequisite(fmt::format("no ingested exports for {}; {}", year, kIngestHint));
  return trade::read_export_cache(dir, year);
}

FileDigest exports_digest(const RunConfig& cfg, int year) {
  const auto path = trade::export_manifest_path(ingest_dir(cfg), year);
  if (!fs::exists(path))
    throw MissingPrerequisite(fmt::format("no ingested exports for {}; {}", year, kIngestHint));
  return digest(cfg.data_dir, path);
}

trade::ProductRegistry load_products(const RunConfig& cfg) {
  const auto path = ingest_dir(cfg) / "products.csv";
  return fs::exists(path) ? trade::ProductRegistry::load(path) : trade::ProductRegistry{};
}

std::vector<FileDigest> registry_digests(const RunConfig& cfg) {
  std::vector<FileDigest> out;
  const auto path = ingest_dir(cfg) / "products.csv";
  if (fs::exists(path)) out.push_back(digest(cfg.data_dir, path));
  return out;
}

namespace {

fs::path tile_json(const fs::path& dir, const std::string& name) { return dir / (name + ".json"); }

void require_tile(const fs::path& dir, const std::string& name, const std::string& hint) {
  if (!fs::exists(tile_json(dir, name)))
    throw MissingPrerequisite(fmt::format("no cached {} in {}; {}", name, dir.string(), hint));
}

}  // namespace

metrics::RcaMatrix load_rca(const RunConfig& cfg, int year) {
  const auto dir = metrics_dir(cfg, "rca");
  const auto name = fmt::format("rca_{}", year);
  require_tile(dir, name, kRcaHint);
  return tile::load_rca(dir, name);
}

metrics::MMatrix load_m(const RunConfig& cfg, int year) {
  const auto dir = metrics_dir(cfg, "rca");
  const auto name = fmt::format("m_{}", year);
  require_tile(dir, name, kRcaHint);
  return tile::load_m(dir, name);
}

metrics::ProximityMatrix load_proximity(const RunConfig& cfg) {
  const auto dir = metrics_dir(cfg, "proximity");
  require_tile(dir, "proximity", kProximityHint);
  return tile::load_proximity(dir, "proximity");
}

metrics::SophisticationVector load_sophistication(const RunConfig& cfg) {
  const auto path = metrics_dir(cfg, "sophistication") / "sophistication.json";
  if (!fs::exists(path)) throw MissingPrerequisite(fmt::format("no cached sophistication; {}", kSophHint));
  return parse_sophistication(csv::read_file(path));
}

FileDigest rca_digest(const RunConfig& cfg, int year) {
  const auto dir = metrics_dir(cfg, "rca");
  const auto name = fmt::format("rca_{}", year);
  require_tile(dir, name, kRcaHint);
  return digest(cfg.data_dir, tile_json(dir, name));
}

FileDigest m_digest(const RunConfig& cfg, int year) {
  const auto dir = metrics_dir(cfg, "rca");
  const auto name = fmt::format("m_{}", year);
  require_tile(dir, name, kRcaHint);
  return digest(cfg.data_dir, tile_json(dir, name));
}

FileDigest proximity_digest(const RunConfig& cfg) {
  const auto dir = metrics_dir(cfg, "proximity");
  require_tile(dir, "proximity", kProximityHint);
  return digest(cfg.data_dir, tile_json(dir, "proximity"));
}

FileDigest sophistication_digest(const RunConfig& cfg) {
  const auto path = metrics_dir(cfg, "sophistication") / "sophistication.json";
  if (!fs::exists(path)) throw MissingPrerequisite(fmt::format("no cached sophistication; {}", kSophHint));
  return digest(cfg.data_dir, path);
}

std::string sophistication_json(const metrics::SophisticationVector& soph, int year) {
  ordered_json j;
  j["format"] = "prodspace-sophistication-v1";
  j["year"] = year;
  j["iterations"] = soph.iterations;
  j["degenerate"] = soph.degenerate;
  j["flipped"] = soph.flipped;
  j["ranking_change"] = soph.ranking_change ? json(*soph.ranking_change) : json(nullptr);
  j["products"] = soph.products;
  ordered_json values = ordered_json::array();
  for (const auto& v : soph.values) values.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
  j["values"] = std::move(values);
  return j.dump(1) + "\n";
}

metrics::SophisticationVector parse_sophistication(const std::string& text) {
  try {
    const auto j = json::parse(text);
    if (j.value("format", "") != "prodspace-sophistication-v1")
      throw IoError("unrecognised sophistication cache format");
    metrics::SophisticationVector s;
    s.iterations = j.at("iterations").get<int>();
    s.degenerate = j.at("degenerate").get<bool>();
    s.flipped = j.at("flipped").get<bool>();
    if (!j.at("ranking_change").is_null()) s.ranking_change = j.at("ranking_change").get<double>();
    s.products = j.at("products").get<std::vector<std::string>>();
    for (const auto& v : j.at("values")) {
      if (v.is_null()) s.values.emplace_back();
      else s.values.emplace_back(v.get<double>());
    }
    if (s.values.size() != s.products.size()) throw IoError("sophistication cache is truncated");
    return s;
  } catch (const json::exception& e) {
    throw IoError(std::string("corrupt sophistication cache: ") + e.what());
  }
}

RunManifest base_manifest(const Context& ctx, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.version = std::string(kVersion);
  m.config = ctx.config_json;
  return m;
}

bool run_cached(const Context& ctx, const fs::path& dir, RunManifest expected,
                const std::function<std::vector<std::string>()>& produce) {
  if (up_to_date(dir, expected)) {
    ctx.info(fmt::format("{}: up to date ({})", expected.command, dir.string()));
    return false;
  }
  fs::create_directories(dir);
  fs::remove(dir / kManifestName);
  auto names = produce();
  std::sort(names.begin(), names.end());
  expected.outputs.clear();
  for (const auto& name : names) expected.outputs.push_back({name, sha256_file(dir / name)});
  write_manifest(dir, expected);
  return true;
}

bool emit_cached(const Context& ctx, const fs::path& dir, RunManifest expected,
                 const std::function<TextOutputs()>& produce) {
  return run_cached(ctx, dir, std::move(expected), [&] {
    std::vector<std::string> names;
    for (const auto& [name, body] : produce()) {
      csv::write_file(dir / name, body);
      ctx.info(fmt::format("wrote {}", (dir / name).string()));
      names.push_back(name);
    }
    return names;
  });
}

}  // namespace prodspace::cli
