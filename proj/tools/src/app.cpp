#include "prodspace/cli/app.hpp"

#include <cstdlib>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "lock.hpp"
#include "prodspace/version.hpp"

namespace prodspace::cli {

namespace {

std::vector<std::string> split_list(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto comma = item.find(',', start);
      const auto piece = item.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      if (!piece.empty()) out.push_back(piece);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Product-space analysis of bilateral trade data", "prodspace"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", std::string(kVersion));

  std::optional<std::string> config_path;
  ConfigOverrides flags;
  unsigned threads = 0;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--data-dir", flags.data_dir, "Cache directory (default: $PS_DATA_DIR or ./data)");
  app.add_option("--years", flags.years, "Inclusive year range A:B");
  app.add_option("--rca-threshold", flags.rca_threshold, "RCA cut for the M matrix (default 1)");
  app.add_option("--proximity-threshold", flags.proximity_threshold,
                 "Edge cut for the product space (default 0.45)");
  app.add_option("--opportunity-cutoff", flags.opportunity_cutoff,
                 "RCA below which a product counts as not exported (default 0.1)");
  app.add_option("--candidate-cutoff", flags.candidate_cutoff,
                 "RCA below which a product is a scenario candidate (default 0.5)");
  app.add_option("--reflections", flags.reflections_n, "Method-of-reflections depth (default 18)");
  app.add_option("--seed", flags.seed, "Seed for the graph layout");
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  app.add_flag("-q,--quiet", quiet, "Suppress progress messages");
  app.fallthrough();

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse a bilateral trade table into the export cache");
  c_ingest->add_option("--input", ingest.input, "Trade CSV (BACI t,i,j,k,v,q or named columns)")->required();
  c_ingest->add_option("--countries", ingest.countries, "Country registry CSV: code,iso3,name");
  c_ingest->add_option("--products", ingest.products, "Product registry CSV: hs6,name");
  c_ingest->add_option("--delimiter", ingest.delimiter, "Field delimiter (default: detect)");
  c_ingest->add_flag("--strict", ingest.strict, "Fail if any row is rejected");

  MetricsOptions metrics;
  auto* c_metrics = app.add_subcommand("metrics", "Compute RCA, proximity, density and sophistication caches");
  c_metrics->add_option("--stage", metrics.stage, "rca | proximity | density | sophistication | all");

  GraphOptions graph;
  auto* c_graph = app.add_subcommand("graph", "Export the product space graph");
  c_graph->add_option("--threshold", flags.proximity_threshold, "Proximity cut (same as --proximity-threshold)");
  c_graph->add_option("--format", graph.format, "csv | json | gexf");
  c_graph->add_option("--comparator", graph.comparator, "inclusive (>=) | strict (>)");
  c_graph->add_flag("--sweep", graph.sweep, "Also write the percolation curve");
  c_graph->add_option("--sweep-steps", graph.sweep_steps, "Grid points in (0, 1] for --sweep");
  c_graph->add_flag("--layout", graph.layout, "Compute a seeded force-directed layout");
  c_graph->add_option("--layout-iterations", graph.layout_iterations, "Layout iterations");
  c_graph->add_option("--country", graph.country, "Annotate nodes for this country");
  c_graph->add_option("--view", graph.view, "rca | exports | opportunities");
  c_graph->add_option("--out", graph.out, "Output directory");

  ViewsOptions view;
  auto* c_views = app.add_subcommand("views", "Country tables, annotations and scatter data");
  c_views->add_option("kind", view.kind, "table | opportunities | annotate | scatter")->required();
  c_views->add_option("--country", view.country, "Country code");
  c_views->add_option("--sort", view.sort, "value | rca (table)");
  c_views->add_option("--top", view.top, "Rows to keep (default 30)");
  c_views->add_option("--year", view.year, "Analysis year (default: last cached)");
  c_views->add_option("--base-year", view.base_year, "Comparison year (default: first cached)");
  c_views->add_flag("--sophisticated", view.soph_filter, "Opportunities above average sophistication only");
  c_views->add_option("--view", view.view, "rca | exports | opportunities (annotate)");
  std::vector<std::string> owners_raw;
  c_views->add_option("--owners", owners_raw, "Comma-separated countries (scatter)");
  c_views->add_flag("--with-region", view.with_region, "Add the combined owners as REGION (scatter)");
  c_views->add_option("--cutoff", flags.opportunity_cutoff, "Same as --opportunity-cutoff");
  c_views->add_option("--out", view.out, "Output directory");

  IntegrateOptions integrate;
  auto* c_integrate = app.add_subcommand("integrate", "Run a regional integration scenario");
  std::vector<std::string> members_raw;
  c_integrate->add_option("--members", members_raw, "Comma-separated member countries")->required();
  c_integrate->add_option("--mode", integrate.mode, "max-rca | pooled");
  c_integrate->add_option("--top", integrate.top, "Gains kept per member (default 150)");
  c_integrate->add_option("--year", integrate.year, "Analysis year (default: last cached)");
  c_integrate->add_option("--cutoff", flags.candidate_cutoff, "Same as --candidate-cutoff");
  c_integrate->add_option("--out", integrate.out, "Output directory");

  ReportOptions report;
  auto* c_report = app.add_subcommand("report", "Bundle tables, graph and scenario for one country");
  c_report->add_option("--country", report.country, "Country code")->required();
  std::vector<std::string> report_members;
  c_report->add_option("--members", report_members, "Optional scenario members");
  c_report->add_option("--top", report.top, "Table rows (default 30)");
  c_report->add_option("--out", report.out, "Output directory");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  Context ctx;
  ctx.out = &out;
  ctx.err = &err;
  ctx.quiet = quiet;
  ctx.threads = threads;
  try {
    std::optional<std::string> env;
    if (const char* v = std::getenv("PS_DATA_DIR")) env = v;
    ctx.config = resolve_config(config_path ? std::optional<fs::path>(*config_path) : std::nullopt,
                                flags, env, [&](const std::string& m) { ctx.warn(m); });
    ctx.config_json = config_json(ctx.config);
    view.owners = split_list(owners_raw);
    integrate.members = split_list(members_raw);
    report.members = split_list(report_members);

    DirLock lock(ctx.config.data_dir);
    if (c_ingest->parsed()) return cmd_ingest(ctx, ingest);
    if (c_metrics->parsed()) return cmd_metrics(ctx, metrics);
    if (c_graph->parsed()) return cmd_graph(ctx, graph);
    if (c_views->parsed()) return cmd_views(ctx, view);
    if (c_integrate->parsed()) return cmd_integrate(ctx, integrate);
    if (c_report->parsed()) return cmd_report(ctx, report);
    return kUsage;
  } catch (const MissingPrerequisite& e) {
    err << "prodspace: " << e.what() << '\n';
    return kMissingCache;
  } catch (const InvalidArgument& e) {
    err << "prodspace: " << e.what() << '\n';
    return kUsage;
  } catch (const NotFound& e) {
    err << "prodspace: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "prodspace: invalid data: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "prodspace: error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace prodspace::cli
