#include "commands.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "prodspace/annotation.hpp"
#include "prodspace/csv.hpp"
#include "prodspace/integration.hpp"
#include "prodspace/product_space.hpp"
#include "prodspace/tile.hpp"
#include "prodspace/views.hpp"

namespace prodspace::cli {

namespace {

std::string flag(bool b) { return b ? "true" : "false"; }
std::string num(double v) { return csv::format_double(v); }

char parse_delimiter(const std::string& text) {
  if (text == "tab" || text == "\\t" || text == "\t") return '\t';
  if (text == "comma") return ',';
  if (text.size() != 1) throw InvalidArgument("delimiter must be a single character, 'tab' or 'comma'");
  return text[0];
}

void copy_or_drop(const std::optional<std::string>& src, const fs::path& dst,
                  std::vector<std::string>& names) {
  if (src) {
    fs::copy_file(*src, dst, fs::copy_options::overwrite_existing);
    names.push_back(dst.filename().string());
  } else {
    fs::remove(dst);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const Context& ctx, const IngestOptions& opt) {
  const auto& cfg = ctx.config;
  if (!cfg.years)
    throw InvalidArgument("ingest needs a year range: pass --years A:B or set \"years\" in the config");
  const fs::path input = opt.input;
  if (!fs::exists(input)) throw InvalidArgument("input file not found: " + input.string());
  for (const auto& reg : {opt.countries, opt.products})
    if (reg && !fs::exists(*reg)) throw InvalidArgument("registry file not found: " + *reg);

  const auto years = cfg.years->list();
  const char delim = opt.delimiter ? parse_delimiter(*opt.delimiter) : 0;
  const auto dir = ingest_dir(cfg);

  auto expected = base_manifest(ctx, "ingest");
  expected.params["years"] = join_years(years);
  expected.params["strict"] = flag(opt.strict);
  expected.params["delimiter"] = opt.delimiter.value_or("auto");
  expected.inputs.push_back(digest(cfg.data_dir, input));
  if (opt.countries) expected.inputs.push_back(digest(cfg.data_dir, *opt.countries));
  if (opt.products) expected.inputs.push_back(digest(cfg.data_dir, *opt.products));

  run_cached(ctx, dir, expected, [&] {
    trade::CountryRegistry countries;
    if (opt.countries) countries = trade::CountryRegistry::load(fs::path(*opt.countries));
    if (opt.products) trade::ProductRegistry::load(fs::path(*opt.products));  // fail early if malformed

    trade::IngestFormat format;
    format.delimiter = delim;
    format.min_year = years.front();
    format.max_year = years.back();
    format.countries = opt.countries ? &countries : nullptr;

    std::ifstream in(input, std::ios::binary);
    if (!in) throw IoError("cannot read " + input.string());
    trade::ExportAccumulator acc(years);
    std::size_t accepted = 0;
    const auto issues = trade::scan_trade_records(in, format, [&](trade::TradeRecord&& r) {
      acc.add(r);
      ++accepted;
    });

    std::vector<std::string> names;
    csv::write_file(dir / "ingest_errors.csv", trade::format_issues_csv(issues));
    names.push_back("ingest_errors.csv");
    const auto errors = static_cast<std::size_t>(std::count_if(
        issues.begin(), issues.end(), [](const auto& i) { return i.severity == trade::Severity::Error; }));
    const auto warnings = issues.size() - errors;
    if (errors > 0)
      ctx.warn(fmt::format("{} rows rejected; see {}", errors, (dir / "ingest_errors.csv").string()));
    if (opt.strict && errors > 0)
      throw DataError(fmt::format("--strict: {} invalid rows in {}", errors, input.string()));

    const auto mats = acc.finish();
    for (const auto& m : mats) {
      const auto report = trade::validate_matrix(m);
      if (!report.ok()) throw DataError(fmt::format("export matrix for {} failed validation", m.year));
      if (!report.empty_countries.empty())
        ctx.warn(fmt::format("{}: {} countries export nothing", m.year, report.empty_countries.size()));
      trade::write_export_cache(dir, m);
      names.push_back(trade::export_cache_path(dir, m.year).filename().string());
      names.push_back(trade::export_manifest_path(dir, m.year).filename().string());
    }
    copy_or_drop(opt.products, dir / "products.csv", names);
    copy_or_drop(opt.countries, dir / "countries.csv", names);

    ctx.info(fmt::format("ingested {} records ({} rejected, {} warnings): {} countries x {} products, years {}",
                         accepted, errors, warnings, mats.front().countries.size(),
                         mats.front().products.size(), to_string(*cfg.years)));
    return names;
  });
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

namespace {

std::string tile_name(const char* kind, int year) { return fmt::format("{}_{}", kind, year); }

std::vector<std::string> tile_files(const std::string& name) { return {name + ".bin", name + ".json"}; }

void stage_rca(const Context& ctx, const std::vector<int>& years) {
  const auto& cfg = ctx.config;
  auto expected = base_manifest(ctx, "metrics rca");
  expected.params["years"] = join_years(years);
  expected.params["rca_threshold"] = num(cfg.rca_threshold);
  for (int y : years) expected.inputs.push_back(exports_digest(cfg, y));

  const auto dir = metrics_dir(cfg, "rca");
  run_cached(ctx, dir, expected, [&] {
    std::vector<std::string> names;
    for (int y : years) {
      const auto r = metrics::rca(load_exports(cfg, y));
      const auto m = metrics::binarize(r, cfg.rca_threshold);
      const std::map<std::string, std::string> params = {{"year", std::to_string(y)}};
      tile::save(dir, tile_name("rca", y), r, params);
      tile::save(dir, tile_name("m", y), m, params);
      for (const char* kind : {"rca", "m"})
        for (auto& f : tile_files(tile_name(kind, y))) names.push_back(std::move(f));
      const auto empty = std::count(r.empty_countries.begin(), r.empty_countries.end(), true);
      ctx.info(fmt::format("rca {}: {} countries x {} products ({} without exports)", y,
                           r.countries.size(), r.products.size(), empty));
    }
    return names;
  });
}

void stage_proximity(const Context& ctx, const std::vector<int>& years) {
  const auto& cfg = ctx.config;
  auto expected = base_manifest(ctx, "metrics proximity");
  expected.params["years"] = join_years(years);
  for (int y : years) expected.inputs.push_back(m_digest(cfg, y));

  const auto dir = metrics_dir(cfg, "proximity");
  run_cached(ctx, dir, expected, [&] {
    std::vector<metrics::ProximityMatrix> per_year;
    for (int y : years) per_year.push_back(metrics::proximity(load_m(cfg, y), ctx.threads));
    const auto phi = per_year.size() == 1 ? std::move(per_year.front())
                                          : metrics::average_proximity(per_year);
    tile::save(dir, "proximity", phi, {{"years", join_years(years)}, {"averaging", "mean-of-years"}});
    ctx.info(fmt::format("proximity: {} products, averaged over {} year(s)", phi.products.size(),
                         years.size()));
    return tile_files("proximity");
  });
}

void stage_density(const Context& ctx, const std::vector<int>& years) {
  const auto& cfg = ctx.config;
  const int year = years.back();
  auto expected = base_manifest(ctx, "metrics density");
  expected.params["year"] = std::to_string(year);
  expected.inputs.push_back(m_digest(cfg, year));
  expected.inputs.push_back(proximity_digest(cfg));

  const auto dir = metrics_dir(cfg, "density");
  run_cached(ctx, dir, expected, [&] {
    const auto m = load_m(cfg, year);
    const auto phi = load_proximity(cfg);
    const auto dens = metrics::density_all(m, phi, ctx.threads);
    tile::Manifest tm;
    tm.kind = "density";
    tm.row_labels = m.countries;
    tm.col_labels = phi.products;
    tm.params = {{"year", std::to_string(year)}};
    const auto name = tile_name("density", year);
    tile::write(dir, name, dens, tm);
    ctx.info(fmt::format("density {}: {} countries", year, m.countries.size()));
    return tile_files(name);
  });
}

void stage_sophistication(const Context& ctx, const std::vector<int>& years) {
  const auto& cfg = ctx.config;
  const int year = years.back();
  auto expected = base_manifest(ctx, "metrics sophistication");
  expected.params["year"] = std::to_string(year);
  expected.params["reflections_n"] = std::to_string(cfg.reflections_n);
  expected.inputs.push_back(m_digest(cfg, year));

  const auto dir = metrics_dir(cfg, "sophistication");
  run_cached(ctx, dir, expected, [&] {
    const auto soph = metrics::sophistication(load_m(cfg, year), cfg.reflections_n);
    if (soph.degenerate) ctx.warn("sophistication has zero variance; all values set to 0");
    csv::write_file(dir / "sophistication.json", sophistication_json(soph, year));
    ctx.info(fmt::format("sophistication {}: N={}{}", year, soph.iterations,
                         soph.ranking_change
                             ? fmt::format(", mean rank change vs N-2 = {:.3g}", *soph.ranking_change)
                             : std::string()));
    return std::vector<std::string>{"sophistication.json"};
  });
}

}  // namespace

int cmd_metrics(const Context& ctx, const MetricsOptions& opt) {
  static const std::set<std::string> kStages = {"rca", "proximity", "density", "sophistication",
                                                "all"};
  if (!kStages.count(opt.stage))
    throw InvalidArgument("unknown stage '" + opt.stage +
                          "' (expected rca, proximity, density, sophistication or all)");
  const auto years = metric_years(ctx.config);
  const bool all = opt.stage == "all";
  stage_rca(ctx, years);
  if (all || opt.stage == "proximity" || opt.stage == "density") stage_proximity(ctx, years);
  if (all || opt.stage == "density") stage_density(ctx, years);
  if (all || opt.stage == "sophistication") stage_sophistication(ctx, years);
  return 0;
}

// ---------------------------------------------------------------------------
// shared view plumbing

namespace {

struct Years {
  int base = 0;
  int year = 0;
};

Years resolve_years(const RunConfig& cfg, std::optional<int> year, std::optional<int> base) {
  const auto have = cached_metric_years(cfg);
  Years y{base.value_or(have.front()), year.value_or(have.back())};
  for (int v : {y.base, y.year}) {
    if (std::find(have.begin(), have.end(), v) == have.end())
      throw MissingPrerequisite(fmt::format(
          "year {} is not in the metrics cache (holds {}); run `prodspace metrics --years A:B` covering it",
          v, join_years(have)));
  }
  return y;
}

metrics::DensityVector country_density(const metrics::MMatrix& m, const metrics::ProximityMatrix& phi,
                                       const std::string& country) {
  if (m.products != phi.products)
    throw IoError("M and proximity caches disagree on products; rerun `prodspace metrics`");
  const auto c = m.country_index(country);
  if (!c) throw NotFound("unknown country '" + country + "'");
  return metrics::density(country, m.bits.row(*c), phi);
}

/// Everything a per-country table needs, loaded from the caches.
struct CountryInputs {
  Years years;
  std::vector<FileDigest> digests;
  views::CountryProfile profile;
  metrics::RcaMatrix rca_y1;
  metrics::DensityVector density;
};

CountryInputs load_country(const RunConfig& cfg, const std::string& country, Years y) {
  CountryInputs in;
  in.years = y;
  in.digests = {exports_digest(cfg, y.base), exports_digest(cfg, y.year), rca_digest(cfg, y.base),
                rca_digest(cfg, y.year),     m_digest(cfg, y.year),      proximity_digest(cfg),
                sophistication_digest(cfg)};
  for (auto& d : registry_digests(cfg)) in.digests.push_back(std::move(d));

  const auto x0 = load_exports(cfg, y.base);
  const auto x1 = load_exports(cfg, y.year);
  const auto r0 = load_rca(cfg, y.base);
  in.rca_y1 = load_rca(cfg, y.year);
  const auto phi = load_proximity(cfg);
  in.density = country_density(load_m(cfg, y.year), phi, country);
  const auto soph = load_sophistication(cfg);
  in.profile = views::build_profile(country, x0, x1, r0, in.rca_y1, in.density, soph, load_products(cfg));
  return in;
}

std::vector<NodeAnnotation> annotation_view(const RunConfig& cfg, const std::string& view,
                                            const std::string& country, Years y,
                                            std::vector<FileDigest>& digests) {
  if (view == "rca") {
    digests.push_back(rca_digest(cfg, y.year));
    return views::rca_view(country, load_rca(cfg, y.year));
  }
  if (view == "exports") {
    digests.push_back(exports_digest(cfg, y.base));
    digests.push_back(exports_digest(cfg, y.year));
    return views::export_value_view(country, load_exports(cfg, y.base), load_exports(cfg, y.year));
  }
  if (view == "opportunities") {
    digests.push_back(rca_digest(cfg, y.year));
    digests.push_back(m_digest(cfg, y.year));
    digests.push_back(proximity_digest(cfg));
    const auto dens = country_density(load_m(cfg, y.year), load_proximity(cfg), country);
    return views::opportunities_view(country, dens, load_rca(cfg, y.year), cfg.opportunity_cutoff);
  }
  throw InvalidArgument("unknown view '" + view + "' (expected rca, exports or opportunities)");
}

void dedupe(std::vector<FileDigest>& digests) {
  std::vector<FileDigest> out;
  for (auto& d : digests)
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  digests = std::move(out);
}

views::TableSort parse_sort(const std::string& s) {
  if (s == "value") return views::TableSort::ByValue;
  if (s == "rca") return views::TableSort::ByRca;
  throw InvalidArgument("unknown sort '" + s + "' (expected value or rca)");
}

space::Comparator parse_comparator(const std::string& s) {
  if (s == "inclusive") return space::Comparator::Inclusive;
  if (s == "strict") return space::Comparator::Strict;
  throw InvalidArgument("unknown comparator '" + s + "' (expected inclusive or strict)");
}

std::vector<double> sweep_grid(int steps) {
  if (steps < 1) throw InvalidArgument("--sweep-steps must be positive");
  std::vector<double> grid;
  for (int k = 1; k <= steps; ++k) grid.push_back(static_cast<double>(k) / steps);
  return grid;
}

struct GraphBuild {
  TextOutputs files;
  std::vector<FileDigest> digests;
};

/// Builds the product-space export (plus optional sweep and layout files).
GraphBuild build_graph_outputs(const Context& ctx, const std::string& stem, space::ExportFormat format,
                               space::Comparator comparator, bool sweep, int sweep_steps,
                               bool with_layout, int layout_iterations,
                               const std::vector<NodeAnnotation>& annotations) {
  const auto& cfg = ctx.config;
  GraphBuild out;
  out.digests.push_back(proximity_digest(cfg));
  const auto phi = load_proximity(cfg);
  auto g = space::build_graph(phi, cfg.proximity_threshold, comparator);

  std::optional<metrics::SophisticationVector> soph;
  if (fs::exists(metrics_dir(cfg, "sophistication") / "sophistication.json")) {
    out.digests.push_back(sophistication_digest(cfg));
    soph = load_sophistication(cfg);
  }
  for (auto& d : registry_digests(cfg)) out.digests.push_back(std::move(d));
  space::attach_attributes(g, load_products(cfg), soph ? &*soph : nullptr);

  const std::size_t giant = g.components.empty() ? 0 : g.components.front().size();
  ctx.info(fmt::format("product space at {} ({}): {} nodes, {} edges, giant component {}, {} isolated",
                       num(cfg.proximity_threshold),
                       comparator == space::Comparator::Inclusive ? ">=" : ">", g.nodes.size(),
                       g.edges.size(), giant, g.isolated.size()));

  std::optional<space::LayoutResult> coords;
  if (with_layout) {
    space::LayoutOptions lo;
    lo.iterations = layout_iterations;
    coords = space::layout(g, cfg.seed, lo);
    out.files.emplace_back("layout.csv", space::layout_csv(g, *coords));
  }
  out.files.emplace_back(stem + std::string(space::file_extension(format)),
                         space::export_graph(g, annotations, format, coords ? &*coords : nullptr));
  if (sweep) {
    const auto grid = sweep_grid(sweep_steps);
    const auto curve = space::percolation_sweep(phi, grid, comparator);
    if (const auto t = space::percolation_threshold(curve))
      ctx.info(fmt::format("percolation: giant component holds >= half the products up to threshold {}", num(*t)));
    else
      ctx.info("percolation: the giant component never reaches half the products on this grid");
    out.files.emplace_back("percolation.csv", space::percolation_csv(curve));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// graph

int cmd_graph(const Context& ctx, const GraphOptions& opt) {
  const auto& cfg = ctx.config;
  const auto format = space::parse_export_format(opt.format);
  const auto comparator = parse_comparator(opt.comparator);

  auto expected = base_manifest(ctx, "graph");
  expected.params["threshold"] = num(cfg.proximity_threshold);
  expected.params["format"] = opt.format;
  expected.params["comparator"] = opt.comparator;
  expected.params["sweep"] = opt.sweep ? std::to_string(opt.sweep_steps) : "off";
  expected.params["layout"] = opt.layout ? std::to_string(opt.layout_iterations) : "off";
  if (opt.layout) expected.params["seed"] = std::to_string(cfg.seed);

  std::vector<NodeAnnotation> annotations;
  if (opt.country) {
    const auto y = resolve_years(cfg, std::nullopt, std::nullopt);
    annotations = annotation_view(cfg, opt.view, *opt.country, y, expected.inputs);
    expected.params["country"] = *opt.country;
    expected.params["view"] = opt.view;
    if (opt.view == "opportunities") expected.params["opportunity_cutoff"] = num(cfg.opportunity_cutoff);
  }

  // Digests must be known before deciding whether this is a cache hit.
  expected.inputs.push_back(proximity_digest(cfg));
  if (fs::exists(metrics_dir(cfg, "sophistication") / "sophistication.json"))
    expected.inputs.push_back(sophistication_digest(cfg));
  for (auto& d : registry_digests(cfg)) expected.inputs.push_back(std::move(d));
  dedupe(expected.inputs);

  const fs::path dir = opt.out ? fs::path(*opt.out) : default_out_dir(cfg, "graph");
  emit_cached(ctx, dir, expected, [&] {
    return build_graph_outputs(ctx, "product_space", format, comparator, opt.sweep, opt.sweep_steps,
                               opt.layout, opt.layout_iterations, annotations)
        .files;
  });
  return 0;
}

// ---------------------------------------------------------------------------
// views

int cmd_views(const Context& ctx, const ViewsOptions& opt) {
  const auto& cfg = ctx.config;
  auto expected = base_manifest(ctx, "views " + opt.kind);
  const auto y = resolve_years(cfg, opt.year, opt.base_year);
  expected.params["year"] = std::to_string(y.year);
  expected.params["base_year"] = std::to_string(y.base);

  auto need_country = [&]() -> const std::string& {
    if (!opt.country) throw InvalidArgument("views " + opt.kind + " needs --country");
    expected.params["country"] = *opt.country;
    return *opt.country;
  };

  std::string stem;
  std::function<TextOutputs()> produce;
  if (opt.kind == "table" || opt.kind == "opportunities") {
    const auto& country = need_country();
    const bool table = opt.kind == "table";
    const auto sort = parse_sort(opt.sort);
    if (opt.top <= 0) throw InvalidArgument("--top must be positive");
    expected.params["top"] = std::to_string(opt.top);
    if (table) {
      expected.params["sort"] = opt.sort;
      stem = fmt::format("table_{}_by_{}", country, opt.sort);
    } else {
      expected.params["opportunity_cutoff"] = num(cfg.opportunity_cutoff);
      expected.params["sophistication_filter"] = flag(opt.soph_filter);
      stem = fmt::format("opportunities_{}{}", country, opt.soph_filter ? "_sophisticated" : "");
    }
    auto in = std::make_shared<CountryInputs>(load_country(cfg, country, y));
    expected.inputs = in->digests;
    produce = [=, &cfg]() -> TextOutputs {
      const auto rows = table ? views::top_exports_table(in->profile, sort, opt.top)
                              : views::opportunity_table(in->profile, opt.top, opt.soph_filter,
                                                         cfg.opportunity_cutoff);
      return {{stem + ".csv", views::table_csv(rows, y.base, y.year)}};
    };
  } else if (opt.kind == "annotate") {
    const auto& country = need_country();
    expected.params["view"] = opt.view;
    if (opt.view == "opportunities") expected.params["opportunity_cutoff"] = num(cfg.opportunity_cutoff);
    auto ann = std::make_shared<std::vector<NodeAnnotation>>(
        annotation_view(cfg, opt.view, country, y, expected.inputs));
    stem = fmt::format("annotations_{}_{}", country, opt.view);
    produce = [=]() -> TextOutputs { return {{stem + ".csv", views::annotations_csv(*ann)}}; };
  } else if (opt.kind == "scatter") {
    if (opt.owners.empty()) throw InvalidArgument("views scatter needs --owners");
    expected.params["owners"] = fmt::format("{}", fmt::join(opt.owners, ","));
    expected.params["with_region"] = flag(opt.with_region);
    expected.params["opportunity_cutoff"] = num(cfg.opportunity_cutoff);
    expected.inputs = {rca_digest(cfg, y.year), m_digest(cfg, y.year), proximity_digest(cfg),
                       sophistication_digest(cfg)};
    stem = "scatter";
    produce = [&]() -> TextOutputs {
      const auto m = load_m(cfg, y.year);
      const auto r = load_rca(cfg, y.year);
      const auto phi = load_proximity(cfg);
      std::vector<views::ScatterOwner> owners;
      for (const auto& code : opt.owners) {
        const auto c = m.country_index(code);
        const auto rc = r.country_index(code);
        if (!c || !rc) throw NotFound("unknown country '" + code + "'");
        const auto mrow = m.bits.row(*c);
        const auto rrow = r.values.row(*rc);
        owners.push_back({code, {mrow.begin(), mrow.end()}, {rrow.begin(), rrow.end()}});
      }
      if (opt.with_region) {
        views::ScatterOwner region{"REGION", owners.front().m_row, owners.front().rca_row};
        for (const auto& o : owners) {
          for (std::size_t p = 0; p < region.m_row.size(); ++p) {
            region.m_row[p] |= o.m_row[p];
            region.rca_row[p] = std::max(region.rca_row[p], o.rca_row[p]);
          }
        }
        owners.push_back(std::move(region));
      }
      const auto points = views::density_sophistication_scatter(owners, phi, load_sophistication(cfg),
                                                                 cfg.opportunity_cutoff);
      return {{"scatter.csv", views::scatter_csv(points)}};
    };
  } else {
    throw InvalidArgument("unknown view kind '" + opt.kind +
                          "' (expected table, opportunities, annotate or scatter)");
  }
  dedupe(expected.inputs);

  const fs::path dir = opt.out ? fs::path(*opt.out) : default_out_dir(cfg, stem);
  emit_cached(ctx, dir, expected, produce);
  return 0;
}

// ---------------------------------------------------------------------------
// integrate

namespace {

integration::ScenarioSpec scenario_spec(const RunConfig& cfg, std::vector<std::string> members,
                                        const std::string& mode, int top) {
  if (top <= 0) throw InvalidArgument("--top must be positive");
  integration::ScenarioSpec spec;
  spec.members = std::move(members);
  spec.mode = integration::parse_combine_mode(mode);
  spec.rca_threshold = cfg.rca_threshold;
  spec.rca_cutoff_for_candidates = cfg.candidate_cutoff;
  spec.top_n = static_cast<std::size_t>(top);
  spec.validate();
  return spec;
}

TextOutputs scenario_outputs(const Context& ctx, const integration::ScenarioSpec& spec, int year) {
  const auto& cfg = ctx.config;
  const auto result = integration::run_scenario(spec, load_exports(cfg, year), load_proximity(cfg),
                                                load_products(cfg));
  for (const auto& m : result.members) {
    const auto& f = m.decomposition.fractions;
    ctx.info(fmt::format("{}: top gain {} (+{:.4f}); top-{} mix agri {:.2f} / textiles {:.2f} / other {:.2f}",
                         m.country, m.ranking.empty() ? "-" : m.ranking.front().product,
                         m.ranking.empty() ? 0.0 : m.ranking.front().delta, spec.top_n, f[0], f[1], f[2]));
  }
  return {{"scenario.json", integration::scenario_json(result)},
          {"rankings.csv", integration::rankings_csv(result)}};
}

}  // namespace

int cmd_integrate(const Context& ctx, const IntegrateOptions& opt) {
  const auto& cfg = ctx.config;
  const auto spec = scenario_spec(cfg, opt.members, opt.mode, opt.top);
  const int year = resolve_years(cfg, opt.year, std::nullopt).year;

  auto expected = base_manifest(ctx, "integrate");
  expected.params["members"] = fmt::format("{}", fmt::join(spec.members, ","));
  expected.params["mode"] = std::string(integration::to_string(spec.mode));
  expected.params["top"] = std::to_string(spec.top_n);
  expected.params["year"] = std::to_string(year);
  expected.params["rca_threshold"] = num(cfg.rca_threshold);
  expected.params["candidate_cutoff"] = num(cfg.candidate_cutoff);
  expected.inputs = {exports_digest(cfg, year), proximity_digest(cfg)};
  for (auto& d : registry_digests(cfg)) expected.inputs.push_back(std::move(d));

  const fs::path dir = opt.out ? fs::path(*opt.out) : default_out_dir(cfg, "integrate");
  emit_cached(ctx, dir, expected, [&] { return scenario_outputs(ctx, spec, year); });
  return 0;
}

// ---------------------------------------------------------------------------
// report

int cmd_report(const Context& ctx, const ReportOptions& opt) {
  const auto& cfg = ctx.config;
  if (opt.top <= 0) throw InvalidArgument("--top must be positive");
  const auto y = resolve_years(cfg, std::nullopt, std::nullopt);
  std::optional<integration::ScenarioSpec> spec;
  if (!opt.members.empty()) spec = scenario_spec(cfg, opt.members, "max-rca", 150);

  auto expected = base_manifest(ctx, "report");
  expected.params["country"] = opt.country;
  expected.params["top"] = std::to_string(opt.top);
  expected.params["year"] = std::to_string(y.year);
  expected.params["base_year"] = std::to_string(y.base);
  expected.params["members"] = fmt::format("{}", fmt::join(opt.members, ","));
  expected.params["threshold"] = num(cfg.proximity_threshold);
  expected.params["opportunity_cutoff"] = num(cfg.opportunity_cutoff);
  expected.params["candidate_cutoff"] = num(cfg.candidate_cutoff);
  expected.params["seed"] = std::to_string(cfg.seed);

  const auto in = load_country(cfg, opt.country, y);
  expected.inputs = in.digests;
  std::vector<NodeAnnotation> opp;
  std::vector<FileDigest> scratch;
  opp = annotation_view(cfg, "opportunities", opt.country, y, scratch);
  for (auto& d : scratch) expected.inputs.push_back(std::move(d));
  if (spec) expected.inputs.push_back(exports_digest(cfg, y.year));
  dedupe(expected.inputs);

  const fs::path dir = opt.out ? fs::path(*opt.out) : default_out_dir(cfg, "report_" + opt.country);
  emit_cached(ctx, dir, expected, [&] {
    TextOutputs files;
    auto table = [&](const std::string& name, const std::vector<views::TableRow>& rows) {
      files.emplace_back(name, views::table_csv(rows, y.base, y.year));
    };
    table("table_by_value.csv", views::top_exports_table(in.profile, views::TableSort::ByValue, opt.top));
    table("table_by_rca.csv", views::top_exports_table(in.profile, views::TableSort::ByRca, opt.top));
    table("opportunities.csv",
          views::opportunity_table(in.profile, opt.top, false, cfg.opportunity_cutoff));
    table("opportunities_sophisticated.csv",
          views::opportunity_table(in.profile, opt.top, true, cfg.opportunity_cutoff));
    files.emplace_back("annotations_opportunities.csv", views::annotations_csv(opp));

    auto graph = build_graph_outputs(ctx, "product_space", space::ExportFormat::Gexf,
                                     space::Comparator::Inclusive, true, 20, true, 300, opp);
    for (auto& f : graph.files) files.push_back(std::move(f));
    if (spec)
      for (auto& f : scenario_outputs(ctx, *spec, y.year)) files.push_back(std::move(f));
    return files;
  });
  return 0;
}

}  // namespace prodspace::cli
