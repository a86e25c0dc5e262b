#pragma once

#include <optional>
#include <string>
#include <vector>

#include "workspace.hpp"

namespace prodspace::cli {

struct IngestOptions {
  std::string input;
  std::optional<std::string> countries;
  std::optional<std::string> products;
  std::optional<std::string> delimiter;
  bool strict = false;
};

struct MetricsOptions {
  std::string stage = "all";
};

struct GraphOptions {
  std::optional<double> threshold;
  std::string format = "gexf";
  std::string comparator = "inclusive";
  bool sweep = false;
  int sweep_steps = 20;
  bool layout = false;
  int layout_iterations = 300;
  std::optional<std::string> country;
  std::string view = "opportunities";
  std::optional<std::string> out;
};

struct ViewsOptions {
  std::string kind;  // table | opportunities | annotate | scatter
  std::optional<std::string> country;
  std::string sort = "value";
  int top = 30;
  std::optional<int> year;
  std::optional<int> base_year;
  bool soph_filter = false;
  std::string view = "rca";
  std::vector<std::string> owners;
  bool with_region = false;
  std::optional<std::string> out;
};

struct IntegrateOptions {
  std::vector<std::string> members;
  std::string mode = "max-rca";
  int top = 150;
  std::optional<int> year;
  std::optional<std::string> out;
};

struct ReportOptions {
  std::string country;
  std::vector<std::string> members;
  int top = 30;
  std::optional<std::string> out;
};

int cmd_ingest(const Context& ctx, const IngestOptions& opt);
int cmd_metrics(const Context& ctx, const MetricsOptions& opt);
int cmd_graph(const Context& ctx, const GraphOptions& opt);
int cmd_views(const Context& ctx, const ViewsOptions& opt);
int cmd_integrate(const Context& ctx, const IntegrateOptions& opt);
int cmd_report(const Context& ctx, const ReportOptions& opt);

}  // namespace prodspace::cli
