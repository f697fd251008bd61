#include "svcnet/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <set>
#include <sstream>

#include "svcnet/antipattern.hpp"
#include "svcnet/log.hpp"

namespace svcnet {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_real(std::string_view key, std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(text) + "'");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::optional<std::filesystem::path> optional_path(std::string_view text) {
  if (text.empty()) return std::nullopt;
  return std::filesystem::path(std::string(text));
}

std::string_view direction_name(DistanceDirection d) {
  return d == DistanceDirection::Incoming ? "in" : "out";
}

}  // namespace

void RunConfig::validate() const {
  if (sdg_path.empty()) throw ConfigError("sdg: a service dependency graph is required (--sdg)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (!ad_level_index(ad_level))
    throw ConfigError("ad_level must be one of 0.15, 0.1, 0.05, 0.025, 0.01");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
  if (metrics_path && !mapping_path)
    throw ConfigError("--mapping is required when --metrics is given");
  if (mapping_path && !metrics_path)
    throw ConfigError("--metrics is required when --mapping is given");
  if (descriptors_path && !metrics_path)
    throw ConfigError("--descriptors needs --metrics");
}

void RunConfig::set(std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "sdg") sdg_path = value;
  else if (key == "metrics") metrics_path = optional_path(value);
  else if (key == "mapping") mapping_path = optional_path(value);
  else if (key == "descriptors") descriptors_path = optional_path(value);
  else if (key == "rules") rules_path = optional_path(value);
  else if (key == "alpha") alpha = parse_real(key, value);
  else if (key == "ad_level") ad_level = parse_real(key, value);
  else if (key == "output_dir") output_dir = value;
  else if (key == "raw_degree") raw_degree = parse_bool(key, value);
  else if (key == "strict_graph") strict_graph = parse_bool(key, value);
  else if (key == "closeness_direction") {
    if (value == "in") closeness_direction = DistanceDirection::Incoming;
    else if (value == "out") closeness_direction = DistanceDirection::Outgoing;
    else throw ConfigError("closeness_direction: expected in or out, got '" + value + "'");
  } else if (key == "correction") {
    auto c = parse_correction(value);
    if (!c) throw ConfigError("correction: expected none, bonferroni or holm, got '" + value + "'");
    correction = *c;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<ConfigKey> config_keys() {
  const RunConfig d;
  auto text = [](const std::optional<std::filesystem::path>& p) { return p ? p->string() : std::string(); };
  return {
      {"sdg", d.sdg_path.string(), "service dependency graph (.json, .dot or .gv)"},
      {"metrics", text(d.metrics_path), "package-level metrics CSV"},
      {"mapping", text(d.mapping_path), "package-to-service mapping CSV"},
      {"descriptors", text(d.descriptors_path), "metric descriptor CSV (compiled-in list when empty)"},
      {"rules", text(d.rules_path), "anti-pattern rules JSON (built-in defaults when empty)"},
      {"alpha", format_double(d.alpha), "significance threshold for correlations"},
      {"ad_level", format_double(d.ad_level), "Anderson-Darling level: 0.15, 0.1, 0.05, 0.025 or 0.01"},
      {"output_dir", d.output_dir.string(),
       "output directory; " + std::string(kOutputDirEnv) + " overrides the default"},
      {"raw_degree", d.raw_degree ? "true" : "false", "degree centralities as raw counts"},
      {"closeness_direction", std::string(direction_name(d.closeness_direction)),
       "distances used by closeness: in or out"},
      {"correction", std::string(to_string(d.correction)),
       "multiple-comparison correction: none, bonferroni or holm"},
      {"strict_graph", d.strict_graph ? "true" : "false", "reject self-loops and repeated edges"},
  };
}

void apply_config_file(RunConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    try {
      config.set(trim(stripped.substr(0, eq)), stripped.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Preprocess: return "preprocess";
    case Command::Centrality: return "centrality";
    case Command::Correlate: return "correlate";
    case Command::Detect: return "detect";
    case Command::Analyze: return "analyze";
  }
  return "";
}

namespace {

struct MetricStage {
  MetricTable table;  // complete services only, ratios appended
  std::vector<NormalityResult> normality;
  std::vector<std::string> excluded;
  MetricTable screened;
};

std::vector<MetricDescriptor> select_descriptors(const RunConfig& config,
                                                 const std::vector<PackageMetricRow>& rows) {
  if (config.descriptors_path) return parse_descriptors_csv(read_file(*config.descriptors_path));
  std::set<std::string> present;
  for (const auto& r : rows)
    for (const auto& [name, value] : r.values) present.insert(name);
  std::vector<MetricDescriptor> out;
  for (const auto& d : default_descriptors())
    if (present.erase(d.name)) out.push_back(d);
  for (const auto& name : present) out.push_back(infer_descriptor(name));
  return out;
}

MetricStage run_metrics(const RunConfig& config, const CentralityTable& centrality) {
  auto rows = parse_metrics_csv(read_file(*config.metrics_path));
  auto mapping = parse_mapping_csv(read_file(*config.mapping_path));
  auto match = match_packages(rows, mapping);
  if (!match.unmatched.empty())
    log::warn(std::to_string(match.unmatched.size()) + " packages match no service");
  std::erase_if(match.groups, [](const auto& g) {
    if (g.second.empty()) log::warn("service '" + g.first + "' has no package rows");
    return g.second.empty();
  });
  if (match.groups.empty()) throw MetricsError("no package rows match the mapping");

  auto aggregated = aggregate(match.groups, select_descriptors(config, rows)).table;
  const RatioColumns ratio_columns;
  if (aggregated.column_index(ratio_columns.private_methods) &&
      aggregated.column_index(ratio_columns.protected_methods) &&
      aggregated.column_index(ratio_columns.public_methods))
    aggregated = derive_ratio_metrics(aggregated, ratio_columns);
  else
    log::info("method visibility counts absent; ratio metrics not derived");

  MetricStage stage;
  auto complete = keep_complete_services(aggregated, centrality.services());
  if (!complete.dropped.empty())
    log::warn(std::to_string(complete.dropped.size()) +
              " services dropped for missing metrics or graph presence");
  stage.table = std::move(complete.table);

  std::vector<std::string> errors;
  stage.normality = screen_normality(stage.table, config.ad_level, &errors);
  for (const auto& e : errors) log::warn("normality screening: " + e);
  auto screen = exclude_normal_metrics(stage.normality, stage.table);
  stage.excluded = std::move(screen.removed);
  stage.screened = std::move(screen.table);
  return stage;
}

std::size_t available_columns(const CentralityTable& table) {
  std::size_t n = 0;
  for (auto k : kAllCentralities) n += table.available(k);
  return n;
}

void write(const RunConfig& config, RunResult& result, const std::string& name, std::string_view content) {
  write_file(config.output_dir / name, content);
  result.files.push_back(name);
}

RunResult run_checked(Command command, const RunConfig& config,
                      nlohmann::ordered_json& summary) {
  config.validate();
  const bool needs_metrics = command == Command::Correlate;
  if (needs_metrics && !config.metrics_path)
    throw ConfigError("correlate needs --metrics and --mapping");

  RunResult result;
  const auto doc = load_sdg(config.sdg_path, config.strict_graph ? RepairPolicy::Strict : RepairPolicy::Drop);
  const auto pre = preprocess(doc.to_graph());
  log::info("input graph: " + std::to_string(pre.sanity.nodes) + " nodes, " +
            std::to_string(pre.sanity.edges) + " edges");
  if (pre.sanity.suspiciously_sparse)
    log::warn("input graph is suspiciously sparse (" + std::to_string(pre.sanity.edges) + " edges for " +
              std::to_string(pre.sanity.nodes) +
              " nodes); static reconstruction may have missed dependencies");
  if (pre.removed_databases.empty() && pre.dropped_outside_gwcc.empty()) {
    log::info("preprocess: no changes");
  } else {
    std::string removed;
    for (const auto& n : pre.removed_databases) removed += " " + n;
    log::info("preprocess: removed " + std::to_string(pre.removed_databases.size()) + " database nodes" +
              (removed.empty() ? "" : ":" + removed) + "; kept largest of " +
              std::to_string(pre.component_count) + " components (" + std::to_string(pre.graph.node_count()) +
              " nodes), dropped " + std::to_string(pre.dropped_outside_gwcc.size()));
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());

  auto pre_doc = SdgDocument::from_graph(pre.graph);
  pre_doc.metadata = doc.metadata;
  write(config, result, "preprocessed.json", serialize_sdg_json(pre_doc));

  summary["input_nodes"] = pre.sanity.nodes;
  summary["input_edges"] = pre.sanity.edges;
  summary["sanity"] = pre.sanity.verdict();
  summary["removed_databases"] = pre.removed_databases;
  summary["components"] = pre.component_count;
  summary["nodes"] = pre.graph.node_count();
  summary["edges"] = pre.graph.edge_count();

  ReportInputs report;
  report.preprocess = &pre;
  if (command == Command::Preprocess) {
    report.title = "Preprocessing";
    write(config, result, "report.md", report_markdown(report));
    return result;
  }

  CentralityOptions options;
  options.raw_degree = config.raw_degree;
  options.closeness_direction = config.closeness_direction;
  const auto centrality = compute_all(pre.graph, options);
  report.centrality = &centrality;
  const std::size_t available = available_columns(centrality);
  summary["centrality_available"] = available;
  if (available < kCentralityCount) result.exit_code = kExitPartial;

  std::optional<MetricStage> metrics;
  const bool use_metrics = config.metrics_path && command != Command::Centrality;
  if (use_metrics) {
    metrics = run_metrics(config, centrality);
    report.metrics = &metrics->table;
    report.normality = &metrics->normality;
    report.excluded_normal = &metrics->excluded;
    summary["services_with_metrics"] = metrics->table.rows();
    summary["metric_columns"] = metrics->table.columns().size();
    summary["excluded_normal"] = metrics->excluded.size();
  }

  std::vector<AntiPatternFinding> findings;
  if (command == Command::Detect || command == Command::Analyze) {
    auto rules = config.rules_path ? rules_from_json(read_file(*config.rules_path)) : default_rules();
    findings = detect(centrality, metrics ? &metrics->table : nullptr, rules);
    report.findings = &findings;
    summary["findings"] = findings.size();
  }

  const bool correlating = metrics && (command == Command::Correlate || command == Command::Analyze);
  if (correlating) {
    auto corr = correlate(centrality, metrics->screened, config.alpha, config.correction);
    report.correlations = &corr;
    report.title = command == Command::Analyze ? "Centrality analysis" : "Correlation";
    auto manifest = write_tables(centrality, metrics->table, corr, config.output_dir, &report);
    result.files.insert(result.files.end(), manifest.begin(), manifest.end());
    write(config, result, "normality.csv", normality_csv(metrics->normality, metrics->excluded));
    summary["tests_performed"] = corr.tests_performed;
    summary["significant"] = corr.significant_count();
    summary["skipped_pairs"] = corr.skipped.size();
  } else {
    write(config, result, "centrality.csv", centrality_csv(centrality));
    if (metrics) {
      write(config, result, "metrics.csv", metrics_csv(metrics->table));
      write(config, result, "normality.csv", normality_csv(metrics->normality, metrics->excluded));
    }
    report.title = command == Command::Centrality ? "Centrality" : command == Command::Detect
                                                                       ? "Anti-pattern detection"
                                                                       : "Centrality analysis";
    write(config, result, "report.md", report_markdown(report));
  }
  if (report.findings) write(config, result, "findings.json", findings_json(findings));
  return result;
}

}  // namespace

RunResult run(Command command, const RunConfig& config) {
  nlohmann::ordered_json summary;
  summary["command"] = to_string(command);
  RunResult result;
  try {
    result = run_checked(command, config, summary);
  } catch (const std::exception& e) {
    log::error(e.what());
    result.exit_code = kExitFatal;
    summary["error"] = e.what();
  }
  summary["exit_code"] = result.exit_code;
  summary["output_dir"] = config.output_dir.string();
  summary["files"] = result.files;
  result.summary = summary.dump();
  return result;
}

}  // namespace svcnet
