#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svcnet/antipattern.hpp"
#include "svcnet/centrality.hpp"
#include "svcnet/graph.hpp"
#include "svcnet/metrics.hpp"
#include "svcnet/stats.hpp"

namespace svcnet {

/// Malformed or invalid input. The message starts with the position (a JSON
/// path, "line:column" or a CSV line) when one is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct SdgNode {
  std::string name;
  std::optional<NodeKind> kind;

  bool operator==(const SdgNode&) const = default;
};

struct SdgDocument {
  std::vector<SdgNode> nodes;
  std::vector<InformationFlow> edges;
  std::map<std::string, std::string> metadata;
  /// Repairs made while parsing (dropped self-loops, duplicate edges,
  /// discarded edge attributes). Not serialized.
  std::vector<std::string> warnings;

  /// Nodes without a kind become services. Throws GraphError if the
  /// document is not a simple graph.
  ServiceDependencyGraph to_graph() const;
  static SdgDocument from_graph(const ServiceDependencyGraph& g);

  bool same_content(const SdgDocument& other) const {
    return nodes == other.nodes && edges == other.edges && metadata == other.metadata;
  }
};

enum class RepairPolicy {
  /// Drop self-loops and repeated edges with a warning.
  Drop,
  /// Reject them.
  Strict,
};

SdgDocument parse_sdg_json(std::string_view text, RepairPolicy policy = RepairPolicy::Drop);
std::string serialize_sdg_json(const SdgDocument& doc);

/// Subset of DOT: `[strict] digraph [id] { ... }` with node statements,
/// `->` edge chains, attribute lists (only `kind` is kept), and `graph`,
/// `node`, `edge` default statements (ignored). Comments are skipped.
SdgDocument parse_sdg_dot(std::string_view text, RepairPolicy policy = RepairPolicy::Drop);

/// Picks the parser from the file extension (.json, .dot or .gv).
SdgDocument load_sdg(const std::filesystem::path& path, RepairPolicy policy = RepairPolicy::Drop);

/// Shortest decimal that round-trips, "." separator; nan, inf and -inf
/// are spelled out.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Header `package,<metric>...`; empty cells are missing values.
std::vector<PackageMetricRow> parse_metrics_csv(std::string_view text);
/// Header `package,service`.
PackageServiceMapping parse_mapping_csv(std::string_view text);
/// Header `metric,class,aggregations` with aggregations joined by '|'; an
/// optional fourth column `zero_default` takes true/false.
std::vector<MetricDescriptor> parse_descriptors_csv(std::string_view text);

std::string centrality_csv(const CentralityTable& table);
std::string metrics_csv(const MetricTable& table);
/// Long form: one row per tested pair, then one per skipped pair.
std::string correlations_csv(const CorrelationMatrix& corr);
/// {"rows", "cols", "values", "mask"}; skipped cells are null in values and
/// false in mask.
std::string heatmap_json(const CorrelationMatrix& corr);
/// One row per screened metric; `excluded` marks columns dropped as normal.
std::string normality_csv(const std::vector<NormalityResult>& results,
                          const std::vector<std::string>& excluded);
std::string findings_json(const std::vector<AntiPatternFinding>& findings);

struct ReportInputs {
  std::string title = "Centrality analysis";
  const PreprocessResult* preprocess = nullptr;
  const CentralityTable* centrality = nullptr;
  const MetricTable* metrics = nullptr;
  const std::vector<NormalityResult>* normality = nullptr;
  const std::vector<std::string>* excluded_normal = nullptr;
  const CorrelationMatrix* correlations = nullptr;
  const std::vector<AntiPatternFinding>* findings = nullptr;
};

std::string report_markdown(const ReportInputs& in);

/// Files written, relative to the output directory, in write order.
using Manifest = std::vector<std::string>;

/// Writes centrality.csv, metrics.csv, correlations.csv, heatmap.json and
/// report.md into `dir`, creating it if needed. Without `report` the
/// report covers just the three tables.
Manifest write_tables(const CentralityTable& centrality, const MetricTable& metrics,
                      const CorrelationMatrix& corr, const std::filesystem::path& dir,
                      const ReportInputs* report = nullptr);

}  // namespace svcnet
