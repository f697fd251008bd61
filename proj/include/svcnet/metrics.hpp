#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace svcnet {

class MetricsError : public std::runtime_error {
 public:
  explicit MetricsError(const std::string& what) : std::runtime_error(what) {}
};

/// One row of a package-level metrics export. Absent keys are missing values.
struct PackageMetricRow {
  std::string package;
  std::map<std::string, double> values;
};

struct PackageServiceMapping {
  /// (package prefix, service name), in file order.
  std::vector<std::pair<std::string, std::string>> entries;

  /// Services the mapping assigns packages to, in first-appearance order.
  std::vector<std::string> services() const;
};

/// True when `package` equals `prefix` or continues it after a '.'.
bool package_matches(std::string_view package, std::string_view prefix);

struct PackageMatch {
  /// Keyed by service; services appear in mapping order.
  std::vector<std::pair<std::string, std::vector<PackageMetricRow>>> groups;
  std::vector<std::string> unmatched;
};

/// Throws MetricsError("ambiguous mapping ...") when a package belongs to two
/// services.
PackageMatch match_packages(const std::vector<PackageMetricRow>& rows,
                            const PackageServiceMapping& mapping);

enum class MetricClass { Count, Ratio, Rating };
enum class Aggregation { Sum, Avg, Max };

std::string_view to_string(MetricClass c);
std::string_view to_string(Aggregation a);
std::optional<MetricClass> parse_metric_class(std::string_view text);
std::optional<Aggregation> parse_aggregation(std::string_view text);

struct MetricDescriptor {
  std::string name;
  MetricClass metric_class = MetricClass::Count;
  std::vector<Aggregation> aggregations;
  /// Missing cells count as 0 in Sum instead of being skipped.
  bool zero_default = false;

  /// Throws MetricsError if a Ratio/Rating metric asks for Sum, or the
  /// aggregation list is empty or repeats itself.
  void validate() const;
};

/// Descriptor for a metric with no explicit entry: names containing "Ratio",
/// "Avg", "density" or "Density" are ratios, "*_rating" are ratings,
/// everything else counts.
MetricDescriptor infer_descriptor(std::string_view metric_name);

/// Compiled-in descriptors for the Understand, Jasome and SonarQube metrics.
const std::vector<MetricDescriptor>& default_descriptors();

/// Services × aggregated metric columns named "<metric>.<aggregation>".
class MetricTable {
 public:
  MetricTable() = default;
  explicit MetricTable(std::vector<std::string> services);

  const std::vector<std::string>& services() const { return services_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return services_.size(); }

  std::optional<std::size_t> column_index(std::string_view name) const;
  std::optional<std::size_t> row_of(std::string_view service) const;

  std::optional<double> at(std::size_t row, std::size_t col) const { return values_[col][row]; }
  const std::vector<std::optional<double>>& column(std::size_t col) const { return values_[col]; }

  void add_column(std::string name, std::vector<std::optional<double>> values);
  MetricTable without_columns(const std::vector<std::string>& names) const;
  MetricTable with_rows(const std::vector<std::string>& services) const;

  bool operator==(const MetricTable&) const = default;

 private:
  std::vector<std::string> services_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::optional<double>>> values_;  // column-major
};

struct AggregationOutcome {
  MetricTable table;
  /// Descriptors whose metric appears in no row.
  std::vector<std::string> skipped_metrics;
};

AggregationOutcome aggregate(
    const std::vector<std::pair<std::string, std::vector<PackageMetricRow>>>& groups,
    const std::vector<MetricDescriptor>& descriptors);

struct RatioColumns {
  std::string private_methods = "CountDeclMethodPrivate.sum";
  std::string protected_methods = "CountDeclMethodProtected.sum";
  std::string public_methods = "CountDeclMethodPublic.sum";
};

inline constexpr std::string_view kPrivateToPublic = "private_to_public";
inline constexpr std::string_view kProtectedToPublic = "protected_to_public";

/// Appends private_to_public and protected_to_public. x/0 is 0 when x is 0
/// and unavailable otherwise.
MetricTable derive_ratio_metrics(const MetricTable& table, const RatioColumns& columns = {});

struct CompletenessFilter {
  MetricTable table;
  /// Services dropped because a cell was unavailable or the service has no
  /// centrality row.
  std::vector<std::string> dropped;
};

/// Keeps the services that have every metric available and appear in
/// `known_services`.
CompletenessFilter keep_complete_services(const MetricTable& table,
                                          const std::vector<std::string>& known_services);

struct JoinReport {
  std::vector<std::string> common;
  std::vector<std::string> only_left;
  std::vector<std::string> only_right;
};

JoinReport join_services(const std::vector<std::string>& left,
                         const std::vector<std::string>& right);

}  // namespace svcnet
