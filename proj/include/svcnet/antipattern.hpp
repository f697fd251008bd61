#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svcnet/centrality.hpp"
#include "svcnet/metrics.hpp"

namespace svcnet {

class RuleError : public std::runtime_error {
 public:
  explicit RuleError(const std::string& what) : std::runtime_error(what) {}
};

enum class AntiPattern { HubLike, NanoService, MegaService };
enum class DetectionMode { AbsoluteCount, RatioThreshold, StatisticalOutlier };
enum class GateMode { Absolute, Outlier };

std::string_view to_string(AntiPattern p);
std::string_view to_string(DetectionMode m);
std::string_view to_string(GateMode m);
std::optional<AntiPattern> parse_anti_pattern(std::string_view text);
std::optional<DetectionMode> parse_detection_mode(std::string_view text);
std::optional<GateMode> parse_gate_mode(std::string_view text);

inline constexpr double kDefaultOutlierK = 2.0;

/// Size condition on a metric column. MegaService requires the service to be
/// above it, NanoService below. Outlier gates use mean ± value·stddev.
struct SizeGate {
  std::string metric = "CountLineCode.sum";
  GateMode mode = GateMode::Outlier;
  double value = 1.0;

  bool operator==(const SizeGate&) const = default;
};

struct DetectionRule {
  AntiPattern pattern = AntiPattern::HubLike;
  CentralityKind basis = CentralityKind::Degree;
  DetectionMode mode = DetectionMode::RatioThreshold;
  double threshold = 0.0;
  double outlier_k = kDefaultOutlierK;
  /// Ignored when detect() gets no metric table.
  std::optional<SizeGate> size_gate;

  /// Throws RuleError when the rule is malformed.
  void validate() const;

  bool operator==(const DetectionRule&) const = default;
};

struct AntiPatternFinding {
  std::string service;
  AntiPattern pattern = AntiPattern::HubLike;
  DetectionRule rule;
  /// Basis score (a raw count for AbsoluteCount rules).
  double observed = 0.0;
  double threshold_effective = 0.0;
  std::optional<double> size_observed;
  std::optional<double> size_threshold_effective;
};

/// Every finding has observed > threshold_effective. Rules whose basis or
/// size column is unavailable are skipped with a warning.
std::vector<AntiPatternFinding> detect(const CentralityTable& table, const MetricTable* metrics,
                                       const std::vector<DetectionRule>& rules);

/// Non-normative defaults; the thresholds are placeholders.
std::vector<DetectionRule> default_rules();

std::string rules_to_json(const std::vector<DetectionRule>& rules);
/// Parses and validates a JSON array of rules; errors name the offending
/// array index.
std::vector<DetectionRule> rules_from_json(std::string_view text);

}  // namespace svcnet
