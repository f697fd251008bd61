#include "svcnet/antipattern.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>

#include "svcnet/log.hpp"

namespace svcnet {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<Enum, N>& values) {
  for (auto v : values)
    if (to_string(v) == text) return v;
  return std::nullopt;
}

constexpr std::array kPatterns{AntiPattern::HubLike, AntiPattern::NanoService, AntiPattern::MegaService};
constexpr std::array kModes{DetectionMode::AbsoluteCount, DetectionMode::RatioThreshold,
                            DetectionMode::StatisticalOutlier};
constexpr std::array kGateModes{GateMode::Absolute, GateMode::Outlier};

bool is_degree(CentralityKind k) {
  return k == CentralityKind::InDegree || k == CentralityKind::OutDegree ||
         k == CentralityKind::Degree;
}

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Population standard deviation over the available cells.
MeanStd mean_std(const std::vector<std::optional<double>>& column) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : column)
    if (v) sum += *v, ++n;
  if (n == 0) return {};
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& v : column)
    if (v) ss += (*v - mean) * (*v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(n))};
}

std::string describe(const DetectionRule& r) {
  return std::string(to_string(r.pattern)) + " on " + std::string(column_name(r.basis)) + " (" +
         std::string(to_string(r.mode)) + ")";
}

}  // namespace

std::string_view to_string(AntiPattern p) {
  switch (p) {
    case AntiPattern::HubLike: return "hub_like";
    case AntiPattern::NanoService: return "nano_service";
    case AntiPattern::MegaService: return "mega_service";
  }
  return "";
}

std::string_view to_string(DetectionMode m) {
  switch (m) {
    case DetectionMode::AbsoluteCount: return "absolute_count";
    case DetectionMode::RatioThreshold: return "ratio_threshold";
    case DetectionMode::StatisticalOutlier: return "statistical_outlier";
  }
  return "";
}

std::string_view to_string(GateMode m) {
  return m == GateMode::Absolute ? "absolute" : "outlier";
}

std::optional<AntiPattern> parse_anti_pattern(std::string_view text) { return lookup(text, kPatterns); }
std::optional<DetectionMode> parse_detection_mode(std::string_view text) { return lookup(text, kModes); }
std::optional<GateMode> parse_gate_mode(std::string_view text) { return lookup(text, kGateModes); }

void DetectionRule::validate() const {
  const bool basis_ok = is_degree(basis) || basis == CentralityKind::Betweenness ||
                        basis == CentralityKind::Eigenvector;
  if (!basis_ok)
    throw RuleError("unsupported basis '" + std::string(column_name(basis)) + "'");
  switch (mode) {
    case DetectionMode::AbsoluteCount:
      if (!is_degree(basis)) throw RuleError("absolute_count needs a degree basis");
      if (!std::isfinite(threshold) || threshold < 0)
        throw RuleError("absolute_count threshold must be a non-negative count");
      break;
    case DetectionMode::RatioThreshold:
      if (!(threshold >= 0.0 && threshold <= 1.0))
        throw RuleError("ratio_threshold threshold must lie in [0, 1]");
      break;
    case DetectionMode::StatisticalOutlier:
      break;
  }
  if (!(outlier_k > 0.0) || !std::isfinite(outlier_k)) throw RuleError("outlier_k must be positive");
  if (size_gate) {
    if (pattern == AntiPattern::HubLike) throw RuleError("hub_like rules take no size gate");
    if (size_gate->metric.empty()) throw RuleError("size gate without metric");
    if (!std::isfinite(size_gate->value)) throw RuleError("size gate value must be finite");
    if (size_gate->mode == GateMode::Outlier && size_gate->value <= 0)
      throw RuleError("outlier size gate needs a positive k");
  }
}

std::vector<AntiPatternFinding> detect(const CentralityTable& table, const MetricTable* metrics,
                                       const std::vector<DetectionRule>& rules) {
  if (table.rows() == 0) throw RuleError("empty centrality table");
  const double scale = static_cast<double>(table.rows() - 1);
  std::vector<AntiPatternFinding> findings;

  for (const auto& rule : rules) {
    rule.validate();
    if (!table.available(rule.basis)) {
      log::warn("rule " + describe(rule) + " skipped: column unavailable");
      continue;
    }
    auto scores = table.column(rule.basis);
    if (rule.mode == DetectionMode::AbsoluteCount && !table.raw_degree)
      for (auto& s : scores)
        if (s) s = std::round(*s * scale);

    double threshold = rule.threshold;
    if (rule.mode == DetectionMode::StatisticalOutlier) {
      auto ms = mean_std(scores);
      threshold = ms.mean + rule.outlier_k * ms.stddev;
    }

    // size column aligned with the centrality rows
    std::optional<std::vector<std::optional<double>>> sizes;
    double size_threshold = 0.0;
    if (rule.size_gate && metrics) {
      auto col = metrics->column_index(rule.size_gate->metric);
      if (!col) {
        log::warn("rule " + describe(rule) + " skipped: size metric '" + rule.size_gate->metric +
                  "' unavailable");
        continue;
      }
      sizes.emplace(table.rows());
      for (std::size_t r = 0; r < table.rows(); ++r)
        if (auto m = metrics->row_of(table.services()[r])) (*sizes)[r] = metrics->at(*m, *col);
      size_threshold = rule.size_gate->value;
      if (rule.size_gate->mode == GateMode::Outlier) {
        auto ms = mean_std(*sizes);
        const double shift = rule.size_gate->value * ms.stddev;
        size_threshold = rule.pattern == AntiPattern::NanoService ? ms.mean - shift : ms.mean + shift;
      }
    }

    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (!scores[r] || !(*scores[r] > threshold)) continue;
      AntiPatternFinding f{table.services()[r], rule.pattern, rule, *scores[r], threshold, {}, {}};
      if (sizes) {
        const auto& size = (*sizes)[r];
        if (!size) continue;
        const bool passes = rule.pattern == AntiPattern::NanoService ? *size < size_threshold
                                                                     : *size > size_threshold;
        if (!passes) continue;
        f.size_observed = *size;
        f.size_threshold_effective = size_threshold;
      }
      findings.push_back(std::move(f));
    }
  }

  std::stable_sort(findings.begin(), findings.end(), [](const auto& a, const auto& b) {
    if (a.pattern != b.pattern) return a.pattern < b.pattern;
    if (a.observed != b.observed) return a.observed > b.observed;
    return a.service < b.service;
  });
  return findings;
}

std::vector<DetectionRule> default_rules() {
  return {
      {AntiPattern::HubLike, CentralityKind::Betweenness, DetectionMode::RatioThreshold, 0.5,
       kDefaultOutlierK, std::nullopt},
      {AntiPattern::HubLike, CentralityKind::Degree, DetectionMode::StatisticalOutlier, 0.0,
       kDefaultOutlierK, std::nullopt},
      {AntiPattern::MegaService, CentralityKind::Degree, DetectionMode::StatisticalOutlier, 0.0,
       kDefaultOutlierK, SizeGate{}},
      {AntiPattern::NanoService, CentralityKind::Degree, DetectionMode::StatisticalOutlier, 0.0,
       kDefaultOutlierK, SizeGate{}},
  };
}

std::string rules_to_json(const std::vector<DetectionRule>& rules) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& r : rules) {
    nlohmann::ordered_json j{{"pattern", to_string(r.pattern)},
                             {"basis", column_name(r.basis)},
                             {"mode", to_string(r.mode)},
                             {"threshold", r.threshold},
                             {"outlier_k", r.outlier_k}};
    if (r.size_gate)
      j["size_gate"] = {{"metric", r.size_gate->metric},
                        {"mode", to_string(r.size_gate->mode)},
                        {"value", r.size_gate->value}};
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::vector<DetectionRule> rules_from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw RuleError(std::string("rules: malformed JSON: ") + e.what());
  }
  if (!doc.is_array()) throw RuleError("rules: top level must be an array");

  std::vector<DetectionRule> rules;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    const std::string where = "rules[" + std::to_string(i) + "]";
    auto fail = [&](const std::string& what) { return RuleError(where + ": " + what); };
    if (!j.is_object()) throw fail("expected an object");
    for (const auto& [key, value] : j.items())
      if (key != "pattern" && key != "basis" && key != "mode" && key != "threshold" &&
          key != "outlier_k" && key != "size_gate")
        throw fail("unknown key '" + key + "'");
    auto text_field = [&](const char* key) {
      if (!j.contains(key) || !j[key].is_string()) throw fail(std::string("'") + key + "' must be a string");
      return j[key].get<std::string>();
    };
    auto number_field = [&](const nlohmann::json& obj, const char* key, std::optional<double> fallback) {
      if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw fail(std::string("missing '") + key + "'");
      }
      if (!obj[key].is_number()) throw fail(std::string("'") + key + "' must be a number");
      return obj[key].get<double>();
    };

    DetectionRule r;
    auto pattern = parse_anti_pattern(text_field("pattern"));
    if (!pattern) throw fail("unknown pattern '" + j["pattern"].get<std::string>() + "'");
    auto basis = parse_centrality_kind(text_field("basis"));
    if (!basis) throw fail("unknown basis '" + j["basis"].get<std::string>() + "'");
    auto mode = parse_detection_mode(text_field("mode"));
    if (!mode) throw fail("unknown mode '" + j["mode"].get<std::string>() + "'");
    r.pattern = *pattern;
    r.basis = *basis;
    r.mode = *mode;
    r.threshold = number_field(j, "threshold", r.mode == DetectionMode::StatisticalOutlier
                                                   ? std::optional<double>(0.0)
                                                   : std::nullopt);
    r.outlier_k = number_field(j, "outlier_k", kDefaultOutlierK);
    if (j.contains("size_gate") && !j["size_gate"].is_null()) {
      const auto& g = j["size_gate"];
      if (!g.is_object()) throw fail("'size_gate' must be an object");
      SizeGate gate;
      if (g.contains("metric")) {
        if (!g["metric"].is_string()) throw fail("'size_gate.metric' must be a string");
        gate.metric = g["metric"].get<std::string>();
      }
      if (g.contains("mode")) {
        auto m = g["mode"].is_string() ? parse_gate_mode(g["mode"].get<std::string>()) : std::nullopt;
        if (!m) throw fail("'size_gate.mode' must be \"absolute\" or \"outlier\"");
        gate.mode = *m;
      }
      gate.value = number_field(g, "value", gate.value);
      r.size_gate = gate;
    }
    try {
      r.validate();
    } catch (const RuleError& e) {
      throw fail(e.what());
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

}  // namespace svcnet
