#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "support.hpp"
#include "svcnet/antipattern.hpp"
#include "svcnet/log.hpp"

using namespace svcnet;
using namespace svcnet::testing;

namespace {

// Center c with three callers and three callees, so c sits on 9 of the 30
// ordered pairs' shortest paths.
ServiceDependencyGraph star() {
  return make_graph({"c", "l1", "l2", "l3", "l4", "l5", "l6"},
                    {{"l1", "c"}, {"l2", "c"}, {"l3", "c"}, {"c", "l4"}, {"c", "l5"}, {"c", "l6"}});
}

ServiceDependencyGraph cycle(std::size_t n) {
  std::vector<ComponentNode> nodes;
  std::vector<InformationFlow> edges;
  for (std::size_t i = 0; i < n; ++i) {
    nodes.push_back({node_name(i), NodeKind::Service});
    edges.push_back({node_name(i), node_name((i + 1) % n)});
  }
  return ServiceDependencyGraph(nodes, edges);
}

DetectionRule ratio_rule(CentralityKind basis, double threshold) {
  return {AntiPattern::HubLike, basis, DetectionMode::RatioThreshold, threshold, kDefaultOutlierK, {}};
}

DetectionRule outlier_rule(AntiPattern p, CentralityKind basis, double k,
                           std::optional<SizeGate> gate = {}) {
  return {p, basis, DetectionMode::StatisticalOutlier, 0.0, k, gate};
}

struct CaptureLog {
  std::vector<std::string> messages;
  CaptureLog() {
    log::set_sink([this](log::Level, std::string_view m) { messages.emplace_back(m); });
  }
  ~CaptureLog() { log::set_sink(nullptr); }
};

}  // namespace

TEST_CASE("star center is flagged by the ratio rule") {
  auto table = compute_all(star());
  auto findings = detect(table, nullptr, {ratio_rule(CentralityKind::Degree, 0.8)});
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].service == "c");
  CHECK(findings[0].observed == 1.0);
  CHECK(findings[0].threshold_effective == 0.8);
}

TEST_CASE("star center is flagged by the outlier rule on betweenness") {
  auto g = star();
  auto reference = oracle::betweenness(g);
  CHECK(reference[0] == doctest::Approx(9.0 / 30.0));
  double mean = 0.0;
  for (double v : reference) mean += v;
  mean /= 7.0;
  double var = 0.0;
  for (double v : reference) var += (v - mean) * (v - mean);
  const double threshold = mean + 2.0 * std::sqrt(var / 7.0);

  auto findings =
      detect(compute_all(g), nullptr, {outlier_rule(AntiPattern::HubLike, CentralityKind::Betweenness, 2.0)});
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].service == "c");
  CHECK(findings[0].observed == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(findings[0].threshold_effective == doctest::Approx(threshold).epsilon(1e-12));
}

TEST_CASE("uniform cycle yields no findings") {
  auto table = compute_all(cycle(6));
  // every node has normalized total degree 2/5
  CHECK(detect(table, nullptr, {ratio_rule(CentralityKind::Degree, 0.5)}).empty());
  CHECK(detect(table, nullptr, {ratio_rule(CentralityKind::Betweenness, 0.5)}).empty());
  CHECK(detect(table, nullptr, default_rules()).empty());
}

TEST_CASE("absolute count rules work on raw counts") {
  auto g = star();
  auto normalized = compute_all(g);
  CentralityOptions raw_options;
  raw_options.raw_degree = true;
  auto raw = compute_all(g, raw_options);
  DetectionRule rule{AntiPattern::HubLike, CentralityKind::InDegree, DetectionMode::AbsoluteCount, 2.0,
                     kDefaultOutlierK, {}};
  auto a = detect(normalized, nullptr, {rule});
  auto b = detect(raw, nullptr, {rule});
  REQUIRE(a.size() == 1);
  REQUIRE(b.size() == 1);
  CHECK(a[0].observed == 3.0);
  CHECK(b[0].observed == 3.0);
}

TEST_CASE("size gates") {
  auto table = compute_all(star());
  MetricTable metrics({"c", "l1", "l2", "l3", "l4", "l5", "l6"});
  metrics.add_column("CountLineCode.sum", {{9000.0, 100.0, 120.0, 90.0, 110.0, 95.0, 105.0}});

  SizeGate absolute{"CountLineCode.sum", GateMode::Absolute, 5000.0};
  auto mega = outlier_rule(AntiPattern::MegaService, CentralityKind::Degree, 2.0, absolute);
  auto nano = outlier_rule(AntiPattern::NanoService, CentralityKind::Degree, 2.0, absolute);
  auto found = detect(table, &metrics, {nano, mega});
  REQUIRE(found.size() == 1);
  CHECK(found[0].pattern == AntiPattern::MegaService);
  CHECK(found[0].size_observed == 9000.0);

  // the same degree outlier with a tiny codebase is a nano-service
  MetricTable tiny = MetricTable({"c", "l1", "l2", "l3", "l4", "l5", "l6"});
  tiny.add_column("CountLineCode.sum", {{10.0, 100.0, 120.0, 90.0, 110.0, 95.0, 105.0}});
  found = detect(table, &tiny, default_rules());
  std::vector<AntiPattern> patterns;
  for (const auto& f : found) patterns.push_back(f.pattern);
  CHECK(patterns == std::vector<AntiPattern>{AntiPattern::HubLike, AntiPattern::NanoService});
  CHECK(*found[1].size_observed < *found[1].size_threshold_effective);

  // without metrics the gate is ignored
  CHECK(detect(table, nullptr, {mega}).size() == 1);

  CaptureLog capture;
  MetricTable other({"c"});
  other.add_column("loc", {{1.0}});
  CHECK(detect(table, &other, {mega}).empty());
  CHECK(capture.messages.size() == 1);
}

TEST_CASE("unavailable basis columns skip the rule") {
  CaptureLog capture;
  CentralityTable table({"a", "b", "c"});
  table.set_column(CentralityKind::Degree, {1.0, 0.5, 0.5});
  table.mark_unavailable(CentralityKind::Eigenvector, "power iteration failed");
  auto findings = detect(table, nullptr,
                         {ratio_rule(CentralityKind::Eigenvector, 0.1), ratio_rule(CentralityKind::Degree, 0.9)});
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].service == "a");
  CHECK(capture.messages.size() == 1);
}

TEST_CASE("findings are sorted by pattern then descending score") {
  CentralityTable table({"a", "b", "c", "d"});
  table.set_column(CentralityKind::Degree, {0.6, 0.9, 0.7, 0.1});
  table.set_column(CentralityKind::Betweenness, {0.8, 0.2, 0.9, 0.0});
  auto findings = detect(table, nullptr,
                         {ratio_rule(CentralityKind::Degree, 0.5), ratio_rule(CentralityKind::Betweenness, 0.5)});
  std::vector<double> observed;
  for (const auto& f : findings) observed.push_back(f.observed);
  CHECK(observed == std::vector<double>{0.9, 0.9, 0.8, 0.7, 0.6});
  CHECK(findings[0].service == "b");
  CHECK(findings[1].service == "c");
  for (const auto& f : findings) CHECK(f.observed > f.threshold_effective);
}

TEST_CASE("rule validation") {
  CHECK_THROWS_AS(ratio_rule(CentralityKind::Degree, 1.5).validate(), RuleError);
  CHECK_THROWS_AS(ratio_rule(CentralityKind::Closeness, 0.5).validate(), RuleError);
  CHECK_THROWS_AS(outlier_rule(AntiPattern::HubLike, CentralityKind::Degree, 0.0).validate(), RuleError);
  DetectionRule absolute{AntiPattern::HubLike, CentralityKind::Betweenness, DetectionMode::AbsoluteCount,
                         3.0, kDefaultOutlierK, {}};
  CHECK_THROWS_AS(absolute.validate(), RuleError);
  auto gated_hub = outlier_rule(AntiPattern::HubLike, CentralityKind::Degree, 2.0, SizeGate{});
  CHECK_THROWS_AS(gated_hub.validate(), RuleError);
}

TEST_CASE("default rules") {
  auto rules = default_rules();
  CHECK(rules.size() == 4);
  for (const auto& r : rules) CHECK_NOTHROW(r.validate());
  CHECK(rules_from_json(rules_to_json(rules)) == rules);
}

TEST_CASE("rules JSON errors name the entry") {
  CHECK_THROWS_WITH_AS(rules_from_json("{}"), doctest::Contains("array"), RuleError);
  CHECK_THROWS_WITH_AS(rules_from_json("[1,"), doctest::Contains("malformed"), RuleError);
  CHECK_THROWS_WITH_AS(
      rules_from_json(R"([{"pattern":"hub_like","basis":"degree","mode":"ratio_threshold","threshold":0.5},
                          {"pattern":"hub_like","basis":"degree","mode":"ratio_threshold","threshold":2}])"),
      doctest::Contains("rules[1]"), RuleError);
  CHECK_THROWS_WITH_AS(
      rules_from_json(R"([{"pattern":"god_class","basis":"degree","mode":"ratio_threshold","threshold":0.5}])"),
      doctest::Contains("god_class"), RuleError);
  auto parsed = rules_from_json(R"([{"pattern":"hub_like","basis":"in_degree","mode":"statistical_outlier"}])");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].outlier_k == kDefaultOutlierK);
}

TEST_CASE("outlier rule respects the Chebyshev bound") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + rng.next() % 60;
    const double k = 1.0 + rng.uniform() * 2.0;
    std::vector<std::string> services;
    Scores values;
    // mostly tied values plus a few extremes: the shape that gets closest
    // to the bound
    const std::size_t extremes = 1 + rng.next() % 4;
    for (std::size_t i = 0; i < n; ++i) {
      services.push_back(node_name(i));
      if (i < extremes)
        values.push_back(10.0 + rng.uniform());
      else
        values.push_back(trial % 2 ? 0.0 : rng.exponential());
    }
    CentralityTable table(services);
    table.set_column(CentralityKind::Betweenness, values);
    auto findings = detect(table, nullptr, {outlier_rule(AntiPattern::HubLike, CentralityKind::Betweenness, k)});
    CHECK(static_cast<double>(findings.size()) <= static_cast<double>(n) / (k * k));
  }
}

TEST_CASE("ratio detection ignores a disconnected smaller component") {
  SplitMix64 rng(7);
  std::size_t compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto g = random_digraph(rng, 8, 0.3);
    if (!is_weakly_connected(g)) continue;
    std::vector<ComponentNode> nodes(g.nodes().begin(), g.nodes().end());
    auto edges = g.edges();
    nodes.push_back({"zz1", NodeKind::Service});
    nodes.push_back({"zz2", NodeKind::Service});
    nodes.push_back({"zz3", NodeKind::Service});
    edges.push_back({"zz1", "zz2"});
    edges.push_back({"zz3", "zz2"});
    ServiceDependencyGraph noisy(nodes, edges);

    std::vector<DetectionRule> rules{ratio_rule(CentralityKind::Degree, 0.4),
                                     ratio_rule(CentralityKind::Betweenness, 0.2),
                                     ratio_rule(CentralityKind::InDegree, 0.3)};
    auto clean = detect(compute_all(preprocess(g).graph), nullptr, rules);
    auto filtered = detect(compute_all(preprocess(noisy).graph), nullptr, rules);
    REQUIRE(clean.size() == filtered.size());
    for (std::size_t i = 0; i < clean.size(); ++i) {
      CHECK(clean[i].service == filtered[i].service);
      CHECK(clean[i].observed == filtered[i].observed);
    }
    ++compared;
  }
  CHECK(compared > 5);
}
