#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "support.hpp"
#include "svcnet/log.hpp"
#include "svcnet/metrics.hpp"

using namespace svcnet;
using namespace svcnet::testing;

namespace {

PackageMetricRow row(std::string package, std::map<std::string, double> values) {
  return {std::move(package), std::move(values)};
}

MetricDescriptor count(std::string name) {
  return {std::move(name), MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}};
}

struct QuietLog {
  std::vector<std::string> messages;
  QuietLog() {
    log::set_sink([this](log::Level, std::string_view m) { messages.emplace_back(m); });
  }
  ~QuietLog() { log::set_sink(nullptr); }
};

}  // namespace

TEST_CASE("package prefixes match on dot boundaries") {
  CHECK(package_matches("com.shop.orders", "com.shop.orders"));
  CHECK(package_matches("com.shop.orders.api", "com.shop.orders"));
  CHECK_FALSE(package_matches("com.shop.ordersx", "com.shop.orders"));
  CHECK_FALSE(package_matches("com.shop", "com.shop.orders"));
}

TEST_CASE("match_packages groups rows by service") {
  PackageServiceMapping mapping{{{"com.shop.orders", "orders"}, {"com.shop.users", "users"}}};
  std::vector<PackageMetricRow> rows{row("com.shop.orders.api", {{"LOC", 100}}),
                                     row("com.shop.users", {{"LOC", 7}}),
                                     row("com.shop.orders.db", {{"LOC", 50}}),
                                     row("com.shop.misc", {{"LOC", 1}})};
  auto m = match_packages(rows, mapping);
  REQUIRE(m.groups.size() == 2);
  CHECK(m.groups[0].first == "orders");
  CHECK(m.groups[0].second.size() == 2);
  CHECK(m.groups[1].first == "users");
  CHECK(m.unmatched == std::vector<std::string>{"com.shop.misc"});
  CHECK(mapping.services() == std::vector<std::string>{"orders", "users"});

  PackageServiceMapping overlapping{{{"com.shop", "a"}, {"com.shop.orders", "b"}}};
  CHECK_THROWS_WITH_AS(match_packages(rows, overlapping), doctest::Contains("ambiguous mapping"),
                       MetricsError);
  CHECK_THROWS_AS(match_packages(rows, PackageServiceMapping{}), MetricsError);
}

TEST_CASE("aggregation examples") {
  std::vector<std::pair<std::string, std::vector<PackageMetricRow>>> groups{
      {"orders", {row("p1", {{"LOC", 100}, {"sqale_rating", 1}}),
                  row("p2", {{"LOC", 50}, {"sqale_rating", 3}})}},
      {"users", {row("p3", {{"LOC", 7}, {"sqale_rating", 2}})}}};
  std::vector<MetricDescriptor> descriptors{
      count("LOC"), {"sqale_rating", MetricClass::Rating, {Aggregation::Avg, Aggregation::Max}}};
  auto out = aggregate(groups, descriptors).table;
  CHECK(out.columns() ==
        std::vector<std::string>{"LOC.sum", "LOC.avg", "LOC.max", "sqale_rating.avg", "sqale_rating.max"});
  CHECK(out.at(0, 0) == 150.0);
  CHECK(out.at(0, 1) == 75.0);
  CHECK(out.at(0, 2) == 100.0);
  CHECK(out.at(0, 3) == 2.0);
  CHECK(out.at(0, 4) == 3.0);
  for (std::size_t c = 0; c < 3; ++c) CHECK(out.at(1, c) == 7.0);
  CHECK_FALSE(out.column_index("sqale_rating.sum").has_value());
}

TEST_CASE("missing values are excluded from aggregation") {
  QuietLog quiet;
  std::vector<std::pair<std::string, std::vector<PackageMetricRow>>> groups{
      {"a", {row("p1", {{"LOC", 10}}), row("p2", {})}},
      {"b", {row("p3", {})}}};
  auto plain = aggregate(groups, {count("LOC")}).table;
  CHECK(plain.at(0, 1) == 10.0);
  CHECK_FALSE(plain.at(1, 0).has_value());
  CHECK_FALSE(plain.at(1, 1).has_value());

  auto zeroed_descriptor = count("LOC");
  zeroed_descriptor.zero_default = true;
  auto zeroed = aggregate(groups, {zeroed_descriptor}).table;
  CHECK(zeroed.at(1, 0) == 0.0);
  CHECK_FALSE(zeroed.at(1, 1).has_value());

  auto outcome = aggregate(groups, {count("LOC"), count("Absent")});
  CHECK(outcome.skipped_metrics == std::vector<std::string>{"Absent"});
  CHECK(outcome.table.columns().size() == 3);
  CHECK(quiet.messages.size() == 1);
}

TEST_CASE("ratings outside their scale are warned about") {
  QuietLog quiet;
  std::vector<std::pair<std::string, std::vector<PackageMetricRow>>> groups{
      {"a", {row("p", {{"x_rating", 7}})}}};
  aggregate(groups, {{"x_rating", MetricClass::Rating, {Aggregation::Max}}});
  REQUIRE(quiet.messages.size() == 1);
  CHECK(quiet.messages[0].find("outside") != std::string::npos);
}

TEST_CASE("descriptor validation") {
  CHECK_THROWS_AS((MetricDescriptor{"r", MetricClass::Ratio, {Aggregation::Sum}}.validate()),
                  MetricsError);
  CHECK_THROWS_AS((MetricDescriptor{"r", MetricClass::Rating, {Aggregation::Avg, Aggregation::Sum}}
                       .validate()),
                  MetricsError);
  CHECK_THROWS_AS((MetricDescriptor{"c", MetricClass::Count, {}}.validate()), MetricsError);
  CHECK_THROWS_AS((MetricDescriptor{"c", MetricClass::Count, {Aggregation::Max, Aggregation::Max}}
                       .validate()),
                  MetricsError);
  CHECK_NOTHROW(count("c").validate());

  CHECK(infer_descriptor("RatioCommentToCode").metric_class == MetricClass::Ratio);
  CHECK(infer_descriptor("AvgCyclomatic").metric_class == MetricClass::Ratio);
  CHECK(infer_descriptor("comment_lines_density").metric_class == MetricClass::Ratio);
  CHECK(infer_descriptor("security_rating").metric_class == MetricClass::Rating);
  CHECK(infer_descriptor("CountLineCode").metric_class == MetricClass::Count);

  const auto& defaults = default_descriptors();
  CHECK(defaults.size() == 95);
  std::vector<std::string> names;
  for (const auto& d : defaults) {
    CHECK_NOTHROW(d.validate());
    names.push_back(d.name);
  }
  std::sort(names.begin(), names.end());
  CHECK(std::adjacent_find(names.begin(), names.end()) == names.end());
}

TEST_CASE("aggregation properties") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PackageMetricRow> rows;
    const std::size_t k = 1 + rng.next() % 8;
    for (std::size_t i = 0; i < k; ++i)
      rows.push_back(row("p" + std::to_string(i), {{"LOC", std::floor(rng.uniform() * 1000)}}));
    auto table = aggregate({{"s", rows}}, {count("LOC")}).table;

    auto shuffled = rows;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + static_cast<long>(k / 2), shuffled.end());
    CHECK(aggregate({{"s", shuffled}}, {count("LOC")}).table == table);

    const double sum = *table.at(0, 0), avg = *table.at(0, 1), max = *table.at(0, 2);
    const double min = std::min_element(rows.begin(), rows.end(), [](auto& a, auto& b) {
                         return a.values.at("LOC") < b.values.at("LOC");
                       })->values.at("LOC");
    CHECK(min <= avg);
    CHECK(avg <= max);

    // splitting the rows into two services keeps the total
    const std::size_t cut = k / 2;
    if (cut > 0) {
      std::vector<PackageMetricRow> left(rows.begin(), rows.begin() + static_cast<long>(cut));
      std::vector<PackageMetricRow> right(rows.begin() + static_cast<long>(cut), rows.end());
      auto split = aggregate({{"l", left}, {"r", right}}, {count("LOC")}).table;
      CHECK(*split.at(0, 0) + *split.at(1, 0) == sum);
    }
  }
}

TEST_CASE("derived ratio metrics") {
  MetricTable t({"a", "b", "c", "d"});
  t.add_column("CountDeclMethodPrivate.sum", {{4.0, 0.0, 0.0, 3.0}});
  t.add_column("CountDeclMethodProtected.sum", {{2.0, 0.0, std::nullopt, 1.0}});
  t.add_column("CountDeclMethodPublic.sum", {{8.0, 0.0, 12.0, 0.0}});
  auto out = derive_ratio_metrics(t);
  auto p = *out.column_index(kPrivateToPublic);
  auto q = *out.column_index(kProtectedToPublic);
  CHECK(out.at(0, p) == 0.5);
  CHECK(out.at(1, p) == 0.0);
  CHECK(out.at(2, p) == 0.0);
  CHECK_FALSE(out.at(3, p).has_value());
  CHECK(out.at(0, q) == 0.25);
  CHECK_FALSE(out.at(2, q).has_value());

  MetricTable partial({"a"});
  partial.add_column("CountDeclMethodPublic.sum", {{1.0}});
  CHECK_THROWS_WITH_AS(derive_ratio_metrics(partial), doctest::Contains("CountDeclMethodPrivate.sum"),
                       MetricsError);
}

TEST_CASE("metric table operations") {
  MetricTable t({"a", "b", "c"});
  t.add_column("x", {{1.0, std::nullopt, 3.0}});
  t.add_column("y", {{4.0, 5.0, 6.0}});
  CHECK_THROWS_AS(t.add_column("x", {{1.0, 2.0, 3.0}}), MetricsError);
  CHECK_THROWS_AS(t.add_column("z", {{1.0}}), MetricsError);
  CHECK(t.without_columns({"x"}).columns() == std::vector<std::string>{"y"});
  auto picked = t.with_rows({"c", "a"});
  CHECK(picked.services() == std::vector<std::string>{"c", "a"});
  CHECK(picked.at(0, 0) == 3.0);
  CHECK_THROWS_AS(t.with_rows({"nope"}), MetricsError);

  auto filtered = keep_complete_services(t, {"a", "b"});
  CHECK(filtered.table.services() == std::vector<std::string>{"a"});
  CHECK(filtered.dropped == std::vector<std::string>{"b", "c"});

  auto join = join_services({"a", "b", "c"}, {"c", "d", "a"});
  CHECK(join.common == std::vector<std::string>{"a", "c"});
  CHECK(join.only_left == std::vector<std::string>{"b"});
  CHECK(join.only_right == std::vector<std::string>{"d"});
}
