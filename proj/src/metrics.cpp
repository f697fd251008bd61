#include "svcnet/metrics.hpp"

#include <algorithm>
#include <set>

#include "svcnet/log.hpp"

namespace svcnet {

std::vector<std::string> PackageServiceMapping::services() const {
  std::vector<std::string> out;
  for (const auto& [prefix, service] : entries)
    if (std::find(out.begin(), out.end(), service) == out.end()) out.push_back(service);
  return out;
}

bool package_matches(std::string_view package, std::string_view prefix) {
  if (prefix.empty() || !package.starts_with(prefix)) return false;
  return package.size() == prefix.size() || package[prefix.size()] == '.';
}

PackageMatch match_packages(const std::vector<PackageMetricRow>& rows,
                            const PackageServiceMapping& mapping) {
  if (mapping.entries.empty()) throw MetricsError("empty package mapping");
  PackageMatch result;
  for (const auto& service : mapping.services()) result.groups.push_back({service, {}});

  for (const auto& row : rows) {
    const std::string* owner = nullptr;
    for (const auto& [prefix, service] : mapping.entries) {
      if (!package_matches(row.package, prefix)) continue;
      if (owner && *owner != service)
        throw MetricsError("ambiguous mapping: package '" + row.package + "' matches '" +
                           *owner + "' and '" + service + "'");
      owner = &service;
    }
    if (!owner) {
      result.unmatched.push_back(row.package);
      continue;
    }
    auto it = std::find_if(result.groups.begin(), result.groups.end(),
                           [&](const auto& g) { return g.first == *owner; });
    it->second.push_back(row);
  }
  return result;
}

std::string_view to_string(MetricClass c) {
  switch (c) {
    case MetricClass::Count:
      return "count";
    case MetricClass::Ratio:
      return "ratio";
    case MetricClass::Rating:
      return "rating";
  }
  return "count";
}

std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::Sum:
      return "sum";
    case Aggregation::Avg:
      return "avg";
    case Aggregation::Max:
      return "max";
  }
  return "sum";
}

std::optional<MetricClass> parse_metric_class(std::string_view text) {
  for (auto c : {MetricClass::Count, MetricClass::Ratio, MetricClass::Rating})
    if (to_string(c) == text) return c;
  return std::nullopt;
}

std::optional<Aggregation> parse_aggregation(std::string_view text) {
  for (auto a : {Aggregation::Sum, Aggregation::Avg, Aggregation::Max})
    if (to_string(a) == text) return a;
  return std::nullopt;
}

void MetricDescriptor::validate() const {
  if (name.empty()) throw MetricsError("descriptor without metric name");
  if (aggregations.empty()) throw MetricsError("descriptor '" + name + "' has no aggregations");
  std::set<Aggregation> seen(aggregations.begin(), aggregations.end());
  if (seen.size() != aggregations.size())
    throw MetricsError("descriptor '" + name + "' repeats an aggregation");
  if (metric_class != MetricClass::Count && seen.contains(Aggregation::Sum))
    throw MetricsError("descriptor '" + name + "': " + std::string(to_string(metric_class)) +
                       " metrics cannot be summed");
}

MetricDescriptor infer_descriptor(std::string_view metric_name) {
  MetricDescriptor d;
  d.name = std::string(metric_name);
  auto contains = [&](std::string_view token) {
    return metric_name.find(token) != std::string_view::npos;
  };
  if (metric_name.ends_with("_rating")) {
    d.metric_class = MetricClass::Rating;
  } else if (contains("Ratio") || contains("Avg") || contains("density") || contains("Density")) {
    d.metric_class = MetricClass::Ratio;
  }
  if (d.metric_class == MetricClass::Count)
    d.aggregations = {Aggregation::Sum, Aggregation::Avg, Aggregation::Max};
  else
    d.aggregations = {Aggregation::Avg, Aggregation::Max};
  return d;
}

const std::vector<MetricDescriptor>& default_descriptors() {
  // Understand (23), Jasome (53), SonarQube (19). Mirrors data/descriptors.csv.
  static const std::vector<MetricDescriptor> kDefaults{
      {"CountDeclClass", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclClassMethod", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclClassVariable", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclExecutableUnit", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclFile", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclFunction", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclInstanceMethod", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclInstanceVariable", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclMethod", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclMethodDefault", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclMethodPrivate", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclMethodProtected", MetricClass::Count, {Aggregation::Sum}},
      {"CountDeclMethodPublic", MetricClass::Count, {Aggregation::Sum}},
      {"CountLine", MetricClass::Count, {Aggregation::Sum}},
      {"CountLineBlank", MetricClass::Count, {Aggregation::Sum}},
      {"CountLineCode", MetricClass::Count, {Aggregation::Sum}},
      {"CountLineCodeDecl", MetricClass::Count, {Aggregation::Sum}},
      {"CountLineCodeExec", MetricClass::Count, {Aggregation::Sum}},
      {"CountLineComment", MetricClass::Count, {Aggregation::Sum}},
      {"CountSemicolon", MetricClass::Count, {Aggregation::Sum}},
      {"CountStmt", MetricClass::Count, {Aggregation::Sum}},
      {"CountStmtDecl", MetricClass::Count, {Aggregation::Sum}},
      {"CountStmtExec", MetricClass::Count, {Aggregation::Sum}},
      {"A", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"CCRC", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"Ca", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Ce", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"DMS", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"I", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"NOC", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"NOI", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"PTLOC", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"Aa", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Ad", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Ai", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Ait", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"ClRCi", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"ClTCi", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"DIT", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"HMd", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"HMi", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"LCOM*", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"Ma", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Md", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Mi", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Mit", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Mo", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NF", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"NM", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"NMA", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NMI", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NOA", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NOCh", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NOD", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NOL", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NORM", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NPF", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NPM", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NSF", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NSM", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"PMR", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"PMd", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"PMi", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"RTLOC", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"SIX", MetricClass::Ratio, {Aggregation::Avg, Aggregation::Max}},
      {"TLOC", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"Di", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Fin", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"Fout", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"IOVars", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NBD", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"NCOMP", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NOP", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"NVAR", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg}},
      {"Si", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"VG", MetricClass::Count, {Aggregation::Sum, Aggregation::Avg, Aggregation::Max}},
      {"ncloc", MetricClass::Count, {Aggregation::Sum}},
      {"lines", MetricClass::Count, {Aggregation::Sum}},
      {"statements", MetricClass::Count, {Aggregation::Sum}},
      {"functions", MetricClass::Count, {Aggregation::Sum}},
      {"classes", MetricClass::Count, {Aggregation::Sum}},
      {"comment_lines", MetricClass::Count, {Aggregation::Sum}},
      {"complexity", MetricClass::Count, {Aggregation::Sum}},
      {"cognitive_complexity", MetricClass::Count, {Aggregation::Sum}},
      {"violations", MetricClass::Count, {Aggregation::Sum}},
      {"code_smells", MetricClass::Count, {Aggregation::Sum}},
      {"bugs", MetricClass::Count, {Aggregation::Sum}},
      {"vulnerabilities", MetricClass::Count, {Aggregation::Sum}},
      {"duplicated_blocks", MetricClass::Count, {Aggregation::Sum}},
      {"duplicated_lines", MetricClass::Count, {Aggregation::Sum}},
      {"sqale_index", MetricClass::Count, {Aggregation::Sum}},
      {"security_remediation_effort", MetricClass::Count, {Aggregation::Sum}},
      {"sqale_rating", MetricClass::Rating, {Aggregation::Avg, Aggregation::Max}},
      {"reliability_rating", MetricClass::Rating, {Aggregation::Avg, Aggregation::Max}},
      {"security_rating", MetricClass::Rating, {Aggregation::Avg, Aggregation::Max}},
  };
  return kDefaults;
}

MetricTable::MetricTable(std::vector<std::string> services) : services_(std::move(services)) {}

std::optional<std::size_t> MetricTable::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - columns_.begin());
}

std::optional<std::size_t> MetricTable::row_of(std::string_view service) const {
  auto it = std::find(services_.begin(), services_.end(), service);
  if (it == services_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - services_.begin());
}

void MetricTable::add_column(std::string name, std::vector<std::optional<double>> values) {
  if (values.size() != services_.size())
    throw MetricsError("column '" + name + "' has " + std::to_string(values.size()) +
                       " values for " + std::to_string(services_.size()) + " services");
  if (column_index(name)) throw MetricsError("duplicate column '" + name + "'");
  columns_.push_back(std::move(name));
  values_.push_back(std::move(values));
}

MetricTable MetricTable::without_columns(const std::vector<std::string>& names) const {
  MetricTable out(services_);
  for (std::size_t c = 0; c < columns_.size(); ++c)
    if (std::find(names.begin(), names.end(), columns_[c]) == names.end())
      out.add_column(columns_[c], values_[c]);
  return out;
}

MetricTable MetricTable::with_rows(const std::vector<std::string>& services) const {
  std::vector<std::size_t> rows;
  for (const auto& s : services) {
    auto r = row_of(s);
    if (!r) throw MetricsError("unknown service '" + s + "'");
    rows.push_back(*r);
  }
  MetricTable out(services);
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    std::vector<std::optional<double>> values;
    values.reserve(rows.size());
    for (auto r : rows) values.push_back(values_[c][r]);
    out.add_column(columns_[c], std::move(values));
  }
  return out;
}

AggregationOutcome aggregate(
    const std::vector<std::pair<std::string, std::vector<PackageMetricRow>>>& groups,
    const std::vector<MetricDescriptor>& descriptors) {
  std::vector<std::string> services;
  for (const auto& [service, rows] : groups) {
    if (rows.empty()) throw MetricsError("service '" + service + "' has no package rows");
    services.push_back(service);
  }
  AggregationOutcome outcome{MetricTable(services), {}};

  for (const auto& d : descriptors) {
    d.validate();
    bool seen_anywhere = false;
    for (const auto& [service, rows] : groups)
      for (const auto& row : rows) seen_anywhere = seen_anywhere || row.values.contains(d.name);
    if (!seen_anywhere) {
      log::warn("metric '" + d.name + "' not present in any package row; skipped");
      outcome.skipped_metrics.push_back(d.name);
      continue;
    }
    for (auto a : d.aggregations) {
      std::vector<std::optional<double>> column;
      column.reserve(groups.size());
      for (const auto& [service, rows] : groups) {
        double sum = 0.0;
        double max = 0.0;
        std::size_t present = 0;
        for (const auto& row : rows) {
          auto it = row.values.find(d.name);
          if (it == row.values.end()) continue;
          sum += it->second;
          max = present == 0 ? it->second : std::max(max, it->second);
          ++present;
        }
        std::optional<double> value;
        switch (a) {
          case Aggregation::Sum:
            if (present > 0 || d.zero_default) value = sum;
            break;
          case Aggregation::Avg:
            if (present > 0) value = sum / static_cast<double>(present);
            break;
          case Aggregation::Max:
            if (present > 0) value = max;
            break;
        }
        if (d.metric_class == MetricClass::Rating && value && (*value < 1.0 || *value > 5.0))
          log::warn("rating '" + d.name + "' of service '" + service + "' outside [1, 5]");
        column.push_back(value);
      }
      outcome.table.add_column(d.name + "." + std::string(to_string(a)), std::move(column));
    }
  }
  return outcome;
}

MetricTable derive_ratio_metrics(const MetricTable& table, const RatioColumns& columns) {
  std::vector<std::string> missing;
  for (const auto* name : {&columns.private_methods, &columns.protected_methods, &columns.public_methods})
    if (!table.column_index(*name)) missing.push_back(*name);
  if (!missing.empty()) {
    std::string message = "ratio metrics need missing columns:";
    for (const auto& m : missing) message += " " + m;
    throw MetricsError(message);
  }
  const auto& pub = table.column(*table.column_index(columns.public_methods));
  auto ratio = [&](const std::string& numerator_column) {
    const auto& num = table.column(*table.column_index(numerator_column));
    std::vector<std::optional<double>> out(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
      if (!num[r] || !pub[r]) continue;
      if (*pub[r] != 0.0)
        out[r] = *num[r] / *pub[r];
      else if (*num[r] == 0.0)
        out[r] = 0.0;
    }
    return out;
  };
  MetricTable out = table;
  out.add_column(std::string(kPrivateToPublic), ratio(columns.private_methods));
  out.add_column(std::string(kProtectedToPublic), ratio(columns.protected_methods));
  return out;
}

CompletenessFilter keep_complete_services(const MetricTable& table,
                                          const std::vector<std::string>& known_services) {
  CompletenessFilter result;
  std::vector<std::string> keep;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    const auto& service = table.services()[r];
    bool complete =
        std::find(known_services.begin(), known_services.end(), service) != known_services.end();
    for (std::size_t c = 0; complete && c < table.columns().size(); ++c)
      complete = table.at(r, c).has_value();
    if (complete)
      keep.push_back(service);
    else
      result.dropped.push_back(service);
  }
  result.table = table.with_rows(keep);
  return result;
}

JoinReport join_services(const std::vector<std::string>& left,
                         const std::vector<std::string>& right) {
  JoinReport report;
  auto in = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  for (const auto& s : left) (in(right, s) ? report.common : report.only_left).push_back(s);
  for (const auto& s : right)
    if (!in(left, s)) report.only_right.push_back(s);
  return report;
}

}  // namespace svcnet
