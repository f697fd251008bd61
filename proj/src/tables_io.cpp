#include <algorithm>
#include <charconv>
#include <cmath>
#include <json.hpp>
#include <sstream>
#include <unordered_set>

#include "svcnet/csv.hpp"
#include "svcnet/io.hpp"

namespace svcnet {

namespace {

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

bool blank(const csv::Record& r) { return r.size() == 1 && trim(r[0]).empty(); }

// Parses the CSV and checks the header; returns data records with their
// 1-based line numbers.
std::vector<std::pair<std::size_t, csv::Record>> records(std::string_view text, std::string_view what,
                                                         csv::Record& header) {
  std::vector<csv::Record> all;
  try {
    all = csv::parse(text);
  } catch (const csv::CsvError& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
  std::vector<std::pair<std::size_t, csv::Record>> out;
  std::size_t line = 0;
  bool have_header = false;
  for (auto& r : all) {
    ++line;
    if (blank(r)) continue;
    for (auto& f : r) f = trim(f);
    if (!have_header) {
      header = std::move(r);
      have_header = true;
      continue;
    }
    if (r.size() != header.size())
      throw ParseError(std::string(what) + ": line " + std::to_string(line) + ": expected " +
                       std::to_string(header.size()) + " fields, found " + std::to_string(r.size()));
    out.emplace_back(line, std::move(r));
  }
  if (!have_header) throw ParseError(std::string(what) + ": empty file");
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string_view yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

std::vector<PackageMetricRow> parse_metrics_csv(std::string_view text) {
  csv::Record header;
  auto rows = records(text, "metrics", header);
  if (header.empty() || header[0] != "package")
    throw ParseError("metrics: line 1: first column must be 'package'");
  std::unordered_set<std::string> names;
  for (std::size_t c = 1; c < header.size(); ++c)
    if (header[c].empty() || !names.insert(header[c]).second)
      throw ParseError("metrics: line 1: empty or repeated column '" + header[c] + "'");

  std::vector<PackageMetricRow> out;
  for (auto& [line, r] : rows) {
    if (r[0].empty()) throw ParseError("metrics: line " + std::to_string(line) + ": empty package");
    PackageMetricRow row{r[0], {}};
    for (std::size_t c = 1; c < r.size(); ++c) {
      if (r[c].empty()) continue;
      auto v = parse_number(r[c]);
      if (!v || !std::isfinite(*v))
        throw ParseError("metrics: line " + std::to_string(line) + ": column '" + header[c] +
                         "': not a number: '" + r[c] + "'");
      row.values[header[c]] = *v;
    }
    out.push_back(std::move(row));
  }
  return out;
}

PackageServiceMapping parse_mapping_csv(std::string_view text) {
  csv::Record header;
  auto rows = records(text, "mapping", header);
  if (header != csv::Record{"package", "service"})
    throw ParseError("mapping: line 1: header must be 'package,service'");
  PackageServiceMapping mapping;
  for (auto& [line, r] : rows) {
    if (r[0].empty() || r[1].empty())
      throw ParseError("mapping: line " + std::to_string(line) + ": empty field");
    mapping.entries.emplace_back(r[0], r[1]);
  }
  return mapping;
}

std::vector<MetricDescriptor> parse_descriptors_csv(std::string_view text) {
  csv::Record header;
  auto rows = records(text, "descriptors", header);
  const bool with_zero = header.size() == 4 && header[3] == "zero_default";
  if (!(header.size() == 3 || with_zero) || header[0] != "metric" || header[1] != "class" ||
      header[2] != "aggregations")
    throw ParseError("descriptors: line 1: header must be 'metric,class,aggregations[,zero_default]'");
  std::vector<MetricDescriptor> out;
  for (auto& [line, r] : rows) {
    const std::string where = "descriptors: line " + std::to_string(line) + ": ";
    MetricDescriptor d;
    d.name = r[0];
    auto cls = parse_metric_class(r[1]);
    if (!cls) throw ParseError(where + "unknown class '" + r[1] + "'");
    d.metric_class = *cls;
    std::stringstream aggs(r[2]);
    std::string item;
    while (std::getline(aggs, item, '|')) {
      auto a = parse_aggregation(trim(item));
      if (!a) throw ParseError(where + "unknown aggregation '" + item + "'");
      d.aggregations.push_back(*a);
    }
    if (with_zero) {
      if (r[3] != "true" && r[3] != "false" && !r[3].empty())
        throw ParseError(where + "zero_default must be true or false");
      d.zero_default = r[3] == "true";
    }
    try {
      d.validate();
    } catch (const MetricsError& e) {
      throw ParseError(where + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::string centrality_csv(const CentralityTable& table) {
  csv::Record header{"service"};
  for (auto k : kAllCentralities) header.emplace_back(column_name(k));
  std::string out = csv::format_record(header);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    csv::Record rec{table.services()[r]};
    for (auto k : kAllCentralities) rec.push_back(cell(table.at(r, k)));
    out += csv::format_record(rec);
  }
  return out;
}

std::string metrics_csv(const MetricTable& table) {
  csv::Record header{"service"};
  header.insert(header.end(), table.columns().begin(), table.columns().end());
  std::string out = csv::format_record(header);
  for (std::size_t r = 0; r < table.rows(); ++r) {
    csv::Record rec{table.services()[r]};
    for (std::size_t c = 0; c < table.columns().size(); ++c) rec.push_back(cell(table.at(r, c)));
    out += csv::format_record(rec);
  }
  return out;
}

std::string correlations_csv(const CorrelationMatrix& corr) {
  std::string out = csv::format_record(
      {"x", "y", "n", "rho", "p", "significant", "interpretation", "status", "reason"});
  for (const auto& c : corr.cells) {
    if (!c) continue;
    out += csv::format_record({c->x, c->y, std::to_string(c->n), format_double(c->rho),
                               format_double(c->p_value), std::string(yes_no(c->significant)),
                               std::string(to_string(c->interpretation)), "tested", ""});
  }
  for (const auto& s : corr.skipped)
    out += csv::format_record({s.x, s.y, "", "", "", "", "", "skipped", s.reason});
  return out;
}

std::string normality_csv(const std::vector<NormalityResult>& results,
                          const std::vector<std::string>& excluded) {
  std::string out = csv::format_record(
      {"metric", "n", "a2", "a2_adjusted", "level", "reject_normality", "p", "excluded", "error"});
  for (const auto& r : results) {
    const bool dropped = std::find(excluded.begin(), excluded.end(), r.metric) != excluded.end();
    const bool tested = r.error.empty();
    out += csv::format_record({r.metric, std::to_string(r.n), tested ? format_double(r.a2) : "",
                               tested ? format_double(r.a2_adjusted) : "",
                               format_double(r.significance_level), std::string(yes_no(r.reject_normality)),
                               tested ? format_double(r.p_value) : "", std::string(yes_no(dropped)),
                               r.error});
  }
  return out;
}

namespace {

// Non-finite values become null; nlohmann prints finite doubles in
// shortest round-trip form.
nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

}  // namespace

std::string heatmap_json(const CorrelationMatrix& corr) {
  nlohmann::ordered_json j;
  j["rows"] = corr.rows;
  j["cols"] = corr.cols;
  j["alpha"] = number(corr.alpha);
  j["correction"] = to_string(corr.correction);
  auto values = nlohmann::ordered_json::array();
  auto mask = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < corr.rows.size(); ++r) {
    auto vrow = nlohmann::ordered_json::array();
    auto mrow = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < corr.cols.size(); ++c) {
      const auto& cellv = corr.at(r, c);
      vrow.push_back(cellv ? number(cellv->rho) : nlohmann::ordered_json(nullptr));
      mrow.push_back(cellv && cellv->significant);
    }
    values.push_back(std::move(vrow));
    mask.push_back(std::move(mrow));
  }
  j["values"] = std::move(values);
  j["mask"] = std::move(mask);
  return j.dump(2) + "\n";
}

std::string findings_json(const std::vector<AntiPatternFinding>& findings) {
  auto out = nlohmann::ordered_json::array();
  for (const auto& f : findings) {
    nlohmann::ordered_json j{{"service", f.service},
                             {"pattern", to_string(f.pattern)},
                             {"basis", column_name(f.rule.basis)},
                             {"mode", to_string(f.rule.mode)},
                             {"observed", number(f.observed)},
                             {"threshold_effective", number(f.threshold_effective)}};
    if (f.size_observed) {
      j["size_metric"] = f.rule.size_gate->metric;
      j["size_observed"] = number(*f.size_observed);
      j["size_threshold_effective"] = number(*f.size_threshold_effective);
    }
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string report_markdown(const ReportInputs& in) {
  std::ostringstream md;
  md << "# " << in.title << "\n";

  if (in.preprocess) {
    const auto& p = *in.preprocess;
    md << "\n## Graph\n\n";
    md << "- input: " << p.sanity.nodes << " nodes, " << p.sanity.edges << " edges ("
       << p.sanity.verdict() << ")\n";
    if (p.sanity.suspiciously_sparse)
      md << "- fewer edges than a connected graph needs; the reconstruction likely missed "
            "dependencies\n";
    md << "- database nodes removed: " << p.removed_databases.size();
    for (std::size_t i = 0; i < p.removed_databases.size(); ++i)
      md << (i ? ", " : " (") << p.removed_databases[i] << (i + 1 == p.removed_databases.size() ? ")" : "");
    md << "\n- weakly connected components: " << p.component_count << "\n";
    md << "- nodes outside the largest component: " << p.dropped_outside_gwcc.size() << "\n";
    md << "- analyzed: " << p.graph.node_count() << " nodes, " << p.graph.edge_count() << " edges\n";
  }

  if (in.centrality) {
    md << "\n## Centrality\n\n";
    std::size_t available = 0;
    for (auto k : kAllCentralities) available += in.centrality->available(k);
    md << available << " of " << kCentralityCount << " centrality metrics computed for "
       << in.centrality->rows() << " services\n";
    for (const auto& d : in.centrality->diagnostics())
      md << "- " << column_name(d.kind) << " unavailable: " << d.message << "\n";
  }

  if (in.metrics) md << "\n## Software metrics\n\n" << in.metrics->columns().size() << " metric columns for "
                     << in.metrics->rows() << " services\n";

  if (in.normality) {
    std::size_t rejected = 0, untestable = 0;
    for (const auto& r : *in.normality) {
      rejected += r.reject_normality && r.error.empty();
      untestable += !r.error.empty();
    }
    md << "\n## Normality screening\n\n";
    md << "Anderson-Darling: normality rejected for " << rejected << " of " << in.normality->size()
       << " metrics";
    if (untestable) md << "; " << untestable << " could not be tested and were kept";
    md << "\n";
    if (in.excluded_normal && !in.excluded_normal->empty()) {
      md << "- excluded as normally distributed:";
      for (const auto& m : *in.excluded_normal) md << " " << m;
      md << "\n";
    }
  }

  if (in.correlations) {
    const auto& c = *in.correlations;
    md << "\n## Correlations\n\n";
    md << c.significant_count() << " of " << c.tests_performed << " correlations significant (alpha "
       << format_double(c.alpha) << ", correction " << to_string(c.correction) << ")\n";
    if (!c.skipped.empty()) md << "\n" << c.skipped.size() << " pairs skipped\n";
    md << "\n| interpretation | significant |\n|---|---|\n";
    auto histogram = c.interpretation_histogram();
    for (std::size_t i = 0; i < histogram.size(); ++i)
      md << "| " << to_string(static_cast<Interpretation>(i)) << " | " << histogram[i] << " |\n";
  }

  if (in.findings) {
    md << "\n## Anti-patterns\n\n";
    if (in.findings->empty()) md << "No findings\n";
    for (const auto& f : *in.findings) {
      md << "- " << to_string(f.pattern) << ": " << f.service << " (" << column_name(f.rule.basis) << " "
         << format_double(f.observed) << " > " << format_double(f.threshold_effective);
      if (f.size_observed) md << ", " << f.rule.size_gate->metric << " " << format_double(*f.size_observed);
      md << ")\n";
    }
  }
  return md.str();
}

Manifest write_tables(const CentralityTable& centrality, const MetricTable& metrics,
                      const CorrelationMatrix& corr, const std::filesystem::path& dir,
                      const ReportInputs* full_report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  ReportInputs report;
  report.centrality = &centrality;
  report.metrics = &metrics;
  report.correlations = &corr;
  const std::vector<std::pair<std::string, std::string>> files{
      {"centrality.csv", centrality_csv(centrality)},
      {"metrics.csv", metrics_csv(metrics)},
      {"correlations.csv", correlations_csv(corr)},
      {"heatmap.json", heatmap_json(corr)},
      {"report.md", report_markdown(full_report ? *full_report : report)},
  };
  Manifest manifest;
  for (const auto& [name, content] : files) {
    write_file(dir / name, content);
    manifest.push_back(name);
  }
  return manifest;
}

}  // namespace svcnet
