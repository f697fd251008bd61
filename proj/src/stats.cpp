#include "svcnet/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

namespace svcnet {
namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  double r = sxy / std::sqrt(sxx * syy);
  // identical rank vectors can land a few ulps away from +-1
  if (std::abs(r) > 1.0 - 1e-12) r = std::copysign(1.0, r);
  return r;
}

bool is_constant(std::span<const double> v) {
  return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) == v.end();
}

}  // namespace

double spearman_p_value(double rho, std::size_t n) {
  if (n < 3) throw StatsError("need at least 3 observations for a p-value");
  if (std::abs(rho) >= 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(dof / ((1.0 - rho) * (1.0 + rho)));
  boost::math::students_t dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

namespace {

double permutation_p_value(std::span<const double> rx, std::span<const double> ry, double rho) {
  std::vector<std::size_t> order(ry.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> permuted(ry.size());
  std::size_t extreme = 0;
  std::size_t total = 0;
  do {
    for (std::size_t i = 0; i < order.size(); ++i) permuted[i] = ry[order[i]];
    if (std::abs(pearson(rx, permuted)) >= std::abs(rho) - 1e-12) ++extreme;
    ++total;
  } while (std::next_permutation(order.begin(), order.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

// D'Agostino & Stephens (1986), table 4.9, for the adjusted statistic.
double ad_p_value(double a) {
  if (a >= 0.6) return std::exp(1.2937 - 5.709 * a + 0.0186 * a * a);
  if (a >= 0.34) return std::exp(0.9177 - 4.279 * a - 1.38 * a * a);
  if (a >= 0.2) return 1.0 - std::exp(-8.318 + 42.796 * a - 59.938 * a * a);
  return 1.0 - std::exp(-13.436 + 101.14 * a - 223.73 * a * a);
}

}  // namespace

std::optional<std::size_t> ad_level_index(double level) {
  for (std::size_t i = 0; i < kAdLevels.size(); ++i)
    if (std::abs(kAdLevels[i] - level) < 1e-12) return i;
  return std::nullopt;
}

NormalityResult anderson_darling(std::span<const double> values, double significance_level,
                                 std::string metric) {
  auto level = ad_level_index(significance_level);
  if (!level) throw StatsError("unsupported significance level " + std::to_string(significance_level));
  if (std::any_of(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }))
    throw StatsError("non-finite value in sample");
  const auto n = values.size();
  if (n < 8) throw StatsError("sample too small");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (!(sd > 0.0)) throw StatsError("zero variance");

  // log Phi(z) and log(1 - Phi(z)) via erfc keep precision in both tails
  auto log_cdf = [](double z) { return std::log(0.5 * std::erfc(-z / std::sqrt(2.0))); };
  auto log_sf = [](double z) { return std::log(0.5 * std::erfc(z / std::sqrt(2.0))); };
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double zi = (sorted[i] - mean) / sd;
    const double zr = (sorted[n - 1 - i] - mean) / sd;
    s += static_cast<double>(2 * i + 1) * (log_cdf(zi) + log_sf(zr));
  }
  const double nd = static_cast<double>(n);

  NormalityResult result;
  result.metric = std::move(metric);
  result.n = n;
  result.a2 = -nd - s / nd;
  result.a2_adjusted = result.a2 * (1.0 + 0.75 / nd + 2.25 / (nd * nd));
  result.significance_level = significance_level;
  result.reject_normality = result.a2_adjusted > kAdCriticalValues[*level];
  for (std::size_t i = 0; i < kAdLevels.size(); ++i)
    if (result.a2_adjusted > kAdCriticalValues[i]) result.strongest_rejection_level = kAdLevels[i];
  result.p_value = std::clamp(ad_p_value(result.a2_adjusted), 0.0, 1.0);
  return result;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, PValueMethod method) {
  if (x.size() != y.size())
    throw StatsError("length mismatch: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  if (x.size() < 4) throw StatsError("need at least 4 observations");
  if (is_constant(x) || is_constant(y)) throw StatsError("undefined correlation: constant input");

  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  SpearmanResult result;
  result.rho = pearson(rx, ry);
  if (method == PValueMethod::ExactPermutation) {
    if (x.size() > 9) throw StatsError("exact permutation p-value limited to n <= 9");
    result.p_value = permutation_p_value(rx, ry, result.rho);
  } else {
    result.p_value = spearman_p_value(result.rho, x.size());
  }
  return result;
}

std::string_view to_string(Interpretation i) {
  switch (i) {
    case Interpretation::Zero:
      return "zero";
    case Interpretation::Weak:
      return "weak";
    case Interpretation::Moderate:
      return "moderate";
    case Interpretation::Strong:
      return "strong";
    case Interpretation::Perfect:
      return "perfect";
  }
  return "zero";
}

Interpretation interpret(double rho) {
  const double a = std::abs(rho);
  if (a >= 1.0) return Interpretation::Perfect;
  if (a >= 0.7) return Interpretation::Strong;
  if (a >= 0.4) return Interpretation::Moderate;
  if (a >= 0.1) return Interpretation::Weak;
  return Interpretation::Zero;
}

std::string_view to_string(Correction c) {
  switch (c) {
    case Correction::None:
      return "none";
    case Correction::Bonferroni:
      return "bonferroni";
    case Correction::Holm:
      return "holm";
  }
  return "none";
}

std::optional<Correction> parse_correction(std::string_view text) {
  for (auto c : {Correction::None, Correction::Bonferroni, Correction::Holm})
    if (to_string(c) == text) return c;
  return std::nullopt;
}

std::size_t CorrelationMatrix::significant_count() const {
  return static_cast<std::size_t>(std::count_if(
      cells.begin(), cells.end(), [](const auto& c) { return c && c->significant; }));
}

std::array<std::size_t, 5> CorrelationMatrix::interpretation_histogram() const {
  std::array<std::size_t, 5> histogram{};
  for (const auto& c : cells)
    if (c && c->significant) ++histogram[static_cast<std::size_t>(c->interpretation)];
  return histogram;
}

CorrelationMatrix correlate_columns(const std::vector<LabeledColumn>& row_columns,
                                    const std::vector<LabeledColumn>& col_columns, double alpha,
                                    Correction correction) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw StatsError("alpha must lie in (0, 1)");
  CorrelationMatrix m;
  m.alpha = alpha;
  m.correction = correction;
  for (const auto& c : row_columns) m.rows.push_back(c.name);
  for (const auto& c : col_columns) m.cols.push_back(c.name);
  m.cells.resize(m.rows.size() * m.cols.size());

  std::vector<double> xs, ys;
  for (std::size_t r = 0; r < row_columns.size(); ++r) {
    for (std::size_t c = 0; c < col_columns.size(); ++c) {
      const auto& x = row_columns[r].values;
      const auto& y = col_columns[c].values;
      if (x.size() != y.size()) throw StatsError("column length mismatch");
      xs.clear();
      ys.clear();
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
          xs.push_back(*x[i]);
          ys.push_back(*y[i]);
        }
      }
      SkippedPair skip{m.rows[r], m.cols[c], {}};
      if (xs.size() < 4) {
        skip.reason = "fewer than 4 usable rows (" + std::to_string(xs.size()) + ")";
      } else if (is_constant(xs)) {
        skip.reason = "constant column '" + m.rows[r] + "'";
      } else if (is_constant(ys)) {
        skip.reason = "constant column '" + m.cols[c] + "'";
      }
      if (!skip.reason.empty()) {
        m.skipped.push_back(std::move(skip));
        continue;
      }
      auto s = spearman(xs, ys);
      CorrelationResult result;
      result.x = m.rows[r];
      result.y = m.cols[c];
      result.n = xs.size();
      result.rho = s.rho;
      result.p_value = s.p_value;
      result.interpretation = interpret(s.rho);
      m.cells[r * m.cols.size() + c] = std::move(result);
      ++m.tests_performed;
    }
  }

  const auto tests = static_cast<double>(m.tests_performed);
  switch (correction) {
    case Correction::None:
      for (auto& cell : m.cells)
        if (cell) cell->significant = cell->p_value < alpha;
      break;
    case Correction::Bonferroni:
      for (auto& cell : m.cells)
        if (cell) cell->significant = cell->p_value < alpha / tests;
      break;
    case Correction::Holm: {
      std::vector<CorrelationResult*> ordered;
      for (auto& cell : m.cells)
        if (cell) ordered.push_back(&*cell);
      std::stable_sort(ordered.begin(), ordered.end(),
                       [](auto* a, auto* b) { return a->p_value < b->p_value; });
      for (std::size_t k = 0; k < ordered.size(); ++k) {
        if (!(ordered[k]->p_value < alpha / (tests - static_cast<double>(k)))) break;
        ordered[k]->significant = true;
      }
      break;
    }
  }
  return m;
}

CorrelationMatrix correlate(const CentralityTable& centrality, const MetricTable& metrics,
                            double alpha, Correction correction) {
  auto join = join_services(centrality.services(), metrics.services());
  if (join.common.empty()) throw StatsError("empty join between centrality and metric tables");

  std::vector<LabeledColumn> row_columns;
  for (auto kind : kAllCentralities) {
    LabeledColumn col{std::string(column_name(kind)), {}};
    for (const auto& s : join.common) col.values.push_back(centrality.at(*centrality.row_of(s), kind));
    row_columns.push_back(std::move(col));
  }
  std::vector<LabeledColumn> col_columns;
  for (std::size_t c = 0; c < metrics.columns().size(); ++c) {
    LabeledColumn col{metrics.columns()[c], {}};
    for (const auto& s : join.common) col.values.push_back(metrics.at(*metrics.row_of(s), c));
    col_columns.push_back(std::move(col));
  }
  return correlate_columns(row_columns, col_columns, alpha, correction);
}

NormalityScreen exclude_normal_metrics(const std::vector<NormalityResult>& results,
                                       const MetricTable& table) {
  NormalityScreen screen;
  for (const auto& r : results)
    if (!r.reject_normality && table.column_index(r.metric)) screen.removed.push_back(r.metric);
  screen.table = table.without_columns(screen.removed);
  return screen;
}

std::vector<NormalityResult> screen_normality(const MetricTable& table, double level,
                                              std::vector<std::string>* errors) {
  std::vector<NormalityResult> results;
  for (std::size_t c = 0; c < table.columns().size(); ++c) {
    std::vector<double> values;
    for (const auto& v : table.column(c))
      if (v) values.push_back(*v);
    try {
      results.push_back(anderson_darling(values, level, table.columns()[c]));
    } catch (const StatsError& e) {
      if (errors) errors->push_back(table.columns()[c] + ": " + e.what());
      NormalityResult kept;
      kept.metric = table.columns()[c];
      kept.n = values.size();
      kept.significance_level = level;
      kept.reject_normality = true;
      kept.a2 = kept.a2_adjusted = kept.p_value = std::numeric_limits<double>::quiet_NaN();
      kept.error = e.what();
      results.push_back(std::move(kept));
    }
  }
  return results;
}

}  // namespace svcnet
