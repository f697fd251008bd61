#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svcnet/centrality.hpp"
#include "svcnet/metrics.hpp"

namespace svcnet {

class StatsError : public std::runtime_error {
 public:
  explicit StatsError(const std::string& what) : std::runtime_error(what) {}
};

/// Stephens' significance levels and critical values for the composite
/// normal case, applied to the small-sample adjusted statistic.
inline constexpr std::array<double, 5> kAdLevels{0.15, 0.10, 0.05, 0.025, 0.01};
inline constexpr std::array<double, 5> kAdCriticalValues{0.576, 0.656, 0.787, 0.918, 1.092};

inline constexpr double kDefaultAlpha = 0.01;
inline constexpr double kDefaultAdLevel = 0.05;

/// Index into kAdLevels, or nullopt when `level` is not one of them.
std::optional<std::size_t> ad_level_index(double level);

struct NormalityResult {
  std::string metric;
  std::size_t n = 0;
  double a2 = 0.0;           ///< unadjusted A^2
  double a2_adjusted = 0.0;  ///< A^2 (1 + 0.75/n + 2.25/n^2)
  double significance_level = kDefaultAdLevel;
  bool reject_normality = false;
  /// Smallest tabulated level at which normality is rejected, if any.
  std::optional<double> strongest_rejection_level;
  /// D'Agostino-Stephens approximation of the p-value.
  double p_value = 1.0;
  /// Why the test could not run (sample too small, zero variance); the
  /// statistics are NaN then.
  std::string error;
};

/// Anderson-Darling test against a normal with estimated mean and variance.
/// Requires at least 8 finite values with non-zero spread.
NormalityResult anderson_darling(std::span<const double> values,
                                 double significance_level = kDefaultAdLevel,
                                 std::string metric = {});

/// 1-based ranks; tied values share their average rank.
std::vector<double> average_ranks(std::span<const double> values);

enum class PValueMethod { StudentT, ExactPermutation };

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;
};

/// Two-sided p-value of rho from the t approximation with n-2 degrees of
/// freedom; 0 when |rho| = 1.
double spearman_p_value(double rho, std::size_t n);

/// Two-sided Spearman test. The exact permutation p-value is available for
/// n <= 9.
SpearmanResult spearman(std::span<const double> x, std::span<const double> y,
                        PValueMethod method = PValueMethod::StudentT);

enum class Interpretation { Zero, Weak, Moderate, Strong, Perfect };

std::string_view to_string(Interpretation i);

/// |rho| buckets: 1 Perfect, [0.7, 1) Strong, [0.4, 0.7) Moderate,
/// [0.1, 0.4) Weak, below that Zero.
Interpretation interpret(double rho);

enum class Correction { None, Bonferroni, Holm };

std::string_view to_string(Correction c);
std::optional<Correction> parse_correction(std::string_view text);

struct CorrelationResult {
  std::string x;
  std::string y;
  std::size_t n = 0;
  double rho = 0.0;
  double p_value = 1.0;
  bool significant = false;
  Interpretation interpretation = Interpretation::Zero;
};

struct SkippedPair {
  std::string x;
  std::string y;
  std::string reason;
};

struct LabeledColumn {
  std::string name;
  std::vector<std::optional<double>> values;
};

class CorrelationMatrix {
 public:
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  /// Row-major; empty where the pair was skipped.
  std::vector<std::optional<CorrelationResult>> cells;
  std::vector<SkippedPair> skipped;
  std::size_t tests_performed = 0;
  double alpha = kDefaultAlpha;
  Correction correction = Correction::None;

  const std::optional<CorrelationResult>& at(std::size_t row, std::size_t col) const {
    return cells[row * cols.size() + col];
  }
  std::size_t significant_count() const;
  /// Significant cells per Interpretation, indexed by the enum value.
  std::array<std::size_t, 5> interpretation_histogram() const;
};

/// Spearman for every (row column, col column) pair over rows where both are
/// available. Pairs with fewer than 4 usable rows or a constant side are
/// skipped and listed.
CorrelationMatrix correlate_columns(const std::vector<LabeledColumn>& row_columns,
                                    const std::vector<LabeledColumn>& col_columns,
                                    double alpha = kDefaultAlpha,
                                    Correction correction = Correction::None);

/// Joins the tables by service name and correlates every centrality column
/// with every metric column.
CorrelationMatrix correlate(const CentralityTable& centrality, const MetricTable& metrics,
                            double alpha = kDefaultAlpha,
                            Correction correction = Correction::None);

struct NormalityScreen {
  MetricTable table;
  std::vector<std::string> removed;
};

/// Drops the columns whose normality was not rejected.
NormalityScreen exclude_normal_metrics(const std::vector<NormalityResult>& results,
                                       const MetricTable& table);

/// Runs anderson_darling on every column (available cells only). Columns the
/// test cannot handle are reported through `errors` and treated as
/// non-normal so they stay in the analysis.
std::vector<NormalityResult> screen_normality(const MetricTable& table, double level,
                                              std::vector<std::string>* errors = nullptr);

}  // namespace svcnet
