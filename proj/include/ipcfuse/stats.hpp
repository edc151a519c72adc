#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfuse/fuse.hpp"
#include "ipcfuse/parallel.hpp"

namespace ipcfuse::stats {

/// 1-based ranks; tied values receive the average of their rank positions.
std::vector<double> ranks(std::span<const double> values);

/// Two aligned series: lagged conflict counts (x) against phase (y).
struct SeriesPair {
  std::vector<double> x;
  std::vector<double> y;
};

/// Rank correlation, tie-correct (Pearson on rank vectors; reduces to the
/// 1 - 6*sum(d^2)/(n(n^2-1)) form when there are no ties). Returns nullopt
/// when either series is constant (undefined). Throws InsufficientData for
/// n < 2 or mismatched lengths.
std::optional<double> spearman(const SeriesPair& pair);

/// Two-sided p for the null rho = 0: t = rho*sqrt((n-2)/(1-rho^2)) referred
/// to Student's t with n-2 degrees of freedom. rho = +-1 gives 0. Throws
/// InsufficientData for n < 3.
double p_value(double rho, int n);

/// Permutation-test p for validation: shuffles y with a fixed seed and
/// counts |rho_perm| >= |rho_observed|, (count+1)/(draws+1).
double p_value_permutation(const SeriesPair& pair, uint64_t seed, int draws = 10000);

/// Regularized incomplete beta I_x(a, b); exposed for the test oracles.
double ibeta_reg(double a, double b, double x);

enum class Level { Country, Region, District };
std::string_view to_string(Level level);

struct CorrelationResult {
  std::string unit_key;  // country | country/admin1 | country/admin1/admin2
  Level level = Level::District;
  double rho = 0.0;
  double p_value = 1.0;
  int n = 0;
  bool low_confidence = false;  // fewer than 5 periods
};

/// Builds the per-unit (conflict, phase) series at the requested level.
/// District series are taken as-is; for region and country the conflicts are
/// summed over member districts per period and the phase is the area-weighted
/// mean of the district phases.
std::map<std::string, SeriesPair> aggregate_level(std::span<const fuse::FusedRecord> fused,
                                                  Level level);

struct CorrelateOptions {
  double alpha = 0.05;
  bool include_all = false;       // when set, alpha filtering is disabled
  int confident_min_periods = 5;  // below this, results carry low_confidence
};

/// Per-unit Spearman + p over each unit's time series; by default only the
/// statistically significant results (p < alpha) are returned. Units with
/// undefined correlation (constant series) or fewer than 3 periods are
/// excluded. Output is sorted by unit key regardless of execution policy.
std::vector<CorrelationResult> correlate(std::span<const fuse::FusedRecord> fused, Level level,
                                         const CorrelateOptions& options = {},
                                         Exec exec = Exec::Parallel);

/// unit_key, level, rho, p_value, n, low_confidence
void write_correlations_csv(std::ostream& out, std::span<const CorrelationResult> results);

}  // namespace ipcfuse::stats
