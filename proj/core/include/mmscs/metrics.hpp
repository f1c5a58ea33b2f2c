#pragma once

#include <cstddef>
#include <vector>

namespace mmscs {

/// Rank of the correct result for one query, 1-based; kMiss when it was not
/// retrieved at all.
inline constexpr std::size_t kMiss = 0;

/// Fraction of queries with 1 <= rank <= k. Throws ConfigError on an empty set or k == 0.
double success_rate_at_k(const std::vector<std::size_t>& ranks, std::size_t k);

/// Mean of 1/rank, counting ranks beyond `cutoff` and misses as 0.
double mrr(const std::vector<std::size_t>& ranks, std::size_t cutoff);

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;    // two-sided
  std::size_t n = 0;       // non-zero differences
  bool exact = false;
  bool degenerate = false;    // every difference was zero; p = 1 by convention
  bool insufficient = false;  // fewer than 6 non-zero differences
};

/// Paired two-sided signed-rank test on a - b. Zero differences are dropped and
/// tied magnitudes share their mean rank. Exact null distribution up to 25
/// differences, normal approximation with tie correction above.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace mmscs
