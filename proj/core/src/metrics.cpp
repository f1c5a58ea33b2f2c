#include "mmscs/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmscs/error.hpp"

namespace mmscs {

namespace {

void check(const std::vector<std::size_t>& ranks, std::size_t k) {
  if (ranks.empty()) throw ConfigError("metric over an empty query set");
  if (k == 0) throw ConfigError("k must be at least 1");
}

}  // namespace

double success_rate_at_k(const std::vector<std::size_t>& ranks, std::size_t k) {
  check(ranks, k);
  const auto hits = std::count_if(ranks.begin(), ranks.end(),
                                  [k](std::size_t r) { return r != kMiss && r <= k; });
  return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mrr(const std::vector<std::size_t>& ranks, std::size_t cutoff) {
  check(ranks, cutoff);
  double total = 0.0;
  for (std::size_t r : ranks)
    if (r != kMiss && r <= cutoff) total += 1.0 / static_cast<double>(r);
  return total / static_cast<double>(ranks.size());
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ConfigError("paired samples differ in length");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw NumericError("non-finite paired difference");
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n = diffs.size();
  if (diffs.empty()) {
    res.degenerate = true;
    res.insufficient = true;
    return res;
  }
  res.insufficient = res.n < 6;

  // Mean ranks of |d|, kept doubled so ties stay integral.
  std::vector<std::size_t> idx(res.n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
  std::vector<std::size_t> rank2(res.n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < res.n;) {
    std::size_t j = i;
    while (j + 1 < res.n && std::abs(diffs[idx[j + 1]]) == std::abs(diffs[idx[i]])) ++j;
    const std::size_t doubled = (i + 1) + (j + 1);  // 2 * mean rank
    for (std::size_t t = i; t <= j; ++t) rank2[idx[t]] = doubled;
    const double tcount = static_cast<double>(j - i + 1);
    tie_term += tcount * tcount * tcount - tcount;
    i = j + 1;
  }
  std::size_t wplus2 = 0;
  std::size_t total2 = 0;
  for (std::size_t i = 0; i < res.n; ++i) {
    total2 += rank2[i];
    if (diffs[i] > 0) wplus2 += rank2[i];
  }
  res.w_plus = static_cast<double>(wplus2) / 2.0;
  res.w_minus = static_cast<double>(total2 - wplus2) / 2.0;
  res.statistic = std::min(res.w_plus, res.w_minus);
  const std::size_t stat2 = std::min(wplus2, total2 - wplus2);

  if (res.n <= 25) {
    // Count sign assignments by their doubled positive-rank sum.
    std::vector<double> ways(total2 + 1, 0.0);
    ways[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : rank2) {
      reach += r;
      for (std::size_t s = reach; s >= r; --s) {
        ways[s] += ways[s - r];
        if (s == r) break;
      }
    }
    double tail = 0.0;
    for (std::size_t s = 0; s <= stat2; ++s) tail += ways[s];
    tail /= std::ldexp(1.0, static_cast<int>(res.n));
    res.p_value = std::min(1.0, 2.0 * tail);
    res.exact = true;
  } else {
    const double n = static_cast<double>(res.n);
    const double mean = n * (n + 1.0) / 4.0;
    const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    const double z = (res.statistic - mean) / std::sqrt(var);
    res.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  }
  return res;
}

}  // namespace mmscs
