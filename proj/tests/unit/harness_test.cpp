#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "mmscs/error.hpp"
#include "mmscs/evaluate.hpp"
#include "mmscs/metrics.hpp"
#include "mmscs/synth.hpp"

using namespace mmscs;

TEST(Metrics, WorkedExample) {
  const std::vector<std::size_t> ranks = {1, 3, 12};
  EXPECT_NEAR(success_rate_at_k(ranks, 10), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(success_rate_at_k(ranks, 1), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(mrr(ranks, 10), (1.0 + 1.0 / 3.0) / 3.0, 1e-12);
  EXPECT_NEAR(mrr(ranks, 10), 0.4444, 1e-4);
  EXPECT_NEAR(mrr(ranks, 20), (1.0 + 1.0 / 3.0 + 1.0 / 12.0) / 3.0, 1e-12);
}

TEST(Metrics, MissesCountAsZero) {
  EXPECT_EQ(success_rate_at_k({kMiss, kMiss}, 10), 0.0);
  EXPECT_EQ(mrr({kMiss, 1}, 10), 0.5);
  EXPECT_THROW(success_rate_at_k({}, 1), ConfigError);
  EXPECT_THROW(success_rate_at_k({1}, 0), ConfigError);
}

TEST(Metrics, MonotoneInK) {
  const std::vector<std::size_t> ranks = {4, 1, 9, 2, 30, kMiss, 7};
  double prev = 0.0;
  for (std::size_t k = 1; k <= 40; ++k) {
    const double sr = success_rate_at_k(ranks, k);
    EXPECT_GE(sr, prev);
    prev = sr;
  }
}

TEST(Wilcoxon, AllPositiveSixPairs) {
  auto r = wilcoxon_signed_rank({2, 3, 4, 5, 6, 7}, {1, 1, 1, 1, 1, 1});
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.n, 6u);
  EXPECT_EQ(r.w_plus, 21.0);
  EXPECT_EQ(r.w_minus, 0.0);
  EXPECT_NEAR(r.p_value, 0.03125, 1e-12);
}

TEST(Wilcoxon, ExactMatchesEnumeration) {
  const std::vector<double> a = {1.3, 0.2, 2.5, -0.7, 1.1, 0.9, -1.4, 0.6, 3.1, -0.25};
  const std::vector<double> b(a.size(), 0.0);
  auto r = wilcoxon_signed_rank(a, b);
  // enumerate all 2^n sign patterns of ranks 1..n
  const std::size_t n = a.size();
  std::vector<double> mags(a);
  for (auto& m : mags) m = std::abs(m);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return mags[x] < mags[y]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = static_cast<double>(i + 1);
  double wp = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > 0) wp += rank[i];
  const double total = n * (n + 1) / 2.0;
  const double stat = std::min(wp, total - wp);
  std::size_t extreme = 0;
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s += static_cast<double>(i + 1);
    if (std::min(s, total - s) <= stat) ++extreme;
  }
  EXPECT_EQ(r.statistic, stat);
  EXPECT_NEAR(r.p_value, static_cast<double>(extreme) / (1u << n), 1e-12);
}

TEST(Wilcoxon, NormalApproximationForLargeSamples) {
  std::vector<double> a, b;
  for (int i = 1; i <= 40; ++i) {
    a.push_back(i % 3 == 0 ? -i : i);
    b.push_back(0);
  }
  auto r = wilcoxon_signed_rank(a, b);
  EXPECT_FALSE(r.exact);
  const double n = 40, mean = n * (n + 1) / 4, sd = std::sqrt(n * (n + 1) * (2 * n + 1) / 24);
  const double z = (r.statistic - mean) / sd;
  EXPECT_NEAR(r.p_value, std::erfc(std::abs(z) / std::sqrt(2.0)), 1e-3);
}

TEST(Wilcoxon, DegenerateAndSmall) {
  auto zero = wilcoxon_signed_rank({1, 2, 3}, {1, 2, 3});
  EXPECT_TRUE(zero.degenerate);
  EXPECT_EQ(zero.p_value, 1.0);
  auto few = wilcoxon_signed_rank({1, 2, 3}, {0, 0, 0});
  EXPECT_TRUE(few.insufficient);
  EXPECT_THROW(wilcoxon_signed_rank({1}, {1, 2}), ConfigError);
}

namespace {

std::vector<TrainingPair> stub_pairs(std::size_t n) {
  std::vector<TrainingPair> pairs(n);
  for (std::size_t i = 0; i < n; ++i) {
    pairs[i].id = "p" + std::to_string(i);
    pairs[i].doc = {"w" + std::to_string(i)};
  }
  return pairs;
}

std::size_t pair_index(const TrainingPair& p) { return std::stoul(p.id.substr(1)); }

// one-hot codes; queries point at the unit `shift` further along
struct ShiftedEncoder : PairEncoder {
  std::size_t dim, shift;
  ShiftedEncoder(std::size_t d, std::size_t s) : dim(d), shift(s) {}
  nn::Vector code(const TrainingPair& p) const override {
    nn::Vector v = nn::Vector::Constant(static_cast<Eigen::Index>(dim), 0.01);
    v[static_cast<Eigen::Index>(pair_index(p))] = 1.0;
    return v;
  }
  nn::Vector query(const TrainingPair& p) const override {
    nn::Vector v = nn::Vector::Constant(static_cast<Eigen::Index>(dim), 0.01);
    v[static_cast<Eigen::Index>((pair_index(p) + shift) % dim)] = 1.0;
    return v;
  }
};

}  // namespace

TEST(Evaluate, PerfectEncoderRanksFirst) {
  auto pairs = stub_pairs(20);
  EvalOptions opt;
  opt.folds = 1;
  auto r = evaluate(pairs, ShiftedEncoder(20, 0), opt);
  ASSERT_EQ(r.folds.size(), 1u);
  EXPECT_EQ(r.mean_sr.at(1), 1.0);
  EXPECT_EQ(r.mean_mrr, 1.0);
  EXPECT_EQ(r.n, 20u);
}

TEST(Evaluate, WrongTargetFallsBehind) {
  auto pairs = stub_pairs(20);
  EvalOptions opt;
  opt.folds = 1;
  auto r = evaluate(pairs, ShiftedEncoder(20, 1), opt);
  for (auto rank : r.folds[0].ranks) EXPECT_GE(rank, 2u);
  EXPECT_EQ(r.mean_sr.at(1), 0.0);
}

TEST(Evaluate, FoldsPartitionQueries) {
  auto pairs = stub_pairs(23);
  EvalOptions opt;
  opt.folds = 5;
  auto r = evaluate(pairs, ShiftedEncoder(23, 0), opt);
  ASSERT_EQ(r.folds.size(), 5u);
  std::size_t total = 0;
  for (const auto& f : r.folds) total += f.n;
  EXPECT_EQ(total, 23u);
  EXPECT_EQ(r.mean_mrr, 1.0);
}

TEST(Evaluate, RandomEncoderScoresLow) {
  struct RandomEncoder : PairEncoder {
    nn::Vector draw(const TrainingPair& p, std::uint64_t salt) const {
      std::mt19937_64 rng(std::hash<std::string>{}(p.id) ^ salt);
      std::normal_distribution<double> n;
      nn::Vector v(32);
      for (auto& x : v) x = n(rng);
      return v;
    }
    nn::Vector code(const TrainingPair& p) const override { return draw(p, 1); }
    nn::Vector query(const TrainingPair& p) const override { return draw(p, 2); }
  };
  auto pairs = stub_pairs(100);
  EvalOptions opt;
  opt.folds = 1;
  auto r = evaluate(pairs, RandomEncoder{}, opt);
  // a uniformly random rank among 100 gives sum_{r<=10} 1/r / 100 ~ 0.029
  EXPECT_LT(r.mean_mrr, 0.15);
  EXPECT_LT(r.mean_sr.at(10), 0.3);
}

TEST(Evaluate, TinyFoldsSkippedWithWarning) {
  auto pairs = stub_pairs(3);
  EvalOptions opt;
  opt.folds = 3;
  std::vector<std::string> warnings;
  auto r = evaluate(pairs, ShiftedEncoder(3, 0), opt, &warnings);
  EXPECT_TRUE(r.folds.empty());
  EXPECT_EQ(warnings.size(), 3u);
}

TEST(Evaluate, JsonShape) {
  auto pairs = stub_pairs(10);
  EvalOptions opt;
  opt.folds = 2;
  auto r = evaluate(pairs, ShiftedEncoder(10, 0), opt);
  auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["folds"].size(), 2u);
  EXPECT_EQ(j["mean"]["mrr"], 1.0);
  EXPECT_TRUE(j.contains("latency_ms"));
  EXPECT_FALSE(nlohmann::json::parse(to_json(r, false)).contains("latency_ms"));
}

TEST(Synthetic, DeterministicAndDocumented) {
  auto a = generate_synthetic_corpus(64, 3);
  auto b = generate_synthetic_corpus(64, 3);
  ASSERT_EQ(a.size(), 64u);
  EXPECT_EQ(a, b);
  std::set<std::string> docs;
  for (const auto& u : a) {
    ASSERT_TRUE(u.docstring.has_value());
    docs.insert(*u.docstring);
  }
  EXPECT_GT(docs.size(), 60u);
  EXPECT_NE(generate_synthetic_corpus(64, 4), a);
}

TEST(Synthetic, LargeCorpusStaysValid) {
  auto units = generate_synthetic_corpus(400, 1);
  EXPECT_EQ(units.size(), 400u);
  auto pairs = make_pairs(units, ModelConfig{});
  EXPECT_EQ(pairs.size(), 400u);
  for (const auto& p : pairs) EXPECT_TRUE(validate(p.graph).empty()) << p.id;
}
