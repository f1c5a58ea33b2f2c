#include <benchmark/benchmark.h>

#include <random>

#include "mmscs/encoder.hpp"
#include "mmscs/index.hpp"
#include "mmscs/synth.hpp"
#include "mmscs/trainer.hpp"

using namespace mmscs;

namespace {

nn::Vector random_vector(std::mt19937_64& rng, Eigen::Index d) {
  std::normal_distribution<double> n;
  nn::Vector v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

void BM_IndexSearch(benchmark::State& state) {
  const auto count = static_cast<std::size_t>(state.range(0));
  const Eigen::Index dim = state.range(1);
  std::mt19937_64 rng(1);
  SearchIndex idx(static_cast<std::size_t>(dim));
  for (std::size_t i = 0; i < count; ++i) idx.add("u" + std::to_string(i), random_vector(rng, dim));
  const nn::Vector q = random_vector(rng, dim);
  for (auto _ : state) benchmark::DoNotOptimize(idx.search(q, 10));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * count));
}
BENCHMARK(BM_IndexSearch)->Args({1000, 64})->Args({10000, 64})->Args({10000, 768})->Args({100000, 64});

struct EncodeFixture {
  std::vector<TrainingPair> pairs;
  Model model;
  static EncodeFixture make(std::size_t dim, std::size_t out) {
    ModelConfig c;
    c.dim = dim;
    c.out_dim = out;
    auto pairs = make_pairs(generate_synthetic_corpus(32, 1), c);
    auto vocab = pair_vocabulary(pairs, 1);
    return {std::move(pairs), Model(c, std::move(vocab), 1)};
  }
};

void BM_EncodeCode(benchmark::State& state) {
  auto f = EncodeFixture::make(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = f.pairs[i++ % f.pairs.size()];
    benchmark::DoNotOptimize(encode_code(p.bundle, p.graph, f.model));
  }
}
BENCHMARK(BM_EncodeCode)->Args({64, 64})->Args({64, 768})->Unit(benchmark::kMillisecond);

void BM_EncodeQuery(benchmark::State& state) {
  auto f = EncodeFixture::make(static_cast<std::size_t>(state.range(0)), 768);
  for (auto _ : state) benchmark::DoNotOptimize(encode_query("transfer tokens to the given address", f.model));
}
BENCHMARK(BM_EncodeQuery)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  auto f = EncodeFixture::make(64, 64);
  for (auto _ : state) {
    nn::Gradients g;
    benchmark::DoNotOptimize(pair_loss(f.model, f.pairs[0], f.pairs[1].doc, &g));
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
