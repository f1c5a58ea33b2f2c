#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "mmscs/cedg.hpp"
#include "mmscs/encoder.hpp"
#include "mmscs/frontend.hpp"

namespace mmscs {

/// A code unit with its docstring, ready for the encoders.
struct TrainingPair {
  std::string id;
  TokenBundle bundle;
  Cedg graph;
  std::vector<std::string> doc;  // normalized docstring words, never empty
};

/// Pairs for every unit with a non-empty docstring, in input order. Graphs are
/// built against each unit's (path, contract) context.
std::vector<TrainingPair> make_pairs(const std::vector<FunctionUnit>& units,
                                     const ModelConfig& config);

/// Vocabulary over T, F, A, node names and docstrings of `pairs`.
Vocabulary pair_vocabulary(const std::vector<TrainingPair>& pairs, std::size_t min_count);

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch = 32;
  double lr = 1e-3;
  std::uint64_t seed = 42;
  std::size_t folds = 10;
  std::size_t min_count = 2;
};

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double mean_loss = 0.0;
  double elapsed_seconds = 0.0;
};

/// Uniform draw over [0, count) \ {positive}. Throws ConfigError if count < 2.
std::size_t sample_negative(std::size_t count, std::size_t positive, std::mt19937_64& rng);

/// Called after each epoch; return false to stop early.
using EpochCallback = std::function<bool(const EpochLog&)>;

struct TrainResult {
  Model model;
  std::vector<EpochLog> log;
};

/// Minimizes the margin ranking loss with one random negative docstring per
/// pair and step. Negatives come from `pairs` only. Deterministic for a fixed
/// seed. Throws NumericError naming the pair on a non-finite loss.
TrainResult train(const std::vector<TrainingPair>& pairs, const ModelConfig& model_config,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});
/// Same, continuing from an existing model.
std::vector<EpochLog> train(Model& model, const std::vector<TrainingPair>& pairs,
                            const TrainConfig& config, const EpochCallback& on_epoch = {});

/// Loss and parameter gradients of one (code, positive, negative) triple.
double pair_loss(const Model& model, const TrainingPair& pair,
                 const std::vector<std::string>& negative_doc, nn::Gradients* grads);

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Shuffles [0, count) with `seed` and deals it into `folds` parts whose sizes
/// differ by at most one. Throws ConfigError if folds < 2 or folds > count.
std::vector<Fold> kfold_split(std::size_t count, std::size_t folds, std::uint64_t seed);

}  // namespace mmscs
