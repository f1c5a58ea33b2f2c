#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mmscs/encoder.hpp"
#include "mmscs/trainer.hpp"

namespace mmscs {

/// Produces the code and docstring vectors that evaluation compares. Lets the
/// pipeline run with stub encoders as well as a trained model.
class PairEncoder {
 public:
  virtual ~PairEncoder() = default;
  virtual nn::Vector code(const TrainingPair& pair) const = 0;
  virtual nn::Vector query(const TrainingPair& pair) const = 0;
};

class ModelPairEncoder : public PairEncoder {
 public:
  explicit ModelPairEncoder(const Model& model) : model_(model) {}
  nn::Vector code(const TrainingPair& pair) const override;
  nn::Vector query(const TrainingPair& pair) const override;

 private:
  const Model& model_;
};

struct FoldResult {
  std::map<std::size_t, double> sr;  // k -> SR@k
  double mrr = 0.0;
  std::size_t n = 0;
  std::vector<std::size_t> ranks;  // per query, 1-based
  double embed_ms = 0.0;           // mean per query
  double retrieve_ms = 0.0;
};

struct EvalResult {
  std::vector<FoldResult> folds;
  std::map<std::size_t, double> mean_sr;
  double mean_mrr = 0.0;
  std::size_t n = 0;
  double embed_ms = 0.0;
  double retrieve_ms = 0.0;
};

struct EvalOptions {
  std::vector<std::size_t> ks = {1, 5, 10};
  std::size_t cutoff = 10;  // MRR cutoff
  std::size_t folds = 10;   // 1 evaluates the whole set as one fold
  std::uint64_t seed = 42;
};

/// Indexes the code of `pairs`, issues each docstring as a query and records the
/// rank of its own unit.
FoldResult evaluate_fold(const std::vector<TrainingPair>& pairs, const PairEncoder& encoder,
                         const EvalOptions& options);

/// Splits `pairs` into folds and evaluates every fold with the same encoder.
/// Folds with fewer than two pairs are skipped and reported in `warnings`.
EvalResult evaluate(const std::vector<TrainingPair>& pairs, const PairEncoder& encoder,
                    const EvalOptions& options, std::vector<std::string>* warnings = nullptr);

/// Trains one model per fold on the other folds and evaluates it on the held-out fold.
EvalResult cross_validate(const std::vector<TrainingPair>& pairs, const ModelConfig& model_config,
                          const TrainConfig& train_config, const EvalOptions& options,
                          std::vector<std::string>* warnings = nullptr);

/// {"folds":[{"sr":{"1":..},"mrr":..,"n":..}],"mean":{...},"latency_ms":{"embed":..,"retrieve":..}}
/// Latency is wall-clock; leave it out when comparing runs byte for byte.
std::string to_json(const EvalResult& result, bool include_latency = true);

}  // namespace mmscs
