#include "mmscs/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "mmscs/corpus.hpp"
#include "mmscs/error.hpp"
#include "mmscs/nn/layers.hpp"
#include "mmscs/nn/optimizer.hpp"

namespace mmscs {

std::vector<TrainingPair> make_pairs(const std::vector<FunctionUnit>& units,
                                     const ModelConfig& config) {
  ContextIndex contexts(units);
  std::vector<TrainingPair> pairs;
  for (const auto& u : units) {
    if (!u.docstring) continue;
    auto doc = query_words(*u.docstring, config);
    if (doc.empty()) continue;
    pairs.push_back({u.id, tokenize_code(u, config.caps), build_cedg(u, contexts.context_of(u)),
                     std::move(doc)});
  }
  return pairs;
}

Vocabulary pair_vocabulary(const std::vector<TrainingPair>& pairs, std::size_t min_count) {
  std::vector<std::vector<std::string>> seqs;
  for (const auto& p : pairs) {
    seqs.push_back(p.bundle.tokens);
    seqs.push_back(p.bundle.name);
    seqs.push_back(p.bundle.api);
    seqs.push_back(p.doc);
    std::vector<std::string> names;
    for (const auto& n : p.graph.nodes) {
      if (n.category == NodeCategory::Fallback) continue;
      for (auto& w : split_identifier(n.name)) names.push_back(std::move(w));
    }
    seqs.push_back(std::move(names));
  }
  return Vocabulary::build(seqs, min_count);
}

std::size_t sample_negative(std::size_t count, std::size_t positive, std::mt19937_64& rng) {
  if (count < 2) throw ConfigError("negative sampling needs at least two pairs");
  if (positive >= count) throw ConfigError("positive index out of range");
  std::uniform_int_distribution<std::size_t> dist(0, count - 2);
  const std::size_t draw = dist(rng);
  return draw >= positive ? draw + 1 : draw;
}

double pair_loss(const Model& model, const TrainingPair& pair,
                 const std::vector<std::string>& negative_doc, nn::Gradients* grads) {
  nn::Tape tape(&model.params());
  nn::Var code = encode_code(tape, pair.bundle, pair.graph, model);
  nn::Var pos = encode_text(tape, pair.doc, model);
  nn::Var neg = encode_text(tape, negative_doc, model);
  nn::Var loss = nn::ranking_loss(code, pos, neg, model.config().margin);
  const double value = loss.value()(0, 0);
  if (!std::isfinite(value)) throw NumericError("non-finite loss on pair " + pair.id);
  if (grads) {
    tape.backward(loss);
    for (auto& [name, g] : tape.parameter_gradients()) {
      auto it = grads->find(name);
      if (it == grads->end()) grads->emplace(name, std::move(g));
      else it->second += g;
    }
  }
  return value;
}

std::vector<EpochLog> train(Model& model, const std::vector<TrainingPair>& pairs,
                            const TrainConfig& config, const EpochCallback& on_epoch) {
  if (pairs.size() < 2) throw ConfigError("training needs at least two pairs");
  if (config.batch == 0) throw ConfigError("batch size must be positive");
  nn::Adam adam(nn::AdamConfig{config.lr});
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochLog> log;
  const auto start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch) {
      const std::size_t end = std::min(order.size(), begin + config.batch);
      nn::Gradients grads;
      for (std::size_t i = begin; i < end; ++i) {
        const std::size_t neg = sample_negative(pairs.size(), order[i], rng);
        total += pair_loss(model, pairs[order[i]], pairs[neg].doc, &grads);
      }
      nn::Gradients full = nn::zero_gradients(model.params());
      const double inv = 1.0 / static_cast<double>(end - begin);
      for (auto& [name, g] : grads) full.at(name) = g * inv;
      adam.step(model.params(), full);
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log.push_back({epoch, total / static_cast<double>(pairs.size()), elapsed});
    if (on_epoch && !on_epoch(log.back())) break;
  }
  return log;
}

TrainResult train(const std::vector<TrainingPair>& pairs, const ModelConfig& model_config,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  Model model(model_config, pair_vocabulary(pairs, config.min_count), config.seed);
  auto log = train(model, pairs, config, on_epoch);
  return {std::move(model), std::move(log)};
}

void write_training_log(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,mean_loss,elapsed_seconds\n";
  for (const auto& e : log) out << e.epoch << ',' << e.mean_loss << ',' << e.elapsed_seconds << '\n';
}

std::vector<Fold> kfold_split(std::size_t count, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (folds > count)
    throw ConfigError("cannot split " + std::to_string(count) + " pairs into " +
                      std::to_string(folds) + " folds");
  std::vector<std::size_t> ids(count);
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  std::vector<Fold> out(folds);
  for (std::size_t i = 0; i < count; ++i) out[i % folds].test.push_back(ids[i]);
  for (std::size_t f = 0; f < folds; ++f) {
    std::sort(out[f].test.begin(), out[f].test.end());
    for (std::size_t g = 0; g < folds; ++g)
      if (g != f) out[f].train.insert(out[f].train.end(), out[g].test.begin(), out[g].test.end());
    std::sort(out[f].train.begin(), out[f].train.end());
  }
  return out;
}

}  // namespace mmscs
