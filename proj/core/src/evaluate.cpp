#include "mmscs/evaluate.hpp"

#include <chrono>
#include <nlohmann/json.hpp>

#include "mmscs/error.hpp"
#include "mmscs/index.hpp"
#include "mmscs/metrics.hpp"

namespace mmscs {

nn::Vector ModelPairEncoder::code(const TrainingPair& pair) const {
  return encode_code(pair.bundle, pair.graph, model_);
}

nn::Vector ModelPairEncoder::query(const TrainingPair& pair) const {
  nn::Tape tape(&model_.params());
  return encode_text(tape, pair.doc, model_).value().row(0);
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
}

std::vector<TrainingPair> select(const std::vector<TrainingPair>& pairs,
                                 const std::vector<std::size_t>& ids) {
  std::vector<TrainingPair> out;
  out.reserve(ids.size());
  for (auto i : ids) out.push_back(pairs[i]);
  return out;
}

void aggregate(EvalResult& r, const EvalOptions& options) {
  r.mean_sr.clear();
  r.mean_mrr = r.embed_ms = r.retrieve_ms = 0.0;
  r.n = 0;
  if (r.folds.empty()) return;
  for (const auto& f : r.folds) {
    for (auto k : options.ks) r.mean_sr[k] += f.sr.at(k);
    r.mean_mrr += f.mrr;
    r.embed_ms += f.embed_ms;
    r.retrieve_ms += f.retrieve_ms;
    r.n += f.n;
  }
  const double count = static_cast<double>(r.folds.size());
  for (auto& [k, v] : r.mean_sr) v /= count;
  r.mean_mrr /= count;
  r.embed_ms /= count;
  r.retrieve_ms /= count;
}

template <typename PerFold>
EvalResult run_folds(const std::vector<TrainingPair>& pairs, const EvalOptions& options,
                     std::vector<std::string>* warnings, PerFold per_fold) {
  if (options.ks.empty()) throw ConfigError("no cutoffs requested");
  EvalResult result;
  std::vector<Fold> folds;
  if (options.folds <= 1) {
    Fold all;
    for (std::size_t i = 0; i < pairs.size(); ++i) all.test.push_back(i);
    folds.push_back(std::move(all));
  } else {
    folds = kfold_split(pairs.size(), options.folds, options.seed);
  }
  for (std::size_t f = 0; f < folds.size(); ++f) {
    if (folds[f].test.size() < 2) {
      if (warnings) warnings->push_back("fold " + std::to_string(f) + " has fewer than 2 pairs; skipped");
      continue;
    }
    result.folds.push_back(per_fold(folds[f]));
  }
  aggregate(result, options);
  return result;
}

}  // namespace

FoldResult evaluate_fold(const std::vector<TrainingPair>& pairs, const PairEncoder& encoder,
                         const EvalOptions& options) {
  if (pairs.size() < 2) throw ConfigError("evaluation needs at least two pairs");
  std::vector<nn::Vector> codes;
  for (const auto& p : pairs) codes.push_back(encoder.code(p));
  SearchIndex index(static_cast<std::size_t>(codes.front().size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) index.add(pairs[i].id, codes[i]);

  FoldResult fold;
  fold.n = pairs.size();
  double embed = 0.0;
  double retrieve = 0.0;
  for (const auto& p : pairs) {
    auto t0 = Clock::now();
    nn::Vector q = encoder.query(p);
    embed += ms_since(t0);
    t0 = Clock::now();
    auto hits = index.search(q, index.size());
    retrieve += ms_since(t0);
    std::size_t rank = kMiss;
    for (std::size_t r = 0; r < hits.size(); ++r) {
      if (hits[r].id == p.id) {
        rank = r + 1;
        break;
      }
    }
    fold.ranks.push_back(rank);
  }
  for (auto k : options.ks) fold.sr[k] = success_rate_at_k(fold.ranks, k);
  fold.mrr = mrr(fold.ranks, options.cutoff);
  fold.embed_ms = embed / static_cast<double>(pairs.size());
  fold.retrieve_ms = retrieve / static_cast<double>(pairs.size());
  return fold;
}

EvalResult evaluate(const std::vector<TrainingPair>& pairs, const PairEncoder& encoder,
                    const EvalOptions& options, std::vector<std::string>* warnings) {
  return run_folds(pairs, options, warnings, [&](const Fold& f) {
    return evaluate_fold(select(pairs, f.test), encoder, options);
  });
}

EvalResult cross_validate(const std::vector<TrainingPair>& pairs, const ModelConfig& model_config,
                          const TrainConfig& train_config, const EvalOptions& options,
                          std::vector<std::string>* warnings) {
  if (options.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  return run_folds(pairs, options, warnings, [&](const Fold& f) {
    auto trained = train(select(pairs, f.train), model_config, train_config);
    return evaluate_fold(select(pairs, f.test), ModelPairEncoder(trained.model), options);
  });
}

std::string to_json(const EvalResult& result, bool include_latency) {
  auto sr_json = [](const std::map<std::size_t, double>& sr) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : sr) j[std::to_string(k)] = v;
    return j;
  };
  nlohmann::ordered_json j;
  j["folds"] = nlohmann::ordered_json::array();
  for (const auto& f : result.folds) {
    nlohmann::ordered_json fj;
    fj["sr"] = sr_json(f.sr);
    fj["mrr"] = f.mrr;
    fj["n"] = f.n;
    j["folds"].push_back(fj);
  }
  j["mean"] = {{"sr", sr_json(result.mean_sr)}, {"mrr", result.mean_mrr}, {"n", result.n}};
  if (include_latency)
    j["latency_ms"] = {{"embed", result.embed_ms}, {"retrieve", result.retrieve_ms}};
  return j.dump();
}

}  // namespace mmscs
