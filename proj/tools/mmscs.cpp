// Command-line front end: ingest, graph, train, index, search, eval, synth.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mmscs/cedg.hpp"
#include "mmscs/corpus.hpp"
#include "mmscs/encoder.hpp"
#include "mmscs/error.hpp"
#include "mmscs/evaluate.hpp"
#include "mmscs/index.hpp"
#include "mmscs/provider.hpp"
#include "mmscs/synth.hpp"
#include "mmscs/trainer.hpp"

namespace {

using namespace mmscs;

std::vector<std::size_t> parse_ks(const std::string& list) {
  std::vector<std::size_t> ks;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::logic_error&) {
      throw ConfigError("bad cutoff '" + item + "' in --ks");
    }
  }
  if (ks.empty()) throw ConfigError("--ks is empty");
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

void warn_all(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

// The graph readout keeps the first max_nodes nodes by id.
void warn_if_truncated(const std::string& id, const Cedg& g, std::size_t max_nodes) {
  if (g.nodes.size() > max_nodes)
    std::cerr << "warning: " << id << ": graph has " << g.nodes.size() << " nodes, readout keeps "
              << max_nodes << '\n';
}

std::string unit_metadata(const FunctionUnit& u) {
  nlohmann::ordered_json j;
  j["name"] = u.name;
  j["kind"] = std::string(to_string(u.kind));
  j["path"] = u.path;
  j["span"] = {u.span.start, u.span.end};
  j["docstring"] = u.docstring ? nlohmann::json(*u.docstring) : nlohmann::json();
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semantic code search for Solidity smart contracts"};
  app.require_subcommand(1);

  // ingest
  std::string src_dir, out_path;
  bool dedup = false;
  auto* ingest = app.add_subcommand("ingest", "Extract function units from .sol files");
  ingest->add_option("--src", src_dir, "Directory scanned recursively")->required();
  ingest->add_option("--out", out_path, "Corpus JSON Lines output")->required();
  ingest->add_flag("--dedup", dedup, "Drop units with identical normalized source");

  // graph
  std::string corpus_path, unit_id;
  bool dot = false;
  auto* graph = app.add_subcommand("graph", "Print the dependency graph of one unit");
  graph->add_option("--corpus", corpus_path)->required();
  graph->add_option("--id", unit_id, "Unit id as stored in the corpus")->required();
  graph->add_flag("--dot", dot, "Graphviz output instead of JSON");

  // train
  ModelConfig mc;
  mc.out_dim = 64;
  TrainConfig tc;
  std::string modalities = "T,F,A,G", log_path;
  std::size_t train_folds = 0;
  auto* trainc = app.add_subcommand("train", "Fit the model on (code, docstring) pairs");
  trainc->add_option("--corpus", corpus_path)->required();
  trainc->add_option("--out", out_path, "Checkpoint path")->required();
  trainc->add_option("--dim", mc.dim, "Embedding width d")->capture_default_str();
  trainc->add_option("--out-dim", mc.out_dim, "Output width d_out")->capture_default_str();
  trainc->add_option("--heads", mc.heads, "Text attention heads")->capture_default_str();
  trainc->add_option("--graph-heads", mc.graph_heads, "Graph attention heads")->capture_default_str();
  trainc->add_option("--margin", mc.margin, "Ranking margin")->capture_default_str();
  trainc->add_option("--epochs", tc.epochs)->capture_default_str();
  trainc->add_option("--batch", tc.batch)->capture_default_str();
  trainc->add_option("--lr", tc.lr)->capture_default_str();
  trainc->add_option("--seed", tc.seed)->capture_default_str();
  trainc->add_option("--folds", train_folds, "Also cross-validate with this many folds");
  trainc->add_option("--modalities", modalities, "Subset of T,F,A,G")->capture_default_str();
  trainc->add_option("--min-count", tc.min_count, "Vocabulary frequency threshold")->capture_default_str();
  trainc->add_option("--log", log_path, "Training log CSV (default: <out>.log.csv)");

  // index
  std::string model_path;
  auto* indexc = app.add_subcommand("index", "Embed every unit of a corpus");
  indexc->add_option("--corpus", corpus_path)->required();
  indexc->add_option("--model", model_path)->required();
  indexc->add_option("--out", out_path)->required();

  // search
  std::string index_path, query, provider_cmd;
  std::size_t k = 10;
  auto* search = app.add_subcommand("search", "Answer a natural-language query");
  search->add_option("--index", index_path)->required();
  search->add_option("--model", model_path)->required();
  search->add_option("--query", query)->required();
  search->add_option("-k", k)->capture_default_str();
  search->add_option("--provider", provider_cmd, "External embedding command");

  // eval
  std::size_t eval_folds = 10, cutoff = 10;
  std::string ks = "1,5,10";
  std::uint64_t eval_seed = 42;
  bool no_latency = false;
  auto* evalc = app.add_subcommand("eval", "SR@k and MRR of a checkpoint");
  evalc->add_option("--corpus", corpus_path)->required();
  evalc->add_option("--model", model_path)->required();
  evalc->add_option("--folds", eval_folds, "1 evaluates the whole corpus at once")->capture_default_str();
  evalc->add_option("--ks", ks)->capture_default_str();
  evalc->add_option("--cutoff", cutoff, "MRR cutoff")->capture_default_str();
  evalc->add_option("--seed", eval_seed, "Fold assignment seed")->capture_default_str();
  evalc->add_flag("--no-latency", no_latency, "Omit wall-clock timings from the output");

  // synth
  std::size_t n = 200;
  std::uint64_t synth_seed = 7;
  auto* synth = app.add_subcommand("synth", "Generate a templated corpus");
  synth->add_option("--n", n)->capture_default_str();
  synth->add_option("--seed", synth_seed)->capture_default_str();
  synth->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) {
      std::vector<std::string> warnings;
      auto units = ingest_directory(src_dir, dedup, &warnings);
      warn_all(warnings);
      write_corpus(std::filesystem::path(out_path), units);
      std::cout << units.size() << " units\n";
    } else if (*graph) {
      auto units = read_corpus(std::filesystem::path(corpus_path));
      auto it = std::find_if(units.begin(), units.end(), [&](const auto& u) { return u.id == unit_id; });
      if (it == units.end()) throw ConfigError("no unit with id '" + unit_id + "'");
      const Cedg g = build_cedg(*it, ContextIndex(units).context_of(*it));
      std::cout << (dot ? to_dot(g, it->name.empty() ? "fallback" : it->name) : serialize(g)) << '\n';
    } else if (*trainc) {
      mc.modalities = Modalities::parse(modalities);
      mc.validate();
      auto pairs = make_pairs(read_corpus(std::filesystem::path(corpus_path)), mc);
      for (const auto& p : pairs) warn_if_truncated(p.id, p.graph, mc.max_nodes);
      if (train_folds > 0) {
        EvalOptions eo;
        eo.folds = train_folds;
        eo.seed = tc.seed;
        std::vector<std::string> warnings;
        auto result = cross_validate(pairs, mc, tc, eo, &warnings);
        warn_all(warnings);
        std::cout << to_json(result) << '\n';
      }
      auto trained = train(pairs, mc, tc, [](const EpochLog& e) {
        std::cerr << "epoch " << e.epoch << " loss " << e.mean_loss << '\n';
        return true;
      });
      trained.model.save(out_path);
      std::ofstream log(log_path.empty() ? out_path + ".log.csv" : log_path);
      write_training_log(log, trained.log);
    } else if (*indexc) {
      const Model model = Model::load(model_path);
      auto units = read_corpus(std::filesystem::path(corpus_path));
      ContextIndex contexts(units);
      SearchIndex index(model.config().out_dim);
      for (const auto& u : units) {
        try {
          const Cedg g = build_cedg(u, contexts.context_of(u));
          warn_if_truncated(u.id, g, model.config().max_nodes);
          auto v = encode_code(tokenize_code(u, model.config().caps), g, model);
          index.add(u.id, v, unit_metadata(u));
        } catch (const Error& e) {
          std::cerr << "warning: skipped " << u.id << ": " << e.what() << '\n';
        }
      }
      index.save(out_path);
      std::cout << index.size() << " records\n";
    } else if (*search) {
      const Model model = Model::load(model_path);
      const SearchIndex index = SearchIndex::load(index_path);
      std::unique_ptr<EmbeddingProvider> provider;
      if (!provider_cmd.empty()) provider = std::make_unique<SubprocessProvider>(provider_cmd);
      const auto q = encode_query(query, model, provider.get());
      const auto hits = index.search(q, k);
      for (std::size_t r = 0; r < hits.size(); ++r) {
        nlohmann::ordered_json j;
        j["rank"] = r + 1;
        j["score"] = hits[r].score;
        j["id"] = hits[r].id;
        const auto& meta = index.metadata(hits[r].id);
        j["meta"] = meta.empty() ? nlohmann::json() : nlohmann::json::parse(meta);
        std::cout << j.dump() << '\n';
      }
    } else if (*evalc) {
      const Model model = Model::load(model_path);
      auto pairs = make_pairs(read_corpus(std::filesystem::path(corpus_path)), model.config());
      EvalOptions eo;
      eo.ks = parse_ks(ks);
      eo.cutoff = cutoff;
      eo.folds = eval_folds;
      eo.seed = eval_seed;
      std::vector<std::string> warnings;
      auto result = evaluate(pairs, ModelPairEncoder(model), eo, &warnings);
      warn_all(warnings);
      std::cout << to_json(result, !no_latency) << '\n';
    } else if (*synth) {
      write_corpus(std::filesystem::path(out_path), generate_synthetic_corpus(n, synth_seed));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
