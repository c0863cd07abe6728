#include <fstream>
#include <set>

#include "commands.hpp"
#include "xlsent/blse.hpp"
#include "xlsent/checkpoint.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/eval.hpp"
#include "xlsent/mapping.hpp"
#include "xlsent/text.hpp"

namespace xlsent::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kSchemes{"binary", "3class", "4class"};

MappingMatrix read_mapping(const std::string& path) {
  std::ifstream in(path);
  try {
    return mapping_from_checkpoint(read_checkpoint(in));
  } catch (const FormatError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// Source rows mapped into the target space, or unchanged without a mapping.
Matrix to_target_space(const std::string& map_path, const Matrix& source, std::size_t target_dim) {
  if (map_path.empty()) {
    if (source.cols() != target_dim) {
      throw ValidationError("source and target dimensions differ (" + std::to_string(source.cols()) + " vs " +
                            std::to_string(target_dim) + "); pass --map");
    }
    return source;
  }
  const MappingMatrix mapping = read_mapping(map_path);
  if (mapping.weights.rows() != source.cols() || mapping.weights.cols() != target_dim) {
    throw ValidationError(map_path + ": mapping shape does not match the embeddings");
  }
  return apply_mapping(mapping, source);
}

struct MapFitOptions {
  std::string src_emb, trg_emb, lexicon, out, summary;
  bool orthogonal = false;
  bool normalize = false;
};

int run_map_fit(const MapFitOptions& o, Context& ctx) {
  const EmbeddingSpace source = read_embeddings(o.src_emb, 0, o.normalize);
  const EmbeddingSpace target = read_embeddings(o.trg_emb, 0, o.normalize);
  const BilingualLexicon lexicon = read_lexicon(o.lexicon);
  const MappingMatrix mapping = fit_mapping(source, target, lexicon, {o.orthogonal});
  write_atomically(o.out, [&](std::ostream& out) { write_checkpoint(to_checkpoint(mapping), out); });
  emit_json(ctx, o.summary,
            json{{"pairs", lexicon.size() - mapping.skipped_pairs},
                 {"skipped_pairs", mapping.skipped_pairs},
                 {"fit_residual", mapping.fit_residual},
                 {"orthogonal", o.orthogonal}});
  return kExitOk;
}

struct CslsOptions {
  std::string src_emb, trg_emb, map, queries, gold, out, summary;
  std::size_t k = 10;
  std::size_t top = 10;
  bool normalize = false;
};

int run_csls(const CslsOptions& o, Context& ctx) {
  const EmbeddingSpace source = read_embeddings(o.src_emb, 0, o.normalize);
  const EmbeddingSpace target = read_embeddings(o.trg_emb, 0, o.normalize);

  std::vector<std::size_t> query_ids;
  if (o.queries.empty()) {
    for (std::size_t i = 0; i < source.size(); ++i) query_ids.push_back(i);
  } else {
    for (const auto& word : read_word_list(o.queries)) {
      if (auto id = source.index_of(word)) {
        query_ids.push_back(*id);
      } else {
        ctx.info("query '" + word + "' not in the source vocabulary; skipped");
      }
    }
  }
  if (query_ids.empty()) throw ValidationError("no query words in the source vocabulary");
  if (o.k == 0 || o.k > query_ids.size() || o.k > target.size()) {
    throw ValidationError("--k " + std::to_string(o.k) + " must lie in [1, min(queries, candidates)]");
  }

  Matrix query_rows(query_ids.size(), source.dim());
  for (std::size_t i = 0; i < query_ids.size(); ++i) {
    const auto v = source.vector(query_ids[i]);
    std::copy(v.begin(), v.end(), query_rows.row(i).begin());
  }
  const Matrix mapped = to_target_space(o.map, query_rows, target.dim());
  const auto hits = csls_retrieve(mapped, target.vectors(), o.k, o.top);

  write_atomically(o.out, [&](std::ostream& out) {
    for (std::size_t i = 0; i < hits.size(); ++i) {
      for (std::size_t r = 0; r < hits[i].size(); ++r) {
        out << source.words()[query_ids[i]] << '\t' << r + 1 << '\t' << target.words()[hits[i][r].candidate] << '\t'
            << format_fixed(hits[i][r].score, 6) << '\n';
      }
    }
  });

  json summary{{"queries", query_ids.size()}, {"k", o.k}};
  if (!o.gold.empty()) {
    const BilingualLexicon gold = read_lexicon(o.gold);
    std::map<std::string, std::set<std::string>> answers;
    for (const auto& p : gold.pairs) answers[p.source].insert(p.target);
    std::size_t evaluated = 0, correct = 0;
    for (std::size_t i = 0; i < query_ids.size(); ++i) {
      auto it = answers.find(source.words()[query_ids[i]]);
      if (it == answers.end() || hits[i].empty()) continue;
      ++evaluated;
      correct += it->second.count(target.words()[hits[i][0].candidate]);
    }
    summary["evaluated"] = evaluated;
    summary["p_at_1"] = evaluated == 0 ? json(nullptr) : json(static_cast<double>(correct) / static_cast<double>(evaluated));
  }
  emit_json(ctx, o.summary, summary);
  return kExitOk;
}

struct BaristaOptions {
  std::string src_corpus, trg_corpus, lexicon, out;
  double p = 0.5;
  std::uint64_t seed = 1;
};

int run_barista(const BaristaOptions& o, Context& ctx) {
  if (!(o.p >= 0.0 && o.p <= 1.0)) throw ValidationError("--p must lie in [0, 1]");
  const auto source = read_token_lines(o.src_corpus);
  const auto target = read_token_lines(o.trg_corpus);
  const BilingualLexicon lexicon = read_lexicon(o.lexicon);
  const BaristaResult result = barista_corpus(source, target, lexicon, o.p, o.seed);
  write_atomically(o.out, [&](std::ostream& out) {
    for (const auto& line : result.lines) {
      for (std::size_t i = 0; i < line.size(); ++i) out << (i ? " " : "") << line[i];
      out << '\n';
    }
  });
  ctx.info("replaced " + std::to_string(result.replaced_tokens) + " of " + std::to_string(result.covered_tokens) +
           " lexicon-covered tokens");
  return kExitOk;
}

struct LinearOptions {
  std::string src_emb, trg_emb, map, train_corpus, test_corpus, out, summary;
  std::string labels = "binary";
  double l2 = 1e-4;
  std::size_t epochs = 500;
  double lr = 0.05;
  std::uint64_t seed = 1;
  bool normalize = false;
};

int run_linear(const LinearOptions& o, Context& ctx) {
  const LabelSchema schema = LabelSchema::named(o.labels);
  const EmbeddingSpace source = read_embeddings(o.src_emb, 0, o.normalize);
  const EmbeddingSpace target = read_embeddings(o.trg_emb, 0, o.normalize);
  const auto train = sentence_level_view(read_corpus(o.train_corpus, schema));
  const Corpus test = read_corpus(o.test_corpus, schema);

  const SentenceFeatures train_features = featurize_sentences(source, train);
  const Matrix train_rows = to_target_space(o.map, train_features.averages, target.dim());
  const LinearClassifier model =
      linear_classifier_fit(train_rows, train_features.labels, schema.arity(), {o.l2, o.epochs, o.lr, o.seed});

  std::vector<std::size_t> gold, predicted;
  for (const auto& inst : test.instances) {
    gold.push_back(inst.label);
    predicted.push_back(linear_classifier_predict(model, average(target, inst.tokens)));
  }
  write_atomically(o.out, [&](std::ostream& out) {
    for (std::size_t label : predicted) out << json{{"label", schema.name(label)}}.dump() << '\n';
  });
  emit_json(ctx, o.summary, json{{"test_macro_f1", macro_f1(gold, predicted, schema.arity())}, {"test", gold.size()}});
  return kExitOk;
}

}  // namespace

void add_baseline_command(CLI::App& app, Context& ctx, Action& action) {
  auto* baseline = app.add_subcommand("baseline", "mapping-based baselines");
  baseline->require_subcommand(1);

  auto fit = std::make_shared<MapFitOptions>();
  auto* sub = baseline->add_subcommand("map-fit", "least-squares mapping from a seed lexicon");
  sub->add_option("--src-emb", fit->src_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--trg-emb", fit->trg_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", fit->lexicon)->required()->check(CLI::ExistingFile);
  sub->add_option("--out", fit->out, "mapping checkpoint")->required();
  sub->add_option("--summary", fit->summary, "summary JSON path (default: stdout)");
  sub->add_flag("--orthogonal", fit->orthogonal, "constrain W to be orthogonal");
  sub->add_flag("--normalize", fit->normalize);
  sub->callback([fit, &ctx, &action] { action = [fit, &ctx] { return run_map_fit(*fit, ctx); }; });

  auto csls = std::make_shared<CslsOptions>();
  sub = baseline->add_subcommand("csls", "CSLS retrieval; TSV query, rank, candidate, score");
  sub->add_option("--src-emb", csls->src_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--trg-emb", csls->trg_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--map", csls->map, "mapping checkpoint (default: identity)")->check(CLI::ExistingFile);
  sub->add_option("--queries", csls->queries, "query words, one per line (default: whole source vocabulary)")
      ->check(CLI::ExistingFile);
  sub->add_option("--gold", csls->gold, "lexicon for P@1 in the summary")->check(CLI::ExistingFile);
  sub->add_option("--k", csls->k, "neighbourhood size");
  sub->add_option("--top", csls->top, "candidates written per query (0: all)");
  sub->add_option("--out", csls->out, "retrieval TSV")->required();
  sub->add_option("--summary", csls->summary, "summary JSON path (default: stdout)");
  sub->add_flag("--normalize", csls->normalize);
  sub->callback([csls, &ctx, &action] { action = [csls, &ctx] { return run_csls(*csls, ctx); }; });

  auto barista = std::make_shared<BaristaOptions>();
  sub = baseline->add_subcommand("barista", "pseudo-bilingual corpus by lexicon replacement");
  sub->add_option("--src-corpus", barista->src_corpus, "tokenized text, one sentence per line")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--trg-corpus", barista->trg_corpus)->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", barista->lexicon)->required()->check(CLI::ExistingFile);
  sub->add_option("--p", barista->p, "replacement probability");
  sub->add_option("--seed", barista->seed);
  sub->add_option("--out", barista->out)->required();
  sub->callback([barista, &ctx, &action] { action = [barista, &ctx] { return run_barista(*barista, ctx); }; });

  auto linear = std::make_shared<LinearOptions>();
  sub = baseline->add_subcommand("linear-clf", "linear classifier on mapped sentence averages");
  sub->add_option("--src-emb", linear->src_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--trg-emb", linear->trg_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--map", linear->map, "mapping checkpoint (default: shared space)")->check(CLI::ExistingFile);
  sub->add_option("--train-corpus", linear->train_corpus)->required()->check(CLI::ExistingFile);
  sub->add_option("--test-corpus", linear->test_corpus)->required()->check(CLI::ExistingFile);
  sub->add_option("--labels", linear->labels)->check(CLI::IsMember(kSchemes));
  sub->add_option("--l2", linear->l2);
  sub->add_option("--epochs", linear->epochs);
  sub->add_option("--lr", linear->lr);
  sub->add_option("--seed", linear->seed);
  sub->add_option("--out", linear->out, "predictions JSONL")->required();
  sub->add_option("--summary", linear->summary, "summary JSON path (default: stdout)");
  sub->add_flag("--normalize", linear->normalize);
  sub->callback([linear, &ctx, &action] { action = [linear, &ctx] { return run_linear(*linear, ctx); }; });
}

}  // namespace xlsent::cli
