#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "xlsent/analysis.hpp"
#include "xlsent/checkpoint.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/targeted.hpp"

namespace xlsent::cli {

namespace {

using nlohmann::json;

Checkpoint read_model(const std::string& path) {
  std::ifstream in(path);
  try {
    return read_checkpoint(in);
  } catch (const FormatError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// The matrix that carries one language into the joint space.
Matrix side_projection(const Checkpoint& cp, Side side) {
  if (cp.kind == "mapping") {
    throw ValidationError("a mapping checkpoint has no per-language projection");
  }
  if (is_targeted_kind(cp.kind)) return targeted_from_checkpoint(cp).projection(side);
  return blse_from_checkpoint(cp).projection(side);
}

Side parse_side(const std::string& s) { return s == "source" ? Side::source : Side::target; }

struct PairCosineOptions {
  std::string model, src_emb, trg_emb, lexicon, out;
};

int run_pair_cosine(const PairCosineOptions& o, Context& ctx) {
  const Checkpoint cp = read_model(o.model);
  const EmbeddingSpace source = read_embeddings(o.src_emb);
  const EmbeddingSpace target = read_embeddings(o.trg_emb);
  const BilingualLexicon lexicon = read_lexicon(o.lexicon);
  double value = 0.0;
  if (cp.kind == "mapping") {
    value = pair_cosine(mapping_from_checkpoint(cp), source, target, lexicon);
  } else if (is_targeted_kind(cp.kind)) {
    const TargetedParams t = targeted_from_checkpoint(cp);
    BlseParams view;
    view.source_projection = t.source_projection;
    view.target_projection = t.target_projection;
    value = pair_cosine(view, source, target, lexicon);
  } else {
    value = pair_cosine(blse_from_checkpoint(cp), source, target, lexicon);
  }
  emit_json(ctx, o.out, json{{"pair_cosine", value}, {"pairs", lexicon.size()}});
  return kExitOk;
}

struct SynantOptions {
  std::string model, emb, positive, negative, out;
  std::string side = "source";
};

int run_synant(const SynantOptions& o, Context& ctx) {
  const Matrix projection = side_projection(read_model(o.model), parse_side(o.side));
  const EmbeddingSpace space = read_embeddings(o.emb);
  const auto positive = read_word_list(o.positive);
  const auto negative = read_word_list(o.negative);
  const Separation s = synonym_antonym_separation(projection, space, positive, negative);
  emit_json(ctx, o.out, json{{"within", s.within}, {"cross", s.cross}, {"side", o.side}});
  return kExitOk;
}

struct LangSimOptions {
  std::string pos_a, text_a, pos_b, text_b, out;
  std::size_t pos_n = 3;
  std::size_t char_n = 3;
};

std::vector<std::string> all_tokens(const std::string& path) {
  std::vector<std::string> tokens;
  for (auto& line : read_token_lines(path)) {
    for (auto& t : line) tokens.push_back(std::move(t));
  }
  return tokens;
}

std::vector<std::string> all_characters(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    text << (first ? "" : " ") << line;
    first = false;
  }
  return utf8_characters(text.str());
}

int run_lang_sim(const LangSimOptions& o, Context& ctx) {
  const NgramProfile pos_a = ngram_profile(all_tokens(o.pos_a), o.pos_n, " ");
  const NgramProfile pos_b = ngram_profile(all_tokens(o.pos_b), o.pos_n, " ");
  const NgramProfile char_a = ngram_profile(all_characters(o.text_a), o.char_n);
  const NgramProfile char_b = ngram_profile(all_characters(o.text_b), o.char_n);
  emit_json(ctx, o.out,
            json{{"language_similarity", language_similarity(pos_a, char_a, pos_b, char_b)},
                 {"pos_ngrams", {pos_a.counts.size(), pos_b.counts.size()}},
                 {"char_ngrams", {char_a.counts.size(), char_b.counts.size()}}});
  return kExitOk;
}

struct DomainDivOptions {
  std::vector<std::string> corpora;
  std::string out;
  std::size_t top_n = 10000;
  double smoothing = 1e-6;
};

int run_domain_div(const DomainDivOptions& o, Context& ctx) {
  if (o.corpora.size() < 2) throw ValidationError("--corpus needs at least two files");
  std::vector<std::map<std::string, double>> counts;
  for (const auto& path : o.corpora) {
    std::map<std::string, double> c;
    for (const auto& t : all_tokens(path)) c[t] += 1.0;
    if (c.empty()) throw ValidationError(path + ": no tokens");
    counts.push_back(std::move(c));
  }
  const auto vocabulary = common_top_vocabulary(counts, o.top_n);
  if (vocabulary.empty()) throw ValidationError("the corpora share no frequent unigrams");
  std::vector<std::map<std::string, double>> restricted;
  for (const auto& c : counts) restricted.push_back(restrict_counts(c, vocabulary));

  json matrix = json::array();
  for (std::size_t i = 0; i < restricted.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < restricted.size(); ++j) {
      row.push_back(js_divergence(restricted[i], restricted[j], o.smoothing));
    }
    matrix.push_back(std::move(row));
  }
  emit_json(ctx, o.out,
            json{{"corpora", o.corpora}, {"vocabulary_size", vocabulary.size()}, {"divergence", std::move(matrix)}});
  return kExitOk;
}

struct ExportOptions {
  std::string model, emb, tokens, out;
  std::string side = "source";
};

int run_export(const ExportOptions& o, Context& ctx) {
  const Matrix projection = side_projection(read_model(o.model), parse_side(o.side));
  const EmbeddingSpace space = read_embeddings(o.emb);
  const std::vector<std::string> tokens = o.tokens.empty() ? space.words() : read_word_list(o.tokens);
  write_atomically(o.out, [&](std::ostream& out) { export_projected(projection, space, tokens, out); });
  ctx.info("exported " + std::to_string(tokens.size()) + " projected vectors");
  return kExitOk;
}

}  // namespace

void add_analyze_command(CLI::App& app, Context& ctx, Action& action) {
  auto* analyze = app.add_subcommand("analyze", "analyses of trained models and corpora");
  analyze->require_subcommand(1);
  const std::vector<std::string> sides{"source", "target"};

  auto pc = std::make_shared<PairCosineOptions>();
  auto* sub = analyze->add_subcommand("pair-cosine", "mean cosine of translation pairs in the joint space");
  sub->add_option("--model", pc->model, "model or mapping checkpoint")->required()->check(CLI::ExistingFile);
  sub->add_option("--src-emb", pc->src_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--trg-emb", pc->trg_emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", pc->lexicon)->required()->check(CLI::ExistingFile);
  sub->add_option("--out", pc->out, "JSON path (default: stdout)");
  sub->callback([pc, &ctx, &action] { action = [pc, &ctx] { return run_pair_cosine(*pc, ctx); }; });

  auto sa = std::make_shared<SynantOptions>();
  sub = analyze->add_subcommand("synant", "within- and cross-polarity cosine of projected words");
  sub->add_option("--model", sa->model)->required()->check(CLI::ExistingFile);
  sub->add_option("--emb", sa->emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--positive", sa->positive, "word list")->required()->check(CLI::ExistingFile);
  sub->add_option("--negative", sa->negative, "word list")->required()->check(CLI::ExistingFile);
  sub->add_option("--side", sa->side)->check(CLI::IsMember(sides));
  sub->add_option("--out", sa->out, "JSON path (default: stdout)");
  sub->callback([sa, &ctx, &action] { action = [sa, &ctx] { return run_synant(*sa, ctx); }; });

  auto ls = std::make_shared<LangSimOptions>();
  sub = analyze->add_subcommand("lang-sim", "POS and character n-gram similarity of two languages");
  sub->add_option("--pos-a", ls->pos_a, "POS tag stream, whitespace separated")->required()->check(CLI::ExistingFile);
  sub->add_option("--text-a", ls->text_a, "raw UTF-8 text")->required()->check(CLI::ExistingFile);
  sub->add_option("--pos-b", ls->pos_b)->required()->check(CLI::ExistingFile);
  sub->add_option("--text-b", ls->text_b)->required()->check(CLI::ExistingFile);
  sub->add_option("--pos-n", ls->pos_n);
  sub->add_option("--char-n", ls->char_n);
  sub->add_option("--out", ls->out, "JSON path (default: stdout)");
  sub->callback([ls, &ctx, &action] { action = [ls, &ctx] { return run_lang_sim(*ls, ctx); }; });

  auto dd = std::make_shared<DomainDivOptions>();
  sub = analyze->add_subcommand("domain-div", "pairwise unigram divergence between corpora");
  sub->add_option("--corpus", dd->corpora, "tokenized text files")->required()->check(CLI::ExistingFile);
  sub->add_option("--top-n", dd->top_n, "frequent unigrams per domain");
  sub->add_option("--smoothing", dd->smoothing);
  sub->add_option("--out", dd->out, "JSON path (default: stdout)");
  sub->callback([dd, &ctx, &action] { action = [dd, &ctx] { return run_domain_div(*dd, ctx); }; });

  auto ex = std::make_shared<ExportOptions>();
  sub = analyze->add_subcommand("export-proj", "projected vectors in word2vec text format");
  sub->add_option("--model", ex->model)->required()->check(CLI::ExistingFile);
  sub->add_option("--emb", ex->emb)->required()->check(CLI::ExistingFile);
  sub->add_option("--tokens", ex->tokens, "words to export (default: whole vocabulary)")->check(CLI::ExistingFile);
  sub->add_option("--side", ex->side)->check(CLI::IsMember(sides));
  sub->add_option("--out", ex->out)->required();
  sub->callback([ex, &ctx, &action] { action = [ex, &ctx] { return run_export(*ex, ctx); }; });
}

}  // namespace xlsent::cli
