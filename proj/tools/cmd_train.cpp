#include <atomic>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "xlsent/checkpoint.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/random.hpp"
#include "xlsent/targeted.hpp"
#include "xlsent/text.hpp"

namespace xlsent::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kModes{"sentence", "split", "sent", "target-only", "context-only", "no-mprime", "no-proj"};

struct TrainOptions {
  std::string src_emb, trg_emb, lexicon, train_corpus, mode, out;
  std::string lexicon_dev, src_dev, trg_dev;
  double alpha = 0.3;
  std::size_t epochs = 0;
  std::size_t batch_size = 0;
  double lr = 0.0;
  std::uint64_t seed = 0;
  double dev_fraction = 0.0;
  std::size_t dev_eval_every = 1;
  std::size_t joint_dim = 0;
  std::size_t emb_limit = 0;
  std::string init = "uniform";
  std::string oov = "skip";
  std::string labels = "binary";
  bool normalize = false;
  bool lowercase = false;
  bool remove_mixed = false;
};

void add_train_options(CLI::App* sub, TrainOptions& o, bool alpha_required) {
  sub->add_option("--src-emb", o.src_emb, "source embeddings (word2vec text)")->required()->check(CLI::ExistingFile);
  sub->add_option("--trg-emb", o.trg_emb, "target embeddings (word2vec text)")->required()->check(CLI::ExistingFile);
  sub->add_option("--lexicon", o.lexicon, "bilingual lexicon TSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--train-corpus", o.train_corpus, "source-language JSONL corpus")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--mode", o.mode)->required()->check(CLI::IsMember(kModes));
  auto* alpha = sub->add_option("--alpha", o.alpha, "weight of the sentiment loss");
  if (alpha_required) alpha->required();
  sub->add_option("--epochs", o.epochs)->required();
  sub->add_option("--batch-size", o.batch_size)->required();
  sub->add_option("--lr", o.lr)->required();
  sub->add_option("--seed", o.seed)->required();
  sub->add_option("--out", o.out, "output directory")->required();
  sub->add_option("--lexicon-dev", o.lexicon_dev, "held-out lexicon for dev pair cosine")->check(CLI::ExistingFile);
  sub->add_option("--dev-fraction", o.dev_fraction, "hold out this fraction of --lexicon when no --lexicon-dev");
  sub->add_option("--src-dev", o.src_dev, "source-language dev corpus")->check(CLI::ExistingFile);
  sub->add_option("--trg-dev", o.trg_dev, "target-language dev corpus")->check(CLI::ExistingFile);
  sub->add_option("--dev-eval-every", o.dev_eval_every, "epochs between dev evaluations");
  sub->add_option("--joint-dim", o.joint_dim, "projection width (default: source dimension)");
  sub->add_option("--emb-limit", o.emb_limit, "read at most this many embedding rows");
  sub->add_option("--init", o.init)->check(CLI::IsMember({"uniform", "identity"}));
  sub->add_option("--oov", o.oov)->check(CLI::IsMember({"skip", "zero"}));
  sub->add_option("--labels", o.labels)->check(CLI::IsMember({"binary", "3class", "4class"}));
  sub->add_flag("--normalize", o.normalize, "unit-normalize embedding rows");
  sub->add_flag("--lowercase", o.lowercase, "lowercase corpus tokens");
  sub->add_flag("--remove-mixed", o.remove_mixed, "drop sentences whose targets disagree in polarity");
}

bool is_targeted_mode(const std::string& mode) {
  return mode == "split" || mode == "target-only" || mode == "context-only";
}

TargetedVariant targeted_variant(const std::string& mode) {
  if (mode == "target-only") return TargetedVariant::target_only;
  if (mode == "context-only") return TargetedVariant::context_only;
  return TargetedVariant::split;
}

struct TrainInputs {
  LabelSchema schema = LabelSchema::binary();
  EmbeddingSpace source, target;
  BilingualLexicon lexicon_train;
  std::optional<BilingualLexicon> lexicon_dev;
  Corpus train_corpus;
  std::optional<Corpus> source_dev, target_dev;
};

TrainConfig make_config(const TrainOptions& o) {
  TrainConfig c;
  c.alpha = o.alpha;
  c.epochs = o.epochs;
  c.batch_size = o.batch_size;
  c.learning_rate = o.lr;
  c.seed = o.seed;
  c.dev_eval_every = o.dev_eval_every;
  c.joint_dim = o.joint_dim;
  c.init = o.init == "identity" ? InitMode::identity : InitMode::uniform;
  c.oov_policy = o.oov == "zero" ? OovPolicy::zero : OovPolicy::skip;
  if (c.dev_eval_every == 0) throw ValidationError("--dev-eval-every must be >= 1");
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }
  return c;
}

TrainInputs load_inputs(const TrainOptions& o, Context& ctx) {
  TrainInputs in;
  in.schema = LabelSchema::named(o.labels);
  in.source = read_embeddings(o.src_emb, o.emb_limit, o.normalize);
  in.target = read_embeddings(o.trg_emb, o.emb_limit, o.normalize);
  ctx.debug("embeddings: source " + std::to_string(in.source.size()) + "x" + std::to_string(in.source.dim()) +
            ", target " + std::to_string(in.target.size()) + "x" + std::to_string(in.target.dim()));

  in.lexicon_train = read_lexicon(o.lexicon);
  if (!o.lexicon_dev.empty()) {
    in.lexicon_dev = read_lexicon(o.lexicon_dev);
  } else if (o.dev_fraction > 0.0) {
    try {
      auto [train, dev] = split_dev(in.lexicon_train, o.dev_fraction, mix_seed(o.seed, 2));
      in.lexicon_train = std::move(train);
      in.lexicon_dev = std::move(dev);
    } catch (const ArgumentError& e) {
      throw ValidationError(std::string("--dev-fraction: ") + e.what());
    }
  }

  const CorpusOptions corpus_options{o.remove_mixed, o.lowercase};
  in.train_corpus = read_corpus(o.train_corpus, in.schema, corpus_options);
  if (!o.src_dev.empty()) in.source_dev = read_corpus(o.src_dev, in.schema, corpus_options);
  if (!o.trg_dev.empty()) in.target_dev = read_corpus(o.trg_dev, in.schema, corpus_options);
  return in;
}

// Trains one model into `dir` (model.ckpt, history.csv) and returns the
// history.
TrainHistory train_into(const TrainInputs& in, const BilingualLexicon& lexicon, const TrainConfig& config,
                        const std::string& mode, const fs::path& dir) {
  const BilingualLexicon* dev = in.lexicon_dev ? &*in.lexicon_dev : nullptr;
  Checkpoint checkpoint;
  TrainHistory history;

  if (is_targeted_mode(mode)) {
    const std::span<const TargetedInstance> none;
    TargetedTrainingData data{in.source,
                              in.target,
                              in.train_corpus.instances,
                              lexicon,
                              dev,
                              in.source_dev ? std::span<const TargetedInstance>(in.source_dev->instances) : none,
                              in.target_dev ? std::span<const TargetedInstance>(in.target_dev->instances) : none,
                              in.schema.arity()};
    auto result = train_targeted(config, data, targeted_variant(mode));
    checkpoint = to_checkpoint(result.params);
    history = std::move(result.history);
  } else {
    const auto sentences = sentence_level_view(in.train_corpus);
    const auto source_dev = in.source_dev ? sentence_level_view(*in.source_dev) : std::vector<LabeledSentence>{};
    const auto target_dev = in.target_dev ? sentence_level_view(*in.target_dev) : std::vector<LabeledSentence>{};
    SentenceTrainingData data{in.source, in.target, sentences,  lexicon,
                              dev,       source_dev, target_dev, in.schema.arity()};
    TrainResult result;
    if (mode == "no-mprime") {
      result = train_no_mprime(config, data);
    } else if (mode == "no-proj") {
      result = train_no_projection(config, data);
    } else {
      result = train(config, data);
    }
    checkpoint = to_checkpoint(result.params, mode == "sent" ? "sent" : "");
    history = std::move(result.history);
  }
  checkpoint.scalars["alpha"] = config.alpha;

  fs::create_directories(dir);
  write_atomically(dir / "model.ckpt", [&](std::ostream& out) { write_checkpoint(checkpoint, out); });
  write_atomically(dir / "history.csv", [&](std::ostream& out) { history.write_csv(out); });
  return history;
}

std::string csv_number(double v) { return std::isnan(v) ? std::string() : format_exact(v); }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string grid_label(double value) {
  std::ostringstream s;
  s << value;
  return s.str();
}

struct SweepOptions {
  TrainOptions train;
  std::string grid_type;
  std::vector<double> grid;
  std::size_t jobs = 1;
};

struct PointResult {
  bool ok = false;
  std::string error;
  std::uint64_t seed = 0;
  EpochRecord last;
};

int run_sweep(const SweepOptions& o, Context& ctx) {
  if (o.grid.empty()) throw ValidationError("--grid is empty");
  if (o.jobs == 0) throw ValidationError("--jobs must be >= 1");
  std::vector<std::string> labels;
  for (double v : o.grid) {
    if (o.grid_type == "alpha" && !(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("--grid: alpha " + grid_label(v) + " outside [0, 1]");
    }
    if (o.grid_type == "lexicon" && !(v >= 0.0 && std::floor(v) == v)) {
      throw ValidationError("--grid: lexicon size " + grid_label(v) + " is not a non-negative integer");
    }
    labels.push_back(o.grid_type + "-" + grid_label(v));
    for (std::size_t j = 0; j + 1 < labels.size(); ++j) {
      if (labels[j] == labels.back()) throw ValidationError("--grid: duplicate value " + grid_label(v));
    }
  }
  const TrainConfig base = make_config(o.train);
  const TrainInputs inputs = load_inputs(o.train, ctx);
  const fs::path root(o.train.out);

  std::vector<PointResult> results(o.grid.size());
  auto run_point = [&](std::size_t i) {
    PointResult& r = results[i];
    TrainConfig config = base;
    r.seed = config.seed = mix_seed(base.seed, i);
    BilingualLexicon lexicon = inputs.lexicon_train;
    if (o.grid_type == "alpha") {
      config.alpha = o.grid[i];
    } else {
      lexicon = take_prefix(inputs.lexicon_train, static_cast<std::size_t>(o.grid[i]));
    }
    try {
      const TrainHistory history = train_into(inputs, lexicon, config, o.train.mode, root / labels[i]);
      r.last = history.records.back();
      r.ok = true;
      const json metrics{{"grid", o.grid_type},
                         {"value", o.grid[i]},
                         {"seed", r.seed},
                         {"epochs", r.last.epoch},
                         {"joint_loss", r.last.joint_loss},
                         {"dev_pair_cosine", r.last.dev_pair_cosine},
                         {"source_dev_f1", r.last.source_dev_f1},
                         {"target_dev_f1", r.last.target_dev_f1}};
      write_json(root / labels[i] / "metrics.json", metrics);
      ctx.info(labels[i] + ": done");
    } catch (const std::exception& e) {
      r.error = e.what();
      ctx.error(labels[i] + ": " + r.error);
    }
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < o.grid.size(); i = next++) run_point(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(o.jobs, o.grid.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::size_t failures = 0;
  write_atomically(root / "summary.csv", [&](std::ostream& out) {
    out << "point,grid,value,status,seed,J,dev_pair_cosine,src_f1,tgt_f1\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      out << labels[i] << ',' << o.grid_type << ',' << format_exact(o.grid[i]) << ','
          << (r.ok ? std::string("ok") : csv_quote("failed: " + r.error)) << ',' << r.seed << ',';
      if (r.ok) {
        out << csv_number(r.last.joint_loss) << ',' << csv_number(r.last.dev_pair_cosine) << ','
            << csv_number(r.last.source_dev_f1) << ',' << csv_number(r.last.target_dev_f1);
      } else {
        ++failures;
        out << ",,,";
      }
      out << '\n';
    }
  });
  if (failures > 0) {
    ctx.error(std::to_string(failures) + " of " + std::to_string(results.size()) + " sweep points failed");
    return kExitRuntime;
  }
  return kExitOk;
}

struct PredictOptions {
  std::string model, emb, corpus, out;
  std::string side = "target";
  std::string labels = "binary";
  std::string oov = "skip";
  bool normalize = false;
  bool lowercase = false;
};

int run_predict(const PredictOptions& o, Context& ctx) {
  const LabelSchema schema = LabelSchema::named(o.labels);
  Checkpoint checkpoint;
  {
    std::ifstream in(o.model);
    try {
      checkpoint = read_checkpoint(in);
    } catch (const FormatError& e) {
      throw ValidationError(o.model + ": " + e.what());
    }
  }
  if (checkpoint.kind == "mapping") throw ValidationError(o.model + ": a mapping is not a sentiment model");
  if (checkpoint.o != schema.arity()) {
    throw ValidationError(o.model + ": model has " + std::to_string(checkpoint.o) + " classes, --labels " +
                          o.labels + " has " + std::to_string(schema.arity()));
  }
  const EmbeddingSpace space = read_embeddings(o.emb, 0, o.normalize);
  const Corpus corpus = read_corpus(o.corpus, schema, {false, o.lowercase});
  const Side side = o.side == "source" ? Side::source : Side::target;
  const OovPolicy policy = o.oov == "zero" ? OovPolicy::zero : OovPolicy::skip;

  std::vector<std::size_t> predicted;
  if (is_targeted_kind(checkpoint.kind)) {
    const TargetedParams params = targeted_from_checkpoint(checkpoint);
    for (const auto& inst : corpus.instances) predicted.push_back(predict_targeted(params, space, inst, side, policy));
  } else if (checkpoint.kind == "sent") {
    predicted = sent_baseline(blse_from_checkpoint(checkpoint), space, corpus.instances, side, policy);
  } else {
    const BlseParams params = blse_from_checkpoint(checkpoint);
    for (const auto& inst : corpus.instances) predicted.push_back(predict(params, space, inst.tokens, side, policy));
  }
  write_atomically(o.out, [&](std::ostream& out) {
    for (std::size_t label : predicted) out << json{{"label", schema.name(label)}}.dump() << '\n';
  });
  ctx.info("wrote " + std::to_string(predicted.size()) + " predictions to " + o.out);
  return kExitOk;
}

}  // namespace

void add_train_command(CLI::App& app, Context& ctx, Action& action) {
  auto opts = std::make_shared<TrainOptions>();
  auto* sub = app.add_subcommand("train", "train a model; writes model.ckpt and history.csv under --out");
  add_train_options(sub, *opts, true);
  sub->callback([opts, &ctx, &action] {
    action = [opts, &ctx] {
      const TrainConfig config = make_config(*opts);
      const TrainInputs inputs = load_inputs(*opts, ctx);
      const TrainHistory history = train_into(inputs, inputs.lexicon_train, config, opts->mode, opts->out);
      ctx.info("trained " + opts->mode + " for " + std::to_string(history.records.size()) + " epochs; final J " +
               format_fixed(history.records.back().joint_loss, 6));
      return kExitOk;
    };
  });
}

void add_predict_command(CLI::App& app, Context& ctx, Action& action) {
  auto opts = std::make_shared<PredictOptions>();
  auto* sub = app.add_subcommand("predict", "label a JSONL corpus with a trained model");
  sub->add_option("--model", opts->model)->required()->check(CLI::ExistingFile);
  sub->add_option("--emb", opts->emb, "embeddings of the corpus language")->required()->check(CLI::ExistingFile);
  sub->add_option("--corpus", opts->corpus)->required()->check(CLI::ExistingFile);
  sub->add_option("--out", opts->out, "predictions JSONL")->required();
  sub->add_option("--side", opts->side)->check(CLI::IsMember({"source", "target"}));
  sub->add_option("--labels", opts->labels)->check(CLI::IsMember({"binary", "3class", "4class"}));
  sub->add_option("--oov", opts->oov)->check(CLI::IsMember({"skip", "zero"}));
  sub->add_flag("--normalize", opts->normalize);
  sub->add_flag("--lowercase", opts->lowercase);
  sub->callback([opts, &ctx, &action] { action = [opts, &ctx] { return run_predict(*opts, ctx); }; });
}

void add_sweep_command(CLI::App& app, Context& ctx, Action& action) {
  auto opts = std::make_shared<SweepOptions>();
  auto* sub = app.add_subcommand("sweep", "train one model per grid point; writes summary.csv under --out");
  add_train_options(sub, opts->train, false);
  sub->add_option("--grid-type", opts->grid_type)->required()->check(CLI::IsMember({"alpha", "lexicon"}));
  sub->add_option("--grid", opts->grid, "grid values")->required()->delimiter(',');
  sub->add_option("--jobs", opts->jobs, "worker threads");
  sub->callback([opts, &ctx, &action] { action = [opts, &ctx] { return run_sweep(*opts, ctx); }; });
}

}  // namespace xlsent::cli
