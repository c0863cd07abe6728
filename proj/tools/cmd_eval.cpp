#include "commands.hpp"
#include "xlsent/eval.hpp"

namespace xlsent::cli {

namespace {

struct EvalOptions {
  std::string gold, pred, compare, out;
  std::string labels = "binary";
  std::size_t rounds = 10000;
  std::uint64_t seed = 1;
};

int run_eval(const EvalOptions& o, Context& ctx) {
  const LabelSchema schema = LabelSchema::named(o.labels);
  const auto gold = read_labels(o.gold, schema);
  const auto pred = read_labels(o.pred, schema);
  if (gold.empty()) throw ValidationError(o.gold + ": no labeled lines");
  if (pred.size() != gold.size()) {
    throw ValidationError("misaligned files: " + o.gold + " has " + std::to_string(gold.size()) + " labels, " +
                          o.pred + " has " + std::to_string(pred.size()));
  }
  EvalReport report = evaluate(gold, pred, schema.arity());
  nlohmann::json compare_f1;
  if (!o.compare.empty()) {
    if (o.rounds == 0) throw ValidationError("--rounds must be >= 1");
    const auto other = read_labels(o.compare, schema);
    if (other.size() != gold.size()) {
      throw ValidationError("misaligned files: " + o.compare + " has " + std::to_string(other.size()) +
                            " labels, expected " + std::to_string(gold.size()));
    }
    report.p_value = approx_randomization(gold, pred, other, schema.arity(), o.rounds, o.seed);
    compare_f1 = macro_f1(gold, other, schema.arity());
  }
  nlohmann::json out = report.to_json(&schema);
  if (!compare_f1.is_null()) {
    out["compare_macro_f1"] = compare_f1;
    out["rounds"] = o.rounds;
  }
  emit_json(ctx, o.out, out);
  ctx.info("macro F1 " + std::to_string(report.macro_f1));
  return kExitOk;
}

}  // namespace

void add_eval_command(CLI::App& app, Context& ctx, Action& action) {
  auto opts = std::make_shared<EvalOptions>();
  auto* sub = app.add_subcommand("eval", "score predictions against gold labels");
  sub->add_option("--gold", opts->gold, "JSONL with a \"label\" per line")->required()->check(CLI::ExistingFile);
  sub->add_option("--pred", opts->pred, "predictions JSONL, aligned with --gold")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--compare", opts->compare, "second predictions file for a significance test")
      ->check(CLI::ExistingFile);
  sub->add_option("--rounds", opts->rounds, "approximate randomization rounds");
  sub->add_option("--seed", opts->seed);
  sub->add_option("--labels", opts->labels)->check(CLI::IsMember({"binary", "3class", "4class"}));
  sub->add_option("--out", opts->out, "report path (default: stdout)");
  sub->callback([opts, &ctx, &action] { action = [opts, &ctx] { return run_eval(*opts, ctx); }; });
}

}  // namespace xlsent::cli
