#include "cli.hpp"

#include <algorithm>

#include "commands.hpp"
#include "xlsent/errors.hpp"

namespace xlsent::cli {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx(out, err, log_level_from_env());
  Action action;

  CLI::App app{"Cross-lingual sentiment projection toolkit", "xlsent"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  add_train_command(app, ctx, action);
  add_predict_command(app, ctx, action);
  add_sweep_command(app, ctx, action);
  add_eval_command(app, ctx, action);
  add_baseline_command(app, ctx, action);
  add_analyze_command(app, ctx, action);

  try {
    std::vector<std::string> merged = merge_config(args);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    ctx.error(e.what());
    return kExitValidation;
  } catch (const ValidationError& e) {
    ctx.error(e.what());
    return kExitValidation;
  }

  try {
    return action();
  } catch (const ValidationError& e) {
    ctx.error(e.what());
    return kExitValidation;
  } catch (const FormatError& e) {
    ctx.error(e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    // ArgumentError and SizeError: inputs inconsistent with each other.
    ctx.error(e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    ctx.error(e.what());
    return kExitRuntime;
  }
}

}  // namespace xlsent::cli
