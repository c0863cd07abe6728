#pragma once

#include <functional>

#include "CLI11.hpp"
#include "cli_support.hpp"

namespace xlsent::cli {

// Each registrar adds one subcommand; when it is selected, its callback
// stores the work to run in `action`.
using Action = std::function<int()>;

void add_train_command(CLI::App& app, Context& ctx, Action& action);
void add_predict_command(CLI::App& app, Context& ctx, Action& action);
void add_sweep_command(CLI::App& app, Context& ctx, Action& action);
void add_eval_command(CLI::App& app, Context& ctx, Action& action);
void add_baseline_command(CLI::App& app, Context& ctx, Action& action);
void add_analyze_command(CLI::App& app, Context& ctx, Action& action);

}  // namespace xlsent::cli
