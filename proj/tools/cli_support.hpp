#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "xlsent/corpus.hpp"
#include "xlsent/embeddings.hpp"
#include "xlsent/lexicon.hpp"

namespace xlsent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Bad flags, configs or input files.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { error = 0, info = 1, debug = 2 };

// XLSENT_LOG ∈ {error, info, debug}; unset means info.
LogLevel log_level_from_env();

class Context {
 public:
  Context(std::ostream& out, std::ostream& err, LogLevel level) : out_(out), err_(err), level_(level) {}

  std::ostream& out() { return out_; }
  void error(const std::string& message) { log(LogLevel::error, "error", message); }
  void info(const std::string& message) { log(LogLevel::info, "info", message); }
  void debug(const std::string& message) { log(LogLevel::debug, "debug", message); }

 private:
  void log(LogLevel level, const char* tag, const std::string& message);

  std::ostream& out_;
  std::ostream& err_;
  LogLevel level_;
  std::mutex mutex_;
};

// Splices the JSON object in the file named by --config into the argument
// list: a key `foo` becomes `--foo <value>` unless --foo was given.
std::vector<std::string> merge_config(std::vector<std::string> args);

// Writes through a temporary sibling and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::function<void(std::ostream&)>& writer);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
// Pretty JSON to `path`, or to the context's stdout when `path` is empty.
void emit_json(Context& ctx, const std::string& path, const nlohmann::json& value);

EmbeddingSpace read_embeddings(const std::string& path, std::size_t limit = 0, bool normalize = false);
BilingualLexicon read_lexicon(const std::string& path);
Corpus read_corpus(const std::string& path, const LabelSchema& schema, const CorpusOptions& options = {});
// One word per non-empty line.
std::vector<std::string> read_word_list(const std::string& path);
// Whitespace-tokenized lines; blank lines are kept as empty sentences.
std::vector<std::vector<std::string>> read_token_lines(const std::string& path);
// One JSON object with a string "label" per non-empty line.
std::vector<std::size_t> read_labels(const std::string& path, const LabelSchema& schema);

}  // namespace xlsent::cli
