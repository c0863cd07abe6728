#include "cli_support.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "xlsent/errors.hpp"
#include "xlsent/text.hpp"

namespace xlsent::cli {

namespace fs = std::filesystem;
using nlohmann::json;

LogLevel log_level_from_env() {
  const char* value = std::getenv("XLSENT_LOG");
  if (value == nullptr) return LogLevel::info;
  const std::string v = ascii_lower(value);
  if (v == "error") return LogLevel::error;
  if (v == "debug") return LogLevel::debug;
  return LogLevel::info;
}

void Context::log(LogLevel level, const char* tag, const std::string& message) {
  if (level > level_) return;
  std::lock_guard lock(mutex_);
  err_ << "xlsent: " << tag << ": " << message << '\n';
}

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

template <class F>
auto with_path(const std::string& path, F&& load) {
  try {
    return load();
  } catch (const FormatError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string config_scalar(const std::string& key, const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  throw ValidationError("config key '" + key + "' must be a scalar or an array of scalars");
}

}  // namespace

std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string config_path;
  std::vector<std::string> kept;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      kept.push_back(args[i]);
    }
  }
  if (config_path.empty()) return kept;

  std::ifstream in = open_input(config_path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(config_path + ": invalid JSON: " + e.what());
  }
  if (!config.is_object()) throw ValidationError(config_path + ": config must be a JSON object");

  std::set<std::string> given;
  for (const auto& a : kept) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const auto& [key, value] : config.items()) {
    if (given.count(key)) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) kept.push_back(flag);
    } else if (value.is_array()) {
      kept.push_back(flag);
      for (const auto& item : value) kept.push_back(config_scalar(key, item));
    } else {
      kept.push_back(flag);
      kept.push_back(config_scalar(key, value));
    }
  }
  return kept;
}

void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path temp = path;
  temp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + temp.string() + "'");
    writer(out);
    out.flush();
    if (!out) {
      out.close();
      fs::remove(temp);
      throw std::runtime_error("write to '" + temp.string() + "' failed");
    }
  }
  fs::rename(temp, path);
}

void write_json(const fs::path& path, const json& value) {
  write_atomically(path, [&](std::ostream& out) { out << value.dump(2) << '\n'; });
}

void emit_json(Context& ctx, const std::string& path, const json& value) {
  if (path.empty()) {
    ctx.out() << value.dump(2) << '\n';
  } else {
    write_json(path, value);
  }
}

EmbeddingSpace read_embeddings(const std::string& path, std::size_t limit, bool normalize) {
  return with_path(path, [&] {
    std::ifstream in = open_input(path);
    EmbeddingSpace space = load_embeddings(in, limit == 0 ? std::nullopt : std::optional<std::size_t>(limit));
    return normalize ? normalize_rows(space) : space;
  });
}

BilingualLexicon read_lexicon(const std::string& path) {
  return with_path(path, [&] {
    std::ifstream in = open_input(path);
    return load_lexicon(in, fs::path(path).filename().string());
  });
}

Corpus read_corpus(const std::string& path, const LabelSchema& schema, const CorpusOptions& options) {
  return with_path(path, [&] {
    std::ifstream in = open_input(path);
    return load_corpus(in, schema, options);
  });
}

std::vector<std::string> read_word_list(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = trim(line);
    if (!word.empty()) words.emplace_back(word);
  }
  return words;
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(split_tokens(line));
  return lines;
}

std::vector<std::size_t> read_labels(const std::string& path, const LabelSchema& schema) {
  std::ifstream in = open_input(path);
  std::vector<std::size_t> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      throw ValidationError(path + ": line " + std::to_string(line_no) + ": invalid JSON");
    }
    if (!record.is_object() || !record.contains("label") || !record["label"].is_string()) {
      throw ValidationError(path + ": line " + std::to_string(line_no) + ": expected an object with a string \"label\"");
    }
    const auto name = record["label"].get<std::string>();
    const auto index = schema.index_of(name);
    if (!index) throw ValidationError(path + ": line " + std::to_string(line_no) + ": unknown label '" + name + "'");
    labels.push_back(*index);
  }
  return labels;
}

}  // namespace xlsent::cli
