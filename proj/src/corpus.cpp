#include "xlsent/corpus.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "json.hpp"
#include "xlsent/embeddings.hpp"
#include "xlsent/errors.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

using nlohmann::json;

LabelSchema::LabelSchema(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) throw ArgumentError("LabelSchema: need at least two labels");
  std::set<std::string> unique(names_.begin(), names_.end());
  if (unique.size() != names_.size()) throw ArgumentError("LabelSchema: repeated label name");
}

LabelSchema LabelSchema::binary() { return LabelSchema({"negative", "positive"}); }

LabelSchema LabelSchema::three_class() { return LabelSchema({"negative", "neutral", "positive"}); }

LabelSchema LabelSchema::four_class() {
  return LabelSchema({"strong_negative", "negative", "positive", "strong_positive"});
}

LabelSchema LabelSchema::named(std::string_view scheme) {
  if (scheme == "binary") return binary();
  if (scheme == "3class") return three_class();
  if (scheme == "4class") return four_class();
  throw ArgumentError("unknown label scheme '" + std::string(scheme) + "'");
}

std::optional<std::size_t> LabelSchema::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names_.begin());
}

int polarity_of(std::string_view label_name) {
  if (label_name.find("positive") != std::string_view::npos) return 1;
  if (label_name.find("negative") != std::string_view::npos) return -1;
  return 0;
}

namespace {

TargetedInstance parse_instance(const json& record, const LabelSchema& schema, std::size_t line_no,
                                bool lowercase) {
  if (!record.is_object()) throw FormatError(line_no, "expected a JSON object");

  TargetedInstance instance;
  auto tokens = record.find("tokens");
  if (tokens == record.end() || !tokens->is_array()) throw FormatError(line_no, "missing \"tokens\" array");
  for (const auto& token : *tokens) {
    if (!token.is_string()) throw FormatError(line_no, "tokens must be strings");
    auto text = token.get<std::string>();
    instance.tokens.push_back(lowercase ? ascii_lower(text) : std::move(text));
  }
  if (instance.tokens.empty()) throw FormatError(line_no, "empty token list");

  auto label = record.find("label");
  if (label == record.end() || !label->is_string()) throw FormatError(line_no, "missing \"label\" string");
  const auto label_name = label->get<std::string>();
  const auto label_index = schema.index_of(label_name);
  if (!label_index) throw FormatError(line_no, "unknown label '" + label_name + "'");
  instance.label = *label_index;

  auto target = record.find("target");
  if (target == record.end() || target->is_null()) {
    instance.sentence_level = true;
  } else {
    if (!target->is_array() || target->size() != 2 || !(*target)[0].is_number_integer() ||
        !(*target)[1].is_number_integer()) {
      throw FormatError(line_no, "\"target\" must be [start, end]");
    }
    const auto start = (*target)[0].get<long long>();
    const auto end = (*target)[1].get<long long>();
    if (start < 0 || end <= start || end > static_cast<long long>(instance.tokens.size())) {
      throw FormatError(line_no, "target span [" + std::to_string(start) + "," + std::to_string(end) +
                                     ") out of bounds or empty");
    }
    instance.target_start = static_cast<std::size_t>(start);
    instance.target_end = static_cast<std::size_t>(end);
  }

  auto sid = record.find("sid");
  if (sid != record.end() && !sid->is_null()) {
    if (sid->is_string()) {
      instance.sentence_id = sid->get<std::string>();
    } else if (sid->is_number_integer()) {
      instance.sentence_id = std::to_string(sid->get<long long>());
    } else {
      throw FormatError(line_no, "\"sid\" must be a string or integer");
    }
  }
  return instance;
}

}  // namespace

Corpus load_corpus(std::istream& in, const LabelSchema& schema, const CorpusOptions& options) {
  Corpus corpus{schema, {}};
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw FormatError(line_no, std::string("invalid JSON: ") + e.what());
    }
    corpus.instances.push_back(parse_instance(record, schema, line_no, options.lowercase));
    line_of.push_back(line_no);
  }

  // Targets sharing a sentence must not overlap.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < corpus.instances.size(); ++i) {
    const auto& inst = corpus.instances[i];
    if (inst.sentence_id && !inst.sentence_level) groups[*inst.sentence_id].push_back(i);
  }
  for (auto& [sid, members] : groups) {
    std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      return corpus.instances[a].target_start < corpus.instances[b].target_start;
    });
    for (std::size_t k = 1; k < members.size(); ++k) {
      const auto& prev = corpus.instances[members[k - 1]];
      const auto& cur = corpus.instances[members[k]];
      if (cur.target_start < prev.target_end) {
        throw FormatError(line_of[members[k]], "target overlaps another target of sentence '" + sid + "'");
      }
    }
  }

  if (options.remove_mixed_polarity) {
    std::map<std::string, std::pair<bool, bool>> signs;
    for (const auto& inst : corpus.instances) {
      if (!inst.sentence_id) continue;
      const int p = polarity_of(schema.name(inst.label));
      auto& [pos, neg] = signs[*inst.sentence_id];
      pos = pos || p > 0;
      neg = neg || p < 0;
    }
    std::erase_if(corpus.instances, [&](const TargetedInstance& inst) {
      if (!inst.sentence_id) return false;
      const auto& [pos, neg] = signs[*inst.sentence_id];
      return pos && neg;
    });
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& inst : corpus.instances) {
    json record;
    record["tokens"] = inst.tokens;
    record["label"] = corpus.schema.name(inst.label);
    if (!inst.sentence_level) record["target"] = {inst.target_start, inst.target_end};
    if (inst.sentence_id) record["sid"] = *inst.sentence_id;
    out << record.dump() << '\n';
  }
}

Corpus map_labels(const Corpus& corpus, LabelMode mode) {
  if (mode == LabelMode::multiclass) {
    if (corpus.schema.arity() < 3) {
      throw ArgumentError("map_labels: multiclass mode needs a 3- or 4-class corpus");
    }
    return corpus;
  }

  Corpus out{LabelSchema::binary(), {}};
  std::vector<std::optional<std::size_t>> mapping;
  for (const auto& name : corpus.schema.names()) {
    if (name == "strong_positive" || name == "positive") {
      mapping.emplace_back(1);
    } else if (name == "strong_negative" || name == "negative") {
      mapping.emplace_back(0);
    } else if (name == "neutral") {
      mapping.emplace_back(std::nullopt);
    } else {
      throw ArgumentError("map_labels: label '" + name + "' has no binary mapping");
    }
  }
  for (const auto& inst : corpus.instances) {
    if (!mapping[inst.label]) continue;
    TargetedInstance mapped = inst;
    mapped.label = *mapping[inst.label];
    out.instances.push_back(std::move(mapped));
  }
  return out;
}

TargetSplit split_at_target(const TargetedInstance& instance) {
  if (instance.sentence_level || instance.target_end <= instance.target_start) {
    throw ArgumentError("split_at_target: instance has no target span");
  }
  if (instance.target_end > instance.tokens.size()) throw ArgumentError("split_at_target: span out of bounds");
  std::span<const std::string> all(instance.tokens);
  return {all.first(instance.target_start),
          all.subspan(instance.target_start, instance.target_end - instance.target_start),
          all.subspan(instance.target_end)};
}

std::vector<LabeledSentence> as_sentences(const Corpus& corpus) {
  std::vector<LabeledSentence> out;
  out.reserve(corpus.size());
  for (const auto& inst : corpus.instances) out.push_back({inst.tokens, inst.label});
  return out;
}

std::vector<LabeledSentence> sentence_level_view(const Corpus& corpus) {
  std::vector<LabeledSentence> out;
  std::map<std::string, std::size_t> slot_of;
  std::vector<std::vector<std::size_t>> votes;
  for (const auto& inst : corpus.instances) {
    if (!inst.sentence_id) {
      out.push_back({inst.tokens, inst.label});
      votes.emplace_back();
      continue;
    }
    auto [it, inserted] = slot_of.emplace(*inst.sentence_id, out.size());
    if (inserted) {
      out.push_back({inst.tokens, inst.label});
      votes.emplace_back(corpus.schema.arity(), 0);
    }
    ++votes[it->second][inst.label];
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (votes[i].empty()) continue;
    out[i].label = static_cast<std::size_t>(std::max_element(votes[i].begin(), votes[i].end()) - votes[i].begin());
  }
  return out;
}

}  // namespace xlsent
