#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xlsent {

class LabelSchema {
 public:
  // Throws ArgumentError for fewer than two or repeated names.
  explicit LabelSchema(std::vector<std::string> names);

  static LabelSchema binary();       // negative, positive
  static LabelSchema three_class();  // negative, neutral, positive
  static LabelSchema four_class();   // strong_negative, negative, positive, strong_positive
  // Resolves "binary", "3class" or "4class".
  static LabelSchema named(std::string_view scheme);

  std::size_t arity() const noexcept { return names_.size(); }
  const std::string& name(std::size_t index) const { return names_.at(index); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const LabelSchema&) const = default;

 private:
  std::vector<std::string> names_;
};

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::size_t label = 0;
};

// A token sequence with a labeled half-open target span. Sentence-level
// records carry the empty span [0, 0) and `sentence_level` set.
struct TargetedInstance {
  std::vector<std::string> tokens;
  std::size_t target_start = 0;
  std::size_t target_end = 0;
  std::size_t label = 0;
  bool sentence_level = false;
  std::optional<std::string> sentence_id;
};

struct Corpus {
  LabelSchema schema = LabelSchema::binary();
  std::vector<TargetedInstance> instances;

  std::size_t size() const noexcept { return instances.size(); }
};

struct CorpusOptions {
  // Drop every sentence group (shared "sid") whose targets disagree in polarity.
  bool remove_mixed_polarity = false;
  bool lowercase = false;
};

// JSON lines: {"tokens": [...], "label": "name", "target": [start, end], "sid": "..."}
// with "target" and "sid" optional.
Corpus load_corpus(std::istream& in, const LabelSchema& schema, const CorpusOptions& options = {});
void save_corpus(const Corpus& corpus, std::ostream& out);

enum class LabelMode { binary, multiclass };

// Binary mode folds strong/weak polarities together and drops neutral
// instances. Multiclass mode keeps a 3- or 4-class corpus unchanged.
Corpus map_labels(const Corpus& corpus, LabelMode mode);

struct TargetSplit {
  std::span<const std::string> left;
  std::span<const std::string> target;
  std::span<const std::string> right;
};

// Views into the instance's tokens; the instance must outlive the result.
TargetSplit split_at_target(const TargetedInstance& instance);

// Sentence-level records, one per instance.
std::vector<LabeledSentence> as_sentences(const Corpus& corpus);

// One record per sentence group (instances sharing a "sid"; others stand
// alone) labeled with the group's most common label, lowest index on ties.
std::vector<LabeledSentence> sentence_level_view(const Corpus& corpus);

// +1 for positive names, -1 for negative names, 0 otherwise.
int polarity_of(std::string_view label_name);

}  // namespace xlsent
