#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace xlsent {

struct TranslationPair {
  std::string source;
  std::string target;

  auto operator<=>(const TranslationPair&) const = default;
};

struct BilingualLexicon {
  std::string name = "lexicon";
  std::vector<TranslationPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

// One "source<TAB>target" pair per line. Blank lines are ignored; lines
// with a missing field, extra tabs or multi-word entries are rejected.
BilingualLexicon load_lexicon(std::istream& in, std::string name = "lexicon");
void save_lexicon(const BilingualLexicon& lexicon, std::ostream& out);

// Seeded disjoint partition; the development side receives
// round(fraction·n) pairs. Both sides keep file order.
std::pair<BilingualLexicon, BilingualLexicon> split_dev(const BilingualLexicon& lexicon,
                                                        double fraction, std::uint64_t seed);

// Drops repeated pairs, keeping first occurrences.
BilingualLexicon deduplicate(const BilingualLexicon& lexicon);

// First `count` pairs (all of them when count exceeds the size).
BilingualLexicon take_prefix(const BilingualLexicon& lexicon, std::size_t count);

}  // namespace xlsent
