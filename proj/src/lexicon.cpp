#include "xlsent/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>

#include "xlsent/errors.hpp"
#include "xlsent/random.hpp"
#include "xlsent/text.hpp"

namespace xlsent {

namespace {

bool has_inner_space(std::string_view s) {
  return s.find_first_of(" \t\v\f") != std::string_view::npos;
}

}  // namespace

BilingualLexicon load_lexicon(std::istream& in, std::string name) {
  BilingualLexicon lexicon;
  lexicon.name = std::move(name);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;

    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw FormatError(line_no, "expected source<TAB>target");
    if (line.find('\t', tab + 1) != std::string::npos) throw FormatError(line_no, "more than one tab");

    std::string_view source = std::string_view(line).substr(0, tab);
    std::string_view target = std::string_view(line).substr(tab + 1);
    if (source.empty() || target.empty()) throw FormatError(line_no, "empty field");
    if (has_inner_space(source) || has_inner_space(target)) {
      throw FormatError(line_no, "multi-word expression");
    }
    lexicon.pairs.push_back({std::string(source), std::string(target)});
  }
  if (lexicon.pairs.empty()) throw FormatError("load_lexicon: no translation pairs");
  return lexicon;
}

void save_lexicon(const BilingualLexicon& lexicon, std::ostream& out) {
  for (const auto& pair : lexicon.pairs) out << pair.source << '\t' << pair.target << '\n';
}

std::pair<BilingualLexicon, BilingualLexicon> split_dev(const BilingualLexicon& lexicon,
                                                        double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ArgumentError("split_dev: fraction must lie in (0, 1)");
  const std::size_t n = lexicon.size();
  const auto dev_size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  if (dev_size == 0 || dev_size >= n) {
    throw ArgumentError("split_dev: fraction " + std::to_string(fraction) + " of " +
                        std::to_string(n) + " pairs leaves one side empty");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span(order));
  std::vector<bool> in_dev(n, false);
  for (std::size_t i = 0; i < dev_size; ++i) in_dev[order[i]] = true;

  BilingualLexicon train{lexicon.name + ".train", {}};
  BilingualLexicon dev{lexicon.name + ".dev", {}};
  for (std::size_t i = 0; i < n; ++i) (in_dev[i] ? dev : train).pairs.push_back(lexicon.pairs[i]);
  return {std::move(train), std::move(dev)};
}

BilingualLexicon deduplicate(const BilingualLexicon& lexicon) {
  BilingualLexicon out{lexicon.name, {}};
  std::set<TranslationPair> seen;
  for (const auto& pair : lexicon.pairs)
    if (seen.insert(pair).second) out.pairs.push_back(pair);
  return out;
}

BilingualLexicon take_prefix(const BilingualLexicon& lexicon, std::size_t count) {
  BilingualLexicon out{lexicon.name, {}};
  const std::size_t n = std::min(count, lexicon.size());
  out.pairs.assign(lexicon.pairs.begin(), lexicon.pairs.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

}  // namespace xlsent
