#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"

namespace xlsent {

class LabelSchema;

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvalReport {
  // confusion[gold][predicted]
  std::vector<std::vector<std::size_t>> confusion;
  std::vector<ClassScores> per_class;
  double macro_f1 = 0.0;
  std::optional<double> p_value;

  // Keys per_class by schema label names when a schema is given, else by index.
  nlohmann::json to_json(const LabelSchema* schema = nullptr) const;
};

// Per-class precision/recall/F1 with zero-denominator ratios set to 0.
// Every class is averaged into macro F1, including absent ones.
EvalReport evaluate(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                    std::size_t classes);

double macro_f1(std::span<const std::size_t> gold, std::span<const std::size_t> predicted,
                std::size_t classes);

// Paired approximate randomization test on |macroF1(A) − macroF1(B)|.
// Each round swaps every instance's two predictions with probability 1/2;
// p = (hits + 1) / (rounds + 1).
double approx_randomization(std::span<const std::size_t> gold, std::span<const std::size_t> predicted_a,
                            std::span<const std::size_t> predicted_b, std::size_t classes,
                            std::size_t rounds = 10000, std::uint64_t seed = 1);

}  // namespace xlsent
