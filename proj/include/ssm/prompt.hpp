#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ssm/relation.hpp"
#include "ssm/util.hpp"

namespace ssm::llm {

inline constexpr std::string_view kInstruction =
    "Classify into entailment, neutral, and contradiction and justify the decision.";

struct Shot {
  std::string premise;
  std::string hypothesis;
  RelationState label = RelationState::neutral;
  std::string explanation;
};

struct Query {
  std::string premise;
  std::string hypothesis;
};

struct PromptSpec {
  std::string instruction{kInstruction};
  std::vector<Shot> shots;
  Query query;
  bool require_balanced = true;  // equal number of shots per class
};

/// Instruction line, one "Premise/Hypothesis/Label/Explanation" block per
/// shot, then the query block ending in "Label:". Blocks are separated by
/// a blank line. Throws when shots are unbalanced and balance is required.
std::string build_prompt(const PromptSpec& spec);

/// Seeded uniform choice of `per_class` shots of each label from `pool`,
/// returned in a seeded random order.
std::vector<Shot> sample_shots(std::span<const Shot> pool, std::size_t per_class, std::uint64_t seed);

struct ParsedResponse {
  RelationState label;
  std::string nle;
};

class ParseError : public Error {
 public:
  explicit ParseError(std::string raw);
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

/// Label = earliest of the three label words (any case) on the label line,
/// i.e. after a "Label:" marker if present, up to the line end or an
/// "Explanation:" marker. NLE = trimmed text after "Explanation:", cut at a
/// following "Premise:" block; empty when there is no marker.
ParsedResponse parse_response(std::string_view text);

}  // namespace ssm::llm
