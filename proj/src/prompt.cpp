#include "ssm/prompt.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <random>

namespace ssm::llm {

std::string build_prompt(const PromptSpec& spec) {
  if (spec.require_balanced) {
    std::array<std::size_t, 3> counts{};
    for (const auto& s : spec.shots) ++counts[index(s.label)];
    if (counts[0] != counts[1] || counts[1] != counts[2]) {
      throw Error("few-shot examples are not balanced across classes (" + std::to_string(counts[0]) + "/" +
                  std::to_string(counts[1]) + "/" + std::to_string(counts[2]) + ")");
    }
  }
  std::string out = spec.instruction + "\n\n";
  for (const auto& s : spec.shots) {
    out += "Premise: " + s.premise + "\n";
    out += "Hypothesis: " + s.hypothesis + "\n";
    out += "Label: " + std::string(to_string(s.label)) + "\n";
    out += "Explanation: " + s.explanation + "\n\n";
  }
  out += "Premise: " + spec.query.premise + "\n";
  out += "Hypothesis: " + spec.query.hypothesis + "\n";
  out += "Label:";
  return out;
}

std::vector<Shot> sample_shots(std::span<const Shot> pool, std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Shot> out;
  for (auto label : kAllStates) {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (pool[i].label == label && !pool[i].explanation.empty()) candidates.push_back(i);
    }
    if (candidates.size() < per_class) {
      throw Error("not enough " + std::string(to_string(label)) + " examples with explanations to draw " +
                  std::to_string(per_class) + " shots");
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    for (std::size_t i = 0; i < per_class; ++i) out.push_back(pool[candidates[i]]);
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

ParseError::ParseError(std::string raw) : Error("no recognizable label in response"), raw_(std::move(raw)) {}

namespace {

// Case-insensitive search; npos when absent.
std::size_t find_icase(std::string_view text, std::string_view needle, std::size_t from = 0) {
  if (needle.size() > text.size()) return std::string_view::npos;
  for (std::size_t i = from; i + needle.size() <= text.size(); ++i) {
    if (starts_with_icase(text.substr(i), needle)) return i;
  }
  return std::string_view::npos;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

ParsedResponse parse_response(std::string_view text) {
  std::string_view label_line = text;
  const auto first_explanation = find_icase(text, "explanation:");
  if (auto pos = find_icase(label_line, "label:"); pos != std::string_view::npos && pos < first_explanation) {
    label_line = label_line.substr(pos + 6);
  }
  // skip blank lines before the label
  while (!label_line.empty() && std::isspace(static_cast<unsigned char>(label_line.front()))) label_line.remove_prefix(1);
  if (auto nl = label_line.find('\n'); nl != std::string_view::npos) label_line = label_line.substr(0, nl);
  if (auto ex = find_icase(label_line, "explanation:"); ex != std::string_view::npos) label_line = label_line.substr(0, ex);

  std::optional<RelationState> label;
  std::size_t best = std::string_view::npos;
  for (auto s : kAllStates) {
    const auto word = to_string(s);
    for (std::size_t pos = find_icase(label_line, word); pos != std::string_view::npos;
         pos = find_icase(label_line, word, pos + 1)) {
      const bool left_ok = pos == 0 || !is_word_char(label_line[pos - 1]);
      const bool right_ok = pos + word.size() == label_line.size() || !is_word_char(label_line[pos + word.size()]);
      if (left_ok && right_ok) {
        if (pos < best) {
          best = pos;
          label = s;
        }
        break;
      }
    }
  }
  if (!label) throw ParseError(std::string(text));

  ParsedResponse out{*label, {}};
  if (first_explanation != std::string_view::npos) {
    auto nle = text.substr(first_explanation + 12);
    if (auto next = find_icase(nle, "\npremise:"); next != std::string_view::npos) nle = nle.substr(0, next);
    out.nle = std::string(trim(nle));
  }
  return out;
}

}  // namespace ssm::llm
