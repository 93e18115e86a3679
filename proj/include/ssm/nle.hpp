#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/inference.hpp"
#include "ssm/model.hpp"

namespace ssm::nle {

/// Explanation templates with placeholders {x1}, {x2}, {slot_k}, {slot_l}.
/// Written sentence-internally (lowercase first letter); the generator
/// capitalises the first clause and appends the full stop.
struct TemplateSet {
  std::string contradiction_same;
  std::string contradiction_cross;
  std::string entailment_same;
  std::string entailment_cross;
  std::string neutral;
  std::string joiner = " and ";
  std::array<std::string, kSlotCount> slot_names;

  static TemplateSet defaults();
  /// `key = value` lines (`#` comments; values may be double-quoted). Keys
  /// not present keep their default.
  static TemplateSet parse(std::string_view text, const std::string& source = "templates");
  static TemplateSet load(const std::filesystem::path& path);

  const std::string& slot_name(Slot s) const { return slot_names[slot_index(s)]; }
};

using SlotTexts = std::array<std::optional<std::string>, kSlotCount>;

SlotTexts slot_texts(const SentenceSlots& slots);

struct ResponsiblePair {
  SlotPair pair;
  RelationState state;
  bool operator==(const ResponsiblePair&) const = default;
};

struct LabeledExplanation {
  RelationState label = RelationState::neutral;
  std::string nle;
  std::vector<ResponsiblePair> responsible_pairs;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Verbalises a label-consistent assignment:
///   contradiction -> one clause per contradicting pair,
///   entailment    -> one clause per entailing pair,
///   neutral       -> one clause per column in `columns` without an entailing pair,
/// in (k,l) order (columns in slot order), joined by the template joiner.
LabeledExplanation generate_nle(const ZAssignment& z, RelationState label, std::span<const Slot> columns,
                                const SlotTexts& premise, const SlotTexts& hypothesis, const TemplateSet& templates);

/// Predict with the model, pick the label's MAP-style assignment, verbalise it.
LabeledExplanation explain(const EmbeddedExample& example, const SurrogateModel& model, const TemplateSet& templates);

enum class ClauseKind { contradiction_same, contradiction_cross, entailment_same, entailment_cross, neutral };

struct ParsedClause {
  ClauseKind kind;
  std::optional<Slot> slot_k;  // known only for cross clauses
  std::optional<Slot> slot_l;  // known for cross and neutral clauses
  std::string x1;              // empty for neutral clauses
  std::string x2;
};

RelationState label_of(ClauseKind kind);

/// Inverse of generate_nle: splits an explanation back into template
/// clauses. Returns nullopt when the text is not in the template language.
std::optional<std::vector<ParsedClause>> parse_nle(std::string_view text, const TemplateSet& templates);

}  // namespace ssm::nle
