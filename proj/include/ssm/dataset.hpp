#pragma once

#include <Eigen/Core>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ssm/conllu.hpp"
#include "ssm/embedding.hpp"
#include "ssm/relation.hpp"
#include "ssm/subphrase.hpp"

namespace ssm {

struct EmbeddedSlot {
  std::string text;
  Eigen::VectorXd vector;
};

/// The five slots of one sentence; absent slots are empty.
struct SentenceSlots {
  std::array<std::optional<EmbeddedSlot>, kSlotCount> slots;

  bool has(Slot s) const { return slots[slot_index(s)].has_value(); }
  const EmbeddedSlot& at(Slot s) const;
  std::optional<EmbeddedSlot>& operator[](Slot s) { return slots[slot_index(s)]; }
  const std::optional<EmbeddedSlot>& operator[](Slot s) const { return slots[slot_index(s)]; }
};

struct EmbeddedExample {
  std::string id;
  SentenceSlots premise;
  SentenceSlots hypothesis;
  RelationState gold_label = RelationState::neutral;
  std::optional<std::string> gold_nle;
};

namespace corpus {

/// One line of the pairs JSON-lines file.
struct PairRecord {
  std::string id;
  std::string premise;
  std::string hypothesis;
  RelationState label = RelationState::neutral;
  std::optional<std::string> gold_nle;
  std::string premise_parse_id;
  std::string hypothesis_parse_id;
};

std::vector<PairRecord> parse_pairs(std::string_view jsonl, const std::string& source = "pairs");
std::vector<PairRecord> load_pairs(const std::filesystem::path& path);

struct FilterStats {
  std::size_t total = 0;
  std::size_t retained = 0;
  std::size_t inadmissible = 0;  // pairs with at least one inadmissible sentence
  std::size_t oov_dropped = 0;   // admissible, but Subject or Verb had no known word
  std::map<std::string, std::size_t> reasons;  // per-sentence discard reasons

  /// NaN for an empty input.
  double retained_fraction() const;
  std::string to_json() const;
};

struct Dataset {
  std::vector<EmbeddedExample> examples;
  FilterStats stats;
};

/// Joins pairs with their parses, extracts and embeds the slots, and keeps
/// only pairs whose two sentences are admissible. Throws when a pair names
/// a parse id that is not in `parses`.
Dataset build_dataset(const std::vector<PairRecord>& pairs, const std::vector<ParsedSentence>& parses,
                      const EmbeddingTable& table, const Lexicons& lexicons, std::size_t threads = 1);

}  // namespace corpus

std::string serialize_dataset(const std::vector<EmbeddedExample>& examples);
std::vector<EmbeddedExample> parse_dataset(std::string_view jsonl, const std::string& source = "dataset");
std::vector<EmbeddedExample> load_dataset(const std::filesystem::path& path);

}  // namespace ssm
