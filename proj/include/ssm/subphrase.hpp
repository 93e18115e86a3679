#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "ssm/conllu.hpp"
#include "ssm/relation.hpp"

namespace ssm::corpus {

/// Curated word lists that decide which prepositional phrases count as
/// Location or Clothing. Entries are lowercased lemmas or forms.
struct Lexicons {
  std::set<std::string> locations;
  std::set<std::string> clothing;
  std::set<std::string> locative_markers;

  /// Loads `locations.txt`, `clothing.txt` and `locative_prepositions.txt`
  /// from `dir`; one term per line, `#` comments.
  static Lexicons load(const std::filesystem::path& dir);
  /// The lexicons shipped under data/lexicons.
  static Lexicons bundled();
};

std::set<std::string> load_word_list(const std::filesystem::path& path);

/// A word of a span with the two keys used for embedding lookup.
struct WordToken {
  std::string form;   // lowercased surface form
  std::string lemma;  // lowercased lemma

  bool operator==(const WordToken&) const = default;
};

struct SlotPhrase {
  std::string text;  // surface text; multiple spans joined with " and "
  std::vector<WordToken> tokens;

  bool operator==(const SlotPhrase&) const = default;
};

struct SubphraseSet {
  std::array<std::optional<SlotPhrase>, kSlotCount> slots;

  const std::optional<SlotPhrase>& operator[](Slot s) const { return slots[slot_index(s)]; }
  std::optional<SlotPhrase>& operator[](Slot s) { return slots[slot_index(s)]; }
};

/// Returned for sentences the filter discards; `reason` is a short tag
/// ("multiple subjects", "no verb", ...).
struct Inadmissible {
  std::string reason;
};

using Extraction = std::variant<SubphraseSet, Inadmissible>;

Extraction extract_subphrases(const ParsedSentence& sentence, const Lexicons& lexicons);

}  // namespace ssm::corpus
