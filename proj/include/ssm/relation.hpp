#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ssm {

/// Relation between two subphrases, and also the NLI label of a whole pair.
/// The numeric order is used as an index into probability triples.
enum class RelationState : std::uint8_t { contradiction = 0, entailment = 1, neutral = 2 };

inline constexpr std::array<RelationState, 3> kAllStates = {
    RelationState::contradiction, RelationState::entailment, RelationState::neutral};

inline constexpr std::size_t index(RelationState s) { return static_cast<std::size_t>(s); }

std::string_view to_string(RelationState s);
/// Case-insensitive; accepts exactly the three label words.
std::optional<RelationState> parse_relation(std::string_view text);

/// Subphrase slot of a sentence. Values are the 1-based slot indices k / l.
enum class Slot : std::uint8_t { subject = 1, verb = 2, object = 3, location = 4, clothing = 5 };

inline constexpr std::array<Slot, 5> kAllSlots = {Slot::subject, Slot::verb, Slot::object,
                                                  Slot::location, Slot::clothing};
inline constexpr int kSlotCount = 5;

inline constexpr int slot_number(Slot s) { return static_cast<int>(s); }
/// 0-based position for array storage.
inline constexpr std::size_t slot_index(Slot s) { return static_cast<std::size_t>(s) - 1; }
Slot slot_from_number(int k);

std::string_view to_string(Slot s);
std::optional<Slot> parse_slot(std::string_view text);

/// Index of one latent variable: premise slot k related to hypothesis slot l.
struct SlotPair {
  Slot premise;
  Slot hypothesis;

  constexpr bool same_slot() const { return premise == hypothesis; }
  friend constexpr auto operator<=>(const SlotPair&, const SlotPair&) = default;
};

std::string to_string(SlotPair p);

}  // namespace ssm
