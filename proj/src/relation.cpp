#include "ssm/relation.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace ssm {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(RelationState s) {
  switch (s) {
    case RelationState::contradiction: return "contradiction";
    case RelationState::entailment: return "entailment";
    case RelationState::neutral: return "neutral";
  }
  return "?";
}

std::optional<RelationState> parse_relation(std::string_view text) {
  const std::string t = lower(text);
  for (auto s : kAllStates) {
    if (t == to_string(s)) return s;
  }
  return std::nullopt;
}

Slot slot_from_number(int k) {
  if (k < 1 || k > kSlotCount) throw std::out_of_range("slot index out of range: " + std::to_string(k));
  return static_cast<Slot>(k);
}

std::string_view to_string(Slot s) {
  switch (s) {
    case Slot::subject: return "subject";
    case Slot::verb: return "verb";
    case Slot::object: return "object";
    case Slot::location: return "location";
    case Slot::clothing: return "clothing";
  }
  return "?";
}

std::optional<Slot> parse_slot(std::string_view text) {
  const std::string t = lower(text);
  for (auto s : kAllSlots) {
    if (t == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string to_string(SlotPair p) {
  return "(" + std::to_string(slot_number(p.premise)) + "," + std::to_string(slot_number(p.hypothesis)) + ")";
}

}  // namespace ssm
