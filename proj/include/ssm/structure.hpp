#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "ssm/relation.hpp"

namespace ssm {

/// Which latent pair variables z_{k,l} exist in the network.
struct StructureSpec {
  std::string name;
  std::set<SlotPair> pairs;

  bool contains(SlotPair p) const { return pairs.count(p) > 0; }

  /// Every (k,l) combination: 25 pairs.
  static StructureSpec large();
  /// `large` without the cross relations among subject, verb and object: 19 pairs.
  static StructureSpec small();

  /// `{"name": "...", "pairs": [[k,l], ...]}`
  std::string to_json() const;
  static StructureSpec from_json(std::string_view text);
  /// "large", "small", or a path to a JSON file.
  static StructureSpec resolve(std::string_view name_or_path);
};

/// Throws unless each slot in `columns` is the hypothesis side of at least
/// one pair of `spec`.
void check_covers_columns(const StructureSpec& spec, std::span<const Slot> columns);

}  // namespace ssm
