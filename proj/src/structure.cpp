#include "ssm/structure.hpp"

#include <nlohmann/json.hpp>

#include "ssm/util.hpp"

namespace ssm {

using nlohmann::json;

StructureSpec StructureSpec::large() {
  StructureSpec spec{"large", {}};
  for (auto k : kAllSlots) {
    for (auto l : kAllSlots) spec.pairs.insert({k, l});
  }
  return spec;
}

StructureSpec StructureSpec::small() {
  StructureSpec spec = large();
  spec.name = "small";
  const auto core = [](Slot s) { return slot_number(s) <= 3; };
  std::erase_if(spec.pairs, [&](SlotPair p) { return core(p.premise) && core(p.hypothesis) && !p.same_slot(); });
  return spec;
}

std::string StructureSpec::to_json() const {
  json j;
  j["name"] = name;
  j["pairs"] = json::array();
  for (auto p : pairs) j["pairs"].push_back({slot_number(p.premise), slot_number(p.hypothesis)});
  return j.dump();
}

StructureSpec StructureSpec::from_json(std::string_view text) {
  StructureSpec spec;
  try {
    const auto j = json::parse(text);
    spec.name = j.value("name", std::string("custom"));
    for (const auto& p : j.at("pairs")) {
      if (!p.is_array() || p.size() != 2) throw Error("each pair must be [k, l]");
      spec.pairs.insert({slot_from_number(p[0].get<int>()), slot_from_number(p[1].get<int>())});
    }
  } catch (const json::exception& e) {
    throw FormatError("structure", 0, e.what());
  } catch (const std::out_of_range& e) {
    throw FormatError("structure", 0, e.what());
  }
  if (spec.pairs.empty()) throw FormatError("structure", 0, "structure has no pairs");
  return spec;
}

StructureSpec StructureSpec::resolve(std::string_view name_or_path) {
  if (name_or_path == "large") return large();
  if (name_or_path == "small") return small();
  const std::filesystem::path path{std::string(name_or_path)};
  if (!std::filesystem::exists(path)) {
    throw Error("unknown structure '" + std::string(name_or_path) + "' (expected large, small, or a JSON file)");
  }
  return from_json(read_file(path));
}

void check_covers_columns(const StructureSpec& spec, std::span<const Slot> columns) {
  for (auto l : columns) {
    bool covered = false;
    for (auto p : spec.pairs) covered = covered || p.hypothesis == l;
    if (!covered) {
      throw Error("structure '" + spec.name + "' has no pair for hypothesis slot " + std::string(to_string(l)));
    }
  }
}

}  // namespace ssm
