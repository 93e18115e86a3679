#include "ssm/dataset.hpp"

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <unordered_map>

#include "ssm/util.hpp"

namespace ssm {

using nlohmann::json;

const EmbeddedSlot& SentenceSlots::at(Slot s) const {
  const auto& slot = slots[slot_index(s)];
  if (!slot) throw Error("slot '" + std::string(to_string(s)) + "' is absent");
  return *slot;
}

namespace corpus {

namespace {

std::string required_string(const json& row, const char* key, const std::string& source, std::size_t line) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_string()) throw FormatError(source, line, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

}  // namespace

std::vector<PairRecord> parse_pairs(std::string_view jsonl, const std::string& source) {
  std::vector<PairRecord> out;
  const auto lines = split(jsonl, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError(source, n + 1, e.what());
    }
    PairRecord rec;
    rec.id = required_string(row, "id", source, n + 1);
    rec.premise = required_string(row, "premise", source, n + 1);
    rec.hypothesis = required_string(row, "hypothesis", source, n + 1);
    const auto label = required_string(row, "label", source, n + 1);
    const auto parsed = parse_relation(label);
    if (!parsed) throw FormatError(source, n + 1, "unknown label '" + label + "'");
    rec.label = *parsed;
    if (auto it = row.find("gold_nle"); it != row.end() && it->is_string()) rec.gold_nle = it->get<std::string>();
    rec.premise_parse_id = required_string(row, "premise_parse_id", source, n + 1);
    rec.hypothesis_parse_id = required_string(row, "hypothesis_parse_id", source, n + 1);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PairRecord> load_pairs(const std::filesystem::path& path) {
  return parse_pairs(read_file(path), path.string());
}

double FilterStats::retained_fraction() const {
  if (total == 0) return std::numeric_limits<double>::quiet_NaN();
  return static_cast<double>(retained) / static_cast<double>(total);
}

std::string FilterStats::to_json() const {
  json j;
  j["total"] = total;
  j["retained"] = retained;
  j["inadmissible"] = inadmissible;
  j["oov_dropped"] = oov_dropped;
  const double frac = retained_fraction();
  if (std::isnan(frac)) {
    j["retained_fraction"] = "n/a";
  } else {
    j["retained_fraction"] = frac;
  }
  j["discard_reasons"] = reasons;
  return j.dump(2) + "\n";
}

namespace {

struct SentenceOutcome {
  std::optional<SentenceSlots> slots;
  std::string reason;  // set when inadmissible
  bool oov = false;
};

SentenceOutcome embed_sentence(const ParsedSentence& sentence, const EmbeddingTable& table, const Lexicons& lex) {
  SentenceOutcome out;
  auto extraction = extract_subphrases(sentence, lex);
  if (auto* bad = std::get_if<Inadmissible>(&extraction)) {
    out.reason = bad->reason;
    return out;
  }
  const auto& set = std::get<SubphraseSet>(extraction);
  SentenceSlots slots;
  for (auto s : kAllSlots) {
    const auto& phrase = set[s];
    if (!phrase) continue;
    auto embedded = embed_subphrase(std::span<const WordToken>(phrase->tokens), table);
    if (embedded.all_oov()) continue;  // slot dropped
    slots[s] = EmbeddedSlot{phrase->text, std::move(embedded.vector)};
  }
  if (!slots.has(Slot::subject) || !slots.has(Slot::verb)) {
    out.oov = true;
    return out;
  }
  out.slots = std::move(slots);
  return out;
}

}  // namespace

Dataset build_dataset(const std::vector<PairRecord>& pairs, const std::vector<ParsedSentence>& parses,
                      const EmbeddingTable& table, const Lexicons& lexicons, std::size_t threads) {
  std::unordered_map<std::string, const ParsedSentence*> by_id;
  for (const auto& p : parses) by_id[p.id] = &p;

  std::vector<std::string> missing;
  for (const auto& pair : pairs) {
    for (const auto* id : {&pair.premise_parse_id, &pair.hypothesis_parse_id}) {
      if (!by_id.count(*id)) missing.push_back(*id);
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& id : missing) list += (list.empty() ? "" : ", ") + id;
    throw Error("pairs reference missing parse ids: " + list);
  }

  std::vector<SentenceOutcome> premises(pairs.size());
  std::vector<SentenceOutcome> hypotheses(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    premises[i] = embed_sentence(*by_id.at(pairs[i].premise_parse_id), table, lexicons);
    hypotheses[i] = embed_sentence(*by_id.at(pairs[i].hypothesis_parse_id), table, lexicons);
  });

  Dataset out;
  out.stats.total = pairs.size();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = premises[i];
    const auto& h = hypotheses[i];
    for (const auto* o : {&p, &h}) {
      if (!o->reason.empty()) ++out.stats.reasons[o->reason];
    }
    if (!p.reason.empty() || !h.reason.empty()) {
      ++out.stats.inadmissible;
      continue;
    }
    if (p.oov || h.oov) {
      ++out.stats.oov_dropped;
      continue;
    }
    EmbeddedExample ex;
    ex.id = pairs[i].id;
    ex.premise = *p.slots;
    ex.hypothesis = *h.slots;
    ex.gold_label = pairs[i].label;
    ex.gold_nle = pairs[i].gold_nle;
    out.examples.push_back(std::move(ex));
  }
  out.stats.retained = out.examples.size();
  return out;
}

}  // namespace corpus

namespace {

json slots_to_json(const SentenceSlots& slots) {
  json j = json::object();
  for (auto s : kAllSlots) {
    if (!slots.has(s)) continue;
    const auto& slot = slots.at(s);
    j[std::string(to_string(s))] = {{"text", slot.text},
                                    {"vector", std::vector<double>(slot.vector.data(), slot.vector.data() + slot.vector.size())}};
  }
  return j;
}

SentenceSlots slots_from_json(const json& j) {
  SentenceSlots out;
  for (auto& [key, value] : j.items()) {
    const auto slot = parse_slot(key);
    if (!slot) throw Error("unknown slot name '" + key + "'");
    const auto vec = value.at("vector").get<std::vector<double>>();
    out[*slot] = EmbeddedSlot{value.at("text").get<std::string>(),
                              Eigen::Map<const Eigen::VectorXd>(vec.data(), static_cast<Eigen::Index>(vec.size()))};
  }
  return out;
}

}  // namespace

std::string serialize_dataset(const std::vector<EmbeddedExample>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    json j;
    j["id"] = ex.id;
    j["label"] = std::string(to_string(ex.gold_label));
    if (ex.gold_nle) j["gold_nle"] = *ex.gold_nle;
    j["premise"] = slots_to_json(ex.premise);
    j["hypothesis"] = slots_to_json(ex.hypothesis);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<EmbeddedExample> parse_dataset(std::string_view jsonl, const std::string& source) {
  std::vector<EmbeddedExample> out;
  const auto lines = split(jsonl, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      EmbeddedExample ex;
      ex.id = j.at("id").get<std::string>();
      const auto label = parse_relation(j.at("label").get<std::string>());
      if (!label) throw Error("unknown label");
      ex.gold_label = *label;
      if (auto it = j.find("gold_nle"); it != j.end() && it->is_string()) ex.gold_nle = it->get<std::string>();
      ex.premise = slots_from_json(j.at("premise"));
      ex.hypothesis = slots_from_json(j.at("hypothesis"));
      out.push_back(std::move(ex));
    } catch (const FormatError&) {
      throw;
    } catch (const std::exception& e) {
      throw FormatError(source, n + 1, e.what());
    }
  }
  return out;
}

std::vector<EmbeddedExample> load_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_file(path), path.string());
}

}  // namespace ssm
