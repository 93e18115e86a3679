#include "ssm/report.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "ssm/util.hpp"

namespace ssm::eval {

using nlohmann::json;

std::string serialize_predictions(const std::vector<PredictionRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    json j;
    j["id"] = r.id;
    j["label"] = r.label ? json(std::string(to_string(*r.label))) : json(nullptr);
    j["nle"] = r.nle;
    out += j.dump() + "\n";
  }
  return out;
}

namespace {

std::vector<PredictionRecord> parse_records(std::string_view jsonl, const std::string& source, const char* nle_key) {
  std::vector<PredictionRecord> out;
  const auto lines = split(jsonl, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto line = trim(lines[n]);
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      PredictionRecord r;
      r.id = j.at("id").get<std::string>();
      if (j.contains("label") && !j["label"].is_null()) {
        r.label = parse_relation(j["label"].get<std::string>());
        if (!r.label) throw FormatError(source, n + 1, "unknown label " + j["label"].dump());
      }
      if (j.contains(nle_key) && j[nle_key].is_string()) r.nle = j[nle_key].get<std::string>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw FormatError(source, n + 1, e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<PredictionRecord> parse_predictions(std::string_view jsonl, const std::string& source) {
  return parse_records(jsonl, source, "nle");
}

std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(read_file(path), path.string());
}

std::vector<PredictionRecord> load_gold(const std::filesystem::path& path) {
  auto out = parse_records(read_file(path), path.string(), "gold_nle");
  for (const auto& r : out) {
    if (!r.label) throw FormatError(path.string(), 0, "gold record '" + r.id + "' has no label");
  }
  return out;
}

namespace {

using IdMap = std::map<std::string, const PredictionRecord*>;

IdMap index_by_id(const std::vector<PredictionRecord>& records, const std::string& name) {
  IdMap out;
  for (const auto& r : records) {
    if (!out.emplace(r.id, &r).second) throw Error(name + ": duplicate id '" + r.id + "'");
  }
  return out;
}

AgreementRow agreement(const std::string& cand_name, const IdMap& cand, const std::string& ref_name, const IdMap& ref) {
  LabelPairing pairing;
  for (const auto& [id, r] : ref) {
    const auto* c = cand.at(id);
    if (r->label && c->label) pairing.add(id, *r->label, *c->label);
  }
  AgreementRow row{cand_name, ref_name, {}, 0.0};
  if (pairing.size() == 0) throw Error("no labelled examples to compare " + cand_name + " with " + ref_name);
  row.metrics = label_metrics(pairing);
  row.kappa = cohens_kappa(pairing);
  return row;
}

SimilarityRow similarity(const std::string& cand_name, const IdMap& cand, const std::string& ref_name,
                         const IdMap& ref, const corpus::EmbeddingTable* table) {
  SimilarityRow row{cand_name, ref_name, 0, 0.0, 0.0};
  for (const auto& [id, r] : ref) {
    if (!r->label) continue;  // unparsed LLM response
    const auto* c = cand.at(id);
    row.cosine += table ? cosine_similarity(c->nle, r->nle, *table) : 0.0;
    row.jaccard += jaccard_similarity(c->nle, r->nle);
    ++row.n;
  }
  if (row.n > 0) {
    row.cosine /= static_cast<double>(row.n);
    row.jaccard /= static_cast<double>(row.n);
  }
  return row;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

std::string cell(const std::optional<double>& v) { return v ? format_fixed(*v, 4) : std::string("n/a"); }

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

EvalReport build_report(const ReportInputs& in) {
  const auto gold = index_by_id(in.gold, "gold");
  const auto llm = index_by_id(in.llm.records, in.llm.name);
  std::vector<std::pair<std::string, IdMap>> surrogates;
  for (const auto& s : in.surrogates) surrogates.emplace_back(s.name, index_by_id(s.records, s.name));

  // every id must appear in every file
  std::set<std::string> all_ids;
  std::vector<std::pair<std::string, const IdMap*>> files{{"gold", &gold}, {in.llm.name, &llm}};
  for (const auto& [name, m] : surrogates) files.emplace_back(name, &m);
  for (const auto& [name, m] : files) {
    for (const auto& [id, r] : *m) all_ids.insert(id);
  }
  std::vector<std::string> unmatched;
  for (const auto& id : all_ids) {
    for (const auto& [name, m] : files) {
      if (!m->count(id)) {
        unmatched.push_back(id + " (missing from " + name + ")");
      }
    }
  }
  if (all_ids.empty()) throw Error("no examples to evaluate");
  if (!unmatched.empty()) {
    std::string list;
    for (const auto& u : unmatched) list += (list.empty() ? "" : ", ") + u;
    throw Error("prediction files are not aligned; unmatched ids: " + list);
  }

  EvalReport report;
  report.examples = all_ids.size();
  for (const auto& [id, r] : llm) report.llm_parse_failures += r->label ? 0 : 1;

  for (const auto& [name, m] : surrogates) report.agreement.push_back(agreement(name, m, in.llm.name, llm));
  for (const auto& [name, m] : surrogates) report.agreement.push_back(agreement(name, m, "gold", gold));
  report.agreement.push_back(agreement(in.llm.name, llm, "gold", gold));

  for (const auto& [name, m] : surrogates) report.similarity.push_back(similarity(name, m, in.llm.name, llm, in.table));
  bool gold_nles = true;
  for (const auto& [id, r] : gold) gold_nles = gold_nles && !r->nle.empty();
  if (gold_nles) report.similarity.push_back(similarity("gold", gold, in.llm.name, llm, in.table));

  if (in.ratings) {
    report.fleiss_kappa = fleiss_kappa(*in.ratings);
    report.rated_items = in.ratings->items.size();
  }
  return report;
}

std::string EvalReport::to_json() const {
  json j;
  j["examples"] = examples;
  j["llm_parse_failures"] = llm_parse_failures;
  j["label_agreement"] = json::array();
  for (const auto& row : agreement) {
    json classes = json::object();
    for (auto s : kAllStates) {
      const auto& c = row.metrics.per_class[index(s)];
      classes[std::string(to_string(s))] = {{"precision", optional_number(c.precision)},
                                            {"recall", optional_number(c.recall)},
                                            {"f1", optional_number(c.f1)},
                                            {"support", c.support}};
    }
    j["label_agreement"].push_back({{"candidate", row.candidate},
                                    {"reference", row.reference},
                                    {"n", row.metrics.n},
                                    {"accuracy", row.metrics.accuracy},
                                    {"macro_f1", row.metrics.macro_f1},
                                    {"cohens_kappa", row.kappa},
                                    {"per_class", classes}});
  }
  j["nle_similarity"] = json::array();
  for (const auto& row : similarity) {
    j["nle_similarity"].push_back({{"candidate", row.candidate},
                                   {"reference", row.reference},
                                   {"n", row.n},
                                   {"cosine", row.cosine},
                                   {"jaccard", row.jaccard}});
  }
  if (fleiss_kappa) j["fleiss_kappa"] = {{"items", rated_items}, {"kappa", *fleiss_kappa}};
  return j.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  out << "Examples: " << examples << "  (LLM parse failures: " << llm_parse_failures << ")\n\n";
  out << "Label agreement\n";
  out << pad("candidate", 14) << pad("reference", 12) << pad("n", 6) << pad("accuracy", 10) << pad("macro_f1", 10)
      << pad("kappa", 9);
  for (const char* c : {"P(c)", "R(c)", "P(e)", "R(e)", "P(n)", "R(n)"}) out << pad(c, 8);
  out << '\n';
  for (const auto& row : agreement) {
    out << pad(row.candidate, 14) << pad(row.reference, 12) << pad(std::to_string(row.metrics.n), 6)
        << pad(format_fixed(row.metrics.accuracy, 4), 10) << pad(format_fixed(row.metrics.macro_f1, 4), 10)
        << pad(format_fixed(row.kappa, 4), 9);
    for (const auto& c : row.metrics.per_class) out << pad(cell(c.precision), 8) << pad(cell(c.recall), 8);
    out << '\n';
  }
  out << "\nExplanation similarity\n";
  out << pad("candidate", 14) << pad("reference", 12) << pad("n", 6) << pad("cosine", 10) << pad("jaccard", 10) << '\n';
  for (const auto& row : similarity) {
    out << pad(row.candidate, 14) << pad(row.reference, 12) << pad(std::to_string(row.n), 6)
        << pad(format_fixed(row.cosine, 4), 10) << pad(format_fixed(row.jaccard, 4), 10) << '\n';
  }
  if (fleiss_kappa) {
    out << "\nRater agreement (Fleiss' kappa over " << rated_items << " items): " << format_fixed(*fleiss_kappa, 4)
        << '\n';
  }
  return out.str();
}

}  // namespace ssm::eval
