#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssm/embedding.hpp"
#include "ssm/metrics.hpp"
#include "ssm/relation.hpp"

namespace ssm::eval {

/// One line of a predictions file: `{id, label, nle}`. A null label marks
/// an example whose LLM response could not be parsed.
struct PredictionRecord {
  std::string id;
  std::optional<RelationState> label;
  std::string nle;
};

std::string serialize_predictions(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> parse_predictions(std::string_view jsonl, const std::string& source = "predictions");
std::vector<PredictionRecord> load_predictions(const std::filesystem::path& path);
/// Reads `id`, `label` and optional `gold_nle` from pairs or dataset JSON-lines.
std::vector<PredictionRecord> load_gold(const std::filesystem::path& path);

struct NamedPredictions {
  std::string name;
  std::vector<PredictionRecord> records;
};

struct ReportInputs {
  std::vector<NamedPredictions> surrogates;  // e.g. ssm_large, ssm_small
  NamedPredictions llm;
  std::vector<PredictionRecord> gold;
  const corpus::EmbeddingTable* table = nullptr;  // for cosine similarity
  std::optional<RatingMatrix> ratings;
};

struct AgreementRow {
  std::string candidate;
  std::string reference;
  LabelMetrics metrics;
  double kappa = 0.0;
};

struct SimilarityRow {
  std::string candidate;
  std::string reference;
  std::size_t n = 0;
  double cosine = 0.0;
  double jaccard = 0.0;
};

struct EvalReport {
  std::size_t examples = 0;
  std::size_t llm_parse_failures = 0;
  std::vector<AgreementRow> agreement;
  std::vector<SimilarityRow> similarity;
  std::optional<double> fleiss_kappa;
  std::size_t rated_items = 0;

  std::string to_json() const;
  std::string to_text() const;
};

/// Aligns every file on example id (all id sets must be equal) and computes
/// label agreement of each surrogate against the LLM and gold, the LLM
/// against gold, and NLE similarity of each surrogate (and gold NLEs, when
/// present) against the LLM. LLM parse failures are excluded and counted.
EvalReport build_report(const ReportInputs& inputs);

}  // namespace ssm::eval
