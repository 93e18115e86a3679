#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ssm/config.hpp"

namespace ssm::cli {

/// Holds `<dir>/.ssm.lock` for the lifetime of the object; a second holder
/// for the same directory fails with an Error.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

std::filesystem::path dataset_path(const RunConfig& config);
std::filesystem::path checkpoint_path(const RunConfig& config);

/// dataset.jsonl + filter_stats.json
void build_dataset(const RunConfig& config);
/// model.json, checkpoints/iter_NN.json, em_trace.csv
void train(const RunConfig& config);
/// ssm_predictions.jsonl
void predict(const RunConfig& config);
/// llm_predictions.jsonl + llm_failures.jsonl
void query_llm(const RunConfig& config);

struct EvaluateOptions {
  std::vector<std::pair<std::string, std::filesystem::path>> surrogates;  // name, predictions
  std::optional<std::filesystem::path> llm;
  std::optional<std::filesystem::path> gold;
  std::optional<std::filesystem::path> ratings;
};
/// report.json + report.txt
void evaluate(const RunConfig& config, const EvaluateOptions& options);

/// The whole pipeline on one corpus: dataset, both structures trained and
/// predicted (under <out>/large and <out>/small), LLM predictions, report.
void demo(const RunConfig& config);

/// The bundled demo configuration.
std::filesystem::path demo_config_path();

/// Entry point of the `ssm` executable. Returns the process exit code:
/// 0 success, 1 error reported by a module, 2 usage error, 3 internal error.
int run(int argc, const char* const* argv);

}  // namespace ssm::cli
