#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "ssm/dataset.hpp"
#include "ssm/inference.hpp"
#include "ssm/mlp.hpp"
#include "ssm/structure.hpp"

namespace ssm {

/// The trained surrogate: a structure plus one classifier per latent pair.
struct SurrogateModel {
  StructureSpec structure;
  std::size_t dim = 0;
  nn::TrainConfig train;
  std::map<SlotPair, nn::PairClassifierParams> classifiers;

  /// Fresh random classifiers, one per structure pair, each with its own
  /// seed stream derived from `seed`.
  static SurrogateModel initialise(StructureSpec structure, std::size_t dim, const nn::TrainConfig& train,
                                   std::uint64_t seed);

  /// Marginals of the pairs in `active` for this example.
  ZMarginals marginals(const EmbeddedExample& example, const ActiveSet& active) const;
  LabelDistribution predict(const EmbeddedExample& example) const;
};

/// Checkpoint file magic; bumped together with kCheckpointVersion.
inline constexpr const char* kCheckpointMagic = "ssm-surrogate-checkpoint";
inline constexpr int kCheckpointVersion = 1;

std::string serialize_model(const SurrogateModel& model);
SurrogateModel parse_model(std::string_view text, const std::string& source = "checkpoint");
void save_model(const SurrogateModel& model, const std::filesystem::path& path);
SurrogateModel load_model(const std::filesystem::path& path);

}  // namespace ssm
