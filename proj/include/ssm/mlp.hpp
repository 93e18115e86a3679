#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ssm/inference.hpp"
#include "ssm/relation.hpp"

namespace ssm::nn {

struct TrainConfig {
  std::size_t hidden = 64;
  double learning_rate = 0.01;
  std::size_t batch_size = 32;
  std::size_t epochs = 10;  // per M-step
  std::uint64_t seed = 1;
  double init_scale = 1.0;  // multiplies the 1/sqrt(fan_in) init bound
  double weight_decay = 0.0;
};

void validate(const TrainConfig& config);

/// One-hidden-layer classifier for a single latent pair:
/// softmax(w2 * relu(w1 * [x_premise; x_hyp] + b1) + b2).
struct PairClassifierParams {
  SlotPair pair{Slot::subject, Slot::subject};
  Eigen::MatrixXd w1;  // hidden x 2*dim
  Eigen::VectorXd b1;  // hidden
  Eigen::MatrixXd w2;  // 3 x hidden
  Eigen::VectorXd b2;  // 3

  std::size_t input_dim() const { return static_cast<std::size_t>(w1.cols()) / 2; }
  std::size_t hidden() const { return static_cast<std::size_t>(w1.rows()); }

  /// All-zero parameters of the given shape.
  static PairClassifierParams zeros(SlotPair pair, std::size_t dim, std::size_t hidden);
  /// Uniform in +-init_scale/sqrt(fan_in) per layer, biases zero.
  static PairClassifierParams random(SlotPair pair, std::size_t dim, std::size_t hidden, double init_scale,
                                     std::uint64_t seed);

  bool all_finite() const;
};

/// Same layout as the parameters; used for gradients.
using ParamGradient = PairClassifierParams;

/// One training row: the two parent embeddings and a target state.
struct Sample {
  const Eigen::VectorXd* premise;
  const Eigen::VectorXd* hypothesis;
  RelationState target;
};

StateProbs forward(const PairClassifierParams& params, const Eigen::VectorXd& x_premise,
                   const Eigen::VectorXd& x_hypothesis);

inline constexpr double kProbFloor = 1e-12;

/// -log(max(pred[target], 1e-12))
double cross_entropy(const StateProbs& pred, RelationState target);

/// Mean cross-entropy over the batch.
double mean_loss(const PairClassifierParams& params, std::span<const Sample> batch);

/// Exact gradient of mean_loss (unclamped) with respect to every parameter.
ParamGradient grad(const PairClassifierParams& params, std::span<const Sample> batch);

struct FitResult {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  bool trained = false;  // false when there were no samples
};

/// Mini-batch SGD over `config.epochs` epochs, starting from `params`.
/// Deterministic given config.seed.
FitResult fit(PairClassifierParams& params, std::span<const Sample> samples, const TrainConfig& config);

}  // namespace ssm::nn
