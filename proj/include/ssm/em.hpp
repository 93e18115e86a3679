#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/inference.hpp"
#include "ssm/mlp.hpp"
#include "ssm/model.hpp"
#include "ssm/util.hpp"

namespace ssm::em {

struct EMConfig {
  std::size_t samples_per_example = 5;  // s
  std::size_t max_attempts = 200;       // rejection cap per requested sample
  std::size_t iterations = 10;
  std::uint64_t seed = 1;
  nn::TrainConfig train;
  std::size_t threads = 1;  // 0 = hardware concurrency
};

void validate(const EMConfig& config);

struct IterationTrace {
  std::size_t iteration = 0;  // 1-based
  double loglik = 0.0;        // observed-data log-likelihood after the M-step
  /// Accepted draws / total draws over examples with that gold label; NaN
  /// when no example carries the label.
  std::array<double, 3> acceptance{};
  std::size_t starved_examples = 0;  // examples with zero accepted samples
  std::size_t pooled_samples = 0;
};

struct EMTrace {
  double initial_loglik = 0.0;
  std::vector<IterationTrace> iterations;

  /// Header `iteration,loglik,acceptance_c,acceptance_e,acceptance_n,starved_examples`,
  /// one row per iteration; row 0 carries the initial log-likelihood.
  std::string to_csv() const;
};

struct PosteriorDraw {
  std::vector<ZAssignment> samples;  // every one satisfies eval_rules == label
  std::size_t attempts = 0;
};

/// Rejection sampling from Z | X, Y=label: draw each active z independently
/// from its marginal, keep the joint draw iff the rules give `label`. Each of
/// the `s` requested samples gets up to `max_attempts` draws; sampling stops
/// at the first exhausted request.
PosteriorDraw sample_posterior(const ZMarginals& marginals, const ActiveSet& active, RelationState label,
                               std::size_t s, std::size_t max_attempts, Rng& rng);

PosteriorDraw sample_posterior(const EmbeddedExample& example, const SurrogateModel& model, RelationState label,
                               std::size_t s, std::size_t max_attempts, Rng& rng);

/// Sum over examples of log P(gold | x), clamped at 1e-12.
double log_likelihood(std::span<const EmbeddedExample> dataset, const SurrogateModel& model);

/// One E-step + M-step. Updates `model` in place.
IterationTrace em_iteration(std::span<const EmbeddedExample> dataset, SurrogateModel& model, const EMConfig& config,
                            std::size_t iteration);

using IterationCallback = std::function<void(const SurrogateModel&, const IterationTrace&)>;

/// Runs config.iterations rounds of em_iteration.
EMTrace train(std::span<const EmbeddedExample> dataset, SurrogateModel& model, const EMConfig& config,
              const IterationCallback& on_iteration = {});

}  // namespace ssm::em
