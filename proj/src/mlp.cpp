#include "ssm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ssm/util.hpp"

namespace ssm::nn {

void validate(const TrainConfig& c) {
  if (c.hidden == 0 || c.batch_size == 0 || c.epochs == 0 || !(c.learning_rate > 0.0) || !(c.init_scale > 0.0) ||
      c.weight_decay < 0.0) {
    throw Error("invalid training config: hidden, batch size, epochs, learning rate and init scale must be positive");
  }
}

PairClassifierParams PairClassifierParams::zeros(SlotPair pair, std::size_t dim, std::size_t hidden) {
  const auto h = static_cast<Eigen::Index>(hidden);
  const auto in = static_cast<Eigen::Index>(2 * dim);
  return {pair, Eigen::MatrixXd::Zero(h, in), Eigen::VectorXd::Zero(h), Eigen::MatrixXd::Zero(3, h),
          Eigen::VectorXd::Zero(3)};
}

PairClassifierParams PairClassifierParams::random(SlotPair pair, std::size_t dim, std::size_t hidden,
                                                  double init_scale, std::uint64_t seed) {
  auto p = zeros(pair, dim, hidden);
  Rng rng(seed);
  const double bound1 = init_scale / std::sqrt(static_cast<double>(2 * dim));
  const double bound2 = init_scale / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> u1(-bound1, bound1);
  std::uniform_real_distribution<double> u2(-bound2, bound2);
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) p.w1.data()[i] = u1(rng);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) p.w2.data()[i] = u2(rng);
  return p;
}

bool PairClassifierParams::all_finite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

namespace {

struct Activations {
  Eigen::VectorXd input;
  Eigen::VectorXd pre;     // w1 x + b1
  Eigen::VectorXd hidden;  // relu(pre)
  Eigen::Vector3d probs;
};

Activations run(const PairClassifierParams& p, const Eigen::VectorXd& xp, const Eigen::VectorXd& xh) {
  const auto dim = static_cast<Eigen::Index>(p.input_dim());
  if (xp.size() != dim || xh.size() != dim) {
    throw Error("input vector length mismatch: classifier expects " + std::to_string(dim) + ", got " +
                std::to_string(xp.size()) + " and " + std::to_string(xh.size()));
  }
  Activations a;
  a.input.resize(2 * dim);
  a.input << xp, xh;
  a.pre = p.w1 * a.input + p.b1;
  a.hidden = a.pre.cwiseMax(0.0);
  Eigen::Vector3d logits = p.w2 * a.hidden + p.b2;
  logits.array() -= logits.maxCoeff();
  a.probs = logits.array().exp();
  a.probs /= a.probs.sum();
  return a;
}

void add_scaled(ParamGradient& into, const ParamGradient& g, double scale) {
  into.w1 += scale * g.w1;
  into.b1 += scale * g.b1;
  into.w2 += scale * g.w2;
  into.b2 += scale * g.b2;
}

}  // namespace

StateProbs forward(const PairClassifierParams& params, const Eigen::VectorXd& x_premise,
                   const Eigen::VectorXd& x_hypothesis) {
  const auto a = run(params, x_premise, x_hypothesis);
  return {a.probs[0], a.probs[1], a.probs[2]};
}

double cross_entropy(const StateProbs& pred, RelationState target) {
  return -std::log(std::max(pred[index(target)], kProbFloor));
}

double mean_loss(const PairClassifierParams& params, std::span<const Sample> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& s : batch) total += cross_entropy(forward(params, *s.premise, *s.hypothesis), s.target);
  return total / static_cast<double>(batch.size());
}

ParamGradient grad(const PairClassifierParams& params, std::span<const Sample> batch) {
  auto g = PairClassifierParams::zeros(params.pair, params.input_dim(), params.hidden());
  if (batch.empty()) return g;
  for (const auto& s : batch) {
    const auto a = run(params, *s.premise, *s.hypothesis);
    // d loss / d logits for softmax + cross-entropy
    Eigen::Vector3d delta_out = a.probs;
    delta_out[static_cast<Eigen::Index>(index(s.target))] -= 1.0;
    g.w2.noalias() += delta_out * a.hidden.transpose();
    g.b2 += delta_out;
    Eigen::VectorXd delta_hidden = params.w2.transpose() * delta_out;
    for (Eigen::Index i = 0; i < delta_hidden.size(); ++i) {
      if (a.pre[i] <= 0.0) delta_hidden[i] = 0.0;
    }
    g.w1.noalias() += delta_hidden * a.input.transpose();
    g.b1 += delta_hidden;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  g.w1 *= inv;
  g.b1 *= inv;
  g.w2 *= inv;
  g.b2 *= inv;
  return g;
}

FitResult fit(PairClassifierParams& params, std::span<const Sample> samples, const TrainConfig& config) {
  validate(config);
  FitResult result;
  if (samples.empty()) {
    log_warn("pair " + to_string(params.pair) + " has no training samples; parameters unchanged");
    return result;
  }
  result.trained = true;
  result.initial_loss = mean_loss(params, samples);

  Rng rng(config.seed);
  std::vector<Sample> order(samples.begin(), samples.end());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const auto end = std::min(order.size(), start + config.batch_size);
      const std::span<const Sample> batch(order.data() + start, end - start);
      auto g = grad(params, batch);
      if (config.weight_decay > 0.0) {
        g.w1 += config.weight_decay * params.w1;
        g.w2 += config.weight_decay * params.w2;
      }
      add_scaled(params, g, -config.learning_rate);
    }
  }
  result.final_loss = mean_loss(params, samples);
  return result;
}

}  // namespace ssm::nn
