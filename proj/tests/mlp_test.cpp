#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gradcheck.hpp"
#include "ssm/mlp.hpp"
#include "ssm/model.hpp"

using namespace ssm;
using namespace ssm::nn;

namespace {

const SlotPair kPair{Slot::subject, Slot::subject};

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::uint64_t clean_seed() {
  for (std::uint64_t seed = 1;; ++seed) {
    testkit::TinyNetwork net(seed);
    if (testkit::min_abs_preactivation(net.params, net.batch) > 0.05) return seed;
  }
}

}  // namespace

TEST(Forward, ZeroWeightsGiveUniform) {
  const auto p = PairClassifierParams::zeros(kPair, 4, 8);
  const auto out = forward(p, Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(4));
  for (double x : out) EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(Forward, HandComputedTwoTwoThree) {
  auto p = PairClassifierParams::zeros(kPair, 1, 2);
  p.w1 << 1, -1, 0.5, 2;
  p.b1 << 0, -1;
  p.w2 << 1, 0, 0, 1, 1, 1;
  p.b2 << 0, 0, -1;
  // pre = [1, 2], logits = [1, 2, 2]
  const auto out = forward(p, vec({2}), vec({1}));
  EXPECT_NEAR(out[0], 0.15536240349696359, 1e-15);
  EXPECT_NEAR(out[1], 0.42231879825151819, 1e-15);
  EXPECT_NEAR(out[2], 0.42231879825151819, 1e-15);
}

TEST(Forward, RandomInputsGiveDistributions) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 10.0);
  const auto p = PairClassifierParams::random(kPair, 6, 16, 3.0, 9);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd a(6), b(6);
    for (int d = 0; d < 6; ++d) {
      a[d] = n(rng);
      b[d] = n(rng);
    }
    const auto out = forward(p, a, b);
    EXPECT_NEAR(out[0] + out[1] + out[2], 1.0, 1e-9);
    for (double x : out) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
  }
}

TEST(Forward, ShapeMismatchThrows) {
  const auto p = PairClassifierParams::zeros(kPair, 3, 2);
  EXPECT_THROW(forward(p, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), Error);
}

TEST(CrossEntropy, Values) {
  EXPECT_DOUBLE_EQ(cross_entropy({0, 1, 0}, RelationState::entailment), 0.0);
  EXPECT_NEAR(cross_entropy({1.0 / 3, 1.0 / 3, 1.0 / 3}, RelationState::neutral), std::log(3.0), 1e-12);
  const double clamped = cross_entropy({1, 0, 0}, RelationState::neutral);
  EXPECT_TRUE(std::isfinite(clamped));
  EXPECT_NEAR(clamped, -std::log(1e-12), 1e-9);
}

TEST(Grad, MatchesFiniteDifferences) {
  testkit::TinyNetwork net(clean_seed());
  const auto r = testkit::gradient_check(net.params, net.batch);
  EXPECT_EQ(r.parameters, 4u * 6 + 4 + 3 * 4 + 3);
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(Grad, VanishesWhenTargetsAreHit) {
  auto p = PairClassifierParams::zeros(kPair, 2, 3);
  p.b2 << 0, 100, 0;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
  const std::vector<Sample> batch{{&x, &x, RelationState::entailment}};
  const auto g = grad(p, batch);
  const double norm = std::sqrt(g.w1.squaredNorm() + g.b1.squaredNorm() + g.w2.squaredNorm() + g.b2.squaredNorm());
  EXPECT_LT(norm, 1e-9);
}

TEST(Grad, DuplicatedBatchHasSameGradient) {
  testkit::TinyNetwork net(3);
  auto doubled = net.batch;
  doubled.insert(doubled.end(), net.batch.begin(), net.batch.end());
  const auto a = grad(net.params, net.batch);
  const auto b = grad(net.params, doubled);
  EXPECT_LT((a.w1 - b.w1).norm(), 1e-14);
  EXPECT_LT((a.b1 - b.b1).norm(), 1e-14);
  EXPECT_LT((a.w2 - b.w2).norm(), 1e-14);
  EXPECT_LT((a.b2 - b.b2).norm(), 1e-14);
}

namespace {

struct Clusters {
  std::vector<Eigen::VectorXd> xs;
  std::vector<Sample> samples;

  explicit Clusters(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.3);
    xs.reserve(200);
    for (int i = 0; i < 100; ++i) {
      const bool first = i % 2 == 0;
      Eigen::VectorXd a(2), b(2);
      a << (first ? 2.0 : -2.0) + n(rng), n(rng);
      b << n(rng), (first ? 2.0 : -2.0) + n(rng);
      xs.push_back(a);
      xs.push_back(b);
    }
    for (int i = 0; i < 100; ++i) {
      samples.push_back({&xs[2 * i], &xs[2 * i + 1], i % 2 == 0 ? RelationState::contradiction
                                                                 : RelationState::entailment});
    }
  }
};

}  // namespace

TEST(Fit, SeparableClustersReachLowLoss) {
  Clusters data(1);
  auto p = PairClassifierParams::random(kPair, 2, 16, 1.0, 2);
  TrainConfig cfg;
  cfg.hidden = 16;
  cfg.epochs = 200;
  cfg.batch_size = 10;
  cfg.learning_rate = 0.05;
  const auto r = fit(p, data.samples, cfg);
  EXPECT_TRUE(r.trained);
  EXPECT_LT(r.final_loss, 0.1);
  EXPECT_LT(r.final_loss, r.initial_loss);
  EXPECT_NEAR(r.final_loss, mean_loss(p, data.samples), 1e-12);
}

TEST(Fit, SingleRepeatedSampleIsMemorised) {
  const Eigen::VectorXd a = vec({0.3, -1.0, 0.5});
  const Eigen::VectorXd b = vec({1.0, 0.2, -0.4});
  const std::vector<Sample> samples(20, Sample{&a, &b, RelationState::neutral});
  auto p = PairClassifierParams::random(kPair, 3, 8, 1.0, 4);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 100;
  cfg.learning_rate = 0.1;
  fit(p, samples, cfg);
  EXPECT_GT(forward(p, a, b)[2], 0.99);
}

TEST(Fit, DeterministicGivenSeed) {
  Clusters data(3);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 5;
  auto p1 = PairClassifierParams::random(kPair, 2, 8, 1.0, 6);
  auto p2 = p1;
  fit(p1, data.samples, cfg);
  fit(p2, data.samples, cfg);
  EXPECT_TRUE(p1.w1 == p2.w1 && p1.b1 == p2.b1 && p1.w2 == p2.w2 && p1.b2 == p2.b2);
  auto p3 = PairClassifierParams::random(kPair, 2, 8, 1.0, 6);
  cfg.seed = 99;
  fit(p3, data.samples, cfg);
  EXPECT_FALSE(p1.w1 == p3.w1);
}

TEST(Fit, EmptySamplesIsANoOp) {
  auto p = PairClassifierParams::random(kPair, 2, 4, 1.0, 1);
  const auto before = p;
  const auto r = fit(p, {}, TrainConfig{});
  EXPECT_FALSE(r.trained);
  EXPECT_TRUE(p.w1 == before.w1);
}

TEST(Fit, WeightDecayShrinksWeights) {
  Clusters data(4);
  TrainConfig cfg;
  cfg.hidden = 8;
  cfg.epochs = 30;
  auto plain = PairClassifierParams::random(kPair, 2, 8, 1.0, 7);
  auto decayed = plain;
  fit(plain, data.samples, cfg);
  cfg.weight_decay = 0.1;
  fit(decayed, data.samples, cfg);
  EXPECT_LT(decayed.w1.norm() + decayed.w2.norm(), plain.w1.norm() + plain.w2.norm());
}

TEST(TrainConfig, RejectsNonPositive) {
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(validate(cfg), Error);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Checkpoint, RoundTripIsExact) {
  auto m = SurrogateModel::initialise(StructureSpec::small(), 3, TrainConfig{.hidden = 5}, 42);
  const auto text = serialize_model(m);
  const auto back = parse_model(text);
  EXPECT_EQ(back.structure.name, "small");
  EXPECT_EQ(back.classifiers.size(), 19u);
  EXPECT_EQ(serialize_model(back), text);
  for (const auto& [pair, p] : m.classifiers) EXPECT_TRUE(p.w1 == back.classifiers.at(pair).w1);
}

TEST(Checkpoint, WrongMagicIsRejected) {
  EXPECT_THROW(parse_model(R"({"magic":"other","version":1})"), Error);
}

TEST(Model, InitialiseIsSeeded) {
  const auto a = SurrogateModel::initialise(StructureSpec::large(), 3, TrainConfig{.hidden = 4}, 1);
  const auto b = SurrogateModel::initialise(StructureSpec::large(), 3, TrainConfig{.hidden = 4}, 1);
  const auto c = SurrogateModel::initialise(StructureSpec::large(), 3, TrainConfig{.hidden = 4}, 2);
  EXPECT_EQ(serialize_model(a), serialize_model(b));
  EXPECT_NE(serialize_model(a), serialize_model(c));
  // pairs get different streams
  EXPECT_FALSE(a.classifiers.begin()->second.w1 == std::next(a.classifiers.begin())->second.w1);
}
