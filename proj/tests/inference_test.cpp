#include <gtest/gtest.h>

#include <cmath>

#include "ssm/inference.hpp"
#include "ssm/structure.hpp"
#include "synthetic.hpp"

using namespace ssm;
using RS = RelationState;

namespace {

constexpr StateProbs kC{1, 0, 0};
constexpr StateProbs kE{0, 1, 0};
constexpr StateProbs kN{0, 0, 1};

SentenceSlots slots_with(std::initializer_list<Slot> present) {
  SentenceSlots s;
  for (auto slot : present) s[slot] = EmbeddedSlot{"x", Eigen::VectorXd::Zero(2)};
  return s;
}

ActiveSet grid(std::initializer_list<int> ks, std::initializer_list<int> ls) {
  ActiveSet a;
  for (int k : ks) {
    for (int l : ls) a.pairs.push_back({slot_from_number(k), slot_from_number(l)});
  }
  for (int l : ls) a.columns.push_back(slot_from_number(l));
  std::sort(a.pairs.begin(), a.pairs.end());
  return a;
}

ZMarginals uniform_marginals(const ActiveSet& a, StateProbs p) {
  ZMarginals m;
  for (const auto& pair : a.pairs) m[pair] = p;
  return m;
}

SlotPair P(int k, int l) { return {slot_from_number(k), slot_from_number(l)}; }

}  // namespace

TEST(Structure, PresetSizes) {
  EXPECT_EQ(StructureSpec::large().pairs.size(), 25u);
  const auto small = StructureSpec::small();
  EXPECT_EQ(small.pairs.size(), 19u);
  for (int k = 1; k <= 3; ++k) {
    for (int l = 1; l <= 3; ++l) EXPECT_EQ(small.contains(P(k, l)), k == l);
  }
}

TEST(Structure, JsonRoundTrip) {
  const auto s = StructureSpec::small();
  const auto back = StructureSpec::from_json(s.to_json());
  EXPECT_EQ(back.name, "small");
  EXPECT_EQ(back.pairs, s.pairs);
  EXPECT_THROW(StructureSpec::from_json(R"({"name":"x","pairs":[[0,1]]})"), Error);
}

TEST(Structure, ColumnCoverage) {
  StructureSpec s{"diag", {P(1, 1), P(2, 2)}};
  const std::vector<Slot> ok{Slot::subject, Slot::verb};
  const std::vector<Slot> missing{Slot::subject, Slot::location};
  EXPECT_NO_THROW(check_covers_columns(s, ok));
  EXPECT_THROW(check_covers_columns(s, missing), Error);
}

TEST(ActivePairs, AllSlotsLargeIs25) {
  const auto all = slots_with({Slot::subject, Slot::verb, Slot::object, Slot::location, Slot::clothing});
  EXPECT_EQ(active_pairs(StructureSpec::large(), all, all).pairs.size(), 25u);
}

TEST(ActivePairs, HypothesisWithoutClothingIs20) {
  const auto all = slots_with({Slot::subject, Slot::verb, Slot::object, Slot::location, Slot::clothing});
  const auto hyp = slots_with({Slot::subject, Slot::verb, Slot::object, Slot::location});
  const auto a = active_pairs(StructureSpec::large(), all, hyp);
  EXPECT_EQ(a.pairs.size(), 20u);
  EXPECT_EQ(a.columns.size(), 4u);
}

TEST(ActivePairs, PremiseWithoutObjectSmall) {
  // 19 small pairs minus the three with k = Object: (3,3), (3,4), (3,5)
  const auto all = slots_with({Slot::subject, Slot::verb, Slot::object, Slot::location, Slot::clothing});
  const auto prem = slots_with({Slot::subject, Slot::verb, Slot::location, Slot::clothing});
  EXPECT_EQ(active_pairs(StructureSpec::small(), prem, all).pairs.size(), 16u);
}

TEST(Rules, AnyContradictionWins) {
  const std::vector<Slot> cols{Slot::subject, Slot::verb};
  ZAssignment z{{P(1, 1), RS::entailment}, {P(2, 2), RS::entailment}, {P(1, 2), RS::contradiction}};
  EXPECT_EQ(eval_rules(z, cols), RS::contradiction);
  ZAssignment z2{{P(1, 1), RS::neutral}, {P(2, 2), RS::contradiction}};
  EXPECT_EQ(eval_rules(z2, cols), RS::contradiction);
}

TEST(Rules, EveryColumnEntailed) {
  const std::vector<Slot> cols{Slot::subject, Slot::verb};
  ZAssignment z{{P(1, 1), RS::entailment}, {P(1, 2), RS::neutral}, {P(4, 2), RS::entailment}};
  EXPECT_EQ(eval_rules(z, cols), RS::entailment);
  z[P(4, 2)] = RS::neutral;
  EXPECT_EQ(eval_rules(z, cols), RS::neutral);
}

TEST(Rules, AllNeutral) {
  const std::vector<Slot> cols{Slot::subject};
  EXPECT_EQ(eval_rules({{P(1, 1), RS::neutral}, {P(2, 1), RS::neutral}}, cols), RS::neutral);
}

TEST(Rules, ColumnWithoutPairsBlocksEntailment) {
  const std::vector<Slot> cols{Slot::subject, Slot::clothing};
  EXPECT_EQ(eval_rules({{P(1, 1), RS::entailment}}, cols), RS::neutral);
}

TEST(BruteForce, SingleCertainContradiction) {
  const auto a = grid({1}, {1});
  const auto d = predict_label_bruteforce({{P(1, 1), kC}}, a);
  EXPECT_DOUBLE_EQ(d[RS::contradiction], 1.0);
  EXPECT_DOUBLE_EQ(d[RS::entailment], 0.0);
}

TEST(BruteForce, SinglePairIsIdentity) {
  const auto a = grid({1}, {1});
  const double t = 1.0 / 3.0;
  const auto d = predict_label_bruteforce({{P(1, 1), {t, t, t}}}, a);
  for (auto s : kAllStates) EXPECT_NEAR(d[s], t, 1e-15);
}

TEST(BruteForce, TwoByTwoFixture) {
  // c: 1 - 0.8^4; e: (0.8^2 - 0.3^2)^2
  const auto a = grid({1, 2}, {1, 2});
  const auto d = predict_label_bruteforce(uniform_marginals(a, {0.2, 0.5, 0.3}), a);
  EXPECT_NEAR(d[RS::contradiction], 0.5904, 1e-12);
  EXPECT_NEAR(d[RS::entailment], 0.3025, 1e-12);
  EXPECT_NEAR(d[RS::neutral], 0.1071, 1e-12);
}

TEST(BruteForce, RefusesTooManyPairs) {
  const auto a = grid({1, 2, 3}, {1, 2, 3, 4, 5});
  EXPECT_THROW(predict_label_bruteforce(uniform_marginals(a, kN), a), Error);
}

TEST(Exact, AllEntailed) {
  const auto a = grid({1, 2}, {1, 2, 3});
  const auto d = predict_label_exact(uniform_marginals(a, kE), a);
  EXPECT_DOUBLE_EQ(d[RS::entailment], 1.0);
}

TEST(Exact, OneHalfContradictionRestNeutral) {
  const auto a = grid({1, 2}, {1, 2});
  auto m = uniform_marginals(a, kN);
  m[P(2, 1)] = {0.5, 0.0, 0.5};
  const auto d = predict_label_exact(m, a);
  EXPECT_NEAR(d[RS::contradiction], 0.5, 1e-15);
  EXPECT_NEAR(d[RS::entailment], 0.0, 1e-15);
  EXPECT_NEAR(d[RS::neutral], 0.5, 1e-15);
}

TEST(Exact, MatchesBruteForceOnRandomCases) {
  Rng rng(11);
  for (int i = 0; i < 1500; ++i) {
    const auto rc = testkit::random_case(rng, 8);
    const auto exact = predict_label_exact(rc.marginals, rc.active);
    const auto brute = predict_label_bruteforce(rc.marginals, rc.active);
    double sum = 0.0;
    for (auto s : kAllStates) {
      ASSERT_NEAR(exact[s], brute[s], 1e-10) << "case " << i;
      ASSERT_GE(exact[s], 0.0);
      ASSERT_LE(exact[s], 1.0);
      sum += exact[s];
    }
    ASSERT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Exact, CertainNeutralPairsAreInert) {
  Rng rng(12);
  for (int i = 0; i < 500; ++i) {
    auto rc = testkit::random_case(rng, 8);
    const auto before = predict_label_exact(rc.marginals, rc.active);
    auto bigger = rc;
    for (auto k : kAllSlots) {
      const SlotPair extra{k, rc.active.columns.front()};
      if (!bigger.marginals.count(extra)) {
        bigger.marginals[extra] = kN;
        bigger.active.pairs.push_back(extra);
        break;
      }
    }
    std::sort(bigger.active.pairs.begin(), bigger.active.pairs.end());
    const auto after = predict_label_exact(bigger.marginals, bigger.active);
    for (auto s : kAllStates) ASSERT_NEAR(before[s], after[s], 1e-12);
  }
}

TEST(MapAssignment, DominantContradiction) {
  const auto a = grid({1, 2}, {1});
  ZMarginals m{{P(1, 1), {0.9, 0.05, 0.05}}, {P(2, 1), {0.1, 0.2, 0.7}}};
  const auto z = map_assignment(m, RS::contradiction, a);
  EXPECT_EQ(z.at(P(1, 1)), RS::contradiction);
  EXPECT_EQ(z.at(P(2, 1)), RS::neutral);
}

TEST(MapAssignment, AllEntailment) {
  const auto a = grid({1, 2}, {1, 2});
  const auto z = map_assignment(uniform_marginals(a, {0.1, 0.8, 0.1}), RS::entailment, a);
  for (const auto& [p, s] : z) EXPECT_EQ(s, RS::entailment);
}

TEST(MapAssignment, NeutralDemotesContradictionToRunnerUp) {
  const auto a = grid({1}, {1});
  const auto z = map_assignment({{P(1, 1), {0.4, 0.25, 0.35}}}, RS::neutral, a);
  EXPECT_EQ(z.at(P(1, 1)), RS::neutral);
}

TEST(MapAssignment, ImpossibleLabelThrows) {
  const auto a = grid({1}, {1});
  EXPECT_THROW(map_assignment({{P(1, 1), kN}}, RS::contradiction, a), InconsistentLabel);
}

TEST(MapAssignment, AlwaysConsistentWithRules) {
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const auto rc = testkit::random_case(rng, 10);
    const auto d = predict_label_exact(rc.marginals, rc.active);
    for (auto s : kAllStates) {
      if (d[s] <= 0.0) {
        EXPECT_THROW(map_assignment(rc.marginals, s, rc.active), InconsistentLabel);
        continue;
      }
      const auto z = map_assignment(rc.marginals, s, rc.active);
      ASSERT_EQ(z.size(), rc.active.pairs.size());
      ASSERT_EQ(eval_rules(z, rc.active.columns), s) << "case " << i;
      for (const auto& [p, state] : z) ASSERT_GT(rc.marginals.at(p)[index(state)], 0.0);
    }
  }
}

TEST(LabelDistribution, ArgmaxTieOrder) {
  LabelDistribution d;
  d.p = {0.4, 0.4, 0.2};
  EXPECT_EQ(d.argmax(), RS::contradiction);
  d.p = {0.2, 0.4, 0.4};
  EXPECT_EQ(d.argmax(), RS::entailment);
}
