#include "ssm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ssm {

RelationState LabelDistribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i] > p[best]) best = i;
  }
  return static_cast<RelationState>(best);
}

ActiveSet active_pairs(const StructureSpec& structure, const SentenceSlots& premise, const SentenceSlots& hypothesis) {
  ActiveSet out;
  for (auto p : structure.pairs) {
    if (premise.has(p.premise) && hypothesis.has(p.hypothesis)) out.pairs.push_back(p);
  }
  for (auto l : kAllSlots) {
    if (hypothesis.has(l)) out.columns.push_back(l);
  }
  return out;
}

RelationState eval_rules(const ZAssignment& z, std::span<const Slot> columns) {
  for (const auto& [pair, state] : z) {
    if (state == RelationState::contradiction) return RelationState::contradiction;
  }
  for (auto l : columns) {
    bool entailed = false;
    for (const auto& [pair, state] : z) {
      if (pair.hypothesis == l && state == RelationState::entailment) {
        entailed = true;
        break;
      }
    }
    if (!entailed) return RelationState::neutral;
  }
  return RelationState::entailment;
}

namespace {

const StateProbs& probs_of(const ZMarginals& m, SlotPair p) {
  auto it = m.find(p);
  if (it == m.end()) throw Error("no marginal for active pair " + to_string(p));
  return it->second;
}

}  // namespace

LabelDistribution predict_label_bruteforce(const ZMarginals& marginals, const ActiveSet& active) {
  const std::size_t n = active.pairs.size();
  if (n > kMaxBruteForcePairs) {
    throw Error("brute-force inference refuses " + std::to_string(n) + " active pairs (limit " +
                std::to_string(kMaxBruteForcePairs) + ")");
  }
  std::vector<StateProbs> probs;
  for (auto p : active.pairs) probs.push_back(probs_of(marginals, p));

  LabelDistribution out;
  std::vector<std::size_t> digits(n, 0);
  ZAssignment z;
  for (;;) {
    double weight = 1.0;
    z.clear();
    for (std::size_t i = 0; i < n; ++i) {
      weight *= probs[i][digits[i]];
      z[active.pairs[i]] = static_cast<RelationState>(digits[i]);
    }
    out[eval_rules(z, active.columns)] += weight;
    // base-3 counter
    std::size_t i = 0;
    while (i < n && ++digits[i] == 3) digits[i++] = 0;
    if (i == n) break;
  }
  return out;
}

LabelDistribution predict_label_exact(const ZMarginals& marginals, const ActiveSet& active) {
  double no_contradiction = 1.0;
  for (auto p : active.pairs) no_contradiction *= 1.0 - probs_of(marginals, p)[0];

  double entailment = 1.0;
  for (auto l : active.columns) {
    double column_clear = 1.0;
    double column_neutral = 1.0;
    for (auto p : active.pairs) {
      if (p.hypothesis != l) continue;
      const auto& pr = probs_of(marginals, p);
      column_clear *= 1.0 - pr[0];
      column_neutral *= pr[2];
    }
    entailment *= column_clear - column_neutral;
  }

  LabelDistribution out;
  out[RelationState::contradiction] = std::clamp(1.0 - no_contradiction, 0.0, 1.0);
  out[RelationState::entailment] = std::clamp(entailment, 0.0, 1.0);
  out[RelationState::neutral] =
      std::clamp(1.0 - out[RelationState::contradiction] - out[RelationState::entailment], 0.0, 1.0);
  return out;
}

namespace {

RelationState argmax_state(const StateProbs& p) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (p[i] > p[best]) best = i;
  }
  return static_cast<RelationState>(best);
}

// Better of entailment / neutral; ties favour neutral.
RelationState best_non_contradiction(const StateProbs& p) {
  return p[1] > p[2] ? RelationState::entailment : RelationState::neutral;
}

}  // namespace

ZAssignment map_assignment(const ZMarginals& marginals, RelationState label, const ActiveSet& active) {
  if (predict_label_exact(marginals, active)[label] <= 0.0) {
    throw InconsistentLabel("label " + std::string(to_string(label)) + " has probability 0 under the marginals");
  }
  ZAssignment z;
  for (auto p : active.pairs) z[p] = argmax_state(probs_of(marginals, p));

  switch (label) {
    case RelationState::contradiction: {
      if (eval_rules(z, active.columns) == RelationState::contradiction) break;
      auto best = active.pairs.front();
      for (auto p : active.pairs) {
        if (probs_of(marginals, p)[0] > probs_of(marginals, best)[0]) best = p;
      }
      z[best] = RelationState::contradiction;
      break;
    }
    case RelationState::entailment: {
      for (auto& [p, state] : z) {
        if (state == RelationState::contradiction) state = best_non_contradiction(probs_of(marginals, p));
      }
      for (auto l : active.columns) {
        std::optional<SlotPair> best;
        for (auto p : active.pairs) {
          if (p.hypothesis != l) continue;
          if (!best || probs_of(marginals, p)[1] > probs_of(marginals, *best)[1]) best = p;
        }
        z[*best] = RelationState::entailment;
      }
      break;
    }
    case RelationState::neutral: {
      for (auto& [p, state] : z) {
        if (state == RelationState::contradiction) state = best_non_contradiction(probs_of(marginals, p));
      }
      if (eval_rules(z, active.columns) == RelationState::neutral) break;
      // Every column is entailed: clear the column that is cheapest to make
      // fully neutral, measured in log-probability.
      std::optional<Slot> cheapest;
      double cheapest_cost = std::numeric_limits<double>::infinity();
      for (auto l : active.columns) {
        double cost = 0.0;
        for (auto p : active.pairs) {
          if (p.hypothesis != l || z[p] != RelationState::entailment) continue;
          const auto& pr = probs_of(marginals, p);
          cost += pr[2] > 0.0 ? std::log(pr[1]) - std::log(pr[2]) : std::numeric_limits<double>::infinity();
        }
        if (cost < cheapest_cost) {
          cheapest_cost = cost;
          cheapest = l;
        }
      }
      for (auto p : active.pairs) {
        if (p.hypothesis == *cheapest) z[p] = RelationState::neutral;
      }
      break;
    }
  }
  return z;
}

}  // namespace ssm
