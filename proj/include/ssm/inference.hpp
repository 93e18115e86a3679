#pragma once

#include <array>
#include <map>
#include <span>
#include <vector>

#include "ssm/dataset.hpp"
#include "ssm/relation.hpp"
#include "ssm/structure.hpp"
#include "ssm/util.hpp"

namespace ssm {

/// (p_contradiction, p_entailment, p_neutral), indexed by index(RelationState).
using StateProbs = std::array<double, 3>;

/// Concrete joint state of the active latent variables of one example.
using ZAssignment = std::map<SlotPair, RelationState>;
/// Per-pair categorical distributions of the active latent variables.
using ZMarginals = std::map<SlotPair, StateProbs>;

/// Latent pairs that exist for one example (both parent slots present),
/// and the hypothesis slots the entailment condition quantifies over.
struct ActiveSet {
  std::vector<SlotPair> pairs;
  std::vector<Slot> columns;
};

struct LabelDistribution {
  StateProbs p{};

  double operator[](RelationState s) const { return p[index(s)]; }
  double& operator[](RelationState s) { return p[index(s)]; }
  /// Ties resolve in the order contradiction, entailment, neutral.
  RelationState argmax() const;
};

/// Raised when an assignment is requested for a label of probability 0.
class InconsistentLabel : public Error {
 public:
  using Error::Error;
};

ActiveSet active_pairs(const StructureSpec& structure, const SentenceSlots& premise, const SentenceSlots& hypothesis);
inline ActiveSet active_pairs(const StructureSpec& structure, const EmbeddedExample& example) {
  return active_pairs(structure, example.premise, example.hypothesis);
}

/// Deterministic Y|Z. Contradiction if any z is contradiction; otherwise
/// entailment if every column in `columns` has an entailing pair; otherwise
/// neutral. A column without any pair in `z` can never be entailed.
RelationState eval_rules(const ZAssignment& z, std::span<const Slot> columns);

/// Largest active set the enumeration oracle accepts (3^12 states).
inline constexpr std::size_t kMaxBruteForcePairs = 12;

/// P(Y|X) by summing over all 3^|active| joint states. Test oracle only.
LabelDistribution predict_label_bruteforce(const ZMarginals& marginals, const ActiveSet& active);

/// P(Y|X) in closed form, using independence of the z given X:
///   P(c) = 1 - prod (1 - p_c)
///   P(e) = prod over columns [ prod_k (1 - p_c) - prod_k p_n ]
///   P(n) = 1 - P(c) - P(e)
LabelDistribution predict_label_exact(const ZMarginals& marginals, const ActiveSet& active);

/// A high-probability assignment that the rules map to `label`: per-pair
/// argmax, then the smallest repair that makes it consistent.
ZAssignment map_assignment(const ZMarginals& marginals, RelationState label, const ActiveSet& active);

}  // namespace ssm
