#include "ssm/em.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ssm::em {

void validate(const EMConfig& c) {
  if (c.samples_per_example == 0 || c.max_attempts == 0 || c.iterations == 0) {
    throw Error("invalid EM config: samples, max_attempts and iterations must be at least 1");
  }
  nn::validate(c.train);
}

std::string EMTrace::to_csv() const {
  std::ostringstream out;
  out << "iteration,loglik,acceptance_c,acceptance_e,acceptance_n,starved_examples\n";
  out << "0," << format_fixed(initial_loglik, 6) << ",n/a,n/a,n/a,n/a\n";
  for (const auto& it : iterations) {
    out << it.iteration << ',' << format_fixed(it.loglik, 6);
    for (double a : it.acceptance) out << ',' << (std::isnan(a) ? std::string("n/a") : format_fixed(a, 6));
    out << ',' << it.starved_examples << '\n';
  }
  return out.str();
}

namespace {

RelationState draw_state(const StateProbs& p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = u(rng);
  if (r < p[0]) return RelationState::contradiction;
  if (r < p[0] + p[1]) return RelationState::entailment;
  return RelationState::neutral;
}

}  // namespace

PosteriorDraw sample_posterior(const ZMarginals& marginals, const ActiveSet& active, RelationState label,
                               std::size_t s, std::size_t max_attempts, Rng& rng) {
  std::vector<const StateProbs*> probs;
  probs.reserve(active.pairs.size());
  for (auto p : active.pairs) probs.push_back(&marginals.at(p));

  PosteriorDraw out;
  ZAssignment z;
  for (std::size_t k = 0; k < s; ++k) {
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < max_attempts && !accepted; ++attempt) {
      ++out.attempts;
      for (std::size_t i = 0; i < active.pairs.size(); ++i) z[active.pairs[i]] = draw_state(*probs[i], rng);
      if (eval_rules(z, active.columns) == label) {
        out.samples.push_back(z);
        accepted = true;
      }
    }
    if (!accepted) break;
  }
  return out;
}

PosteriorDraw sample_posterior(const EmbeddedExample& example, const SurrogateModel& model, RelationState label,
                               std::size_t s, std::size_t max_attempts, Rng& rng) {
  const auto active = active_pairs(model.structure, example);
  return sample_posterior(model.marginals(example, active), active, label, s, max_attempts, rng);
}

double log_likelihood(std::span<const EmbeddedExample> dataset, const SurrogateModel& model) {
  double total = 0.0;
  for (const auto& ex : dataset) {
    total += std::log(std::max(model.predict(ex)[ex.gold_label], nn::kProbFloor));
  }
  return total;
}

IterationTrace em_iteration(std::span<const EmbeddedExample> dataset, SurrogateModel& model, const EMConfig& config,
                            std::size_t iteration) {
  validate(config);

  // E-step: per-example random streams keep the result independent of scheduling.
  std::vector<ActiveSet> active(dataset.size());
  std::vector<PosteriorDraw> draws(dataset.size());
  parallel_for(dataset.size(), config.threads, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, iteration, i, 0xE5));
    active[i] = active_pairs(model.structure, dataset[i]);
    draws[i] = sample_posterior(model.marginals(dataset[i], active[i]), active[i], dataset[i].gold_label,
                                config.samples_per_example, config.max_attempts, rng);
  });

  IterationTrace trace;
  trace.iteration = iteration;
  std::array<std::size_t, 3> accepted{};
  std::array<std::size_t, 3> attempts{};
  std::map<SlotPair, std::vector<nn::Sample>> pooled;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& ex = dataset[i];
    const auto label = index(ex.gold_label);
    accepted[label] += draws[i].samples.size();
    attempts[label] += draws[i].attempts;
    if (draws[i].samples.empty()) ++trace.starved_examples;
    for (const auto& z : draws[i].samples) {
      for (auto p : active[i].pairs) {
        pooled[p].push_back({&ex.premise.at(p.premise).vector, &ex.hypothesis.at(p.hypothesis).vector, z.at(p)});
      }
    }
  }
  for (std::size_t c = 0; c < 3; ++c) {
    trace.acceptance[c] = attempts[c] == 0 ? std::numeric_limits<double>::quiet_NaN()
                                           : static_cast<double>(accepted[c]) / static_cast<double>(attempts[c]);
  }
  if (trace.starved_examples > 0) {
    log_warn("EM iteration " + std::to_string(iteration) + ": " + std::to_string(trace.starved_examples) +
             " example(s) had no accepted sample");
  }

  // M-step: pairs train independently.
  std::vector<SlotPair> pairs(model.structure.pairs.begin(), model.structure.pairs.end());
  parallel_for(pairs.size(), config.threads, [&](std::size_t j) {
    const auto p = pairs[j];
    auto it = pooled.find(p);
    if (it == pooled.end()) {
      log_warn("pair " + to_string(p) + " received no samples in iteration " + std::to_string(iteration) +
               "; keeping previous parameters");
      return;
    }
    auto train = config.train;
    train.seed = derive_seed(config.seed, iteration, static_cast<std::uint64_t>(slot_number(p.premise) * 10 +
                                                                                slot_number(p.hypothesis)),
                             0x3A);
    nn::fit(model.classifiers.at(p), it->second, train);
  });
  for (const auto& [p, rows] : pooled) trace.pooled_samples += rows.size();

  trace.loglik = log_likelihood(dataset, model);
  return trace;
}

EMTrace train(std::span<const EmbeddedExample> dataset, SurrogateModel& model, const EMConfig& config,
              const IterationCallback& on_iteration) {
  validate(config);
  EMTrace trace;
  trace.initial_loglik = log_likelihood(dataset, model);
  for (std::size_t t = 1; t <= config.iterations; ++t) {
    auto it = em_iteration(dataset, model, config, t);
    log_info("EM iteration " + std::to_string(t) + "/" + std::to_string(config.iterations) +
             ": loglik=" + format_fixed(it.loglik, 4) + " starved=" + std::to_string(it.starved_examples));
    if (on_iteration) on_iteration(model, it);
    trace.iterations.push_back(it);
  }
  return trace;
}

}  // namespace ssm::em
