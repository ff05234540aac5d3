#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairloop/catalog.hpp"
#include "fairloop/dual.hpp"
#include "fairloop/embeddings.hpp"
#include "fairloop/ucb.hpp"

namespace fairloop {

// One top-K decision for a single arrival.
struct RankingDecision {
  std::int32_t user = 0;
  std::vector<std::int32_t> items;   // K distinct items, best first
  std::vector<double> rewards_used;  // reward of each selected item
  std::vector<double> exposure;      // per-provider counts of `items`
};

// m_p = 0 while provider p has budget left, `penalty` once it is exhausted.
// The penalty is finite so that a fully exhausted catalog degrades to
// accuracy-ordered selection instead of failing.
std::vector<double> mask_vector(std::span<const double> beta_remaining,
                                double penalty = 1e3);

// r_i = s_hat_i / T - (mu + m)[provider_of(i)] + delta_f_i
std::vector<double> assemble_rewards(std::span<const double> s_hat,
                                     std::span<const double> delta_f,
                                     std::span<const double> mu,
                                     std::span<const double> m,
                                     const Catalog& catalog);

// Indices of the K largest rewards, sorted by descending reward; ties break
// toward the lower item index.
std::vector<std::int32_t> top_k(std::span<const double> rewards, int k);

struct RankStepOptions {
  bool use_fairness = true;     // dual prices, mask, and dual updates
  bool use_exploration = true;  // confidence-radius bonus
  double mask_penalty = 1e3;
  // Weight on the bonus when combined with the 1/T-scaled accuracy term.
  // 1.0 adds the raw radius; 1/T keeps the optimism at the scale of the
  // score it bounds.
  double exploration_scale = 1.0;
};

// Reusable buffers for the scoring path.
struct RankerScratch {
  std::vector<double> scores, bonus, rewards, cost;
};

// Full decision step for one arrival: score, add the exploration bonus and
// fairness prices, pick top-K, then advance the dual state (consume budgets,
// ideal exposure against the step-start budgets, momentum gradient, mirror
// step). episode_index is the bias-bound time index.
RankingDecision rank_step(std::int32_t user, const EmbeddingState& emb,
                          DualState& dual, const UcbParams& ucb,
                          const Catalog& catalog, std::int64_t episode_index,
                          const RankStepOptions& options = {},
                          RankerScratch* scratch = nullptr);

}  // namespace fairloop
