#include "fairloop/ranker.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fairloop/kernels.hpp"

namespace fairloop {

std::vector<double> mask_vector(std::span<const double> beta_remaining,
                                double penalty) {
  std::vector<double> m(beta_remaining.size());
  for (std::size_t p = 0; p < m.size(); ++p)
    m[p] = beta_remaining[p] > 0.0 ? 0.0 : penalty;
  return m;
}

std::vector<double> assemble_rewards(std::span<const double> s_hat,
                                     std::span<const double> delta_f,
                                     std::span<const double> mu,
                                     std::span<const double> m,
                                     const Catalog& catalog) {
  const std::size_t n = static_cast<std::size_t>(catalog.n_items);
  if (s_hat.size() != n || delta_f.size() != n)
    throw std::invalid_argument("ranker: item vector size mismatch");
  if (mu.size() != static_cast<std::size_t>(catalog.n_providers) ||
      m.size() != mu.size())
    throw std::invalid_argument("ranker: provider vector size mismatch");

  std::vector<double> cost(mu.size());
  for (std::size_t p = 0; p < cost.size(); ++p) cost[p] = mu[p] + m[p];
  std::vector<double> rewards(n);
  kernels::combine_rewards(n, s_hat.data(),
                           1.0 / static_cast<double>(catalog.batch_size),
                           delta_f.data(), cost.data(),
                           catalog.provider_of.data(), rewards.data());
  return rewards;
}

std::vector<std::int32_t> top_k(std::span<const double> rewards, int k) {
  const int n = static_cast<int>(rewards.size());
  if (k < 0 || k > n)
    throw std::invalid_argument("ranker: k out of range");
  std::vector<std::int32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto better = [&](std::int32_t a, std::int32_t b) {
    if (rewards[a] != rewards[b]) return rewards[a] > rewards[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + k, order.end(), better);
  order.resize(k);
  return order;
}

RankingDecision rank_step(std::int32_t user, const EmbeddingState& emb,
                          DualState& dual, const UcbParams& ucb,
                          const Catalog& catalog, std::int64_t episode_index,
                          const RankStepOptions& options,
                          RankerScratch* scratch) {
  const std::size_t n = static_cast<std::size_t>(catalog.n_items);
  const std::size_t np = static_cast<std::size_t>(catalog.n_providers);
  RankerScratch local;
  RankerScratch& buf = scratch ? *scratch : local;
  buf.scores.resize(n);
  buf.bonus.resize(n);
  buf.rewards.resize(n);
  buf.cost.resize(np);

  emb.predict_scores(user, buf.scores);
  if (options.use_exploration) {
    confidence_radii(emb, user, episode_index, ucb, buf.bonus);
    if (options.exploration_scale != 1.0)
      for (double& b : buf.bonus) b *= options.exploration_scale;
  } else {
    std::fill(buf.bonus.begin(), buf.bonus.end(), 0.0);
  }

  if (options.use_fairness) {
    for (std::size_t p = 0; p < np; ++p) {
      buf.cost[p] = dual.mu[p] +
                    (dual.beta_remaining[p] > 0.0 ? 0.0 : options.mask_penalty);
    }
  } else {
    std::fill(buf.cost.begin(), buf.cost.end(), 0.0);
  }

  kernels::combine_rewards(n, buf.scores.data(),
                           1.0 / static_cast<double>(catalog.batch_size),
                           buf.bonus.data(), buf.cost.data(),
                           catalog.provider_of.data(), buf.rewards.data());

  RankingDecision decision;
  decision.user = user;
  decision.items = top_k(buf.rewards, catalog.ranking_size);
  decision.rewards_used.reserve(decision.items.size());
  for (std::int32_t i : decision.items)
    decision.rewards_used.push_back(buf.rewards[i]);
  decision.exposure = exposures_of(decision.items, catalog);

  if (options.use_fairness) {
    // The ideal-exposure cap uses the budgets as they stood at the start of
    // this step; consumption happens alongside.
    std::vector<double> beta_at_step = dual.beta_remaining;
    consume_resources(dual, decision.exposure);
    if (dual.lambda_tradeoff > 0.0) {
      std::vector<double> ideal = ideal_exposure(dual.mu, beta_at_step,
                                                 catalog.gamma,
                                                 dual.lambda_tradeoff);
      std::vector<double> g_tilde(np);
      for (std::size_t p = 0; p < np; ++p)
        g_tilde[p] = -decision.exposure[p] + ideal[p];
      dual.g_momentum =
          momentum_gradient(g_tilde, dual.g_momentum, dual.momentum_alpha);
      dual_step(dual, dual.g_momentum, catalog.gamma);
    }
  }
  return decision;
}

}  // namespace fairloop
