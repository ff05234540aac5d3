#include "fairloop/sim.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fairloop {

namespace {

constexpr std::uint64_t kWorldStream = 11;
constexpr std::uint64_t kEmbeddingStream = 12;
constexpr std::uint64_t kArrivalStream = 13;
constexpr std::uint64_t kClickStream = 14;

// Largest-remainder apportionment of n_items over power-law weights, with a
// floor of one item per provider.
std::vector<std::int32_t> provider_sizes(int n_items, int n_providers,
                                         double skew) {
  std::vector<double> weight(n_providers);
  double total = 0.0;
  for (int p = 0; p < n_providers; ++p) {
    weight[p] = std::pow(static_cast<double>(p + 1), -skew);
    total += weight[p];
  }
  const int spare = n_items - n_providers;
  std::vector<std::int32_t> size(n_providers, 1);
  std::vector<std::pair<double, int>> remainder(n_providers);
  int assigned = 0;
  for (int p = 0; p < n_providers; ++p) {
    const double quota = spare * weight[p] / total;
    const int whole = static_cast<int>(quota);
    size[p] += whole;
    assigned += whole;
    remainder[p] = {quota - whole, p};
  }
  std::sort(remainder.begin(), remainder.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int r = 0; r < spare - assigned; ++r) ++size[remainder[r].second];
  return size;
}

}  // namespace

SyntheticWorld generate_synthetic_world(const WorldParams& params,
                                        std::uint64_t seed) {
  if (params.n_users < 1 || params.n_items < 1 || params.n_providers < 1)
    throw std::invalid_argument("world: counts must be positive");
  if (params.n_providers > params.n_items)
    throw std::invalid_argument("world: more providers than items");
  if (params.true_dim < 1)
    throw std::invalid_argument("world: true_dim must be >= 1");
  if (params.skew < 0.0) throw std::invalid_argument("world: skew must be >= 0");

  SyntheticWorld world;
  world.n_users = params.n_users;
  world.n_items = params.n_items;

  const std::vector<std::int32_t> sizes =
      provider_sizes(params.n_items, params.n_providers, params.skew);
  world.provider_of.reserve(params.n_items);
  for (int p = 0; p < params.n_providers; ++p)
    world.provider_of.insert(world.provider_of.end(), sizes[p], p);

  Rng rng(seed);
  const int d = params.true_dim;
  std::vector<double> user_emb(static_cast<std::size_t>(params.n_users) * d);
  std::vector<double> item_emb(static_cast<std::size_t>(params.n_items) * d);
  for (double& x : user_emb) x = rng.next_gaussian();
  for (double& x : item_emb) x = rng.next_gaussian();

  world.true_scores.resize(static_cast<std::size_t>(params.n_users) *
                           params.n_items);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int u = 0; u < params.n_users; ++u) {
    for (int i = 0; i < params.n_items; ++i) {
      double raw = 0.0;
      for (int k = 0; k < d; ++k)
        raw += user_emb[u * static_cast<std::size_t>(d) + k] *
               item_emb[i * static_cast<std::size_t>(d) + k];
      world.true_scores[u * static_cast<std::size_t>(params.n_items) + i] = raw;
      lo = std::min(lo, raw);
      hi = std::max(hi, raw);
    }
  }
  const double span = hi - lo;
  for (double& s : world.true_scores)
    s = span > 0.0 ? std::clamp(0.05 + 0.9 * (s - lo) / span, 0.05, 0.95) : 0.5;
  return world;
}

int click_model(const SyntheticWorld& world, int u, int i, Rng& rng) {
  return rng.bernoulli(world.score(u, i)) ? 1 : 0;
}

PolicyId parse_policy_id(const std::string& name) {
  if (name == "ltp_mmf") return PolicyId::ltp_mmf;
  if (name == "ltp_mmf_no_ucb") return PolicyId::ltp_mmf_no_ucb;
  if (name == "ltp_mmf_no_fair") return PolicyId::ltp_mmf_no_fair;
  if (name == "topk") return PolicyId::topk;
  if (name == "k_neighbor") return PolicyId::k_neighbor;
  throw std::invalid_argument(fmt::format("unknown policy id '{}'", name));
}

const char* policy_name(PolicyId id) {
  switch (id) {
    case PolicyId::ltp_mmf: return "ltp_mmf";
    case PolicyId::ltp_mmf_no_ucb: return "ltp_mmf_no_ucb";
    case PolicyId::ltp_mmf_no_fair: return "ltp_mmf_no_fair";
    case PolicyId::topk: return "topk";
    case PolicyId::k_neighbor: return "k_neighbor";
  }
  return "unknown";
}

namespace {

// The full method and its two ablations share rank_step; the options pick
// which reward terms stay live.
class DualBanditPolicy final : public Policy {
 public:
  DualBanditPolicy(const Catalog& catalog, const PolicyParams& params,
                   bool use_fairness, bool use_exploration)
      : catalog_(catalog),
        ucb_(params.ucb),
        dual_(DualState::init(catalog, params.lambda_tradeoff,
                              params.step_size, params.momentum_alpha)) {
    options_.use_fairness = use_fairness;
    options_.use_exploration = use_exploration;
    options_.mask_penalty = params.mask_penalty;
    options_.exploration_scale = params.exploration_scale;
    if (use_exploration) ucb_.validate();
  }

  void begin_episode() override { dual_.reset(catalog_); }

  RankingDecision decide(std::int32_t user, const EmbeddingState& emb,
                         std::int64_t episode_index) override {
    return rank_step(user, emb, dual_, ucb_, catalog_, episode_index, options_,
                     &scratch_);
  }

 private:
  const Catalog& catalog_;
  UcbParams ucb_;
  DualState dual_;
  RankStepOptions options_;
  RankerScratch scratch_;
};

// Accuracy-only top-K.
class TopkPolicy final : public Policy {
 public:
  explicit TopkPolicy(const Catalog& catalog) : catalog_(catalog) {}

  void begin_episode() override {}

  RankingDecision decide(std::int32_t user, const EmbeddingState& emb,
                         std::int64_t) override {
    scores_.resize(catalog_.n_items);
    emb.predict_scores(user, scores_);
    RankingDecision decision;
    decision.user = user;
    decision.items = top_k(scores_, catalog_.ranking_size);
    for (std::int32_t i : decision.items)
      decision.rewards_used.push_back(scores_[i]);
    decision.exposure = exposures_of(decision.items, catalog_);
    return decision;
  }

 private:
  const Catalog& catalog_;
  std::vector<double> scores_;
};

// Heuristic baseline: rank only within the items of the k providers with the
// least cumulative exposure so far, filling from the rest if they hold fewer
// than K items.
class KNeighborPolicy final : public Policy {
 public:
  KNeighborPolicy(const Catalog& catalog, int k)
      : catalog_(catalog),
        k_(std::min(std::max(k, 1), catalog.n_providers)),
        cumulative_exposure_(catalog.n_providers, 0.0) {}

  void begin_episode() override {}

  RankingDecision decide(std::int32_t user, const EmbeddingState& emb,
                         std::int64_t) override {
    scores_.resize(catalog_.n_items);
    emb.predict_scores(user, scores_);

    std::vector<int> order(catalog_.n_providers);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return cumulative_exposure_[a] < cumulative_exposure_[b];
    });
    std::vector<bool> allowed(catalog_.n_providers, false);
    for (int r = 0; r < k_; ++r) allowed[order[r]] = true;

    // Candidates first, the remaining items after them, both by score.
    std::vector<std::int32_t> ranked(catalog_.n_items);
    std::iota(ranked.begin(), ranked.end(), 0);
    std::sort(ranked.begin(), ranked.end(), [&](std::int32_t a, std::int32_t b) {
      const bool ca = allowed[catalog_.provider_of[a]];
      const bool cb = allowed[catalog_.provider_of[b]];
      if (ca != cb) return ca;
      if (scores_[a] != scores_[b]) return scores_[a] > scores_[b];
      return a < b;
    });
    ranked.resize(catalog_.ranking_size);

    RankingDecision decision;
    decision.user = user;
    decision.items = std::move(ranked);
    for (std::int32_t i : decision.items)
      decision.rewards_used.push_back(scores_[i]);
    decision.exposure = exposures_of(decision.items, catalog_);
    for (int p = 0; p < catalog_.n_providers; ++p)
      cumulative_exposure_[p] += decision.exposure[p];
    return decision;
  }

 private:
  const Catalog& catalog_;
  int k_;
  std::vector<double> cumulative_exposure_;
  std::vector<double> scores_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(PolicyId id, const Catalog& catalog,
                                    const PolicyParams& params) {
  switch (id) {
    case PolicyId::ltp_mmf:
      return std::make_unique<DualBanditPolicy>(catalog, params, true, true);
    case PolicyId::ltp_mmf_no_ucb:
      return std::make_unique<DualBanditPolicy>(catalog, params, true, false);
    case PolicyId::ltp_mmf_no_fair:
      return std::make_unique<DualBanditPolicy>(catalog, params, false, true);
    case PolicyId::topk:
      return std::make_unique<TopkPolicy>(catalog);
    case PolicyId::k_neighbor:
      return std::make_unique<KNeighborPolicy>(catalog, params.k_neighbor_k);
  }
  throw std::invalid_argument("unknown policy id");
}

std::vector<InteractionRecord> run_episode(Policy& policy,
                                           const SyntheticWorld& world,
                                           std::span<const std::int32_t> users,
                                           const EmbeddingState& emb,
                                           std::int64_t episode_index,
                                           std::int64_t first_arrival,
                                           Rng& click_rng) {
  std::vector<InteractionRecord> records;
  records.reserve(users.size());
  for (std::size_t t = 0; t < users.size(); ++t) {
    RankingDecision decision = policy.decide(users[t], emb, episode_index);
    InteractionRecord rec;
    rec.t = first_arrival + static_cast<std::int64_t>(t);
    rec.user = users[t];
    rec.clicks.reserve(decision.items.size());
    for (std::int32_t i : decision.items)
      rec.clicks.push_back(static_cast<std::uint8_t>(
          click_model(world, users[t], i, click_rng)));
    rec.items = std::move(decision.items);
    records.push_back(std::move(rec));
  }
  return records;
}

double episode_objective_upper_bound(const SyntheticWorld& world,
                                     std::span<const std::int32_t> users,
                                     const Catalog& catalog, double lambda) {
  const int k = catalog.ranking_size;
  double accuracy = 0.0;
  std::vector<double> row(catalog.n_items);
  for (std::int32_t u : users) {
    for (int i = 0; i < catalog.n_items; ++i) row[i] = world.score(u, i);
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end(),
                     std::greater<>());
    for (int j = 0; j < k; ++j) accuracy += row[j];
  }
  accuracy /= static_cast<double>(users.size());

  // No allocation can lift the worst provider above the proportional share
  // K*T / sum(gamma), nor above 1 once budgets bind.
  const double gamma_total =
      std::accumulate(catalog.gamma.begin(), catalog.gamma.end(), 0.0);
  const double fairness_cap = std::min(
      1.0, static_cast<double>(k) * static_cast<double>(users.size()) / gamma_total);
  return accuracy + lambda * fairness_cap;
}

double episode_realized_objective(const SyntheticWorld& world,
                                  std::span<const InteractionRecord> records,
                                  const Catalog& catalog, double lambda) {
  double score_sum = 0.0;
  std::vector<double> exposure(catalog.n_providers, 0.0);
  for (const InteractionRecord& rec : records) {
    for (std::int32_t i : rec.items) {
      score_sum += world.score(rec.user, i);
      exposure[catalog.provider_of[i]] += 1.0;
    }
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int p = 0; p < catalog.n_providers; ++p)
    worst = std::min(worst, exposure[p] / catalog.gamma[p]);
  return score_sum / static_cast<double>(records.size()) + lambda * worst;
}

SyntheticWorld world_for(const ExperimentConfig& config) {
  return generate_synthetic_world(config.world,
                                  derive_seed(config.seed, kWorldStream));
}

Catalog catalog_for(const ExperimentConfig& config,
                    const SyntheticWorld& world) {
  const double richness = config.richness > 0.0
                              ? config.richness
                              : default_richness(config.world.n_providers);
  return config.gamma_override
             ? build_catalog_with_gamma(world.provider_of, config.ranking_size,
                                        config.batch_size,
                                        *config.gamma_override)
             : build_catalog(world.provider_of, config.ranking_size,
                             config.batch_size, richness);
}

ExperimentTrace run_experiment(const ExperimentConfig& config) {
  if (config.n_arrivals < config.batch_size)
    throw std::invalid_argument("experiment: need at least one full episode");
  const int episodes =
      static_cast<int>(config.n_arrivals / config.batch_size);

  SyntheticWorld world = world_for(config);
  Catalog catalog = catalog_for(config, world);

  EmbeddingState emb(world.n_users, world.n_items, config.model_dim,
                     config.model_lambda_u, config.model_lambda_i,
                     derive_seed(config.seed, kEmbeddingStream));
  PolicyParams params = config.params;
  params.lambda_tradeoff = config.lambda_tradeoff;
  params.ucb.dim = config.model_dim;
  params.ucb.lambda_u = config.model_lambda_u;
  params.ucb.lambda_i = config.model_lambda_i;
  std::unique_ptr<Policy> policy = make_policy(config.policy, catalog, params);

  Rng arrival_rng(derive_seed(config.seed, kArrivalStream));
  Rng click_rng(derive_seed(config.seed, kClickStream));
  std::vector<std::int32_t> rotation(world.n_users);
  std::iota(rotation.begin(), rotation.end(), 0);
  arrival_rng.shuffle(rotation.data(), rotation.size());
  std::size_t rotation_pos = 0;
  auto next_user = [&]() {
    if (rotation_pos == rotation.size()) {
      arrival_rng.shuffle(rotation.data(), rotation.size());
      rotation_pos = 0;
    }
    return rotation[rotation_pos++];
  };

  ExperimentTrace trace;
  trace.catalog = catalog;
  trace.records.reserve(static_cast<std::size_t>(episodes) * config.batch_size);
  trace.reports.reserve(episodes);

  double ctr_sum = 0.0;       // sum over arrivals of list-mean true score
  double mmf_sum = 0.0;       // sum over episodes of worst normalized exposure
  std::vector<double> cumulative_exposure(catalog.n_providers, 0.0);

  for (int n = 1; n <= episodes; ++n) {
    policy->begin_episode();
    std::vector<std::int32_t> users(config.batch_size);
    for (int t = 0; t < config.batch_size; ++t) users[t] = next_user();

    std::vector<InteractionRecord> records = run_episode(
        *policy, world, users, emb, n,
        static_cast<std::int64_t>(n - 1) * config.batch_size, click_rng);

    std::vector<double> episode_exposure(catalog.n_providers, 0.0);
    for (const InteractionRecord& rec : records) {
      double list_sum = 0.0;
      for (std::int32_t i : rec.items) {
        list_sum += world.score(rec.user, i);
        episode_exposure[catalog.provider_of[i]] += 1.0;
      }
      ctr_sum += list_sum / catalog.ranking_size;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 0; p < catalog.n_providers; ++p) {
      cumulative_exposure[p] += episode_exposure[p];
      worst = std::min(worst, episode_exposure[p] / catalog.gamma[p]);
    }
    mmf_sum += worst;

    MetricsReport report;
    report.episode = n;
    report.ctr_at_k = ctr_sum / (static_cast<double>(n) * config.batch_size);
    report.mmf_at_k = mmf_sum / static_cast<double>(n);
    report.r_lambda_at_k =
        r_lambda(report.ctr_at_k, report.mmf_at_k, config.lambda_tradeoff);
    report.provider_exposure = cumulative_exposure;
    report.lowest_exposure = *std::min_element(cumulative_exposure.begin(),
                                               cumulative_exposure.end());
    const double upper = episode_objective_upper_bound(
        world, users, catalog, config.lambda_tradeoff);
    report.regret = upper - episode_realized_objective(world, records, catalog,
                                                       config.lambda_tradeoff);
    trace.reports.push_back(std::move(report));

    // Model refresh between episodes: the feedback collected above shapes
    // the next episode's decisions.
    std::vector<FeedbackRecord> feedback;
    feedback.reserve(records.size() * catalog.ranking_size);
    for (const InteractionRecord& rec : records)
      for (std::size_t j = 0; j < rec.items.size(); ++j)
        feedback.push_back({rec.user, rec.items[j], rec.clicks[j]});
    emb.ingest_feedback(feedback);

    for (InteractionRecord& rec : records)
      trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace fairloop
