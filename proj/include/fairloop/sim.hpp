#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairloop/catalog.hpp"
#include "fairloop/dual.hpp"
#include "fairloop/embeddings.hpp"
#include "fairloop/metrics.hpp"
#include "fairloop/ranker.hpp"
#include "fairloop/rng.hpp"
#include "fairloop/trace.hpp"
#include "fairloop/ucb.hpp"

namespace fairloop {

// Ground truth for a simulated run: hidden preference embeddings mapped to
// click probabilities in [0.05, 0.95], plus the item-provider assignment.
struct SyntheticWorld {
  int n_users = 0;
  int n_items = 0;
  std::vector<std::int32_t> provider_of;
  std::vector<double> true_scores;  // n_users x n_items, row-major

  double score(int u, int i) const {
    return true_scores[static_cast<std::size_t>(u) * n_items + i];
  }
  ScoreGrid grid() const { return {true_scores.data(), n_users, n_items}; }
};

struct WorldParams {
  int n_users = 64;
  int n_items = 40;
  int n_providers = 8;
  int true_dim = 8;   // ground-truth embedding dimension
  double skew = 1.0;  // provider-size power-law exponent; 0 = near-uniform
};

// Deterministic per seed. Provider sizes follow a power-law apportionment
// (every provider keeps at least one item); raw preference dot products are
// min-max mapped to [0.05, 0.95] so they parameterize Bernoulli clicks.
SyntheticWorld generate_synthetic_world(const WorldParams& params,
                                        std::uint64_t seed);

// Bernoulli click draw with probability equal to the true score.
int click_model(const SyntheticWorld& world, int u, int i, Rng& rng);

enum class PolicyId {
  ltp_mmf,
  ltp_mmf_no_ucb,
  ltp_mmf_no_fair,
  topk,
  k_neighbor,
};

PolicyId parse_policy_id(const std::string& name);
const char* policy_name(PolicyId id);

struct PolicyParams {
  double lambda_tradeoff = 0.5;
  double step_size = 1e-2;  // callers usually pass step_scale / sqrt(T)
  double momentum_alpha = 0.3;
  double mask_penalty = 1e3;
  double exploration_scale = 1.0;  // see RankStepOptions
  UcbParams ucb;
  int k_neighbor_k = 3;  // candidate-provider count for the heuristic
};

// A re-ranking policy: owns its episode-local state (dual variable, budgets,
// exposure counters) and reads the shared accuracy model.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void begin_episode() = 0;
  virtual RankingDecision decide(std::int32_t user, const EmbeddingState& emb,
                                 std::int64_t episode_index) = 0;
};

std::unique_ptr<Policy> make_policy(PolicyId id, const Catalog& catalog,
                                    const PolicyParams& params);

struct ExperimentConfig {
  std::int64_t n_arrivals = 4096;  // N
  int batch_size = 256;            // T
  int ranking_size = 10;           // K
  double lambda_tradeoff = 0.5;
  PolicyId policy = PolicyId::ltp_mmf;
  PolicyParams params;
  std::uint64_t seed = 1;
  WorldParams world;
  int model_dim = 16;
  double model_lambda_u = 1.0;
  double model_lambda_i = 1.0;
  double richness = 0.0;  // <= 0 means the 1 + 1/|P| default
  std::optional<std::vector<double>> gamma_override;
};

struct ExperimentTrace {
  Catalog catalog;
  std::vector<InteractionRecord> records;
  std::vector<MetricsReport> reports;  // one per episode
};

// Runs one episode: batch_size rank steps against a frozen accuracy model,
// clicks drawn from the world. The model is NOT updated here.
std::vector<InteractionRecord> run_episode(Policy& policy,
                                           const SyntheticWorld& world,
                                           std::span<const std::int32_t> users,
                                           const EmbeddingState& emb,
                                           std::int64_t episode_index,
                                           std::int64_t first_arrival,
                                           Rng& click_rng);

// Full feedback loop: floor(N/T) episodes of decide -> click -> log, with the
// accuracy model refreshed from the episode's feedback between episodes.
// Users arrive in shuffled round-robin order. Bit-identical per (config,
// seed).
ExperimentTrace run_experiment(const ExperimentConfig& config);

// The world and catalog a run_experiment call with this config will use.
SyntheticWorld world_for(const ExperimentConfig& config);
Catalog catalog_for(const ExperimentConfig& config,
                    const SyntheticWorld& world);

// Upper bound on any single episode's realized objective: per-arrival top-K
// true scores for the accuracy part plus the continuous water-filling cap
// min(1, K*T/sum(gamma)) for the fairness part. Used for per-episode regret
// at scales where exhaustive enumeration is out of budget.
double episode_objective_upper_bound(const SyntheticWorld& world,
                                     std::span<const std::int32_t> users,
                                     const Catalog& catalog, double lambda);

// Realized objective of one episode's records under the true scores.
double episode_realized_objective(const SyntheticWorld& world,
                                  std::span<const InteractionRecord> records,
                                  const Catalog& catalog, double lambda);

}  // namespace fairloop
