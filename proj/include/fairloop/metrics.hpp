#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairloop/catalog.hpp"
#include "fairloop/trace.hpp"

namespace fairloop {

// Per-episode report. The quality metrics are run-to-date (episodes 1..e), so
// the final report carries the whole-run values; regret is this episode's
// gap to the per-episode upper bound.
struct MetricsReport {
  std::int64_t episode = 0;  // 1-based
  double ctr_at_k = 0.0;
  double mmf_at_k = 0.0;
  double r_lambda_at_k = 0.0;
  double lowest_exposure = 0.0;            // min cumulative provider exposure
  std::vector<double> provider_exposure;   // cumulative counts
  double regret = 0.0;
};

// Mean over arrivals of the mean true score of the exposed list.
double ctr_at_k(std::span<const InteractionRecord> records,
                const ScoreGrid& scores, int ranking_size);

struct MmfResult {
  double value = 0.0;
  int full_episodes = 0;
  std::int64_t dropped_arrivals = 0;  // trailing partial episode, excluded
};

// Mean over full episodes of the episode's worst normalized provider
// exposure, min_p(e_p / gamma_p). A trailing partial episode is dropped and
// reported.
MmfResult mmf_at_k(std::span<const InteractionRecord> records,
                   const Catalog& catalog, int batch_size);

// r_lambda@K = CTR@K + lambda * MMF@K
double r_lambda(double ctr, double mmf, double lambda);

// Per episode, the minimum over providers of the run-to-date cumulative
// exposure count. Nondecreasing.
std::vector<double> lowest_exposure_series(
    std::span<const InteractionRecord> records, const Catalog& catalog,
    int batch_size);

}  // namespace fairloop
