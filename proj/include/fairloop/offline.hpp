#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fairloop/catalog.hpp"

namespace fairloop {

// Tiny offline instance: a horizon of arrivals, the true scores each arrival
// sees, and the trade-off coefficient. Meant for exhaustive solving only; the
// guard rejects instances past the enumeration budget.
struct OfflineInstance {
  Catalog catalog;
  int horizon = 0;                  // number of arrivals
  std::vector<double> true_scores;  // horizon x n_items, row-major
  double lambda_tradeoff = 0.0;

  double score(int t, int i) const {
    return true_scores[static_cast<std::size_t>(t) * catalog.n_items + i];
  }
};

struct OfflineSolution {
  double r_opt = 0.0;
  std::vector<std::vector<std::int32_t>> decisions;  // one K-set per arrival
};

// Exhaustive search (depth-first over per-step K-subsets with cumulative
// budget pruning) for the maximum of
//   (1/T) sum_t sum_{i in x_t} s_{t,i} + lambda * min_p(E_p / gamma_p)
// subject to the cumulative exposure staying within gamma. Returns nullopt
// when no sequence satisfies the budgets. Throws when
// horizon * C(n_items, K) exceeds the 1e7 enumeration budget.
std::optional<OfflineSolution> solve_offline_optimum(const OfflineInstance& instance);

// Objective of a given decision sequence under the instance's true scores;
// budget feasibility is not enforced here.
double realized_objective(const OfflineInstance& instance,
                          const std::vector<std::vector<std::int32_t>>& decisions);

// r_opt - realized; nonnegative up to numerical slack whenever the realized
// trace is budget-feasible.
double regret(double realized_objective, double r_opt);

}  // namespace fairloop
