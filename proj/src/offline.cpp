#include "fairloop/offline.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fairloop {

namespace {

constexpr double kEnumerationBudget = 1e7;
constexpr double kBudgetSlack = 1e-9;

double binomial(int n, int k) {
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c *= static_cast<double>(n - k + j) / j;
  return c;
}

// All K-subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::int32_t>> enumerate_subsets(int n, int k) {
  std::vector<std::vector<std::int32_t>> subsets;
  std::vector<std::int32_t> current(k);
  for (int j = 0; j < k; ++j) current[j] = j;
  while (true) {
    subsets.push_back(current);
    int j = k - 1;
    while (j >= 0 && current[j] == n - k + j) --j;
    if (j < 0) break;
    ++current[j];
    for (int l = j + 1; l < k; ++l) current[l] = current[l - 1] + 1;
  }
  return subsets;
}

struct Search {
  const OfflineInstance& instance;
  std::vector<std::vector<std::int32_t>> subsets;
  std::vector<std::vector<double>> subset_exposure;   // per subset
  std::vector<std::vector<double>> subset_score_sum;  // [t][subset]
  std::vector<double> cumulative_exposure;
  std::vector<int> choice;
  std::vector<int> best_choice;
  double best = -std::numeric_limits<double>::infinity();

  explicit Search(const OfflineInstance& inst)
      : instance(inst),
        subsets(enumerate_subsets(inst.catalog.n_items,
                                  inst.catalog.ranking_size)) {}

  void run(int t, double score_sum) {
    const Catalog& cat = instance.catalog;
    if (t == instance.horizon) {
      double worst = std::numeric_limits<double>::infinity();
      for (int p = 0; p < cat.n_providers; ++p)
        worst = std::min(worst, cumulative_exposure[p] / cat.gamma[p]);
      const double value = score_sum / instance.horizon +
                           instance.lambda_tradeoff * worst;
      if (value > best) {
        best = value;
        best_choice = choice;
      }
      return;
    }
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      const std::vector<double>& exposure = subset_exposure[s];
      bool within_budget = true;
      for (int p = 0; p < cat.n_providers; ++p) {
        if (cumulative_exposure[p] + exposure[p] > cat.gamma[p] + kBudgetSlack) {
          within_budget = false;
          break;
        }
      }
      if (!within_budget) continue;
      for (int p = 0; p < cat.n_providers; ++p)
        cumulative_exposure[p] += exposure[p];
      choice[t] = static_cast<int>(s);
      run(t + 1, score_sum + subset_score_sum[t][s]);
      for (int p = 0; p < cat.n_providers; ++p)
        cumulative_exposure[p] -= exposure[p];
    }
  }
};

}  // namespace

std::optional<OfflineSolution> solve_offline_optimum(const OfflineInstance& instance) {
  const Catalog& cat = instance.catalog;
  if (instance.horizon < 1)
    throw std::invalid_argument("offline: horizon must be >= 1");
  if (instance.true_scores.size() !=
      static_cast<std::size_t>(instance.horizon) * cat.n_items)
    throw std::invalid_argument("offline: score matrix shape mismatch");
  if (instance.lambda_tradeoff < 0.0)
    throw std::invalid_argument("offline: lambda must be >= 0");

  const double required =
      static_cast<double>(instance.horizon) * binomial(cat.n_items, cat.ranking_size);
  if (required > kEnumerationBudget)
    throw std::invalid_argument(
        fmt::format("offline: enumeration budget exceeded "
                    "(requires {:.3g} states, budget {:.0e})",
                    required, kEnumerationBudget));

  Search search(instance);
  search.subset_exposure.reserve(search.subsets.size());
  for (const auto& subset : search.subsets)
    search.subset_exposure.push_back(exposures_of(subset, cat));
  search.subset_score_sum.assign(instance.horizon, {});
  for (int t = 0; t < instance.horizon; ++t) {
    search.subset_score_sum[t].reserve(search.subsets.size());
    for (const auto& subset : search.subsets) {
      double sum = 0.0;
      for (std::int32_t i : subset) sum += instance.score(t, i);
      search.subset_score_sum[t].push_back(sum);
    }
  }
  search.cumulative_exposure.assign(cat.n_providers, 0.0);
  search.choice.assign(instance.horizon, -1);
  search.run(0, 0.0);

  if (search.best_choice.empty()) return std::nullopt;  // budgets infeasible

  OfflineSolution solution;
  solution.r_opt = search.best;
  solution.decisions.reserve(instance.horizon);
  for (int t = 0; t < instance.horizon; ++t)
    solution.decisions.push_back(search.subsets[search.best_choice[t]]);
  return solution;
}

double realized_objective(const OfflineInstance& instance,
                          const std::vector<std::vector<std::int32_t>>& decisions) {
  const Catalog& cat = instance.catalog;
  if (static_cast<int>(decisions.size()) != instance.horizon)
    throw std::invalid_argument("offline: decision count != horizon");
  double score_sum = 0.0;
  std::vector<double> cumulative(cat.n_providers, 0.0);
  for (int t = 0; t < instance.horizon; ++t) {
    const auto exposure = exposures_of(decisions[t], cat);
    if (static_cast<int>(decisions[t].size()) != cat.ranking_size)
      throw std::invalid_argument("offline: decision size != ranking_size");
    for (int p = 0; p < cat.n_providers; ++p) cumulative[p] += exposure[p];
    for (std::int32_t i : decisions[t]) score_sum += instance.score(t, i);
  }
  double worst = std::numeric_limits<double>::infinity();
  for (int p = 0; p < cat.n_providers; ++p)
    worst = std::min(worst, cumulative[p] / cat.gamma[p]);
  return score_sum / instance.horizon + instance.lambda_tradeoff * worst;
}

double regret(double realized_objective, double r_opt) {
  return r_opt - realized_objective;
}

}  // namespace fairloop
