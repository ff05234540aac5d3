#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairloop/offline.hpp"
#include "fairloop/rng.hpp"

using namespace fairloop;

namespace {

OfflineInstance two_step_instance(double lambda) {
  OfflineInstance inst;
  inst.catalog = build_catalog_with_gamma({0, 1}, 1, 2, {1.0, 1.0});
  inst.horizon = 2;
  inst.true_scores = {0.9, 0.1, 0.9, 0.1};
  inst.lambda_tradeoff = lambda;
  return inst;
}

}  // namespace

TEST_CASE("single-step accuracy-only optimum") {
  OfflineInstance inst;
  inst.catalog = build_catalog_with_gamma({0, 1}, 1, 1, {1.0, 1.0});
  inst.horizon = 1;
  inst.true_scores = {0.9, 0.1};
  inst.lambda_tradeoff = 0.0;
  const auto solution = solve_offline_optimum(inst);
  REQUIRE(solution.has_value());
  CHECK(solution->r_opt == doctest::Approx(0.9));
  CHECK(solution->decisions == std::vector<std::vector<std::int32_t>>{{0}});
}

TEST_CASE("budget forces alternation") {
  const OfflineInstance inst = two_step_instance(1.0);
  const auto solution = solve_offline_optimum(inst);
  REQUIRE(solution.has_value());
  // Always item 0 breaks the budget; the best feasible plan alternates:
  // (0.9 + 0.1)/2 + 1 * min(1, 1) = 1.5
  CHECK(solution->r_opt == doctest::Approx(1.5));
  std::vector<double> exposure(2, 0.0);
  for (const auto& step : solution->decisions)
    for (std::int32_t i : step) exposure[inst.catalog.provider_of[i]] += 1.0;
  CHECK(exposure == std::vector<double>{1.0, 1.0});
}

TEST_CASE("large lambda equalizes normalized exposure") {
  Rng rng(91);
  for (int trial = 0; trial < 10; ++trial) {
    OfflineInstance inst;
    inst.catalog = build_catalog_with_gamma({0, 0, 1, 1, 2, 2}, 1, 6,
                                            {2.0, 2.0, 2.0});
    inst.horizon = 6;
    inst.true_scores.resize(6 * 6);
    for (double& s : inst.true_scores) s = rng.next_double();
    inst.lambda_tradeoff = 100.0;
    const auto solution = solve_offline_optimum(inst);
    REQUIRE(solution.has_value());
    std::vector<double> exposure(3, 0.0);
    for (const auto& step : solution->decisions)
      for (std::int32_t i : step) exposure[inst.catalog.provider_of[i]] += 1.0;
    // 6 picks over three providers with equal budgets: 2 each
    CHECK(exposure == std::vector<double>{2.0, 2.0, 2.0});
  }
}

TEST_CASE("lambda zero with slack budgets is per-step greedy") {
  Rng rng(92);
  OfflineInstance inst;
  inst.catalog = build_catalog_with_gamma({0, 0, 1, 1}, 2, 3, {6.0, 6.0});
  inst.horizon = 3;
  inst.true_scores.resize(3 * 4);
  for (double& s : inst.true_scores) s = rng.next_double();
  inst.lambda_tradeoff = 0.0;

  const auto solution = solve_offline_optimum(inst);
  REQUIRE(solution.has_value());
  double greedy = 0.0;
  for (int t = 0; t < 3; ++t) {
    std::vector<double> row(4);
    for (int i = 0; i < 4; ++i) row[i] = inst.score(t, i);
    std::sort(row.begin(), row.end(), std::greater<>());
    greedy += row[0] + row[1];
  }
  CHECK(solution->r_opt == doctest::Approx(greedy / 3.0));
}

TEST_CASE("objective is invariant under item relabeling") {
  Rng rng(93);
  OfflineInstance inst;
  inst.catalog = build_catalog_with_gamma({0, 1, 0, 1}, 1, 3, {2.0, 2.0});
  inst.horizon = 3;
  inst.true_scores.resize(3 * 4);
  for (double& s : inst.true_scores) s = rng.next_double();
  inst.lambda_tradeoff = 0.7;
  const auto base = solve_offline_optimum(inst);

  // swap items 0 and 1 (and their score columns / providers)
  OfflineInstance swapped = inst;
  std::vector<std::int32_t> provider_of = inst.catalog.provider_of;
  std::swap(provider_of[0], provider_of[1]);
  swapped.catalog = build_catalog_with_gamma(provider_of, 1, 3, {2.0, 2.0});
  for (int t = 0; t < 3; ++t)
    std::swap(swapped.true_scores[t * 4 + 0], swapped.true_scores[t * 4 + 1]);
  const auto relabeled = solve_offline_optimum(swapped);
  REQUIRE(base.has_value());
  REQUIRE(relabeled.has_value());
  CHECK(base->r_opt == doctest::Approx(relabeled->r_opt));
}

TEST_CASE("raising any score never lowers the optimum") {
  Rng rng(94);
  OfflineInstance inst;
  inst.catalog = build_catalog_with_gamma({0, 1, 2}, 1, 3, {1.5, 1.5, 1.5});
  inst.horizon = 3;
  inst.true_scores.resize(3 * 3);
  for (double& s : inst.true_scores) s = rng.next_double();
  inst.lambda_tradeoff = 0.5;
  const auto base = solve_offline_optimum(inst);
  REQUIRE(base.has_value());
  for (int entry = 0; entry < 9; ++entry) {
    OfflineInstance bumped = inst;
    bumped.true_scores[entry] += 0.3;
    const auto result = solve_offline_optimum(bumped);
    REQUIRE(result.has_value());
    CHECK(result->r_opt >= base->r_opt - 1e-12);
  }
}

TEST_CASE("infeasible budgets are reported") {
  OfflineInstance inst;
  // Two arrivals, one item per provider, but provider budgets allow only one
  // exposure in total.
  inst.catalog = build_catalog_with_gamma({0, 1}, 1, 2, {0.5, 0.5});
  inst.horizon = 2;
  inst.true_scores = {0.9, 0.1, 0.9, 0.1};
  inst.lambda_tradeoff = 0.5;
  CHECK_FALSE(solve_offline_optimum(inst).has_value());
}

TEST_CASE("enumeration guard") {
  OfflineInstance inst;
  std::vector<std::int32_t> provider_of(40);
  for (int i = 0; i < 40; ++i) provider_of[i] = i % 4;
  inst.catalog = build_catalog(provider_of, 10, 1000, 1.5);
  inst.horizon = 1000;
  inst.true_scores.assign(40000, 0.5);
  inst.lambda_tradeoff = 0.5;
  CHECK_THROWS(solve_offline_optimum(inst));
}

TEST_CASE("matches naive product enumeration") {
  Rng rng(96);
  for (int trial = 0; trial < 40; ++trial) {
    const int n_items = 3 + static_cast<int>(rng.next_below(2));
    const int horizon = 2 + static_cast<int>(rng.next_below(2));
    std::vector<std::int32_t> provider_of(n_items);
    for (int i = 0; i < n_items; ++i)
      provider_of[i] = i < 2 ? i : static_cast<std::int32_t>(rng.next_below(2));
    std::vector<double> gamma{0.5 + 2.5 * rng.next_double(),
                              0.5 + 2.5 * rng.next_double()};
    OfflineInstance inst;
    inst.catalog = build_catalog_with_gamma(provider_of, 1, horizon, gamma);
    inst.horizon = horizon;
    inst.true_scores.resize(static_cast<std::size_t>(horizon) * n_items);
    for (double& s : inst.true_scores) s = rng.next_double();
    inst.lambda_tradeoff = rng.next_double();

    double best = -1e300;
    int total = 1;
    for (int t = 0; t < horizon; ++t) total *= n_items;
    for (int code = 0; code < total; ++code) {
      int c = code;
      std::vector<std::vector<std::int32_t>> plan(horizon);
      std::vector<double> exposure(2, 0.0);
      for (int t = 0; t < horizon; ++t) {
        plan[t] = {static_cast<std::int32_t>(c % n_items)};
        c /= n_items;
        exposure[provider_of[plan[t][0]]] += 1.0;
      }
      if (exposure[0] > gamma[0] + 1e-9 || exposure[1] > gamma[1] + 1e-9)
        continue;
      best = std::max(best, realized_objective(inst, plan));
    }

    const auto solution = solve_offline_optimum(inst);
    if (best < -1e299) {
      CHECK_FALSE(solution.has_value());
    } else {
      REQUIRE(solution.has_value());
      CHECK(solution->r_opt == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("regret of the argmax is zero and dominance holds") {
  Rng rng(95);
  for (int trial = 0; trial < 20; ++trial) {
    OfflineInstance inst;
    inst.catalog = build_catalog_with_gamma({0, 0, 1, 1, 2, 2}, 1, 4,
                                            {4.0, 4.0, 4.0});
    inst.horizon = 4;
    inst.true_scores.resize(4 * 6);
    for (double& s : inst.true_scores) s = rng.next_double();
    inst.lambda_tradeoff = 0.5;

    const auto solution = solve_offline_optimum(inst);
    REQUIRE(solution.has_value());
    CHECK(regret(realized_objective(inst, solution->decisions), solution->r_opt) ==
          doctest::Approx(0.0));

    // any random policy is dominated (slack budgets: every trace feasible)
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<std::vector<std::int32_t>> random_plan(4);
      for (auto& step : random_plan)
        step = {static_cast<std::int32_t>(rng.next_below(6))};
      const double value = realized_objective(inst, random_plan);
      CHECK(regret(value, solution->r_opt) >= -1e-9);
    }
  }
}
