#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fairloop/catalog.hpp"
#include "fairloop/ranker.hpp"
#include "fairloop/rng.hpp"

using namespace fairloop;

TEST_CASE("mask vector") {
  CHECK(mask_vector(std::vector<double>{1.0, 0.0}) ==
        std::vector<double>{0.0, 1000.0});
  CHECK(mask_vector(std::vector<double>{0.5, 2.0}) ==
        std::vector<double>{0.0, 0.0});
  CHECK(mask_vector(std::vector<double>{0.0, -1.0}) ==
        std::vector<double>{1000.0, 1000.0});
  CHECK(mask_vector(std::vector<double>{-0.1}, 7.0) == std::vector<double>{7.0});
}

TEST_CASE("reward assembly") {
  const Catalog cat = build_catalog({0, 1}, 1, 1, 1.5);

  SUBCASE("prices and bonus off") {
    const auto r = assemble_rewards(std::vector<double>{0.3, -0.2},
                                    std::vector<double>{0.0, 0.0},
                                    std::vector<double>{0.0, 0.0},
                                    std::vector<double>{0.0, 0.0}, cat);
    CHECK(r[0] == doctest::Approx(0.3));
    CHECK(r[1] == doctest::Approx(-0.2));
  }

  SUBCASE("provider price subtracts per item") {
    const auto r = assemble_rewards(std::vector<double>{1.0, 1.0},
                                    std::vector<double>{0.0, 0.0},
                                    std::vector<double>{0.5, 0.0},
                                    std::vector<double>{0.0, 0.0}, cat);
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(r[1] == doctest::Approx(1.0));
  }

  SUBCASE("constant price shift keeps the selection") {
    const Catalog big = build_catalog({0, 0, 1, 1, 2}, 2, 4, 1.5);
    Rng rng(5);
    std::vector<double> s(5), df(5);
    for (int i = 0; i < 5; ++i) {
      s[i] = rng.next_gaussian();
      df[i] = 0.1 * rng.next_double();
    }
    std::vector<double> mu{0.1, -0.2, 0.3};
    std::vector<double> zero(3, 0.0);
    const auto base = top_k(assemble_rewards(s, df, mu, zero, big), 2);
    for (double& m : mu) m += 5.0;
    const auto shifted = top_k(assemble_rewards(s, df, mu, zero, big), 2);
    CHECK(base == shifted);
  }
}

TEST_CASE("top-k selection") {
  CHECK(top_k(std::vector<double>{3.0, 1.0, 2.0}, 2) ==
        std::vector<std::int32_t>{0, 2});
  CHECK(top_k(std::vector<double>{1.0, 1.0, 1.0}, 2) ==
        std::vector<std::int32_t>{0, 1});
  CHECK(top_k(std::vector<double>{1.0, 2.0, 2.0}, 2) ==
        std::vector<std::int32_t>{1, 2});
  CHECK_THROWS(top_k(std::vector<double>{1.0}, 2));

  // shift invariance
  Rng rng(17);
  std::vector<double> rewards(20);
  for (double& r : rewards) r = rng.next_gaussian();
  const auto base = top_k(rewards, 5);
  for (double& r : rewards) r += 123.0;
  CHECK(top_k(rewards, 5) == base);
}

namespace {

struct StepFixture {
  Catalog cat = build_catalog({0, 0, 1, 1, 1}, 2, 4, 1.5);
  EmbeddingState emb{3, 5, 4, 1.0, 1.0, 71};
  UcbParams ucb;
  StepFixture() {
    ucb.dim = 4;
  }
};

}  // namespace

TEST_CASE("rank step") {
  SUBCASE("no fairness pressure and no bonus reduces to plain top-k") {
    StepFixture f;
    DualState dual = DualState::init(f.cat, 0.0, 1e-2, 0.3);
    RankStepOptions opts;
    opts.use_exploration = false;
    const auto decision = rank_step(0, f.emb, dual, f.ucb, f.cat, 1, opts);

    std::vector<double> scores(5);
    f.emb.predict_scores(0, scores);
    CHECK(decision.items == top_k(scores, 2));
    CHECK(decision.exposure == exposures_of(decision.items, f.cat));
    CHECK(decision.items.size() == 2);
  }

  SUBCASE("exhausted provider is never selected while alternatives remain") {
    StepFixture f;
    DualState dual = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    dual.beta_remaining[0] = 0.0;  // provider 0 exhausted, provider 1 has 3 items
    const auto decision = rank_step(1, f.emb, dual, f.ucb, f.cat, 1);
    for (std::int32_t i : decision.items) CHECK(f.cat.provider_of[i] == 1);
  }

  SUBCASE("when everything is exhausted the step still returns K items") {
    StepFixture f;
    DualState dual = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    dual.beta_remaining.assign(2, 0.0);
    const auto decision = rank_step(1, f.emb, dual, f.ucb, f.cat, 1);
    CHECK(decision.items.size() == 2);
  }

  SUBCASE("dual pressure moves exposure off a loaded provider") {
    StepFixture f;
    DualState dual = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    RankStepOptions opts;
    opts.use_exploration = false;

    // Make provider 0's items the best by a small margin for user 0.
    const std::vector<double> u{1.0, 0.0, 0.0, 0.0};
    f.emb.set_user_embedding(0, u);
    f.emb.set_item_embedding(0, std::vector<double>{0.9, 0.1, 0.0, 0.0});
    f.emb.set_item_embedding(1, std::vector<double>{0.9, -0.1, 0.0, 0.0});
    f.emb.set_item_embedding(2, std::vector<double>{0.88, 0.15, 0.0, 0.0});
    f.emb.set_item_embedding(3, std::vector<double>{0.88, -0.15, 0.0, 0.0});
    f.emb.set_item_embedding(4, std::vector<double>{0.85, 0.2, 0.0, 0.0});

    const auto first = rank_step(0, f.emb, dual, f.ucb, f.cat, 1, opts);
    CHECK(first.exposure[0] == doctest::Approx(2.0));

    // Put heavy dual pressure on provider 0; the same user now shifts.
    dual.mu = {0.05, -0.02};
    const auto second = rank_step(0, f.emb, dual, f.ucb, f.cat, 1, opts);
    CHECK(second.exposure[0] < 2.0);
  }

  SUBCASE("dual state advances only with fairness enabled") {
    StepFixture f;
    DualState dual = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    RankStepOptions opts;
    opts.use_fairness = false;
    const auto before_beta = dual.beta_remaining;
    const auto before_mu = dual.mu;
    (void)rank_step(0, f.emb, dual, f.ucb, f.cat, 1, opts);
    CHECK(dual.beta_remaining == before_beta);
    CHECK(dual.mu == before_mu);

    opts.use_fairness = true;
    (void)rank_step(0, f.emb, dual, f.ucb, f.cat, 1, opts);
    CHECK(dual.beta_remaining != before_beta);
  }

  SUBCASE("zero exploration weight equals the disabled-bonus path") {
    StepFixture f;
    DualState d1 = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    DualState d2 = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    RankStepOptions scaled;
    scaled.exploration_scale = 0.0;
    RankStepOptions disabled;
    disabled.use_exploration = false;
    const auto a = rank_step(0, f.emb, d1, f.ucb, f.cat, 2, scaled);
    const auto b = rank_step(0, f.emb, d2, f.ucb, f.cat, 2, disabled);
    CHECK(a.items == b.items);
  }

  SUBCASE("deterministic given identical state") {
    StepFixture f;
    DualState d1 = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    DualState d2 = DualState::init(f.cat, 0.5, 1e-2, 0.3);
    const auto a = rank_step(2, f.emb, d1, f.ucb, f.cat, 3);
    const auto b = rank_step(2, f.emb, d2, f.ucb, f.cat, 3);
    CHECK(a.items == b.items);
    CHECK(d1.mu == d2.mu);
  }
}
