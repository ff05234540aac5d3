#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <stdexcept>

#include "fairloop/catalog.hpp"
#include "fairloop/rng.hpp"

using namespace fairloop;

TEST_CASE("budget rule") {
  // 4 items split 2/2 over 2 providers, K=1, T=10, richness 1.5
  Catalog cat = build_catalog({0, 0, 1, 1}, 1, 10, 1.5);
  CHECK(cat.gamma[0] == doctest::Approx(7.5));
  CHECK(cat.gamma[1] == doctest::Approx(7.5));

  // degenerate single provider
  Catalog solo = build_catalog({0, 0, 0}, 1, 1, 2.0);
  REQUIRE(solo.n_providers == 1);
  CHECK(solo.gamma[0] == doctest::Approx(2.0));

  // 6 items split 4/2, K=2, T=5, richness 1.5
  Catalog skewed = build_catalog({0, 0, 0, 0, 1, 1}, 2, 5, 1.5);
  CHECK(skewed.gamma[0] == doctest::Approx(10.0));
  CHECK(skewed.gamma[1] == doctest::Approx(5.0));
}

TEST_CASE("default richness") {
  CHECK(default_richness(2) == doctest::Approx(1.5));
  CHECK(default_richness(8) == doctest::Approx(1.125));
}

TEST_CASE("construction rejects bad inputs") {
  // provider 1 owns no items
  CHECK_THROWS_AS(build_catalog({0, 0, 2}, 1, 1, 1.5), std::invalid_argument);
  // K larger than the catalog
  CHECK_THROWS_AS(build_catalog({0, 1}, 3, 1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(build_catalog({0, 1}, 1, 0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(build_catalog_with_gamma({0, 1}, 1, 1, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(build_catalog_with_gamma({0, 1}, 1, 1, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("exposure counting") {
  Catalog cat = build_catalog({0, 0, 1, 1}, 2, 4, 1.5);

  const std::vector<std::int32_t> both_first{0, 1};
  CHECK(exposures_of(both_first, cat) == std::vector<double>{2.0, 0.0});

  const std::vector<std::int32_t> empty;
  CHECK(exposures_of(empty, cat) == std::vector<double>{0.0, 0.0});

  const std::vector<std::int32_t> split{0, 3};
  CHECK(exposures_of(split, cat) == std::vector<double>{1.0, 1.0});

  const std::vector<std::int32_t> dup{0, 0};
  CHECK_THROWS_AS(exposures_of(dup, cat), std::invalid_argument);
  const std::vector<std::int32_t> oob{0, 9};
  CHECK_THROWS_AS(exposures_of(oob, cat), std::invalid_argument);
}

TEST_CASE("exposures sum to the list size and ignore order") {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_items = 4 + static_cast<int>(rng.next_below(10));
    std::vector<std::int32_t> provider_of(n_items);
    const int n_providers = 2 + static_cast<int>(rng.next_below(3));
    for (int i = 0; i < n_items; ++i)
      provider_of[i] = i < n_providers
                           ? i
                           : static_cast<std::int32_t>(rng.next_below(n_providers));
    const int k = 1 + static_cast<int>(rng.next_below(n_items));
    Catalog cat = build_catalog(provider_of, k, 3, 1.25);

    std::vector<std::int32_t> pool(n_items);
    std::iota(pool.begin(), pool.end(), 0);
    rng.shuffle(pool.data(), pool.size());
    std::vector<std::int32_t> decision(pool.begin(), pool.begin() + k);

    const auto exposure = exposures_of(decision, cat);
    CHECK(std::accumulate(exposure.begin(), exposure.end(), 0.0) ==
          doctest::Approx(static_cast<double>(k)));

    rng.shuffle(decision.data(), decision.size());
    CHECK(exposures_of(decision, cat) == exposure);
  }
}
