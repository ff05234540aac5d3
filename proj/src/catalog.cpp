#include "fairloop/catalog.hpp"

#include <fmt/core.h>

#include <stdexcept>

namespace fairloop {

namespace {

Catalog validate_and_assemble(std::vector<std::int32_t> provider_of,
                              int ranking_size, int batch_size) {
  if (provider_of.empty()) throw std::invalid_argument("catalog: no items");
  if (batch_size < 1) throw std::invalid_argument("catalog: batch_size must be >= 1");
  if (ranking_size < 1 || ranking_size > static_cast<int>(provider_of.size()))
    throw std::invalid_argument(fmt::format(
        "catalog: ranking_size {} out of range for {} items", ranking_size,
        provider_of.size()));

  std::int32_t n_providers = 0;
  for (std::int32_t p : provider_of) {
    if (p < 0) throw std::invalid_argument("catalog: negative provider index");
    n_providers = std::max(n_providers, p + 1);
  }

  Catalog cat;
  cat.n_items = static_cast<int>(provider_of.size());
  cat.n_providers = n_providers;
  cat.provider_of = std::move(provider_of);
  cat.ranking_size = ranking_size;
  cat.batch_size = batch_size;
  cat.provider_item_count.assign(n_providers, 0);
  for (std::int32_t p : cat.provider_of) ++cat.provider_item_count[p];
  for (int p = 0; p < n_providers; ++p) {
    if (cat.provider_item_count[p] == 0)
      throw std::invalid_argument(
          fmt::format("catalog: provider {} owns no items", p));
  }
  return cat;
}

}  // namespace

double default_richness(int n_providers) {
  return 1.0 + 1.0 / static_cast<double>(n_providers);
}

Catalog build_catalog(std::vector<std::int32_t> provider_of, int ranking_size,
                      int batch_size, double richness) {
  if (!(richness > 0.0))
    throw std::invalid_argument("catalog: richness must be positive");
  Catalog cat = validate_and_assemble(std::move(provider_of), ranking_size,
                                      batch_size);
  cat.gamma.resize(cat.n_providers);
  const double scale = static_cast<double>(ranking_size) *
                       static_cast<double>(batch_size) * richness /
                       static_cast<double>(cat.n_items);
  for (int p = 0; p < cat.n_providers; ++p)
    cat.gamma[p] = scale * cat.provider_item_count[p];
  return cat;
}

Catalog build_catalog_with_gamma(std::vector<std::int32_t> provider_of,
                                 int ranking_size, int batch_size,
                                 std::vector<double> gamma) {
  Catalog cat = validate_and_assemble(std::move(provider_of), ranking_size,
                                      batch_size);
  if (static_cast<int>(gamma.size()) != cat.n_providers)
    throw std::invalid_argument(
        fmt::format("catalog: gamma has {} entries, expected {}", gamma.size(),
                    cat.n_providers));
  for (double g : gamma)
    if (!(g > 0.0))
      throw std::invalid_argument("catalog: gamma entries must be positive");
  cat.gamma = std::move(gamma);
  return cat;
}

std::vector<double> exposures_of(std::span<const std::int32_t> items,
                                 const Catalog& catalog) {
  std::vector<double> exposure(catalog.n_providers, 0.0);
  std::vector<bool> seen(catalog.n_items, false);
  for (std::int32_t i : items) {
    if (i < 0 || i >= catalog.n_items)
      throw std::invalid_argument(fmt::format("exposures_of: item {} out of range", i));
    if (seen[i])
      throw std::invalid_argument(fmt::format("exposures_of: duplicate item {}", i));
    seen[i] = true;
    exposure[catalog.provider_of[i]] += 1.0;
  }
  return exposure;
}

}  // namespace fairloop
