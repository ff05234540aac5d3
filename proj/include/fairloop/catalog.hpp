#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fairloop {

// Static multi-stakeholder world: items, the provider owning each item, and
// per-provider exposure budgets for one episode. Immutable after construction
// and safe to share across concurrent runs.
struct Catalog {
  int n_items = 0;
  int n_providers = 0;
  std::vector<std::int32_t> provider_of;  // item index -> provider index
  std::vector<double> gamma;              // exposure budget per provider
  std::vector<std::int32_t> provider_item_count;
  int ranking_size = 0;  // K
  int batch_size = 0;    // T
};

// Default resource-richness factor: 1 + 1/|P|.
double default_richness(int n_providers);

// Budgets follow the proportional rule gamma_p = K*T*richness*|I_p|/|I|.
// Rejects empty providers, K > n_items, T < 1.
Catalog build_catalog(std::vector<std::int32_t> provider_of, int ranking_size,
                      int batch_size, double richness);

// Same validation, but with explicitly supplied budgets (must be positive).
Catalog build_catalog_with_gamma(std::vector<std::int32_t> provider_of,
                                 int ranking_size, int batch_size,
                                 std::vector<double> gamma);

// Per-provider exposure counts of a decision list. Items must be distinct and
// in range; the components sum to the list size.
std::vector<double> exposures_of(std::span<const std::int32_t> items,
                                 const Catalog& catalog);

}  // namespace fairloop
