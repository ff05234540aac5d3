#include "fairloop/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace fairloop {

double ctr_at_k(std::span<const InteractionRecord> records,
                const ScoreGrid& scores, int ranking_size) {
  if (records.empty()) throw std::invalid_argument("metrics: empty trace");
  double total = 0.0;
  for (const InteractionRecord& rec : records) {
    double list_sum = 0.0;
    for (std::int32_t i : rec.items) list_sum += scores.at(rec.user, i);
    total += list_sum / ranking_size;
  }
  return total / static_cast<double>(records.size());
}

MmfResult mmf_at_k(std::span<const InteractionRecord> records,
                   const Catalog& catalog, int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("metrics: batch_size must be >= 1");
  MmfResult result;
  result.full_episodes = static_cast<int>(records.size() / batch_size);
  result.dropped_arrivals =
      static_cast<std::int64_t>(records.size()) -
      static_cast<std::int64_t>(result.full_episodes) * batch_size;
  if (result.full_episodes == 0)
    throw std::invalid_argument("metrics: trace shorter than one episode");

  double sum = 0.0;
  for (int e = 0; e < result.full_episodes; ++e) {
    std::vector<double> exposure(catalog.n_providers, 0.0);
    for (int t = 0; t < batch_size; ++t) {
      const InteractionRecord& rec = records[e * batch_size + t];
      for (std::int32_t i : rec.items) exposure[catalog.provider_of[i]] += 1.0;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 0; p < catalog.n_providers; ++p)
      worst = std::min(worst, exposure[p] / catalog.gamma[p]);
    sum += worst;
  }
  result.value = sum / result.full_episodes;
  return result;
}

double r_lambda(double ctr, double mmf, double lambda) {
  return ctr + lambda * mmf;
}

std::vector<double> lowest_exposure_series(
    std::span<const InteractionRecord> records, const Catalog& catalog,
    int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("metrics: batch_size must be >= 1");
  const int episodes = static_cast<int>(records.size() / batch_size);
  std::vector<double> cumulative(catalog.n_providers, 0.0);
  std::vector<double> series;
  series.reserve(episodes);
  for (int e = 0; e < episodes; ++e) {
    for (int t = 0; t < batch_size; ++t) {
      const InteractionRecord& rec = records[e * batch_size + t];
      for (std::int32_t i : rec.items) cumulative[catalog.provider_of[i]] += 1.0;
    }
    series.push_back(*std::min_element(cumulative.begin(), cumulative.end()));
  }
  return series;
}

}  // namespace fairloop
