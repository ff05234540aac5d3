#pragma once

#include <cstdint>
#include <vector>

namespace fairloop {

// One logged arrival: the exposed list and the click on each slot.
struct InteractionRecord {
  std::int64_t t = 0;  // global arrival index, 0-based
  std::int32_t user = 0;
  std::vector<std::int32_t> items;
  std::vector<std::uint8_t> clicks;
};

// Borrowed view of a dense user x item score matrix.
struct ScoreGrid {
  const double* data = nullptr;
  int n_users = 0;
  int n_items = 0;

  double at(int u, int i) const {
    return data[static_cast<std::size_t>(u) * n_items + i];
  }
};

}  // namespace fairloop
