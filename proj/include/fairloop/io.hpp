#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace fairloop {

// One row of an interaction CSV (`user_id,item_id,rating,timestamp`).
// Ratings of 4-5 count as clicks.
struct InteractionRow {
  std::string user_id;
  std::string item_id;
  double rating = 0.0;
  double timestamp = 0.0;
  int click = 0;
};

// Parses and sorts by timestamp (stable, so ties keep file order). Malformed
// rows abort with their line numbers; an empty table is an error.
std::vector<InteractionRow> load_interactions(const std::string& path);

// `item_id,provider_id` with string ids mapped to dense indices in
// first-seen order.
struct ProviderTable {
  std::vector<std::string> item_ids;      // dense item index -> id
  std::vector<std::string> provider_ids;  // dense provider index -> id
  std::vector<std::int32_t> provider_of;  // dense item -> dense provider
  std::unordered_map<std::string, std::int32_t> item_index;
};

ProviderTable load_provider_map(const std::string& path);

struct PreprocessResult {
  // Surviving entities, reindexed densely in first-seen order of the
  // filtered interaction table.
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  std::vector<std::string> provider_ids;
  std::vector<std::int32_t> provider_of;

  // Filtered interactions with dense indices, still time-sorted.
  struct Row {
    std::int32_t user;
    std::int32_t item;
    int click;
    double timestamp;
  };
  std::vector<Row> train;  // first 80% by time
  std::vector<Row> eval;   // remaining 20%

  std::int64_t removed_users = 0;
  std::int64_t removed_items = 0;
  std::int64_t removed_providers = 0;
};

// Iterative degree filtering to a fixed point: users and items below
// min_degree interactions are removed, as are providers owning fewer than
// min_degree surviving items (together with their items). Then a temporal
// 80/20 split. Errors if nothing survives.
PreprocessResult preprocess(const std::vector<InteractionRow>& table,
                            const ProviderTable& providers,
                            int min_degree = 5);

struct ScoreMatrix {
  int n_users = 0;
  int n_items = 0;
  std::vector<double> data;  // row-major
  std::int64_t clamped = 0;  // entries clamped into [0, 1]
  std::int64_t filled = 0;   // triplet holes filled with 0.0
};

// Dense numeric CSV (one row per user), or a sparse triplet file starting
// with the header `user_id,item_id,score` (integer indices). Values are
// clamped to [0, 1] and the clamp count reported; triplet holes default to
// 0.0 and are counted.
ScoreMatrix load_score_matrix(const std::string& path, int expected_users,
                              int expected_items);

// Flat `key = value` configuration file; '#' starts a comment. Unknown keys
// and invalid values are all reported together.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback);

  // Keys present in the file but never read, plus conversion failures.
  std::vector<std::string> unread_keys() const;
  const std::vector<std::string>& errors() const { return errors_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, bool> read_;
  std::vector<std::string> errors_;
};

}  // namespace fairloop
