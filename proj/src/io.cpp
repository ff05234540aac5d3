#include "fairloop/io.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fairloop {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = strip(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  return in;
}

}  // namespace

std::vector<InteractionRow> load_interactions(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  std::vector<InteractionRow> rows;
  std::vector<long> bad_lines;
  long line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      if (stripped.rfind("user_id", 0) == 0) continue;  // header row
    }
    const auto fields = split_csv_line(stripped);
    InteractionRow row;
    if (fields.size() != 4 || !parse_double(fields[2], row.rating) ||
        !parse_double(fields[3], row.timestamp)) {
      bad_lines.push_back(line_no);
      continue;
    }
    row.user_id = strip(fields[0]);
    row.item_id = strip(fields[1]);
    if (row.user_id.empty() || row.item_id.empty()) {
      bad_lines.push_back(line_no);
      continue;
    }
    row.click = row.rating >= 4.0 ? 1 : 0;
    rows.push_back(std::move(row));
  }

  if (!bad_lines.empty()) {
    std::string list;
    for (std::size_t i = 0; i < bad_lines.size() && i < 20; ++i)
      list += (i ? ", " : "") + std::to_string(bad_lines[i]);
    throw std::runtime_error(fmt::format(
        "'{}': {} malformed row(s) at line(s) {}", path, bad_lines.size(), list));
  }
  if (rows.empty())
    throw std::runtime_error(fmt::format("'{}': no interactions", path));

  std::stable_sort(rows.begin(), rows.end(),
                   [](const InteractionRow& a, const InteractionRow& b) {
                     return a.timestamp < b.timestamp;
                   });
  return rows;
}

ProviderTable load_provider_map(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  ProviderTable table;
  std::unordered_map<std::string, std::int32_t> provider_index;
  long line_no = 0;
  bool saw_header = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    if (!saw_header) {
      saw_header = true;
      if (stripped.rfind("item_id", 0) == 0) continue;
    }
    const auto fields = split_csv_line(stripped);
    if (fields.size() != 2)
      throw std::runtime_error(
          fmt::format("'{}' line {}: expected item_id,provider_id", path, line_no));
    const std::string item = strip(fields[0]);
    const std::string provider = strip(fields[1]);
    if (item.empty() || provider.empty())
      throw std::runtime_error(
          fmt::format("'{}' line {}: empty id", path, line_no));
    if (table.item_index.contains(item))
      throw std::runtime_error(
          fmt::format("'{}' line {}: duplicate item '{}'", path, line_no, item));

    auto [it, inserted] =
        provider_index.try_emplace(provider,
                                   static_cast<std::int32_t>(table.provider_ids.size()));
    if (inserted) table.provider_ids.push_back(provider);
    table.item_index.emplace(item, static_cast<std::int32_t>(table.item_ids.size()));
    table.item_ids.push_back(item);
    table.provider_of.push_back(it->second);
  }
  if (table.item_ids.empty())
    throw std::runtime_error(fmt::format("'{}': no provider rows", path));
  return table;
}

PreprocessResult preprocess(const std::vector<InteractionRow>& table,
                            const ProviderTable& providers, int min_degree) {
  if (min_degree < 1) throw std::invalid_argument("preprocess: min_degree >= 1");

  // Work on string keys until the fixed point, then reindex densely.
  std::set<std::string> dead_users, dead_items, dead_providers;
  const auto provider_of_item = [&](const std::string& item) -> std::string {
    const auto it = providers.item_index.find(item);
    if (it == providers.item_index.end()) return "";
    return providers.provider_ids[providers.provider_of[it->second]];
  };

  // Interactions on items without a provider row can never survive.
  for (const InteractionRow& row : table)
    if (provider_of_item(row.item_id).empty()) dead_items.insert(row.item_id);

  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, int> user_degree, item_degree;
    for (const InteractionRow& row : table) {
      if (dead_users.contains(row.user_id) || dead_items.contains(row.item_id))
        continue;
      ++user_degree[row.user_id];
      ++item_degree[row.item_id];
    }
    for (const auto& [user, degree] : user_degree) {
      if (degree < min_degree) {
        dead_users.insert(user);
        changed = true;
      }
    }
    for (const auto& [item, degree] : item_degree) {
      if (degree < min_degree) {
        dead_items.insert(item);
        changed = true;
      }
    }
    // Providers need min_degree surviving items (items must also still have
    // interactions).
    std::unordered_map<std::string, int> provider_items;
    for (const auto& [item, degree] : item_degree) {
      if (dead_items.contains(item)) continue;
      provider_items[provider_of_item(item)] += 1;
    }
    for (std::size_t p = 0; p < providers.provider_ids.size(); ++p) {
      const std::string& provider = providers.provider_ids[p];
      if (dead_providers.contains(provider)) continue;
      if (provider_items[provider] < min_degree) {
        dead_providers.insert(provider);
        changed = true;
        for (std::size_t i = 0; i < providers.item_ids.size(); ++i) {
          if (providers.provider_of[i] == static_cast<std::int32_t>(p) &&
              !dead_items.contains(providers.item_ids[i])) {
            dead_items.insert(providers.item_ids[i]);
          }
        }
      }
    }
  }

  PreprocessResult result;
  result.removed_users = dead_users.size();
  result.removed_items = dead_items.size();
  result.removed_providers = dead_providers.size();

  std::unordered_map<std::string, std::int32_t> user_index, item_index,
      provider_index;
  std::vector<PreprocessResult::Row> kept;
  for (const InteractionRow& row : table) {
    if (dead_users.contains(row.user_id) || dead_items.contains(row.item_id))
      continue;
    const std::string provider = provider_of_item(row.item_id);

    auto [uit, u_new] = user_index.try_emplace(
        row.user_id, static_cast<std::int32_t>(result.user_ids.size()));
    if (u_new) result.user_ids.push_back(row.user_id);
    auto [pit, p_new] = provider_index.try_emplace(
        provider, static_cast<std::int32_t>(result.provider_ids.size()));
    if (p_new) result.provider_ids.push_back(provider);
    auto [iit, i_new] = item_index.try_emplace(
        row.item_id, static_cast<std::int32_t>(result.item_ids.size()));
    if (i_new) {
      result.item_ids.push_back(row.item_id);
      result.provider_of.push_back(pit->second);
    }
    kept.push_back({uit->second, iit->second, row.click, row.timestamp});
  }

  if (kept.empty())
    throw std::runtime_error(fmt::format(
        "preprocess: nothing survives filtering (removed {} users, {} items, "
        "{} providers)",
        result.removed_users, result.removed_items, result.removed_providers));

  const std::size_t cut = (kept.size() * 8) / 10;
  result.train.assign(kept.begin(), kept.begin() + cut);
  result.eval.assign(kept.begin() + cut, kept.end());
  return result;
}

ScoreMatrix load_score_matrix(const std::string& path, int expected_users,
                              int expected_items) {
  std::ifstream in = open_or_throw(path);
  std::string line;
  ScoreMatrix matrix;
  matrix.n_users = expected_users;
  matrix.n_items = expected_items;

  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    const std::string stripped = strip(line);
    if (!stripped.empty()) lines.push_back(stripped);
  }
  if (lines.empty()) throw std::runtime_error(fmt::format("'{}': empty", path));

  auto clamp01 = [&](double v) {
    if (v < 0.0 || v > 1.0) {
      ++matrix.clamped;
      return std::clamp(v, 0.0, 1.0);
    }
    return v;
  };

  const bool triplet = lines.front().rfind("user_id", 0) == 0;
  if (triplet) {
    matrix.data.assign(
        static_cast<std::size_t>(expected_users) * expected_items, 0.0);
    std::vector<bool> seen(matrix.data.size(), false);
    for (std::size_t n = 1; n < lines.size(); ++n) {
      const auto fields = split_csv_line(lines[n]);
      double u_raw, i_raw, s;
      if (fields.size() != 3 || !parse_double(fields[0], u_raw) ||
          !parse_double(fields[1], i_raw) || !parse_double(fields[2], s))
        throw std::runtime_error(
            fmt::format("'{}': malformed triplet '{}'", path, lines[n]));
      const int u = static_cast<int>(u_raw);
      const int i = static_cast<int>(i_raw);
      if (u < 0 || u >= expected_users || i < 0 || i >= expected_items)
        throw std::runtime_error(fmt::format(
            "'{}': triplet ({}, {}) outside {}x{}", path, u, i,
            expected_users, expected_items));
      const std::size_t flat = static_cast<std::size_t>(u) * expected_items + i;
      matrix.data[flat] = clamp01(s);
      seen[flat] = true;
    }
    for (bool s : seen)
      if (!s) ++matrix.filled;
    return matrix;
  }

  if (static_cast<int>(lines.size()) != expected_users)
    throw std::runtime_error(
        fmt::format("'{}': {} rows, catalog expects {} users", path,
                    lines.size(), expected_users));
  matrix.data.reserve(static_cast<std::size_t>(expected_users) * expected_items);
  for (const std::string& row_line : lines) {
    const auto fields = split_csv_line(row_line);
    if (static_cast<int>(fields.size()) != expected_items)
      throw std::runtime_error(
          fmt::format("'{}': row with {} columns, catalog expects {}", path,
                      fields.size(), expected_items));
    for (const std::string& field : fields) {
      double v;
      if (!parse_double(field, v))
        throw std::runtime_error(
            fmt::format("'{}': bad score '{}'", path, field));
      matrix.data.push_back(clamp01(v));
    }
  }
  return matrix;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig config;
  std::stringstream ss(text);
  std::string line;
  long line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::string stripped = strip(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      config.errors_.push_back(
          fmt::format("line {}: expected 'key = value'", line_no));
      continue;
    }
    const std::string key = strip(stripped.substr(0, eq));
    const std::string value = strip(stripped.substr(eq + 1));
    if (key.empty()) {
      config.errors_.push_back(fmt::format("line {}: empty key", line_no));
      continue;
    }
    if (config.entries_.contains(key)) {
      config.errors_.push_back(fmt::format("line {}: duplicate key '{}'", line_no, key));
      continue;
    }
    config.entries_[key] = value;
    config.read_[key] = false;
  }
  return config;
}

bool KeyValueConfig::has(const std::string& key) const {
  return entries_.contains(key);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_[key] = true;
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_[key] = true;
  double v;
  if (!parse_double(it->second, v)) {
    errors_.push_back(fmt::format("key '{}': '{}' is not a number", key, it->second));
    return fallback;
  }
  return v;
}

std::int64_t KeyValueConfig::get_int(const std::string& key,
                                     std::int64_t fallback) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_[key] = true;
  const std::string t = strip(it->second);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    errors_.push_back(fmt::format("key '{}': '{}' is not an integer", key, it->second));
    return fallback;
  }
  return v;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key,
                                                    std::vector<double> fallback) {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_[key] = true;
  std::vector<double> values;
  for (const std::string& field : split_csv_line(it->second)) {
    double v;
    if (!parse_double(field, v)) {
      errors_.push_back(
          fmt::format("key '{}': '{}' is not a number list", key, it->second));
      return fallback;
    }
    values.push_back(v);
  }
  return values;
}

std::vector<std::string> KeyValueConfig::unread_keys() const {
  std::vector<std::string> keys;
  for (const auto& [key, was_read] : read_)
    if (!was_read) keys.push_back(key);
  return keys;
}

}  // namespace fairloop
