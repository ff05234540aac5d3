#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "fairloop/cli.hpp"
#include "fairloop/io.hpp"

using namespace fairloop;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fairloop_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  fs::path file(const std::string& name, const std::string& content) const {
    const fs::path p = path / name;
    std::ofstream out(p);
    out << content;
    return p;
  }
};

}  // namespace

TEST_CASE("interaction loading") {
  TempDir dir;

  SUBCASE("parses, maps clicks, sorts by time") {
    const auto p = dir.file("x.csv",
                            "user_id,item_id,rating,timestamp\n"
                            "u2,i1,5,30\n"
                            "u1,i1,3,10\n"
                            "u1,i2,4,20\n");
    const auto rows = load_interactions(p.string());
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].user_id == "u1");
    CHECK(rows[0].click == 0);  // rating 3
    CHECK(rows[1].click == 1);  // rating 4
    CHECK(rows[2].user_id == "u2");
    CHECK(rows[2].click == 1);  // rating 5
  }

  SUBCASE("timestamp ties keep file order") {
    const auto p = dir.file("ties.csv",
                            "user_id,item_id,rating,timestamp\n"
                            "a,i1,5,7\nb,i1,5,7\nc,i1,5,7\n");
    const auto rows = load_interactions(p.string());
    CHECK(rows[0].user_id == "a");
    CHECK(rows[1].user_id == "b");
    CHECK(rows[2].user_id == "c");
  }

  SUBCASE("empty file fails fast") {
    const auto p = dir.file("empty.csv", "user_id,item_id,rating,timestamp\n");
    CHECK_THROWS(load_interactions(p.string()));
  }

  SUBCASE("malformed rows are reported with line numbers") {
    const auto p = dir.file("bad.csv",
                            "user_id,item_id,rating,timestamp\n"
                            "u1,i1,5,1\n"
                            "u1,i1,not_a_number,2\n");
    try {
      load_interactions(p.string());
      FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
  }
}

TEST_CASE("provider map loading") {
  TempDir dir;
  const auto p = dir.file("prov.csv",
                          "item_id,provider_id\n"
                          "i1,brandA\n"
                          "i2,brandB\n"
                          "i3,brandA\n");
  const auto table = load_provider_map(p.string());
  REQUIRE(table.item_ids.size() == 3);
  CHECK(table.provider_ids == std::vector<std::string>{"brandA", "brandB"});
  CHECK(table.provider_of == std::vector<std::int32_t>{0, 1, 0});

  const auto dup = dir.file("dup.csv", "item_id,provider_id\ni1,a\ni1,b\n");
  CHECK_THROWS(load_provider_map(dup.string()));
}

TEST_CASE("preprocess") {
  TempDir dir;

  SUBCASE("degree filtering cascades to a fixed point") {
    // u_small has 2 interactions -> removed; i_rare then loses support.
    std::string csv = "user_id,item_id,rating,timestamp\n";
    int t = 0;
    for (int n = 0; n < 5; ++n)
      for (int i = 0; i < 5; ++i)
        csv += "u" + std::to_string(n) + ",i" + std::to_string(i) + ",5," +
               std::to_string(t++) + "\n";
    csv += "u_small,i0,5,100\nu_small,i1,4,101\n";
    const auto inter = dir.file("inter.csv", csv);

    std::string prov = "item_id,provider_id\n";
    for (int i = 0; i < 5; ++i) prov += "i" + std::to_string(i) + ",brand\n";
    const auto providers = dir.file("prov.csv", prov);

    const auto result = preprocess(load_interactions(inter.string()),
                                   load_provider_map(providers.string()), 5);
    CHECK(result.user_ids.size() == 5);
    CHECK(result.item_ids.size() == 5);
    CHECK(result.removed_users == 1);
    CHECK(result.train.size() + result.eval.size() == 25);
    // temporal 80/20
    CHECK(result.train.size() == 20);
    CHECK(result.eval.size() == 5);
    for (std::size_t r = 1; r < result.train.size(); ++r)
      CHECK(result.train[r].timestamp >= result.train[r - 1].timestamp);
  }

  SUBCASE("small providers vanish with their items") {
    // provider 'tiny' owns 3 items (below 5): its items must go, and the
    // users who only interacted with them go too.
    std::string csv = "user_id,item_id,rating,timestamp\n";
    int t = 0;
    for (int n = 0; n < 6; ++n)
      for (int i = 0; i < 6; ++i)
        csv += "u" + std::to_string(n) + ",big" + std::to_string(i) + ",5," +
               std::to_string(t++) + "\n";
    for (int n = 0; n < 6; ++n)
      for (int i = 0; i < 3; ++i)
        csv += "u" + std::to_string(n) + ",tiny" + std::to_string(i) + ",5," +
               std::to_string(t++) + "\n";
    const auto inter = dir.file("inter.csv", csv);

    std::string prov = "item_id,provider_id\n";
    for (int i = 0; i < 6; ++i) prov += "big" + std::to_string(i) + ",bigbrand\n";
    for (int i = 0; i < 3; ++i) prov += "tiny" + std::to_string(i) + ",tinybrand\n";
    const auto providers = dir.file("prov.csv", prov);

    const auto result = preprocess(load_interactions(inter.string()),
                                   load_provider_map(providers.string()), 5);
    CHECK(result.provider_ids == std::vector<std::string>{"bigbrand"});
    CHECK(result.item_ids.size() == 6);
    CHECK(result.removed_providers == 1);
    CHECK(result.removed_items == 3);
  }

  SUBCASE("filtering is idempotent at the fixed point") {
    std::string csv = "user_id,item_id,rating,timestamp\n";
    int t = 0;
    for (int n = 0; n < 7; ++n)
      for (int i = 0; i < 7; ++i)
        csv += "u" + std::to_string(n) + ",i" + std::to_string(i) + ",4," +
               std::to_string(t++) + "\n";
    const auto inter = dir.file("inter.csv", csv);
    std::string prov = "item_id,provider_id\n";
    for (int i = 0; i < 7; ++i) prov += "i" + std::to_string(i) + ",b\n";
    const auto providers = dir.file("prov.csv", prov);

    const auto once = preprocess(load_interactions(inter.string()),
                                 load_provider_map(providers.string()), 5);
    CHECK(once.removed_users == 0);
    CHECK(once.removed_items == 0);
    CHECK(once.removed_providers == 0);
  }

  SUBCASE("everything filtered is an error with counts") {
    const auto inter = dir.file("inter.csv",
                                "user_id,item_id,rating,timestamp\nu,i,5,1\n");
    const auto providers = dir.file("prov.csv", "item_id,provider_id\ni,b\n");
    CHECK_THROWS(preprocess(load_interactions(inter.string()),
                            load_provider_map(providers.string()), 5));
  }
}

TEST_CASE("score matrix loading") {
  TempDir dir;

  SUBCASE("dense") {
    const auto p = dir.file("dense.csv", "0.5,0.5\n0.25,1.2\n");
    const auto m = load_score_matrix(p.string(), 2, 2);
    CHECK(m.data == std::vector<double>{0.5, 0.5, 0.25, 1.0});
    CHECK(m.clamped == 1);
    CHECK(m.filled == 0);
  }

  SUBCASE("uniform dense") {
    const auto p = dir.file("u.csv", "0.5,0.5,0.5\n0.5,0.5,0.5\n");
    const auto m = load_score_matrix(p.string(), 2, 3);
    for (double v : m.data) CHECK(v == 0.5);
  }

  SUBCASE("sparse triplets fill holes with zero") {
    const auto p = dir.file("sp.csv",
                            "user_id,item_id,score\n0,0,0.9\n1,1,-0.25\n");
    const auto m = load_score_matrix(p.string(), 2, 2);
    CHECK(m.data == std::vector<double>{0.9, 0.0, 0.0, 0.0});
    CHECK(m.filled == 2);
    CHECK(m.clamped == 1);
  }

  SUBCASE("shape mismatch") {
    const auto p = dir.file("bad.csv", "0.5,0.5\n");
    CHECK_THROWS(load_score_matrix(p.string(), 2, 2));
  }
}

TEST_CASE("key-value config") {
  KeyValueConfig config = KeyValueConfig::parse_string(
      "# comment\n"
      "alpha = 1.5\n"
      "name = hello\n"
      "count = 42\n"
      "floats = 1,2.5,3\n"
      "mystery = 9\n");
  CHECK(config.get_double("alpha", 0.0) == 1.5);
  CHECK(config.get_string("name", "") == "hello");
  CHECK(config.get_int("count", 0) == 42);
  CHECK(config.get_double_list("floats", {}) == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(config.get_double("missing", 7.5) == 7.5);
  CHECK(config.unread_keys() == std::vector<std::string>{"mystery"});

  KeyValueConfig bad = KeyValueConfig::parse_string("x 5\nx = 1\nx = 2\n");
  CHECK(bad.errors().size() == 2);  // missing '=', duplicate key
}

TEST_CASE("experiment config validation lists every violation") {
  KeyValueConfig config = KeyValueConfig::parse_string(
      "policy = bogus\n"
      "batch_size = 0\n"
      "lambda = -1\n"
      "made_up_key = 3\n");
  std::vector<std::string> errors;
  (void)experiment_from_config(config, errors);
  REQUIRE(errors.size() >= 4);
  bool saw_policy = false, saw_batch = false, saw_lambda = false, saw_unknown = false;
  for (const std::string& e : errors) {
    if (e.find("policy") != std::string::npos) saw_policy = true;
    if (e.find("batch_size") != std::string::npos) saw_batch = true;
    if (e.find("lambda") != std::string::npos) saw_lambda = true;
    if (e.find("made_up_key") != std::string::npos) saw_unknown = true;
  }
  CHECK(saw_policy);
  CHECK(saw_batch);
  CHECK(saw_lambda);
  CHECK(saw_unknown);
}

TEST_CASE("explicit budgets and richness pass through") {
  KeyValueConfig config = KeyValueConfig::parse_string(
      "n_items = 4\nn_providers = 2\nranking_size = 2\n"
      "gamma = 2.5,3.5\nrichness = 1.25\n");
  std::vector<std::string> errors;
  const ExperimentConfig experiment = experiment_from_config(config, errors);
  CHECK(errors.empty());
  REQUIRE(experiment.gamma_override.has_value());
  CHECK(*experiment.gamma_override == std::vector<double>{2.5, 3.5});
  CHECK(experiment.richness == 1.25);
}

TEST_CASE("defaults follow the documented values") {
  KeyValueConfig config = KeyValueConfig::parse_string("");
  std::vector<std::string> errors;
  const ExperimentConfig experiment = experiment_from_config(config, errors);
  CHECK(errors.empty());
  CHECK(experiment.lambda_tradeoff == 0.5);
  CHECK(experiment.params.ucb.q == 0.8);
  CHECK(experiment.model_lambda_u == 1.0);
  CHECK(experiment.model_lambda_i == 1.0);
  CHECK(experiment.ranking_size == 10);
  CHECK(experiment.batch_size == 256);
  CHECK(experiment.params.momentum_alpha == 0.3);
  CHECK(experiment.params.step_size == doctest::Approx(1e-2 / 16.0));
}
