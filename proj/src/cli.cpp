#include "fairloop/cli.hpp"

#include <CLI11.hpp>
#include <fmt/core.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "fairloop/kernels.hpp"
#include "fairloop/metrics.hpp"
#include "fairloop/offline.hpp"

namespace fairloop {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using steady_clock = std::chrono::steady_clock;

namespace {

std::int64_t elapsed_ms(steady_clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             steady_clock::now() - start)
      .count();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

kernels::Backend parse_backend(const std::string& name,
                               std::vector<std::string>& errors) {
  if (name == "auto") return kernels::active_backend();
  for (kernels::Backend b : {kernels::Backend::scalar, kernels::Backend::avx2,
                             kernels::Backend::neon}) {
    if (name == kernels::backend_name(b)) return b;
  }
  errors.push_back(fmt::format("key 'backend': unknown backend '{}'", name));
  return kernels::Backend::scalar;
}

struct RunResult {
  std::string policy;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  int ranking_size = 0;
  int batch_size = 0;
  double ctr = 0.0;
  double mmf = 0.0;
  double r = 0.0;
  double mean_regret = 0.0;
  std::int64_t wall_ms = 0;
  std::string jsonl;  // one line per episode
};

RunResult execute_run(const ExperimentConfig& config,
                      const std::string& manifest_name) {
  const auto start = steady_clock::now();
  const ExperimentTrace trace = run_experiment(config);

  RunResult result;
  result.policy = policy_name(config.policy);
  result.seed = config.seed;
  result.lambda = config.lambda_tradeoff;
  result.ranking_size = config.ranking_size;
  result.batch_size = config.batch_size;

  const MetricsReport& last = trace.reports.back();
  result.ctr = last.ctr_at_k;
  result.mmf = last.mmf_at_k;
  result.r = last.r_lambda_at_k;
  double regret_sum = 0.0;
  for (const MetricsReport& report : trace.reports) regret_sum += report.regret;
  result.mean_regret = regret_sum / static_cast<double>(trace.reports.size());

  std::string jsonl;
  for (const MetricsReport& report : trace.reports) {
    ordered_json record;
    record["manifest"] = manifest_name;
    record["policy"] = result.policy;
    record["seed"] = result.seed;
    record["lambda"] = result.lambda;
    record["episode"] = report.episode;
    record["ctr"] = report.ctr_at_k;
    record["mmf"] = report.mmf_at_k;
    record["r_lambda"] = report.r_lambda_at_k;
    record["lowest_exposure"] = report.lowest_exposure;
    record["regret"] = report.regret;
    record["provider_exposure"] = report.provider_exposure;
    jsonl += record.dump();
    jsonl += '\n';
  }
  result.jsonl = std::move(jsonl);
  result.wall_ms = elapsed_ms(start);
  return result;
}

std::string summary_header() {
  return "policy,seed,lambda,K,T,ctr,mmf,r,regret,wall_ms\n";
}

std::string summary_row(const RunResult& r) {
  return fmt::format("{},{},{:.17g},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                     r.policy, r.seed, r.lambda, r.ranking_size, r.batch_size,
                     r.ctr, r.mmf, r.r, r.mean_regret, r.wall_ms);
}

// Fully resolved experiment parameters, defaults included.
ordered_json resolved_config(const ExperimentConfig& experiment) {
  ordered_json resolved;
  resolved["policy"] = policy_name(experiment.policy);
  resolved["seed"] = experiment.seed;
  resolved["n_arrivals"] = experiment.n_arrivals;
  resolved["batch_size"] = experiment.batch_size;
  resolved["ranking_size"] = experiment.ranking_size;
  resolved["lambda"] = experiment.lambda_tradeoff;
  resolved["n_users"] = experiment.world.n_users;
  resolved["n_items"] = experiment.world.n_items;
  resolved["n_providers"] = experiment.world.n_providers;
  resolved["true_dim"] = experiment.world.true_dim;
  resolved["skew"] = experiment.world.skew;
  resolved["dim"] = experiment.model_dim;
  resolved["lambda_u"] = experiment.model_lambda_u;
  resolved["lambda_i"] = experiment.model_lambda_i;
  resolved["sigma"] = experiment.params.ucb.sigma;
  resolved["q"] = experiment.params.ucb.q;
  resolved["eps_q"] = experiment.params.ucb.eps_q;
  resolved["step_size"] = experiment.params.step_size;
  resolved["momentum_alpha"] = experiment.params.momentum_alpha;
  resolved["mask_penalty"] = experiment.params.mask_penalty;
  resolved["exploration_scale"] = experiment.params.exploration_scale;
  resolved["k_neighbor_k"] = experiment.params.k_neighbor_k;
  resolved["richness"] = experiment.richness > 0.0
                             ? experiment.richness
                             : default_richness(experiment.world.n_providers);
  if (experiment.gamma_override) resolved["gamma"] = *experiment.gamma_override;
  return resolved;
}

ordered_json manifest_base(const std::string& command,
                           const KeyValueConfig& config,
                           const ExperimentConfig& experiment) {
  ordered_json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["command"] = command;
  ordered_json snapshot = ordered_json::object();
  for (const auto& [key, value] : config.entries()) snapshot[key] = value;
  manifest["config"] = snapshot;
  manifest["resolved"] = resolved_config(experiment);
  manifest["kernel_backend"] =
      kernels::backend_name(kernels::active_backend());
  return manifest;
}

// Runs the configs with a small worker pool; results land at their index.
std::vector<RunResult> run_parallel(const std::vector<ExperimentConfig>& runs,
                                    const std::string& manifest_name,
                                    int max_threads) {
  std::vector<RunResult> results(runs.size());
  std::atomic<std::size_t> cursor{0};
  const int workers = std::max(
      1, std::min<int>(max_threads, static_cast<int>(runs.size())));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t index = cursor.fetch_add(1);
        if (index >= runs.size() || failed.load()) return;
        try {
          results[index] = execute_run(runs[index], manifest_name);
        } catch (const std::exception& e) {
          std::scoped_lock lock(error_mutex);
          failed.store(true);
          error_message = e.what();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw std::runtime_error(error_message);
  return results;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::uint64_t lo = std::stoull(text.substr(0, dots));
    const std::uint64_t hi = std::stoull(text.substr(dots + 2));
    if (hi < lo) throw std::runtime_error("seed range is empty");
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) seeds.push_back(std::stoull(field));
  if (seeds.empty()) throw std::runtime_error("no seeds given");
  return seeds;
}

OfflineInstance instance_from_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
  const auto doc = nlohmann::json::parse(in);

  OfflineInstance instance;
  const auto provider_of = doc.at("provider_of").get<std::vector<std::int32_t>>();
  const int ranking_size = doc.value("ranking_size", 1);
  instance.horizon = doc.at("horizon").get<int>();
  instance.lambda_tradeoff = doc.value("lambda", 0.5);

  if (doc.contains("gamma")) {
    instance.catalog = build_catalog_with_gamma(
        provider_of, ranking_size, instance.horizon,
        doc.at("gamma").get<std::vector<double>>());
  } else {
    int n_providers = 0;
    for (std::int32_t p : provider_of) n_providers = std::max(n_providers, p + 1);
    const double richness = doc.value("richness", default_richness(n_providers));
    instance.catalog = build_catalog(provider_of, ranking_size,
                                     instance.horizon, richness);
  }

  for (const auto& row : doc.at("true_scores")) {
    if (static_cast<int>(row.size()) != instance.catalog.n_items)
      throw std::runtime_error("true_scores row width != item count");
    for (const auto& v : row) instance.true_scores.push_back(v.get<double>());
  }
  if (static_cast<int>(instance.true_scores.size()) !=
      instance.horizon * instance.catalog.n_items)
    throw std::runtime_error("true_scores must have `horizon` rows");
  return instance;
}

int command_simulate(const std::string& config_path,
                     std::optional<std::uint64_t> seed_override,
                     const std::string& out_dir, bool quiet) {
  KeyValueConfig config = KeyValueConfig::parse_file(config_path);
  std::vector<std::string> errors;
  ExperimentConfig experiment = experiment_from_config(config, errors);
  if (!errors.empty()) {
    for (const std::string& e : errors) fmt::print(stderr, "config error: {}\n", e);
    return 2;
  }
  if (seed_override) experiment.seed = *seed_override;

  const fs::path dir(out_dir);
  fs::create_directories(dir);
  const auto start = steady_clock::now();
  const RunResult result = execute_run(experiment, "manifest.json");

  write_text(dir / "episodes.jsonl", result.jsonl);
  write_text(dir / "summary.csv", summary_header() + summary_row(result));

  ordered_json manifest = manifest_base("simulate", config, experiment);
  manifest["seeds"] = {experiment.seed};
  manifest["outputs"] = {"episodes.jsonl", "summary.csv"};
  manifest["wall_ms"] = elapsed_ms(start);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  if (!quiet) fmt::print("{}", summary_header() + summary_row(result));
  return 0;
}

struct OracleFileArgs {
  std::string scores_path, providers_path, gamma_list;
  int ranking_size = 1;
  double lambda = 0.5;
  double richness = 0.0;
};

// Instance assembled from a dense score file (one row per arrival) plus a
// provider map; budgets come from --gamma or the proportional rule.
OfflineInstance instance_from_files(const OracleFileArgs& args) {
  const ProviderTable providers = load_provider_map(args.providers_path);
  const int n_items = static_cast<int>(providers.item_ids.size());

  // Probe the row count first; each row is one arrival.
  std::ifstream in(args.scores_path);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", args.scores_path));
  int horizon = 0;
  for (std::string line; std::getline(in, line);) {
    bool blank = line.find_first_not_of(" \t\r\n") == std::string::npos;
    if (!blank && line.rfind("user_id", 0) != 0) ++horizon;
  }
  const ScoreMatrix matrix = load_score_matrix(args.scores_path, horizon, n_items);

  OfflineInstance instance;
  instance.horizon = horizon;
  instance.lambda_tradeoff = args.lambda;
  instance.true_scores = matrix.data;
  if (!args.gamma_list.empty()) {
    std::vector<double> gamma;
    std::stringstream ss(args.gamma_list);
    for (std::string field; std::getline(ss, field, ',');)
      gamma.push_back(std::stod(field));
    instance.catalog = build_catalog_with_gamma(providers.provider_of,
                                                args.ranking_size, horizon,
                                                std::move(gamma));
  } else {
    const int n_providers =
        static_cast<int>(providers.provider_ids.size());
    const double richness =
        args.richness > 0.0 ? args.richness : default_richness(n_providers);
    instance.catalog = build_catalog(providers.provider_of, args.ranking_size,
                                     horizon, richness);
  }
  if (matrix.clamped > 0)
    fmt::print(stderr, "note: {} score(s) clamped into [0, 1]\n", matrix.clamped);
  return instance;
}

int command_oracle(const std::string& instance_path, const OracleFileArgs& files,
                   const std::string& trace_path, const std::string& out_path) {
  const OfflineInstance instance = instance_path.empty()
                                       ? instance_from_files(files)
                                       : instance_from_json(instance_path);
  const auto solution = solve_offline_optimum(instance);
  if (!solution) {
    fmt::print("R_OPT: budget constraint infeasible\n");
    return 3;
  }
  fmt::print("R_OPT = {:.6g}\n", solution->r_opt);

  ordered_json out;
  out["r_opt"] = solution->r_opt;
  out["decisions"] = solution->decisions;

  if (!trace_path.empty()) {
    std::ifstream in(trace_path);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", trace_path));
    const auto doc = nlohmann::json::parse(in);
    const auto decisions =
        doc.at("decisions").get<std::vector<std::vector<std::int32_t>>>();
    const double realized = realized_objective(instance, decisions);
    const double gap = regret(realized, solution->r_opt);
    fmt::print("realized = {:.6g}\nregret = {:.6g}\n", realized, gap);
    out["realized"] = realized;
    out["regret"] = gap;
  }
  if (!out_path.empty()) write_text(out_path, out.dump(2) + "\n");
  return 0;
}

int command_ablate(const std::string& config_path, const std::string& policies_arg,
                   const std::string& seeds_arg, const std::string& out_dir,
                   int jobs) {
  KeyValueConfig config = KeyValueConfig::parse_file(config_path);
  std::vector<std::string> errors;
  const ExperimentConfig base = experiment_from_config(config, errors);
  if (!errors.empty()) {
    for (const std::string& e : errors) fmt::print(stderr, "config error: {}\n", e);
    return 2;
  }

  std::vector<PolicyId> policies;
  {
    std::stringstream ss(policies_arg);
    std::string field;
    while (std::getline(ss, field, ',')) policies.push_back(parse_policy_id(field));
  }
  const std::vector<std::uint64_t> seeds =
      seeds_arg.empty() ? std::vector<std::uint64_t>{base.seed}
                        : parse_seed_list(seeds_arg);

  std::vector<ExperimentConfig> runs;
  for (PolicyId policy : policies) {
    for (std::uint64_t seed : seeds) {
      ExperimentConfig run = base;
      run.policy = policy;
      run.seed = seed;
      runs.push_back(run);
    }
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir / "runs");
  const auto start = steady_clock::now();
  const std::vector<RunResult> results =
      run_parallel(runs, "../manifest.json", jobs);

  std::string summary = summary_header();
  ordered_json outputs = ordered_json::array();
  for (const RunResult& result : results) {
    const std::string name =
        fmt::format("runs/{}_seed{}.jsonl", result.policy, result.seed);
    write_text(dir / name, result.jsonl);
    outputs.push_back(name);
    summary += summary_row(result);
  }
  write_text(dir / "summary.csv", summary);
  outputs.push_back("summary.csv");

  ordered_json manifest = manifest_base("ablate", config, base);
  manifest["seeds"] = seeds;
  manifest["outputs"] = outputs;
  manifest["wall_ms"] = elapsed_ms(start);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  fmt::print("{}", summary);
  return 0;
}

int command_sweep(const std::string& config_path, const std::string& lambdas_arg,
                  const std::string& seeds_arg, const std::string& out_dir,
                  int jobs) {
  KeyValueConfig config = KeyValueConfig::parse_file(config_path);
  std::vector<std::string> errors;
  const ExperimentConfig base = experiment_from_config(config, errors);
  if (!errors.empty()) {
    for (const std::string& e : errors) fmt::print(stderr, "config error: {}\n", e);
    return 2;
  }

  std::vector<double> lambdas;
  if (lambdas_arg.empty()) {
    // log-spaced default grid over [1e-3, 1]
    for (double v : {1e-3, 3.16e-3, 1e-2, 3.16e-2, 1e-1, 3.16e-1, 1.0})
      lambdas.push_back(v);
  } else {
    std::stringstream ss(lambdas_arg);
    std::string field;
    while (std::getline(ss, field, ',')) lambdas.push_back(std::stod(field));
  }
  const std::vector<std::uint64_t> seeds =
      seeds_arg.empty() ? std::vector<std::uint64_t>{base.seed}
                        : parse_seed_list(seeds_arg);

  std::vector<ExperimentConfig> runs;
  for (double lambda : lambdas) {
    for (std::uint64_t seed : seeds) {
      ExperimentConfig run = base;
      run.lambda_tradeoff = lambda;
      run.seed = seed;
      runs.push_back(run);
    }
  }

  const fs::path dir(out_dir);
  fs::create_directories(dir / "runs");
  const auto start = steady_clock::now();
  const std::vector<RunResult> results =
      run_parallel(runs, "../manifest.json", jobs);

  std::string summary = summary_header();
  ordered_json outputs = ordered_json::array();
  for (const RunResult& result : results) {
    const std::string name = fmt::format("runs/lambda{:.6g}_seed{}.jsonl",
                                         result.lambda, result.seed);
    write_text(dir / name, result.jsonl);
    outputs.push_back(name);
    summary += summary_row(result);
  }
  write_text(dir / "summary.csv", summary);
  outputs.push_back("summary.csv");

  ordered_json manifest = manifest_base("sweep", config, base);
  manifest["seeds"] = seeds;
  manifest["lambdas"] = lambdas;
  manifest["outputs"] = outputs;
  manifest["wall_ms"] = elapsed_ms(start);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  fmt::print("{}", summary);
  return 0;
}

int command_ingest(const std::string& interactions_path,
                   const std::string& providers_path, int min_degree,
                   const std::string& out_dir) {
  const auto start = steady_clock::now();
  const auto table = load_interactions(interactions_path);
  const auto providers = load_provider_map(providers_path);
  const PreprocessResult result = preprocess(table, providers, min_degree);

  const fs::path dir(out_dir);
  fs::create_directories(dir);

  std::string provider_csv = "item_id,provider_id\n";
  for (std::size_t i = 0; i < result.item_ids.size(); ++i)
    provider_csv += fmt::format("{},{}\n", result.item_ids[i],
                                result.provider_ids[result.provider_of[i]]);
  write_text(dir / "providers.csv", provider_csv);

  const auto dump_rows = [&](const std::vector<PreprocessResult::Row>& rows) {
    std::string csv = "user_id,item_id,click,timestamp\n";
    for (const auto& row : rows)
      csv += fmt::format("{},{},{},{:.17g}\n", result.user_ids[row.user],
                         result.item_ids[row.item], row.click, row.timestamp);
    return csv;
  };
  write_text(dir / "train.csv", dump_rows(result.train));
  write_text(dir / "eval.csv", dump_rows(result.eval));

  ordered_json stats;
  stats["users"] = result.user_ids.size();
  stats["items"] = result.item_ids.size();
  stats["providers"] = result.provider_ids.size();
  stats["train_rows"] = result.train.size();
  stats["eval_rows"] = result.eval.size();
  stats["removed_users"] = result.removed_users;
  stats["removed_items"] = result.removed_items;
  stats["removed_providers"] = result.removed_providers;
  write_text(dir / "stats.json", stats.dump(2) + "\n");

  ordered_json manifest;
  manifest["artifact_version"] = kArtifactVersion;
  manifest["command"] = "ingest";
  manifest["inputs"] = {interactions_path, providers_path};
  manifest["min_degree"] = min_degree;
  manifest["outputs"] = {"providers.csv", "train.csv", "eval.csv", "stats.json"};
  manifest["wall_ms"] = elapsed_ms(start);
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  fmt::print("{}", stats.dump(2) + "\n");
  return 0;
}

}  // namespace

ExperimentConfig experiment_from_config(KeyValueConfig& config,
                                        std::vector<std::string>& errors) {
  ExperimentConfig experiment;

  experiment.n_arrivals = config.get_int("n_arrivals", 4096);
  experiment.batch_size = static_cast<int>(config.get_int("batch_size", 256));
  experiment.ranking_size = static_cast<int>(config.get_int("ranking_size", 10));
  experiment.lambda_tradeoff = config.get_double("lambda", 0.5);
  experiment.seed = static_cast<std::uint64_t>(config.get_int("seed", 1));

  experiment.world.n_users = static_cast<int>(config.get_int("n_users", 128));
  experiment.world.n_items = static_cast<int>(config.get_int("n_items", 512));
  experiment.world.n_providers =
      static_cast<int>(config.get_int("n_providers", 16));
  experiment.world.true_dim = static_cast<int>(config.get_int(
      "true_dim", config.get_int("dim", 16)));
  experiment.world.skew = config.get_double("skew", 1.0);

  experiment.model_dim = static_cast<int>(config.get_int("dim", 16));
  experiment.model_lambda_u = config.get_double("lambda_u", 1.0);
  experiment.model_lambda_i = config.get_double("lambda_i", 1.0);

  experiment.params.ucb.sigma = config.get_double("sigma", 0.1);
  experiment.params.ucb.q = config.get_double("q", 0.8);
  experiment.params.ucb.eps_q = config.get_double("eps_q", 0.01);
  experiment.params.ucb.lambda_u = experiment.model_lambda_u;
  experiment.params.ucb.lambda_i = experiment.model_lambda_i;
  experiment.params.ucb.dim = experiment.model_dim;

  const double step_scale = config.get_double("step_scale", 1e-2);
  experiment.params.step_size =
      step_scale / std::sqrt(static_cast<double>(
                       std::max(1, experiment.batch_size)));
  experiment.params.momentum_alpha = config.get_double("momentum_alpha", 0.3);
  experiment.params.mask_penalty = config.get_double("mask_penalty", 1e3);
  // Weight on the confidence radius in the assembled reward; 1 adds the raw
  // radius, "1/T" keeps it at the scale of the 1/T-scaled accuracy term.
  const std::string exploration =
      config.get_string("exploration_scale", "1");
  if (exploration == "1/T") {
    experiment.params.exploration_scale =
        1.0 / std::max(1, experiment.batch_size);
  } else {
    try {
      experiment.params.exploration_scale = std::stod(exploration);
    } catch (const std::exception&) {
      errors.push_back(fmt::format(
          "key 'exploration_scale': '{}' is not a number or '1/T'",
          exploration));
    }
  }
  if (experiment.params.exploration_scale < 0.0)
    errors.push_back("key 'exploration_scale': must be >= 0");
  experiment.params.k_neighbor_k =
      static_cast<int>(config.get_int("k_neighbor_k", 3));
  experiment.params.lambda_tradeoff = experiment.lambda_tradeoff;

  experiment.richness = config.get_double("richness", 0.0);
  if (config.has("gamma"))
    experiment.gamma_override = config.get_double_list("gamma", {});

  const std::string policy = config.get_string("policy", "ltp_mmf");
  try {
    experiment.policy = parse_policy_id(policy);
  } catch (const std::exception& e) {
    errors.push_back(fmt::format("key 'policy': {}", e.what()));
  }

  const std::string backend = config.get_string("backend", "auto");
  const kernels::Backend requested = parse_backend(backend, errors);
  if (backend != "auto" && !kernels::set_backend(requested))
    errors.push_back(
        fmt::format("key 'backend': '{}' not available on this host", backend));

  // Range checks, reported together.
  if (experiment.batch_size < 1)
    errors.push_back("key 'batch_size': must be >= 1");
  if (experiment.ranking_size < 1)
    errors.push_back("key 'ranking_size': must be >= 1");
  if (experiment.ranking_size > experiment.world.n_items)
    errors.push_back("key 'ranking_size': larger than n_items");
  if (experiment.n_arrivals < experiment.batch_size)
    errors.push_back("key 'n_arrivals': needs at least one full episode");
  if (experiment.lambda_tradeoff < 0.0)
    errors.push_back("key 'lambda': must be >= 0");
  if (experiment.world.n_providers > experiment.world.n_items)
    errors.push_back("key 'n_providers': larger than n_items");
  if (!(experiment.params.ucb.sigma > 0.0) || !(experiment.params.ucb.sigma < 1.0))
    errors.push_back("key 'sigma': must be in (0, 1)");
  if (!(experiment.params.ucb.q > 0.0) ||
      !(experiment.params.ucb.q + experiment.params.ucb.eps_q < 1.0))
    errors.push_back("key 'q'/'eps_q': need 0 < q and q + eps_q < 1");
  if (!(step_scale > 0.0)) errors.push_back("key 'step_scale': must be > 0");
  if (experiment.params.momentum_alpha < 0.0 ||
      experiment.params.momentum_alpha > 1.0)
    errors.push_back("key 'momentum_alpha': must be in [0, 1]");
  if (experiment.model_dim < 1) errors.push_back("key 'dim': must be >= 1");

  for (const std::string& key : config.unread_keys())
    errors.push_back(fmt::format("unknown key '{}'", key));
  for (const std::string& e : config.errors()) errors.push_back(e);
  return experiment;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"feedback-loop simulator and fair-ranking policy suite"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", seeds_arg, policies_arg =
      "ltp_mmf,ltp_mmf_no_ucb,ltp_mmf_no_fair,topk,k_neighbor";
  std::string lambdas_arg, instance_path, trace_path, oracle_out;
  std::string interactions_path, providers_path;
  std::uint64_t seed_value = 0;
  bool seed_given = false;
  int min_degree = 5;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs < 1) jobs = 2;

  bool quiet = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run one experiment");
  simulate->add_option("--config", config_path, "key-value config file")
      ->required();
  simulate->add_option("--seed", seed_value, "override the config seed")
      ->each([&](const std::string&) { seed_given = true; });
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--quiet", quiet, "suppress the summary echo");

  OracleFileArgs oracle_files;
  CLI::App* oracle = app.add_subcommand("oracle", "solve a tiny offline instance");
  CLI::Option* inst_opt = oracle->add_option("--instance", instance_path, "instance JSON");
  CLI::Option* scores_opt = oracle->add_option(
      "--scores", oracle_files.scores_path, "dense score CSV, one row per arrival");
  oracle->add_option("--providers", oracle_files.providers_path,
                     "item-provider CSV (with --scores)");
  oracle->add_option("--ranking-size", oracle_files.ranking_size, "K");
  oracle->add_option("--lambda", oracle_files.lambda, "trade-off coefficient");
  oracle->add_option("--gamma", oracle_files.gamma_list, "explicit budgets");
  oracle->add_option("--richness", oracle_files.richness, "budget-rule factor");
  inst_opt->excludes(scores_opt);
  oracle->add_option("--trace", trace_path, "decision trace JSON to score");
  oracle->add_option("--out", oracle_out, "write results as JSON");

  CLI::App* ablate = app.add_subcommand("ablate", "policy grid over seeds");
  ablate->add_option("--config", config_path)->required();
  ablate->add_option("--policies", policies_arg, "comma-separated policy ids");
  ablate->add_option("--seeds", seeds_arg, "e.g. 1,2,3 or 1..10");
  ablate->add_option("--out", out_dir);
  ablate->add_option("--jobs", jobs, "parallel runs");

  CLI::App* sweep = app.add_subcommand("sweep", "trade-off coefficient sweep");
  sweep->add_option("--config", config_path)->required();
  sweep->add_option("--lambdas", lambdas_arg, "comma-separated values");
  sweep->add_option("--seeds", seeds_arg);
  sweep->add_option("--out", out_dir);
  sweep->add_option("--jobs", jobs);

  CLI::App* ingest = app.add_subcommand("ingest", "preprocess a dataset");
  ingest->add_option("--interactions", interactions_path, "interaction CSV")
      ->required();
  ingest->add_option("--providers", providers_path, "item-provider CSV")
      ->required();
  ingest->add_option("--min-degree", min_degree, "filter threshold");
  ingest->add_option("--out", out_dir);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (simulate->parsed())
      return command_simulate(config_path,
                              seed_given ? std::optional(seed_value)
                                         : std::nullopt,
                              out_dir, quiet);
    if (oracle->parsed()) {
      if (instance_path.empty() &&
          (oracle_files.scores_path.empty() || oracle_files.providers_path.empty())) {
        fmt::print(stderr, "error: oracle needs --instance, or --scores with --providers\n");
        return 2;
      }
      return command_oracle(instance_path, oracle_files, trace_path, oracle_out);
    }
    if (ablate->parsed())
      return command_ablate(config_path, policies_arg, seeds_arg, out_dir, jobs);
    if (sweep->parsed())
      return command_sweep(config_path, lambdas_arg, seeds_arg, out_dir, jobs);
    if (ingest->parsed())
      return command_ingest(interactions_path, providers_path, min_degree, out_dir);
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 1;
}

}  // namespace fairloop
