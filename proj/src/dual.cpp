#include "fairloop/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairloop {

namespace {

void check_sizes(std::span<const double> a, std::span<const double> b,
                 const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(what);
}

}  // namespace

DualState DualState::init(const Catalog& catalog, double lambda_tradeoff,
                          double step_size, double momentum_alpha) {
  if (lambda_tradeoff < 0.0)
    throw std::invalid_argument("dual: lambda_tradeoff must be >= 0");
  if (!(step_size > 0.0))
    throw std::invalid_argument("dual: step_size must be > 0");
  if (momentum_alpha < 0.0 || momentum_alpha > 1.0)
    throw std::invalid_argument("dual: momentum_alpha must be in [0, 1]");
  DualState state;
  state.lambda_tradeoff = lambda_tradeoff;
  state.step_size = step_size;
  state.momentum_alpha = momentum_alpha;
  state.reset(catalog);
  return state;
}

void DualState::reset(const Catalog& catalog) {
  mu.assign(catalog.n_providers, 0.0);
  g_momentum.assign(catalog.n_providers, 0.0);
  beta_remaining = catalog.gamma;
}

bool in_feasible_region(std::span<const double> mu,
                        std::span<const double> gamma, double lambda,
                        double slack) {
  check_sizes(mu, gamma, "dual: mu/gamma size mismatch");
  double negative_sum = 0.0;
  for (std::size_t p = 0; p < mu.size(); ++p)
    negative_sum += std::min(gamma[p] * mu[p], 0.0);
  return negative_sum >= -lambda - slack;
}

double conjugate_regularizer(std::span<const double> mu,
                             std::span<const double> gamma, double lambda) {
  if (!(lambda > 0.0))
    throw std::invalid_argument("dual: conjugate needs lambda > 0");
  if (!in_feasible_region(mu, gamma, lambda))
    return std::numeric_limits<double>::infinity();
  double dot = 0.0;
  for (std::size_t p = 0; p < mu.size(); ++p) dot += gamma[p] * mu[p];
  return dot / lambda + 1.0;
}

double exposure_objective(std::span<const double> e,
                          std::span<const double> mu,
                          std::span<const double> gamma, double lambda) {
  check_sizes(e, gamma, "dual: e/gamma size mismatch");
  check_sizes(mu, gamma, "dual: mu/gamma size mismatch");
  double floor = std::numeric_limits<double>::infinity();
  double price = 0.0;
  for (std::size_t p = 0; p < e.size(); ++p) {
    floor = std::min(floor, e[p] / gamma[p]);
    price += mu[p] * e[p];
  }
  return floor + price / lambda;
}

std::vector<double> ideal_exposure(std::span<const double> mu,
                                   std::span<const double> beta,
                                   std::span<const double> gamma,
                                   double lambda) {
  check_sizes(mu, gamma, "dual: mu/gamma size mismatch");
  check_sizes(beta, gamma, "dual: beta/gamma size mismatch");
  if (!(lambda > 0.0))
    throw std::invalid_argument("dual: ideal_exposure needs lambda > 0");
  const std::size_t n = gamma.size();

  std::vector<double> cap(n);
  double floor_max = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n; ++p) {
    cap[p] = std::max(beta[p], 0.0);
    floor_max = std::min(floor_max, cap[p] / gamma[p]);
  }

  // With the positive-price coordinates pinned at their caps, the objective
  // is linear in the common floor m, so the optimum sits at m = 0 or at the
  // largest floor the caps allow.
  auto build = [&](double m) {
    std::vector<double> e(n);
    for (std::size_t p = 0; p < n; ++p)
      e[p] = (mu[p] > 0.0) ? cap[p] : gamma[p] * m;
    return e;
  };
  std::vector<double> at_zero = build(0.0);
  std::vector<double> at_max = build(floor_max);
  const double obj_zero = exposure_objective(at_zero, mu, gamma, lambda);
  const double obj_max = exposure_objective(at_max, mu, gamma, lambda);
  return obj_max >= obj_zero ? at_max : at_zero;
}

std::vector<double> momentum_gradient(std::span<const double> g_tilde,
                                      std::span<const double> g_prev,
                                      double momentum_alpha) {
  check_sizes(g_tilde, g_prev, "dual: gradient size mismatch");
  std::vector<double> g(g_tilde.size());
  for (std::size_t p = 0; p < g.size(); ++p)
    g[p] = momentum_alpha * g_tilde[p] + (1.0 - momentum_alpha) * g_prev[p];
  return g;
}

std::vector<double> project_to_feasible(std::span<const double> mu_raw,
                                        std::span<const double> gamma,
                                        double lambda) {
  check_sizes(mu_raw, gamma, "dual: mu/gamma size mismatch");
  if (lambda < 0.0) throw std::invalid_argument("dual: lambda must be >= 0");
  const std::size_t n = gamma.size();

  std::vector<double> v(n);
  double negative_sum = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    v[p] = gamma[p] * mu_raw[p];
    negative_sum += std::min(v[p], 0.0);
  }
  if (negative_sum >= -lambda) return {mu_raw.begin(), mu_raw.end()};

  std::vector<double> mu(n);
  if (lambda == 0.0) {
    for (std::size_t p = 0; p < n; ++p)
      mu[p] = (v[p] < 0.0) ? 0.0 : mu_raw[p];
    return mu;
  }

  // In weighted coordinates this is the projection of the negative magnitudes
  // onto the l1 ball of radius lambda: every negative coordinate is lifted by
  // a common shift theta and clipped at zero.
  std::vector<double> magnitudes;
  magnitudes.reserve(n);
  for (double value : v)
    if (value < 0.0) magnitudes.push_back(-value);
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());

  double theta = 0.0;
  double prefix = 0.0;
  for (std::size_t k = 0; k < magnitudes.size(); ++k) {
    prefix += magnitudes[k];
    const double candidate = (prefix - lambda) / static_cast<double>(k + 1);
    if (magnitudes[k] > candidate) theta = candidate;
  }

  for (std::size_t p = 0; p < n; ++p) {
    const double projected = (v[p] < 0.0) ? std::min(v[p] + theta, 0.0) : v[p];
    mu[p] = projected / gamma[p];
  }
  return mu;
}

void dual_step(DualState& state, std::span<const double> g,
               std::span<const double> gamma) {
  check_sizes(g, gamma, "dual: gradient size mismatch");
  check_sizes(std::span<const double>(state.mu), gamma,
              "dual: state size mismatch");
  std::vector<double> raw(gamma.size());
  for (std::size_t p = 0; p < gamma.size(); ++p)
    raw[p] = state.mu[p] - state.step_size * g[p] / (gamma[p] * gamma[p]);
  state.mu = project_to_feasible(raw, gamma, state.lambda_tradeoff);
}

void consume_resources(DualState& state, std::span<const double> e_realized) {
  check_sizes(std::span<const double>(state.beta_remaining), e_realized,
              "dual: exposure size mismatch");
  for (std::size_t p = 0; p < e_realized.size(); ++p)
    state.beta_remaining[p] -= e_realized[p];
}

}  // namespace fairloop
