#pragma once

#include <span>
#include <vector>

#include "fairloop/catalog.hpp"

namespace fairloop {

// Episode-local state of the max-min fairness dual. Owned by a single episode
// loop; reset() restores the start-of-episode values (mu = 0, zero momentum,
// full budgets).
struct DualState {
  std::vector<double> mu;
  std::vector<double> g_momentum;
  std::vector<double> beta_remaining;
  double lambda_tradeoff = 0.5;
  double step_size = 1e-2;      // applied as mu -= step_size * g / gamma^2
  double momentum_alpha = 0.3;  // in [0, 1]

  static DualState init(const Catalog& catalog, double lambda_tradeoff,
                        double step_size, double momentum_alpha);
  void reset(const Catalog& catalog);
};

// Membership in the dual feasible region: the sum of the negative parts of
// gamma .* mu must be >= -lambda. This single check covers every subset
// constraint because the minimizing subset is exactly the negative
// coordinates.
bool in_feasible_region(std::span<const double> mu,
                        std::span<const double> gamma, double lambda,
                        double slack = 0.0);

// Closed form of the conjugate max-min regularizer: gamma . mu / lambda + 1
// on the feasible region, +infinity outside it. Requires lambda > 0.
double conjugate_regularizer(std::span<const double> mu,
                             std::span<const double> gamma, double lambda);

// Exact maximizer of  min_p(e_p / gamma_p) + mu . e / lambda  over the box
// [0, beta] (negative beta components are treated as exhausted, i.e. 0).
// Coordinates with positive price are pushed to the cap; the rest sit on the
// common floor, which lands on one of the two endpoints of its range.
std::vector<double> ideal_exposure(std::span<const double> mu,
                                   std::span<const double> beta,
                                   std::span<const double> gamma,
                                   double lambda);

// Objective the exposure argmax maximizes; exposed for tests and diagnostics.
double exposure_objective(std::span<const double> e,
                          std::span<const double> mu,
                          std::span<const double> gamma, double lambda);

// g = alpha * g_tilde + (1 - alpha) * g_prev
std::vector<double> momentum_gradient(std::span<const double> g_tilde,
                                      std::span<const double> g_prev,
                                      double momentum_alpha);

// Euclidean projection in gamma-weighted coordinates onto the feasible
// region: minimizes sum_p (gamma_p mu_p - gamma_p mu_raw_p)^2. Feasible
// inputs come back unchanged; infeasible ones have their negative weighted
// coordinates lifted by a common water-filling shift (clipped at zero) until
// the negative-part sum equals -lambda.
std::vector<double> project_to_feasible(std::span<const double> mu_raw,
                                        std::span<const double> gamma,
                                        double lambda);

// Mirror-descent step on the dual variable: the unconstrained minimizer
// mu_p - step_size * g_p / gamma_p^2, projected back onto the feasible
// region. Updates state.mu in place.
void dual_step(DualState& state, std::span<const double> g,
               std::span<const double> gamma);

// beta -= realized exposure. May go negative only in the step where the mask
// fallback fired.
void consume_resources(DualState& state, std::span<const double> e_realized);

}  // namespace fairloop
