#pragma once

#include <cstdint>
#include <span>

#include "fairloop/embeddings.hpp"

namespace fairloop {

// Exploration-bonus parameters. The geometric terms require q + eps_q < 1,
// otherwise the bias bounds diverge.
struct UcbParams {
  double sigma = 0.1;   // confidence level, in (0, 1)
  double q = 0.8;       // linear-convergence rate, in (0, 1)
  double eps_q = 0.01;  // convergence slack, >= 0
  double lambda_u = 1.0;
  double lambda_i = 1.0;
  int dim = 16;

  void validate() const;
};

struct BiasBounds {
  double alpha;  // user-side bias bound
  double beta;   // item-side bias bound
};

// alpha_t = sqrt(lambda_u) + 2(q+eps)(1-(q+eps)^t)/(1-q-eps)
//         + sqrt(d * ln((lambda_u*d + t)/(lambda_u*d*sigma)))
// beta_t analogously with lambda_i. Nondecreasing in t, finite for t >= 0.
BiasBounds bias_bounds(std::int64_t t, const UcbParams& params);

// Collaborative error bound C_t = (q+eps)^t, in (0, 1], strictly decreasing.
double collaborative_bound(std::int64_t t, const UcbParams& params);

// Exploration bonus for one user-item pair at episode index t:
//   alpha_t * (||v_i||_{A_u^-1} + C_t/2) + beta_t * (||v_u||_{C_i^-1} + C_t/2)
// The bias bounds use the episode counter; the Mahalanobis norms use the live
// ridge statistics. Always nonnegative.
double confidence_radius(const EmbeddingState& state, int u, int i,
                         std::int64_t t, const UcbParams& params);

// Bonus of user u against every item (out.size() == n_items).
void confidence_radii(const EmbeddingState& state, int u, std::int64_t t,
                      const UcbParams& params, std::span<double> out);

}  // namespace fairloop
