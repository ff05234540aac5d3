#include "fairloop/ucb.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fairloop/kernels.hpp"

namespace fairloop {

void UcbParams::validate() const {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::invalid_argument("ucb: sigma must be in (0, 1)");
  if (!(q > 0.0) || !(q < 1.0))
    throw std::invalid_argument("ucb: q must be in (0, 1)");
  if (eps_q < 0.0) throw std::invalid_argument("ucb: eps_q must be >= 0");
  if (!(q + eps_q < 1.0))
    throw std::invalid_argument("ucb: q + eps_q must be < 1");
  if (dim < 1) throw std::invalid_argument("ucb: dim must be >= 1");
  if (!(lambda_u > 0.0) || !(lambda_i > 0.0))
    throw std::invalid_argument("ucb: ridge weights must be positive");
}

namespace {

double bias_bound_for(double lambda, std::int64_t t, const UcbParams& p) {
  const double rate = p.q + p.eps_q;
  const double td = static_cast<double>(t);
  const double geometric =
      2.0 * rate * (1.0 - std::pow(rate, td)) / (1.0 - rate);
  const double ld = lambda * static_cast<double>(p.dim);
  const double log_term =
      std::sqrt(static_cast<double>(p.dim) * std::log((ld + td) / (ld * p.sigma)));
  return std::sqrt(lambda) + geometric + log_term;
}

}  // namespace

BiasBounds bias_bounds(std::int64_t t, const UcbParams& params) {
  params.validate();
  if (t < 0) throw std::invalid_argument("ucb: t must be >= 0");
  return {bias_bound_for(params.lambda_u, t, params),
          bias_bound_for(params.lambda_i, t, params)};
}

double collaborative_bound(std::int64_t t, const UcbParams& params) {
  params.validate();
  if (t < 0) throw std::invalid_argument("ucb: t must be >= 0");
  return std::pow(params.q + params.eps_q, static_cast<double>(t));
}

double confidence_radius(const EmbeddingState& state, int u, int i,
                         std::int64_t t, const UcbParams& params) {
  const BiasBounds bounds = bias_bounds(t, params);
  const double half_c = 0.5 * collaborative_bound(t, params);
  const int d = state.dim();

  const double item_var = kernels::quad_form(state.user_gram_inverse(u).data(),
                                             state.item_embedding(i).data(), d);
  const double user_var = kernels::quad_form(state.item_gram_inverse(i).data(),
                                             state.user_embedding(u).data(), d);
  return bounds.alpha * (std::sqrt(std::max(item_var, 0.0)) + half_c) +
         bounds.beta * (std::sqrt(std::max(user_var, 0.0)) + half_c);
}

void confidence_radii(const EmbeddingState& state, int u, std::int64_t t,
                      const UcbParams& params, std::span<double> out) {
  const std::size_t n = static_cast<std::size_t>(state.n_items());
  if (out.size() != n)
    throw std::invalid_argument("ucb: output span size mismatch");
  const BiasBounds bounds = bias_bounds(t, params);
  const double half_c = 0.5 * collaborative_bound(t, params);
  const int d = state.dim();

  // ||v_i||_{A_u^-1} for all items shares one matrix; ||v_u||_{C_i^-1} walks
  // the per-item inverse blocks.
  std::vector<double> item_var(n), user_var(n);
  kernels::quad_forms_shared(state.item_embeddings_data(), n, d,
                             state.user_gram_inverse(u).data(), item_var.data());
  kernels::quad_forms_per_matrix(state.item_gram_inverses_data(), n, d,
                                 state.user_embedding(u).data(), user_var.data());
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = bounds.alpha * (std::sqrt(std::max(item_var[i], 0.0)) + half_c) +
             bounds.beta * (std::sqrt(std::max(user_var[i], 0.0)) + half_c);
  }
}

}  // namespace fairloop
