// NEON kernel variants for aarch64, mirroring the scalar reference loops.
#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>
#include <cstdint>

namespace fairloop::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  for (; i + 2 <= n; i += 2) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double quad_form(const double* m, const double* x, std::size_t d) {
  double acc = 0.0;
  for (std::size_t r = 0; r < d; ++r) acc += x[r] * dot(m + r * d, x, d);
  return acc;
}

void score_items(const double* item_emb, std::size_t n_items, std::size_t d,
                 const double* user_emb, double* out) {
  for (std::size_t i = 0; i < n_items; ++i)
    out[i] = dot(item_emb + i * d, user_emb, d);
}

void quad_forms_shared(const double* vecs, std::size_t n, std::size_t d,
                       const double* m, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = quad_form(m, vecs + i * d, d);
}

void quad_forms_per_matrix(const double* mats, std::size_t n, std::size_t d,
                           const double* x, double* out) {
  const std::size_t stride = d * d;
  for (std::size_t i = 0; i < n; ++i) out[i] = quad_form(mats + i * stride, x, d);
}

void combine_rewards(std::size_t n, const double* s_hat, double inv_t,
                     const double* bonus, const double* provider_cost,
                     const std::int32_t* provider_of, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = s_hat[i] * inv_t - provider_cost[provider_of[i]] + bonus[i];
}

}  // namespace fairloop::kernels::neon

#endif  // aarch64
