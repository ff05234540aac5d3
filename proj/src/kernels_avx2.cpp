// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma on x86-64; callers reach it only after the runtime CPU check
// in kernels.cpp.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>
#include <cstdint>

namespace fairloop::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
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
  const __m256d vinv = _mm256_set1_pd(inv_t);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(provider_of + i));
    __m256d cost = _mm256_i32gather_pd(provider_cost, idx, 8);
    __m256d r = _mm256_fmadd_pd(_mm256_loadu_pd(s_hat + i), vinv,
                                _mm256_loadu_pd(bonus + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(r, cost));
  }
  for (; i < n; ++i)
    out[i] = s_hat[i] * inv_t - provider_cost[provider_of[i]] + bonus[i];
}

}  // namespace fairloop::kernels::avx2

#endif  // x86-64
