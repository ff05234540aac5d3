#pragma once

#include <cstddef>
#include <cstdint>

// Dense inner-loop kernels used on the per-arrival scoring path. Every kernel
// has a scalar reference implementation plus SIMD variants (AVX2 on x86-64,
// NEON on aarch64) selected at runtime. The scalar versions are the ground
// truth the SIMD variants are equivalence-tested against.
namespace fairloop::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// Backend supported by the running CPU/build.
bool backend_available(Backend b);

// Currently dispatched backend. Defaults to the widest available one.
Backend active_backend();

// Force a specific backend. Returns false (and leaves the dispatch unchanged)
// if the backend is not available. Not safe to call concurrently with kernel
// invocations.
bool set_backend(Backend b);

// Restore the auto-detected default.
void reset_backend();

// out = a . b
double dot(const double* a, const double* b, std::size_t n);

// x^T m x for a row-major d x d matrix.
double quad_form(const double* m, const double* x, std::size_t d);

// out[i] = item_emb[i, :] . user_emb for n_items contiguous rows.
void score_items(const double* item_emb, std::size_t n_items, std::size_t d,
                 const double* user_emb, double* out);

// out[i] = vecs[i, :]^T m vecs[i, :] with one shared d x d matrix.
void quad_forms_shared(const double* vecs, std::size_t n, std::size_t d,
                       const double* m, double* out);

// out[i] = x^T mats[i] x with a d x d matrix per row (contiguous d*d blocks).
void quad_forms_per_matrix(const double* mats, std::size_t n, std::size_t d,
                           const double* x, double* out);

// out[i] = s_hat[i] * inv_t - provider_cost[provider_of[i]] + bonus[i]
void combine_rewards(std::size_t n, const double* s_hat, double inv_t,
                     const double* bonus, const double* provider_cost,
                     const std::int32_t* provider_of, double* out);

// Scalar reference implementations, always available regardless of the active
// backend; used directly by equivalence tests.
namespace ref {
double dot(const double* a, const double* b, std::size_t n);
double quad_form(const double* m, const double* x, std::size_t d);
void score_items(const double* item_emb, std::size_t n_items, std::size_t d,
                 const double* user_emb, double* out);
void quad_forms_shared(const double* vecs, std::size_t n, std::size_t d,
                       const double* m, double* out);
void quad_forms_per_matrix(const double* mats, std::size_t n, std::size_t d,
                           const double* x, double* out);
void combine_rewards(std::size_t n, const double* s_hat, double inv_t,
                     const double* bonus, const double* provider_cost,
                     const std::int32_t* provider_of, double* out);
}  // namespace ref

}  // namespace fairloop::kernels
