#include "fairloop/kernels.hpp"

namespace fairloop::kernels {

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double quad_form(const double* m, const double* x, std::size_t d) {
  double acc = 0.0;
  for (std::size_t r = 0; r < d; ++r) {
    double row = 0.0;
    const double* mr = m + r * d;
    for (std::size_t c = 0; c < d; ++c) row += mr[c] * x[c];
    acc += x[r] * row;
  }
  return acc;
}

void score_items(const double* item_emb, std::size_t n_items, std::size_t d,
                 const double* user_emb, double* out) {
  for (std::size_t i = 0; i < n_items; ++i)
    out[i] = dot(item_emb + i * d, user_emb, d);
}

void quad_forms_shared(const double* vecs, std::size_t n, std::size_t d,
                       const double* m, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = quad_form(m, vecs + i * d, d);
}

void quad_forms_per_matrix(const double* mats, std::size_t n, std::size_t d,
                           const double* x, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = quad_form(mats + i * d * d, x, d);
}

void combine_rewards(std::size_t n, const double* s_hat, double inv_t,
                     const double* bonus, const double* provider_cost,
                     const std::int32_t* provider_of, double* out) {
  for (std::size_t i = 0; i < n; ++i)
    out[i] = s_hat[i] * inv_t - provider_cost[provider_of[i]] + bonus[i];
}

}  // namespace ref

#if defined(__x86_64__) || defined(_M_X64)
#define FAIRLOOP_X86 1
#else
#define FAIRLOOP_X86 0
#endif

#if defined(__aarch64__)
#define FAIRLOOP_AARCH64 1
#else
#define FAIRLOOP_AARCH64 0
#endif

#if FAIRLOOP_X86
namespace avx2 {
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
}  // namespace avx2
#endif

#if FAIRLOOP_AARCH64
namespace neon {
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
}  // namespace neon
#endif

namespace {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*quad_form)(const double*, const double*, std::size_t);
  void (*score_items)(const double*, std::size_t, std::size_t, const double*,
                      double*);
  void (*quad_forms_shared)(const double*, std::size_t, std::size_t,
                            const double*, double*);
  void (*quad_forms_per_matrix)(const double*, std::size_t, std::size_t,
                                const double*, double*);
  void (*combine_rewards)(std::size_t, const double*, double, const double*,
                          const double*, const std::int32_t*, double*);
};

constexpr Vtable kScalar{ref::dot,
                         ref::quad_form,
                         ref::score_items,
                         ref::quad_forms_shared,
                         ref::quad_forms_per_matrix,
                         ref::combine_rewards};

#if FAIRLOOP_X86
constexpr Vtable kAvx2{avx2::dot,
                       avx2::quad_form,
                       avx2::score_items,
                       avx2::quad_forms_shared,
                       avx2::quad_forms_per_matrix,
                       avx2::combine_rewards};
#endif

#if FAIRLOOP_AARCH64
constexpr Vtable kNeon{neon::dot,
                       neon::quad_form,
                       neon::score_items,
                       neon::quad_forms_shared,
                       neon::quad_forms_per_matrix,
                       neon::combine_rewards};
#endif

bool cpu_has_avx2() {
#if FAIRLOOP_X86 && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend detect_backend() {
#if FAIRLOOP_AARCH64
  return Backend::neon;
#else
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
#endif
}

const Vtable* vtable_for(Backend b) {
  switch (b) {
    case Backend::scalar:
      return &kScalar;
    case Backend::avx2:
#if FAIRLOOP_X86
      return cpu_has_avx2() ? &kAvx2 : nullptr;
#else
      return nullptr;
#endif
    case Backend::neon:
#if FAIRLOOP_AARCH64
      return &kNeon;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

struct Dispatch {
  Backend backend;
  const Vtable* table;
  Dispatch() : backend(detect_backend()), table(vtable_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) { return vtable_for(b) != nullptr; }

Backend active_backend() { return dispatch().backend; }

bool set_backend(Backend b) {
  const Vtable* t = vtable_for(b);
  if (t == nullptr) return false;
  dispatch().backend = b;
  dispatch().table = t;
  return true;
}

void reset_backend() {
  dispatch().backend = detect_backend();
  dispatch().table = vtable_for(dispatch().backend);
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().table->dot(a, b, n);
}

double quad_form(const double* m, const double* x, std::size_t d) {
  return dispatch().table->quad_form(m, x, d);
}

void score_items(const double* item_emb, std::size_t n_items, std::size_t d,
                 const double* user_emb, double* out) {
  dispatch().table->score_items(item_emb, n_items, d, user_emb, out);
}

void quad_forms_shared(const double* vecs, std::size_t n, std::size_t d,
                       const double* m, double* out) {
  dispatch().table->quad_forms_shared(vecs, n, d, m, out);
}

void quad_forms_per_matrix(const double* mats, std::size_t n, std::size_t d,
                           const double* x, double* out) {
  dispatch().table->quad_forms_per_matrix(mats, n, d, x, out);
}

void combine_rewards(std::size_t n, const double* s_hat, double inv_t,
                     const double* bonus, const double* provider_cost,
                     const std::int32_t* provider_of, double* out) {
  dispatch().table->combine_rewards(n, s_hat, inv_t, bonus, provider_cost,
                                    provider_of, out);
}

}  // namespace fairloop::kernels
