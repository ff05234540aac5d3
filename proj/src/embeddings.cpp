#include "fairloop/embeddings.hpp"

#include <fmt/core.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "fairloop/kernels.hpp"
#include "fairloop/rng.hpp"

namespace fairloop {

namespace {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<MatrixRM>;
using MapVec = Eigen::Map<Eigen::VectorXd>;
using ConstMapMat = Eigen::Map<const MatrixRM>;
using ConstMapVec = Eigen::Map<const Eigen::VectorXd>;

constexpr double kZeroSolutionNorm = 1e-12;

void fill_identity(double* m, int d, double scale) {
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) m[r * d + c] = (r == c) ? scale : 0.0;
}

void random_unit_vector(double* v, int d, Rng& rng) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int k = 0; k < d; ++k) {
      v[k] = rng.next_gaussian();
      norm2 += v[k] * v[k];
    }
  } while (norm2 < kZeroSolutionNorm);
  const double inv = 1.0 / std::sqrt(norm2);
  for (int k = 0; k < d; ++k) v[k] *= inv;
}

// Solves gram * x = rhs and writes the normalized solution into emb, unless
// the solution is numerically zero, in which case emb is left unchanged
// (normalizing the zero vector is undefined and the previous embedding keeps
// its exploration value).
void solve_and_normalize(const double* gram, const double* rhs, double* emb, int d) {
  ConstMapMat a(gram, d, d);
  ConstMapVec b(rhs, d);
  Eigen::VectorXd x = a.selfadjointView<Eigen::Lower>().llt().solve(b);
  const double norm = x.norm();
  if (norm < kZeroSolutionNorm) return;
  MapVec(emb, d) = x / norm;
}

}  // namespace

EmbeddingState::EmbeddingState(int n_users, int n_items, int dim,
                               double lambda_u, double lambda_i,
                               std::uint64_t seed)
    : n_users_(n_users),
      n_items_(n_items),
      dim_(dim),
      lambda_u_(lambda_u),
      lambda_i_(lambda_i) {
  if (n_users < 1 || n_items < 1)
    throw std::invalid_argument("embeddings: need at least one user and item");
  if (dim < 1) throw std::invalid_argument("embeddings: dim must be >= 1");
  if (!(lambda_u > 0.0) || !(lambda_i > 0.0))
    throw std::invalid_argument("embeddings: ridge weights must be positive");

  const std::size_t d = static_cast<std::size_t>(dim);
  user_emb_.resize(n_users * d);
  item_emb_.resize(n_items * d);
  user_rhs_.assign(n_users * d, 0.0);
  item_rhs_.assign(n_items * d, 0.0);
  user_gram_.resize(n_users * d * d);
  item_gram_.resize(n_items * d * d);
  user_gram_inv_.resize(n_users * d * d);
  item_gram_inv_.resize(n_items * d * d);
  user_obs_.assign(n_users, 0);
  item_obs_.assign(n_items, 0);

  for (int u = 0; u < n_users; ++u) {
    fill_identity(&user_gram_[u * d * d], dim, lambda_u);
    fill_identity(&user_gram_inv_[u * d * d], dim, 1.0 / lambda_u);
  }
  for (int i = 0; i < n_items; ++i) {
    fill_identity(&item_gram_[i * d * d], dim, lambda_i);
    fill_identity(&item_gram_inv_[i * d * d], dim, 1.0 / lambda_i);
  }

  Rng rng(derive_seed(seed, 0x1u));
  for (int u = 0; u < n_users; ++u) random_unit_vector(&user_emb_[u * d], dim, rng);
  for (int i = 0; i < n_items; ++i) random_unit_vector(&item_emb_[i * d], dim, rng);
}

void EmbeddingState::check_user(int u) const {
  if (u < 0 || u >= n_users_)
    throw std::invalid_argument(fmt::format("embeddings: user {} out of range", u));
}

void EmbeddingState::check_item(int i) const {
  if (i < 0 || i >= n_items_)
    throw std::invalid_argument(fmt::format("embeddings: item {} out of range", i));
}

double EmbeddingState::predict_score(int u, int i) const {
  check_user(u);
  check_item(i);
  return kernels::dot(&user_emb_[u * static_cast<std::size_t>(dim_)],
                      &item_emb_[i * static_cast<std::size_t>(dim_)], dim_);
}

void EmbeddingState::predict_scores(int u, std::span<double> out) const {
  check_user(u);
  if (out.size() != static_cast<std::size_t>(n_items_))
    throw std::invalid_argument("embeddings: output span size mismatch");
  kernels::score_items(item_emb_.data(), n_items_, dim_,
                       &user_emb_[u * static_cast<std::size_t>(dim_)], out.data());
}

void EmbeddingState::ingest_feedback(std::span<const FeedbackRecord> batch) {
  const std::size_t d = static_cast<std::size_t>(dim_);
  const std::size_t dd = d * d;
  std::unordered_set<int> dirty_users, dirty_items;
  std::vector<double> v_user_before(d);

  for (const FeedbackRecord& rec : batch) {
    check_user(rec.user);
    check_item(rec.item);
    if (rec.click != 0 && rec.click != 1)
      throw std::invalid_argument(
          fmt::format("embeddings: click value {} is not 0/1", rec.click));

    double* a = &user_gram_[rec.user * dd];
    double* b = &user_rhs_[rec.user * d];
    double* c = &item_gram_[rec.item * dd];
    double* r = &item_rhs_[rec.item * d];
    double* vu = &user_emb_[rec.user * d];
    double* vi = &item_emb_[rec.item * d];
    const double click = static_cast<double>(rec.click);

    // Item statistics use the user embedding as it stood when this record
    // arrived, not the one solved below.
    for (std::size_t k = 0; k < d; ++k) v_user_before[k] = vu[k];

    for (std::size_t row = 0; row < d; ++row)
      for (std::size_t col = 0; col < d; ++col)
        a[row * d + col] += vi[row] * vi[col];
    for (std::size_t k = 0; k < d; ++k) b[k] += vi[k] * click;
    solve_and_normalize(a, b, vu, dim_);

    for (std::size_t row = 0; row < d; ++row)
      for (std::size_t col = 0; col < d; ++col)
        c[row * d + col] += v_user_before[row] * v_user_before[col];
    for (std::size_t k = 0; k < d; ++k) r[k] += v_user_before[k] * click;
    solve_and_normalize(c, r, vi, dim_);

    ++user_obs_[rec.user];
    ++item_obs_[rec.item];
    dirty_users.insert(rec.user);
    dirty_items.insert(rec.item);
  }

  for (int u : dirty_users) refresh_user_inverse(u);
  for (int i : dirty_items) refresh_item_inverse(i);
}

void EmbeddingState::refresh_user_inverse(int u) {
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  ConstMapMat a(&user_gram_[u * dd], dim_, dim_);
  MapMat inv(&user_gram_inv_[u * dd], dim_, dim_);
  inv = a.selfadjointView<Eigen::Lower>().llt().solve(
      MatrixRM::Identity(dim_, dim_));
}

void EmbeddingState::refresh_item_inverse(int i) {
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  ConstMapMat c(&item_gram_[i * dd], dim_, dim_);
  MapMat inv(&item_gram_inv_[i * dd], dim_, dim_);
  inv = c.selfadjointView<Eigen::Lower>().llt().solve(
      MatrixRM::Identity(dim_, dim_));
}

std::span<const double> EmbeddingState::user_embedding(int u) const {
  check_user(u);
  return {&user_emb_[u * static_cast<std::size_t>(dim_)], static_cast<std::size_t>(dim_)};
}

std::span<const double> EmbeddingState::item_embedding(int i) const {
  check_item(i);
  return {&item_emb_[i * static_cast<std::size_t>(dim_)], static_cast<std::size_t>(dim_)};
}

std::span<const double> EmbeddingState::user_gram(int u) const {
  check_user(u);
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  return {&user_gram_[u * dd], dd};
}

std::span<const double> EmbeddingState::user_gram_inverse(int u) const {
  check_user(u);
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  return {&user_gram_inv_[u * dd], dd};
}

std::span<const double> EmbeddingState::user_rhs(int u) const {
  check_user(u);
  return {&user_rhs_[u * static_cast<std::size_t>(dim_)], static_cast<std::size_t>(dim_)};
}

std::span<const double> EmbeddingState::item_gram(int i) const {
  check_item(i);
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  return {&item_gram_[i * dd], dd};
}

std::span<const double> EmbeddingState::item_gram_inverse(int i) const {
  check_item(i);
  const std::size_t dd = static_cast<std::size_t>(dim_) * dim_;
  return {&item_gram_inv_[i * dd], dd};
}

std::span<const double> EmbeddingState::item_rhs(int i) const {
  check_item(i);
  return {&item_rhs_[i * static_cast<std::size_t>(dim_)], static_cast<std::size_t>(dim_)};
}

std::int64_t EmbeddingState::user_obs_count(int u) const {
  check_user(u);
  return user_obs_[u];
}

std::int64_t EmbeddingState::item_obs_count(int i) const {
  check_item(i);
  return item_obs_[i];
}

void EmbeddingState::set_user_embedding(int u, std::span<const double> v) {
  check_user(u);
  if (v.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("embeddings: vector size mismatch");
  ConstMapVec src(v.data(), dim_);
  const double norm = src.norm();
  if (norm < kZeroSolutionNorm)
    throw std::invalid_argument("embeddings: cannot set a zero embedding");
  MapVec(&user_emb_[u * static_cast<std::size_t>(dim_)], dim_) = src / norm;
}

void EmbeddingState::set_item_embedding(int i, std::span<const double> v) {
  check_item(i);
  if (v.size() != static_cast<std::size_t>(dim_))
    throw std::invalid_argument("embeddings: vector size mismatch");
  ConstMapVec src(v.data(), dim_);
  const double norm = src.norm();
  if (norm < kZeroSolutionNorm)
    throw std::invalid_argument("embeddings: cannot set a zero embedding");
  MapVec(&item_emb_[i * static_cast<std::size_t>(dim_)], dim_) = src / norm;
}

}  // namespace fairloop
