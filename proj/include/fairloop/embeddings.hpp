#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fairloop {

struct FeedbackRecord {
  std::int32_t user = 0;
  std::int32_t item = 0;
  std::int32_t click = 0;  // 0 or 1
};

// Incremental matrix-factorization state: per-user and per-item ridge
// statistics (gram matrix + response vector) together with the current
// normalized embeddings, updated in closed form from click feedback.
//
// Gram matrices start at lambda*I and only accumulate rank-one terms, so they
// stay symmetric positive definite; their inverses are cached for the
// confidence-radius quadratic forms on the scoring path. The state is mutated
// only by ingest_feedback between episodes; within an episode it is read-only
// and may be read concurrently.
class EmbeddingState {
 public:
  EmbeddingState(int n_users, int n_items, int dim, double lambda_u,
                 double lambda_i, std::uint64_t seed);

  int n_users() const { return n_users_; }
  int n_items() const { return n_items_; }
  int dim() const { return dim_; }
  double lambda_u() const { return lambda_u_; }
  double lambda_i() const { return lambda_i_; }

  // Dot product of the current user and item embeddings; in [-1, 1] since
  // both are unit vectors.
  double predict_score(int u, int i) const;

  // Scores of user u against every item (out.size() == n_items).
  void predict_scores(int u, std::span<double> out) const;

  // Applies one batch of click feedback in order. For each record, the user
  // statistics absorb the item embedding as a feature vector before the user
  // solve, and the item statistics absorb the pre-solve user embedding; both
  // solves then renormalize. A record is the unit of sequencing: statistics
  // and solve share the same record index.
  void ingest_feedback(std::span<const FeedbackRecord> batch);

  std::span<const double> user_embedding(int u) const;
  std::span<const double> item_embedding(int i) const;
  std::span<const double> user_gram(int u) const;          // A_u, d*d row-major
  std::span<const double> user_gram_inverse(int u) const;  // A_u^-1
  std::span<const double> user_rhs(int u) const;           // b_u
  std::span<const double> item_gram(int i) const;          // C_i
  std::span<const double> item_gram_inverse(int i) const;  // C_i^-1
  std::span<const double> item_rhs(int i) const;           // d_i

  // Contiguous row-major views used by the batch kernels.
  const double* item_embeddings_data() const { return item_emb_.data(); }
  const double* item_gram_inverses_data() const { return item_gram_inv_.data(); }

  std::int64_t user_obs_count(int u) const;
  std::int64_t item_obs_count(int i) const;

  // Overrides an embedding (renormalized copies of `v`); used for warm starts
  // and test fixtures. Does not touch the ridge statistics.
  void set_user_embedding(int u, std::span<const double> v);
  void set_item_embedding(int i, std::span<const double> v);

 private:
  void check_user(int u) const;
  void check_item(int i) const;
  void refresh_user_inverse(int u);
  void refresh_item_inverse(int i);

  int n_users_;
  int n_items_;
  int dim_;
  double lambda_u_;
  double lambda_i_;

  std::vector<double> user_emb_, item_emb_;            // n x d
  std::vector<double> user_gram_, item_gram_;          // n x d*d
  std::vector<double> user_gram_inv_, item_gram_inv_;  // n x d*d
  std::vector<double> user_rhs_, item_rhs_;            // n x d
  std::vector<std::int64_t> user_obs_, item_obs_;
};

}  // namespace fairloop
