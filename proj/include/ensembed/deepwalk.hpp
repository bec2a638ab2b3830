#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ensembed/graph.hpp"
#include "ensembed/types.hpp"

namespace ensembed {

struct WalkParams {
  int walks_per_node = 10;
  int walk_length = 40;  // nodes per walk
  int window = 5;        // half-window of hops around each center
  std::uint64_t seed = 0;

  void validate() const {
    if (walks_per_node < 1 || walk_length < 1 || window < 1)
      throw std::invalid_argument("walk parameters must be >= 1");
    if (window >= walk_length)
      throw std::invalid_argument("window must be smaller than walk_length");
  }
};

struct SgnsParams {
  int dim = 128;
  int negatives = 5;
  int epochs = 5;
  double initial_lr = 0.025;
  double final_lr = 0.0001;
  std::uint64_t seed = 0;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (negatives < 1) throw std::invalid_argument("negatives must be >= 1");
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (!(initial_lr > 0.0) || !(final_lr > 0.0) || final_lr > initial_lr)
      throw std::invalid_argument("need 0 < final_lr <= initial_lr");
  }
};

/// One embedding of the node set: row i is node i's representation.
struct EmbeddingView {
  Matrix matrix;  // num_nodes x dim
  int dim = 0;
};

struct TrainStats {
  std::vector<double> epoch_mean_loss;
  std::uint64_t pairs_per_epoch = 0;
};

using Walk = std::vector<int>;

/// Truncated random walks: exactly walks_per_node * N walks. Start nodes are
/// a seeded shuffle of the node set per pass; each walk consumes its own RNG
/// stream keyed by the walk index, so the schedule is a pure function of the
/// seed. A walk stops early at a node with no neighbors.
std::vector<Walk> generate_walks(const Graph& g, const WalkParams& params);

/// Skip-gram with negative sampling over the walk corpus. Visits every
/// (center, context) pair with |offset| <= window inside each walk; negatives
/// come from the corpus unigram distribution raised to the 3/4 power; the
/// learning rate decays linearly from initial_lr to final_lr over all
/// updates. Only the center vectors form the returned view. Bitwise
/// deterministic for fixed inputs and seed.
EmbeddingView train_skipgram(const std::vector<Walk>& walks, const Graph& g,
                             const SgnsParams& params, int window,
                             TrainStats* stats = nullptr);

/// One view per requested dimension, each trained from seeds derived
/// deterministically from the base seeds and the view index.
std::vector<EmbeddingView> make_views(const Graph& g,
                                      const std::vector<int>& dims,
                                      const WalkParams& walk_params,
                                      const SgnsParams& base);

namespace detail {

template <typename Scalar>
Scalar stable_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// log(1 + exp(x)) without overflow; -log sigmoid(x) == softplus(-x)
template <typename Scalar>
Scalar softplus(Scalar x) {
  if (x > Scalar(0)) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

} // namespace detail

template <typename Scalar>
struct SgnsGradients {
  Scalar loss = Scalar(0);
  VecX<Scalar> center;
  VecX<Scalar> context;
  std::vector<VecX<Scalar>> negatives;
};

/// Loss and analytic gradients of one SGNS instance:
///   loss = -log sigmoid(u.v) - sum_j log sigmoid(-u.w_j)
template <typename Scalar>
SgnsGradients<Scalar> sgns_loss_and_grad(
    const VecX<Scalar>& center, const VecX<Scalar>& context,
    const std::vector<VecX<Scalar>>& negatives) {
  const Index d = center.size();
  if (context.size() != d)
    throw std::invalid_argument("sgns: context dimension mismatch");
  for (const auto& w : negatives)
    if (w.size() != d)
      throw std::invalid_argument("sgns: negative dimension mismatch");

  SgnsGradients<Scalar> out;
  out.center = VecX<Scalar>::Zero(d);
  out.negatives.reserve(negatives.size());

  const Scalar pos = center.dot(context);
  out.loss += detail::softplus(-pos);
  const Scalar a = detail::stable_sigmoid(pos) - Scalar(1);
  out.center += a * context;
  out.context = a * center;

  for (const auto& w : negatives) {
    const Scalar f = center.dot(w);
    out.loss += detail::softplus(f);
    const Scalar b = detail::stable_sigmoid(f);
    out.center += b * w;
    out.negatives.push_back(b * center);
  }
  return out;
}

} // namespace ensembed
