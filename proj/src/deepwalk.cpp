#include "ensembed/deepwalk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ensembed/rng.hpp"

namespace ensembed {

std::vector<Walk> generate_walks(const Graph& g, const WalkParams& params) {
  params.validate();
  const int n = g.num_nodes();
  std::vector<Walk> walks;
  walks.reserve(static_cast<std::size_t>(params.walks_per_node) * n);

  std::vector<int> order(n);
  for (int pass = 0; pass < params.walks_per_node; ++pass) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(params.seed, "walk_order", pass));
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(shuffle_rng.bounded(i + 1));
      std::swap(order[i], order[j]);
    }
    for (int pos = 0; pos < n; ++pos) {
      const std::uint64_t walk_index =
          static_cast<std::uint64_t>(pass) * n + pos;
      Rng step_rng(derive_seed(params.seed, "walk_steps", walk_index));
      Walk walk;
      walk.reserve(params.walk_length);
      int cur = order[pos];
      walk.push_back(cur);
      for (int t = 1; t < params.walk_length; ++t) {
        const auto& nbrs = g.neighbors(cur);
        if (nbrs.empty()) break;
        cur = nbrs[step_rng.bounded(nbrs.size())];
        walk.push_back(cur);
      }
      walks.push_back(std::move(walk));
    }
  }
  return walks;
}

namespace {

// Sampler over the 3/4-power unigram distribution of the walk corpus.
class NegativeSampler {
 public:
  NegativeSampler(const std::vector<Walk>& walks, int num_nodes) {
    std::vector<double> counts(num_nodes, 0.0);
    for (const auto& walk : walks)
      for (int node : walk) {
        if (node < 0 || node >= num_nodes)
          throw std::invalid_argument("walk contains out-of-range node id " +
                                      std::to_string(node));
        counts[node] += 1.0;
      }
    cumulative_.resize(num_nodes);
    double cum = 0.0;
    for (int i = 0; i < num_nodes; ++i) {
      if (counts[i] > 0.0) cum += std::pow(counts[i], 0.75);
      cumulative_[i] = cum;
    }
  }

  int sample(Rng& rng) const {
    const double r = rng.uniform() * cumulative_.back();
    const auto it =
        std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    const auto idx = it == cumulative_.end()
                         ? cumulative_.size() - 1
                         : static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<int>(idx);
  }

 private:
  std::vector<double> cumulative_;
};

std::uint64_t count_pairs(const std::vector<Walk>& walks, int window) {
  std::uint64_t pairs = 0;
  for (const auto& walk : walks) {
    const int len = static_cast<int>(walk.size());
    for (int i = 0; i < len; ++i) {
      const int lo = std::max(0, i - window);
      const int hi = std::min(len - 1, i + window);
      pairs += static_cast<std::uint64_t>(hi - lo);  // excludes j == i
    }
  }
  return pairs;
}

} // namespace

EmbeddingView train_skipgram(const std::vector<Walk>& walks, const Graph& g,
                             const SgnsParams& params, int window,
                             TrainStats* stats) {
  params.validate();
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (walks.empty()) throw std::invalid_argument("walk corpus is empty");

  const int n = g.num_nodes();
  const int d = params.dim;
  const NegativeSampler sampler(walks, n);

  // word2vec initialization: input rows uniform in (-0.5/d, 0.5/d), output
  // rows zero. Stored node-per-column so the hot loop works on contiguous
  // memory; transposed on return.
  Matrix in(d, n);
  {
    Rng init_rng(derive_seed(params.seed, "sgns_init", 0));
    for (int node = 0; node < n; ++node)
      for (int r = 0; r < d; ++r)
        in(r, node) = (init_rng.uniform() - 0.5) / d;
  }
  Matrix out = Matrix::Zero(d, n);

  const std::uint64_t pairs_per_epoch = count_pairs(walks, window);
  const std::uint64_t total_updates =
      static_cast<std::uint64_t>(params.epochs) * pairs_per_epoch;
  if (stats) {
    stats->epoch_mean_loss.clear();
    stats->pairs_per_epoch = pairs_per_epoch;
  }

  Rng neg_rng(derive_seed(params.seed, "sgns_negatives", 0));
  Vector accum(d);
  std::uint64_t t = 0;
  const double lr_span = params.final_lr - params.initial_lr;

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    double loss_sum = 0.0;
    for (const auto& walk : walks) {
      const int len = static_cast<int>(walk.size());
      for (int i = 0; i < len; ++i) {
        const int center = walk[i];
        const int lo = std::max(0, i - window);
        const int hi = std::min(len - 1, i + window);
        for (int j = lo; j <= hi; ++j) {
          if (j == i) continue;
          const int context = walk[j];
          const double progress =
              total_updates > 1
                  ? static_cast<double>(t) / (total_updates - 1)
                  : 0.0;
          const double lr = params.initial_lr + lr_span * progress;

          auto u = in.col(center);
          accum.setZero();

          const double f_pos = u.dot(out.col(context));
          loss_sum += detail::softplus(-f_pos);
          const double g_pos = (1.0 - detail::stable_sigmoid(f_pos)) * lr;
          accum += g_pos * out.col(context);
          out.col(context) += g_pos * u;

          for (int s = 0; s < params.negatives; ++s) {
            const int neg = sampler.sample(neg_rng);
            if (neg == context) continue;
            const double f = u.dot(out.col(neg));
            loss_sum += detail::softplus(f);
            const double g = -detail::stable_sigmoid(f) * lr;
            accum += g * out.col(neg);
            out.col(neg) += g * u;
          }
          in.col(center) += accum;
          ++t;
        }
      }
    }
    if (stats)
      stats->epoch_mean_loss.push_back(
          pairs_per_epoch ? loss_sum / static_cast<double>(pairs_per_epoch)
                          : 0.0);
  }

  return EmbeddingView{in.transpose(), d};
}

std::vector<EmbeddingView> make_views(const Graph& g,
                                      const std::vector<int>& dims,
                                      const WalkParams& walk_params,
                                      const SgnsParams& base) {
  if (dims.empty()) throw std::invalid_argument("make_views: dims is empty");
  for (int dim : dims)
    if (dim < 1) throw std::invalid_argument("make_views: dims must be >= 1");

  std::vector<EmbeddingView> views;
  views.reserve(dims.size());
  for (std::size_t m = 0; m < dims.size(); ++m) {
    WalkParams wp = walk_params;
    wp.seed = derive_seed(walk_params.seed, "view_walks", m);
    SgnsParams sp = base;
    sp.dim = dims[m];
    sp.seed = derive_seed(base.seed, "view_sgns", m);
    const auto walks = generate_walks(g, wp);
    views.push_back(train_skipgram(walks, g, sp, wp.window));
  }
  return views;
}

} // namespace ensembed
