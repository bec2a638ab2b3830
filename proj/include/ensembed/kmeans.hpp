#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ensembed/rng.hpp"
#include "ensembed/types.hpp"

namespace ensembed {

struct KmeansParams {
  int k = 2;
  int restarts = 20;
  int max_iters = 300;
  std::uint64_t seed = 0;
};

namespace detail {

template <typename Scalar>
Scalar sq_dist(const MatX<Scalar>& points, Index i, const MatX<Scalar>& centers,
               Index c) {
  return (points.row(i) - centers.row(c)).squaredNorm();
}

// k-means++ seeding: first center uniform, each further center drawn with
// probability proportional to the squared distance to the nearest chosen one.
template <typename Scalar>
MatX<Scalar> kmeanspp_centers(const MatX<Scalar>& points, int k, Rng& rng) {
  const Index n = points.rows();
  MatX<Scalar> centers(k, points.cols());
  centers.row(0) = points.row(static_cast<Index>(rng.bounded(n)));
  VecX<Scalar> d2(n);
  for (Index i = 0; i < n; ++i) d2(i) = sq_dist(points, i, centers, 0);
  for (int c = 1; c < k; ++c) {
    const Scalar total = d2.sum();
    Index pick = 0;
    if (total > Scalar(0)) {
      const Scalar target = static_cast<Scalar>(rng.uniform()) * total;
      Scalar cum = Scalar(0);
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Index>(rng.bounded(n));  // all points coincide
    }
    centers.row(c) = points.row(pick);
    for (Index i = 0; i < n; ++i)
      d2(i) = std::min(d2(i), sq_dist(points, i, centers, c));
  }
  return centers;
}

template <typename Scalar>
Scalar assign_points(const MatX<Scalar>& points, const MatX<Scalar>& centers,
                     IntVector& labels) {
  Scalar wcss = Scalar(0);
  for (Index i = 0; i < points.rows(); ++i) {
    Scalar best = sq_dist(points, i, centers, 0);
    int best_c = 0;
    for (Index c = 1; c < centers.rows(); ++c) {
      const Scalar d = sq_dist(points, i, centers, c);
      if (d < best) {
        best = d;
        best_c = static_cast<int>(c);
      }
    }
    labels(i) = best_c;
    wcss += best;
  }
  return wcss;
}

// Lloyd iterations from the given centers; returns final labels and WCSS.
// Empty clusters are reseeded to the point farthest from its own centroid.
// When `wcss_trace` is non-null the per-iteration WCSS values are appended.
template <typename Scalar>
std::pair<IntVector, Scalar> lloyd(const MatX<Scalar>& points,
                                   MatX<Scalar> centers, int max_iters,
                                   std::vector<Scalar>* wcss_trace = nullptr) {
  const Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  IntVector labels(n);
  Scalar wcss = assign_points(points, centers, labels);
  if (wcss_trace) wcss_trace->push_back(wcss);

  for (int iter = 0; iter < max_iters; ++iter) {
    // centroid update
    MatX<Scalar> sums = MatX<Scalar>::Zero(k, points.cols());
    IntVector counts = IntVector::Zero(k);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels(i)) += points.row(i);
      ++counts(labels(i));
    }
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0) centers.row(c) = sums.row(c) / Scalar(counts(c));

    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) continue;
      // reseed on the point farthest from its assigned centroid
      Index far = 0;
      Scalar far_d = Scalar(-1);
      for (Index i = 0; i < n; ++i) {
        const Scalar d = sq_dist(points, i, centers, labels(i));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centers.row(c) = points.row(far);
      --counts(labels(far));
      labels(far) = c;
      ++counts(c);
      reseeded = true;
    }

    IntVector new_labels(n);
    const Scalar new_wcss = assign_points(points, centers, new_labels);
    // a reseed leaves centers unestimated for the new partition, so it can
    // never count as convergence even when the assignment is unchanged
    const bool converged = !reseeded && (new_labels == labels);
    labels = new_labels;
    wcss = new_wcss;
    if (wcss_trace) wcss_trace->push_back(wcss);
    if (converged) break;
  }
  return {labels, wcss};
}

} // namespace detail

/// Lloyd's k-means with k-means++ seeding and restarts. Returns the labels of
/// the restart with the lowest within-cluster sum of squared distances, ties
/// broken by the lowest restart index. Deterministic given the seed.
template <typename Scalar>
IntVector kmeans(const MatX<Scalar>& points, const KmeansParams& params) {
  if (params.k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
  if (params.restarts < 1)
    throw std::invalid_argument("kmeans: restarts must be >= 1");
  if (params.k > points.rows())
    throw std::invalid_argument("kmeans: k exceeds the number of points");
  if (!points.allFinite())
    throw std::invalid_argument("kmeans: input has non-finite entries");

  IntVector best_labels;
  Scalar best_wcss = Scalar(0);
  for (int r = 0; r < params.restarts; ++r) {
    Rng rng(derive_seed(params.seed, "kmeans_restart", r));
    MatX<Scalar> centers = detail::kmeanspp_centers(points, params.k, rng);
    auto [labels, wcss] =
        detail::lloyd(points, std::move(centers), params.max_iters);
    if (r == 0 || wcss < best_wcss) {
      best_wcss = wcss;
      best_labels = labels;
    }
  }
  return best_labels;
}

} // namespace ensembed
