#pragma once

#include "ensembed/types.hpp"

namespace ensembed {

/// Predicted vs ground-truth labeling together with both quality scores.
struct ClusterReport {
  IntVector predicted;
  IntVector truth;
  double accuracy = 0.0;
  double nmi = 0.0;
};

/// Fraction of points correctly assigned under the best injective mapping of
/// predicted cluster ids onto truth class ids (optimal assignment on the
/// contingency matrix). Unmatched clusters contribute zero matches.
double clustering_accuracy(const IntVector& pred, const IntVector& truth);

/// Mutual information between the two labelings divided by the arithmetic
/// mean of their entropies (natural log; the ratio is base-free). Equals 1
/// when both labelings are constant and 0 when the mutual information is 0.
double nmi(const IntVector& pred, const IntVector& truth);

ClusterReport make_cluster_report(const IntVector& pred,
                                  const IntVector& truth);

namespace detail {

/// Max-total-weight injective assignment of rows to columns of a
/// non-negative integer weight matrix (Hungarian algorithm on the padded
/// square problem). Returns the maximal total weight.
long long max_assignment(const MatX<long long>& weights);

/// Contingency counts: entry (i, j) is |{t : pred(t) == i && truth(t) == j}|.
MatX<long long> contingency_table(const IntVector& pred,
                                  const IntVector& truth);

} // namespace detail

} // namespace ensembed
