#include "ensembed/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ensembed {

namespace detail {

MatX<long long> contingency_table(const IntVector& pred,
                                  const IntVector& truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("label vectors differ in length");
  if (pred.size() == 0)
    throw std::invalid_argument("label vectors are empty");
  if (pred.minCoeff() < 0 || truth.minCoeff() < 0)
    throw std::invalid_argument("labels must be non-negative");
  const int a = pred.maxCoeff() + 1;
  const int b = truth.maxCoeff() + 1;
  MatX<long long> table = MatX<long long>::Zero(a, b);
  for (Index t = 0; t < pred.size(); ++t) ++table(pred(t), truth(t));
  return table;
}

// Hungarian algorithm with potentials, O(n^3), exact in integer weights.
// Minimizes cost; callers negate to maximize.
namespace {

long long min_assignment_cost(const MatX<long long>& cost) {
  const int n = static_cast<int>(cost.rows());
  const long long inf = std::numeric_limits<long long>::max() / 4;
  std::vector<long long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0);  // match[j] = row assigned to column j
  std::vector<int> way(n + 1, 0);    // predecessor column on the path
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long long> minv(n + 1, inf);
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      long long delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long long cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    while (j0 != 0) {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    }
  }
  long long total = 0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

} // namespace

long long max_assignment(const MatX<long long>& weights) {
  const int n = static_cast<int>(std::max(weights.rows(), weights.cols()));
  MatX<long long> cost = MatX<long long>::Zero(n, n);
  // maximize weight == minimize negated weight, zero padding for the
  // unmatched rows/columns of a rectangular table
  for (Index i = 0; i < weights.rows(); ++i)
    for (Index j = 0; j < weights.cols(); ++j) cost(i, j) = -weights(i, j);
  return -min_assignment_cost(cost);
}

} // namespace detail

double clustering_accuracy(const IntVector& pred, const IntVector& truth) {
  const MatX<long long> table = detail::contingency_table(pred, truth);
  const long long matched = detail::max_assignment(table);
  return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const IntVector& pred, const IntVector& truth) {
  const MatX<long long> table = detail::contingency_table(pred, truth);
  const double n = static_cast<double>(pred.size());
  const VecX<long long> row_sums = table.rowwise().sum();
  const VecX<long long> col_sums = table.colwise().sum();

  double h_pred = 0.0, h_truth = 0.0, mi = 0.0;
  for (Index i = 0; i < row_sums.size(); ++i) {
    if (row_sums(i) == 0) continue;
    const double p = row_sums(i) / n;
    h_pred -= p * std::log(p);
  }
  for (Index j = 0; j < col_sums.size(); ++j) {
    if (col_sums(j) == 0) continue;
    const double p = col_sums(j) / n;
    h_truth -= p * std::log(p);
  }
  for (Index i = 0; i < table.rows(); ++i) {
    for (Index j = 0; j < table.cols(); ++j) {
      if (table(i, j) == 0) continue;
      const double pij = table(i, j) / n;
      const double pi = row_sums(i) / n;
      const double pj = col_sums(j) / n;
      mi += pij * std::log(pij / (pi * pj));
    }
  }

  const double mean_entropy = 0.5 * (h_pred + h_truth);
  if (mean_entropy == 0.0) return 1.0;  // both labelings constant
  if (mi <= 0.0) return 0.0;
  return std::min(1.0, mi / mean_entropy);
}

ClusterReport make_cluster_report(const IntVector& pred,
                                  const IntVector& truth) {
  ClusterReport report;
  report.predicted = pred;
  report.truth = truth;
  report.accuracy = clustering_accuracy(pred, truth);
  report.nmi = nmi(pred, truth);
  return report;
}

} // namespace ensembed
