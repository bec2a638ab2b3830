#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ensembed/linalg.hpp"
#include "ensembed/types.hpp"

namespace ensembed {

/// M matrices sharing the row (node) mode; view m is N x D_m.
template <typename Scalar>
using ViewSet = std::vector<MatX<Scalar>>;

/// Coupled factorization X_m ~ V * diag(s_m) * (Q_m H)^T with Q_m^T Q_m = I.
/// The product Q_m H plays the role of a per-view loading whose cross-product
/// H^T H is shared across views; V is the common row-mode factor.
template <typename Scalar>
struct Parafac2Model {
  int rank = 0;
  std::vector<MatX<Scalar>> Q;  // D_m x R, orthonormal columns
  MatX<Scalar> H;               // R x R
  std::vector<VecX<Scalar>> s;  // diagonal of S_m, length R, entries >= 0
  MatX<Scalar> V;               // N x R shared row factor

  MatX<Scalar> loading(std::size_t m) const { return Q[m] * H; }  // U_m
};

struct FitOptions {
  int max_sweeps = 500;
  int inner_passes = 5;    // least-squares passes on the projected slices per
                           // sweep; >1 counters the slow tail the outer
                           // orthogonal coupling otherwise produces
  double rel_tol = 1e-8;   // relative objective change stopping threshold
  std::uint64_t seed = 0;  // reserved; the default initialization is
                           // deterministic and draws nothing
};

template <typename Scalar>
void check_views(const ViewSet<Scalar>& views) {
  if (views.empty())
    throw std::invalid_argument("view set must contain at least one view");
  const Index n = views.front().rows();
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (views[m].rows() != n)
      throw std::invalid_argument("view " + std::to_string(m) +
                                  " row count differs from view 0");
    if (views[m].size() == 0 || !views[m].allFinite())
      throw std::invalid_argument("view " + std::to_string(m) +
                                  " is empty or has non-finite entries");
  }
}

/// Residual sum  sum_m ||X_m - V S_m H^T Q_m^T||_F^2.
template <typename Scalar>
Scalar objective(const Parafac2Model<Scalar>& model,
                 const ViewSet<Scalar>& views) {
  if (views.size() != model.Q.size() || views.size() != model.s.size())
    throw std::invalid_argument("objective: view count mismatch");
  const Index r = model.H.rows();
  if (model.H.cols() != r || model.V.cols() != r)
    throw std::invalid_argument("objective: factor rank mismatch");
  Scalar total = Scalar(0);
  for (std::size_t m = 0; m < views.size(); ++m) {
    if (model.V.rows() != views[m].rows() ||
        model.Q[m].rows() != views[m].cols() || model.Q[m].cols() != r ||
        model.s[m].size() != r)
      throw std::invalid_argument("objective: dimension mismatch in view " +
                                  std::to_string(m));
    const MatX<Scalar> approx = model.V * model.s[m].asDiagonal() *
                                model.H.transpose() * model.Q[m].transpose();
    total += (views[m] - approx).squaredNorm();
  }
  return total;
}

/// Orthogonal-Procrustes step: the column-orthonormal Q minimizing
/// ||X - V S H^T Q^T||_F with the other factors held fixed, i.e. Q = P Z^T
/// from the thin SVD of X^T V S H^T.
template <typename Scalar>
MatX<Scalar> procrustes_update(const MatX<Scalar>& x, const MatX<Scalar>& v,
                               const VecX<Scalar>& s, const MatX<Scalar>& h) {
  const Index r = h.rows();
  if (x.cols() < r)
    throw std::invalid_argument(
        "procrustes_update: view width " + std::to_string(x.cols()) +
        " is smaller than rank " + std::to_string(r));
  const MatX<Scalar> cross = x.transpose() * (v * s.asDiagonal() * h.transpose());
  if (cross.rows() > 2 * r) {
    // Tall case: reduce by a thin QR so the SVD runs on an r x r triangle;
    // cross = Q1 R1 = (Q1 P1) sigma Z^T gives the same polar factor. The
    // reflectors are applied to the padded polar factor directly rather
    // than materializing Q1.
    Eigen::HouseholderQR<MatX<Scalar>> qr(cross);
    const MatX<Scalar> r1 = qr.matrixQR()
                                .topRows(r)
                                .template triangularView<Eigen::Upper>();
    const auto svd = economy_svd(r1);
    MatX<Scalar> padded = MatX<Scalar>::Zero(cross.rows(), r);
    padded.topRows(r) = svd.P * svd.Z.transpose();
    return qr.householderQ() * padded;
  }
  const auto svd = economy_svd(cross);
  return svd.P * svd.Z.transpose();
}

namespace detail {

// q(s) = s^T G s - 2 s.b, the s-dependent part of ||Y - V diag(s) H^T||_F^2.
template <typename Scalar>
Scalar s_quadratic(const MatX<Scalar>& gram, const VecX<Scalar>& rhs,
                   const VecX<Scalar>& s) {
  return s.dot(gram * s) - Scalar(2) * s.dot(rhs);
}

// Non-negative least squares by feasible-set shrinking on the normal
// equations; adequate for the small R x R systems used here.
template <typename Scalar>
VecX<Scalar> nnls_shrink(const MatX<Scalar>& gram, const VecX<Scalar>& rhs) {
  const Index r = rhs.size();
  VecX<Scalar> x = pinv_solve_spd(gram, rhs).col(0);
  for (Index round = 0; round <= r; ++round) {
    if (x.minCoeff() >= Scalar(0)) break;
    std::vector<Index> active;
    for (Index i = 0; i < r; ++i)
      if (x(i) > Scalar(0)) active.push_back(i);
    x = VecX<Scalar>::Zero(r);
    if (active.empty()) break;
    const Index a = static_cast<Index>(active.size());
    MatX<Scalar> sub(a, a);
    VecX<Scalar> sub_rhs(a);
    for (Index i = 0; i < a; ++i) {
      sub_rhs(i) = rhs(active[i]);
      for (Index j = 0; j < a; ++j) sub(i, j) = gram(active[i], active[j]);
    }
    const VecX<Scalar> sol = pinv_solve_spd(sub, sub_rhs).col(0);
    for (Index i = 0; i < a; ++i) x(active[i]) = sol(i);
  }
  return x.cwiseMax(Scalar(0));
}

} // namespace detail

/// One alternating-least-squares pass over the projected slices
/// Y_m = X_m Q_m, updating V, H and every s_m in place. Each sub-update
/// weakly decreases  sum_m ||Y_m - V S_m H^T||_F^2  with the other factors
/// fixed; the s_m updates keep their entries non-negative.
template <typename Scalar>
void cp_inner_update(const std::vector<MatX<Scalar>>& projected,
                     MatX<Scalar>& v, MatX<Scalar>& h,
                     std::vector<VecX<Scalar>>& s) {
  const std::size_t views = projected.size();
  if (views == 0 || s.size() != views)
    throw std::invalid_argument("cp_inner_update: view count mismatch");
  const Index r = h.rows();

  // V <- (sum_m Y_m H S_m)(sum_m S_m H^T H S_m)^+
  {
    MatX<Scalar> num = MatX<Scalar>::Zero(v.rows(), r);
    MatX<Scalar> gram = MatX<Scalar>::Zero(r, r);
    const MatX<Scalar> hth = h.transpose() * h;
    for (std::size_t m = 0; m < views; ++m) {
      num += projected[m] * h * s[m].asDiagonal();
      gram += s[m].asDiagonal() * hth * s[m].asDiagonal();
    }
    v = pinv_solve_spd(gram, num.transpose()).transpose();
  }

  // H <- (sum_m Y_m^T V S_m)(sum_m S_m V^T V S_m)^+
  {
    MatX<Scalar> num = MatX<Scalar>::Zero(r, r);
    MatX<Scalar> gram = MatX<Scalar>::Zero(r, r);
    const MatX<Scalar> vtv = v.transpose() * v;
    for (std::size_t m = 0; m < views; ++m) {
      num += projected[m].transpose() * v * s[m].asDiagonal();
      gram += s[m].asDiagonal() * vtv * s[m].asDiagonal();
    }
    h = pinv_solve_spd(gram, num.transpose()).transpose();
  }

  // s_m <- [(H^T H) o (V^T V)]^+ diag(V^T Y_m H), clamped at zero. The gram
  // matrix is shared by every view, so all right-hand sides go through one
  // factorization. A clamped solution is not automatically a descent point,
  // so fall back to non-negative least squares and keep the previous s_m if
  // neither improves.
  {
    const MatX<Scalar> gram =
        ((h.transpose() * h).array() * (v.transpose() * v).array()).matrix();
    MatX<Scalar> all_rhs(r, static_cast<Index>(views));
    for (std::size_t m = 0; m < views; ++m)
      all_rhs.col(static_cast<Index>(m)) =
          (v.transpose() * projected[m] * h).diagonal();
    const MatX<Scalar> solved = pinv_solve_spd(gram, all_rhs);
    for (std::size_t m = 0; m < views; ++m) {
      const VecX<Scalar> rhs = all_rhs.col(static_cast<Index>(m));
      VecX<Scalar> cand =
          solved.col(static_cast<Index>(m)).cwiseMax(Scalar(0));
      if (detail::s_quadratic(gram, rhs, cand) >
          detail::s_quadratic(gram, rhs, s[m])) {
        const VecX<Scalar> nn = detail::nnls_shrink(gram, rhs);
        if (detail::s_quadratic(gram, rhs, nn) <
            detail::s_quadratic(gram, rhs, cand))
          cand = nn;
      }
      if (detail::s_quadratic(gram, rhs, cand) <=
          detail::s_quadratic(gram, rhs, s[m]))
        s[m] = cand;
    }
  }
}

template <typename Scalar>
struct Parafac2Fit {
  Parafac2Model<Scalar> model;
  std::vector<Scalar> trace;  // objective after init, then after each sweep
};

/// Direct-fitting alternating least squares: per sweep, the Procrustes step
/// for every view followed by inner_passes cp_inner_update passes on the
/// projected slices. Deterministic; stops on relative objective change below
/// rel_tol or after max_sweeps sweeps.
template <typename Scalar>
Parafac2Fit<Scalar> parafac2_fit(const ViewSet<Scalar>& views, int rank,
                                 const FitOptions& opts) {
  check_views(views);
  if (opts.max_sweeps < 1)
    throw std::invalid_argument("parafac2_fit: max_sweeps must be >= 1");
  if (opts.inner_passes < 1)
    throw std::invalid_argument("parafac2_fit: inner_passes must be >= 1");
  if (!(opts.rel_tol > 0.0))
    throw std::invalid_argument("parafac2_fit: rel_tol must be positive");

  const Index n = views.front().rows();
  Index min_dim = views.front().cols();
  Index total_cols = 0;
  for (const auto& x : views) {
    min_dim = std::min(min_dim, x.cols());
    total_cols += x.cols();
  }
  if (rank < 1 || rank > std::min<Index>(n, min_dim))
    throw std::invalid_argument(
        "parafac2_fit: rank " + std::to_string(rank) +
        " outside [1, min(N, min_m D_m)] = [1, " +
        std::to_string(std::min<Index>(n, min_dim)) + "]");

  Parafac2Model<Scalar> model;
  model.rank = rank;

  // Warm start: V from the leading left singular vectors of the
  // concatenated views, H = I, s_m = 1, Q_m from a first Procrustes pass.
  {
    MatX<Scalar> concat(n, total_cols);
    Index at = 0;
    for (const auto& x : views) {
      concat.middleCols(at, x.cols()) = x;
      at += x.cols();
    }
    model.V = economy_svd(concat).P.leftCols(rank);
  }
  model.H = MatX<Scalar>::Identity(rank, rank);
  model.s.assign(views.size(), VecX<Scalar>::Ones(rank));
  model.Q.resize(views.size());
  for (std::size_t m = 0; m < views.size(); ++m)
    model.Q[m] = procrustes_update(views[m], model.V, model.s[m], model.H);

  std::vector<Scalar> view_norm_sq(views.size());
  Scalar scale = Scalar(0);
  for (std::size_t m = 0; m < views.size(); ++m) {
    view_norm_sq[m] = views[m].squaredNorm();
    scale += view_norm_sq[m];
  }

  Parafac2Fit<Scalar> result;
  result.trace.push_back(objective(model, views));

  std::vector<MatX<Scalar>> projected(views.size());
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    for (std::size_t m = 0; m < views.size(); ++m)
      model.Q[m] = procrustes_update(views[m], model.V, model.s[m], model.H);
    for (std::size_t m = 0; m < views.size(); ++m)
      projected[m] = views[m] * model.Q[m];
    for (int pass = 0; pass < opts.inner_passes; ++pass)
      cp_inner_update(projected, model.V, model.H, model.s);

    // Orthonormal Q_m lets the residual collapse to the projected slices:
    // ||X - V S H^T Q^T||^2 = ||X||^2 - 2 <X Q, V S H^T> + ||V S H^T||^2,
    // which skips rebuilding the N x D_m reconstruction every sweep.
    Scalar cur = Scalar(0);
    for (std::size_t m = 0; m < views.size(); ++m) {
      const MatX<Scalar> approx =
          model.V * model.s[m].asDiagonal() * model.H.transpose();
      cur += view_norm_sq[m] -
             Scalar(2) * (projected[m].array() * approx.array()).sum() +
             approx.squaredNorm();
    }
    cur = std::max(cur, Scalar(0));

    const Scalar prev = result.trace.back();
    result.trace.push_back(cur);
    if (cur <= Scalar(1e-30) * scale) break;
    if (prev == Scalar(0)) break;
    if (std::abs(prev - cur) / prev < static_cast<Scalar>(opts.rel_tol)) break;
  }

  result.model = std::move(model);
  return result;
}

/// The shared row factor with every column rescaled to unit Euclidean norm
/// (zero columns stay zero); rows follow node order.
template <typename Scalar>
MatX<Scalar> extract_embedding(const Parafac2Model<Scalar>& model) {
  MatX<Scalar> v = model.V;
  for (Index c = 0; c < v.cols(); ++c) {
    const Scalar norm = v.col(c).norm();
    if (norm > Scalar(0)) v.col(c) /= norm;
  }
  return v;
}

} // namespace ensembed
