#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "ensembed/linalg.hpp"
#include "ensembed/parafac2.hpp"
#include "ensembed/rng.hpp"
#include "ensembed/types.hpp"

using namespace ensembed;

namespace {

Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

struct Planted {
  Parafac2Model<Real> model;
  ViewSet<Real> views;
};

// Noiseless data from a well-conditioned generator.
Planted plant(Index n, const std::vector<Index>& widths, int rank,
              std::uint64_t seed) {
  Rng rng(seed);
  Planted out;
  out.model.rank = rank;
  out.model.V = random_matrix(n, rank, rng);
  // Orthogonal H and log-uniform weights keep the planted factors well
  // separated across views; near-collinear weight vectors stall the solver.
  out.model.H = orthonormal_columns(random_matrix(rank, rank, rng));
  for (Index d : widths) {
    Vector s(rank);
    for (int i = 0; i < rank; ++i) s(i) = std::exp(4.0 * rng.uniform() - 2.0);
    const Matrix q = orthonormal_columns(random_matrix(d, rank, rng));
    out.model.s.push_back(s);
    out.model.Q.push_back(q);
    out.views.push_back(out.model.V * s.asDiagonal() *
                        out.model.H.transpose() * q.transpose());
  }
  return out;
}

// Element-by-element restatement of the objective, no matrix algebra.
double objective_oracle(const Parafac2Model<Real>& model,
                        const ViewSet<Real>& views) {
  double total = 0.0;
  const int r = model.rank;
  for (std::size_t m = 0; m < views.size(); ++m) {
    const Matrix u = model.loading(m);
    for (Index i = 0; i < views[m].rows(); ++i) {
      for (Index j = 0; j < views[m].cols(); ++j) {
        double entry = 0.0;
        for (int c = 0; c < r; ++c)
          entry += model.V(i, c) * model.s[m](c) * u(j, c);
        const double diff = views[m](i, j) - entry;
        total += diff * diff;
      }
    }
  }
  return total;
}

double projected_objective(const std::vector<Matrix>& projected,
                           const Matrix& v, const Matrix& h,
                           const std::vector<Vector>& s) {
  double total = 0.0;
  for (std::size_t m = 0; m < projected.size(); ++m)
    total +=
        (projected[m] - v * s[m].asDiagonal() * h.transpose()).squaredNorm();
  return total;
}

} // namespace

TEST_CASE("objective matches an elementwise oracle") {
  Rng rng(71);
  for (int trial = 0; trial < 5; ++trial) {
    Planted p = plant(8, {4, 6, 5}, 3, derive_seed(1000, "plant", trial));
    // perturb the model so the residual is nonzero
    p.model.V.array() += 0.1;
    const double fast = objective(p.model, p.views);
    const double slow = objective_oracle(p.model, p.views);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-12));
  }
}

TEST_CASE("objective validates shapes") {
  Planted p = plant(6, {4, 5}, 2, 9);
  ViewSet<Real> wrong = p.views;
  wrong.pop_back();
  CHECK_THROWS_AS(objective(p.model, wrong), std::invalid_argument);
}

TEST_CASE("procrustes recovers a planted orthonormal factor") {
  Rng rng(81);
  for (int trial = 0; trial < 10; ++trial) {
    const Index n = 12, d = 7;
    const int r = 3;
    const Matrix v = random_matrix(n, r, rng);
    const Matrix h = Matrix::Identity(r, r) + 0.2 * random_matrix(r, r, rng);
    Vector s(r);
    for (int i = 0; i < r; ++i) s(i) = 0.5 + rng.uniform();
    const Matrix q_true = orthonormal_columns(random_matrix(d, r, rng));
    const Matrix x = v * s.asDiagonal() * h.transpose() * q_true.transpose();
    const Matrix q = procrustes_update(x, v, s, h);
    CHECK((q - q_true).norm() <= 1e-8);
  }
}

TEST_CASE("procrustes output always has orthonormal columns") {
  Rng rng(91);
  for (int trial = 0; trial < 10; ++trial) {
    const Index d = 4 + static_cast<Index>(rng.bounded(8));
    const int r = 1 + static_cast<int>(rng.bounded(4));
    const Matrix x = random_matrix(10, d, rng);
    const Matrix v = random_matrix(10, r, rng);
    const Matrix h = random_matrix(r, r, rng);
    Vector s = Vector::Ones(r);
    const Matrix q = procrustes_update(x, v, s, h);
    CHECK((q.transpose() * q - Matrix::Identity(r, r)).norm() <= 1e-12);
  }
}

TEST_CASE("procrustes rejects views narrower than the rank") {
  Rng rng(95);
  const Matrix x = random_matrix(6, 2, rng);
  const Matrix v = random_matrix(6, 3, rng);
  const Matrix h = Matrix::Identity(3, 3);
  const Vector s = Vector::Ones(3);
  CHECK_THROWS_AS(procrustes_update(x, v, s, h), std::invalid_argument);
}

TEST_CASE("inner pass leaves an exact solution alone") {
  Planted p = plant(10, {5, 7}, 3, 123);
  std::vector<Matrix> projected;
  for (std::size_t m = 0; m < p.views.size(); ++m)
    projected.push_back(p.views[m] * p.model.Q[m]);

  Matrix v = p.model.V;
  Matrix h = p.model.H;
  auto s = p.model.s;
  cp_inner_update(projected, v, h, s);
  CHECK((v - p.model.V).norm() <= 1e-9 * p.model.V.norm());
  CHECK((h - p.model.H).norm() <= 1e-9 * p.model.H.norm());
  for (std::size_t m = 0; m < s.size(); ++m)
    CHECK((s[m] - p.model.s[m]).norm() <= 1e-9);
}

TEST_CASE("inner pass weakly decreases the projected objective") {
  Rng rng(131);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 8;
    const int r = 2 + static_cast<int>(rng.bounded(3));
    std::vector<Matrix> projected;
    const int views = 2 + static_cast<int>(rng.bounded(3));
    for (int m = 0; m < views; ++m)
      projected.push_back(random_matrix(n, r, rng));
    Matrix v = random_matrix(n, r, rng);
    Matrix h = random_matrix(r, r, rng);
    std::vector<Vector> s;
    for (int m = 0; m < views; ++m)
      s.push_back(Vector::Ones(r) + 0.1 * random_matrix(r, 1, rng).col(0));
    for (auto& sm : s) sm = sm.cwiseMax(0.0);

    const double before = projected_objective(projected, v, h, s);
    cp_inner_update(projected, v, h, s);
    const double after = projected_objective(projected, v, h, s);
    CHECK(after <= before + 1e-9);
    for (const auto& sm : s) CHECK(sm.minCoeff() >= 0.0);
  }
}

TEST_CASE("fit reproduces noiseless planted data") {
  const Planted p = plant(20, {6, 9, 12}, 3, 2024);
  FitOptions opts;
  const auto fit = parafac2_fit(p.views, 3, opts);

  double scale = 0.0;
  for (const auto& x : p.views) scale += x.squaredNorm();
  CHECK(fit.trace.back() / scale <= 1e-6);

  REQUIRE(fit.trace.size() >= 2);
  for (std::size_t i = 1; i < fit.trace.size(); ++i)
    CHECK(fit.trace[i] <= fit.trace[i - 1] + 1e-9);

  const Matrix hth = fit.model.H.transpose() * fit.model.H;
  for (std::size_t m = 0; m < p.views.size(); ++m) {
    const Matrix q = fit.model.Q[m];
    CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() <= 1e-8);
    const Matrix u = fit.model.loading(m);
    CHECK((u.transpose() * u - hth).norm() <= 1e-6 * hth.norm());
  }
}

TEST_CASE("fit lands near the noise floor on perturbed data") {
  Planted p = plant(20, {6, 9, 12}, 3, 515);
  Rng rng(516);
  double scale = 0.0;
  for (auto& x : p.views) {
    Matrix noise = random_matrix(x.rows(), x.cols(), rng);
    noise *= 0.01 * x.norm() / noise.norm();
    x += noise;
    scale += x.squaredNorm();
  }
  const auto fit = parafac2_fit(p.views, 3, FitOptions{});
  CHECK(std::sqrt(fit.trace.back() / scale) <= 0.02);
}

TEST_CASE("a single full-rank view is fit exactly") {
  Rng rng(151);
  const Matrix x = random_matrix(10, 4, rng);
  const ViewSet<Real> views{x};
  const auto fit = parafac2_fit(views, 4, FitOptions{});
  CHECK(fit.trace.back() <= 1e-12 * x.squaredNorm());
}

TEST_CASE("rank-one fit of a single view matches the svd truncation") {
  Rng rng(161);
  const Matrix x = random_matrix(12, 6, rng);
  const auto svd = economy_svd(x);
  double tail = 0.0;
  for (Index i = 1; i < svd.sigma.size(); ++i)
    tail += svd.sigma(i) * svd.sigma(i);

  const auto fit = parafac2_fit(ViewSet<Real>{x}, 1, FitOptions{});
  CHECK(fit.trace.back() == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("fit is deterministic") {
  const Planted p = plant(12, {5, 6, 7}, 2, 777);
  const auto a = parafac2_fit(p.views, 2, FitOptions{});
  const auto b = parafac2_fit(p.views, 2, FitOptions{});
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i)
    CHECK(a.trace[i] == b.trace[i]);
  CHECK(a.model.V == b.model.V);
  CHECK(a.model.H == b.model.H);
  for (std::size_t m = 0; m < a.model.Q.size(); ++m) {
    CHECK(a.model.Q[m] == b.model.Q[m]);
    CHECK(a.model.s[m] == b.model.s[m]);
  }
}

TEST_CASE("fit validates the requested rank") {
  const Planted p = plant(10, {4, 6}, 2, 31);
  CHECK_THROWS_AS(parafac2_fit(p.views, 0, FitOptions{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parafac2_fit(p.views, 5, FitOptions{}),
                  std::invalid_argument);  // wider than the narrowest view
  const Planted tall = plant(3, {8, 9}, 2, 32);
  CHECK_THROWS_AS(parafac2_fit(tall.views, 4, FitOptions{}),
                  std::invalid_argument);  // exceeds the node count
  CHECK_THROWS_AS(parafac2_fit(ViewSet<Real>{}, 1, FitOptions{}),
                  std::invalid_argument);
}

TEST_CASE("fit rejects inconsistent node counts") {
  Rng rng(171);
  ViewSet<Real> views{random_matrix(8, 4, rng), random_matrix(9, 4, rng)};
  CHECK_THROWS_AS(parafac2_fit(views, 2, FitOptions{}),
                  std::invalid_argument);
}

TEST_CASE("extract_embedding gives unit columns and keeps zero ones") {
  Parafac2Model<Real> model;
  model.rank = 3;
  model.V = Matrix::Zero(5, 3);
  model.V(0, 0) = 2.0;
  model.V(1, 1) = -4.0;
  model.H = Matrix::Identity(3, 3);
  const Matrix e = extract_embedding(model);
  CHECK(e.col(0).norm() == doctest::Approx(1.0));
  CHECK(e.col(1).norm() == doctest::Approx(1.0));
  CHECK(e.col(2).norm() == 0.0);
  CHECK(e(1, 1) == doctest::Approx(-1.0));
}
