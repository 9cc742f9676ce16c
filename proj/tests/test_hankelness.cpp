#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "haplitz/hankelness.hpp"

using namespace haplitz;

namespace {

Complex c(double re, double im = 0.0) { return {re, im}; }

Vector random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
  return v;
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

// Random family with vanishing rank-one sum: x = z A and y orthogonal to the
// row space of A, so sum x_i (x) y_i = Z A B W^dagger... = 0 by construction.
void random_vanishing_family(std::mt19937_64& rng, int n, int r, int dim,
                             std::vector<Vector>& xs, std::vector<Vector>& ys) {
  Matrix a = random_matrix(rng, r, n);
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  Matrix null_basis =
      Eigen::BDCSVD<Matrix>(a, Eigen::ComputeFullV).matrixV().rightCols(n - r);
  Matrix z = random_matrix(rng, dim, r);
  Matrix w = random_matrix(rng, dim, n - r);
  Matrix xmat = z * a;
  Matrix ymat = w * null_basis.adjoint();
  xs.clear();
  ys.clear();
  for (int i = 0; i < n; ++i) {
    xs.push_back(xmat.col(i));
    ys.push_back(ymat.col(i));
  }
}

MatrixSymbol diag_symbol(Complex upper, int upper_deg, Complex lower,
                         int lower_deg) {
  MatrixSymbol::CoeffMap coeffs;
  Matrix mu = Matrix::Zero(2, 2), ml = Matrix::Zero(2, 2);
  mu(0, 0) = upper;
  ml(1, 1) = lower;
  if (upper_deg == lower_deg) {
    coeffs.emplace(upper_deg, mu + ml);
  } else {
    coeffs.emplace(upper_deg, mu);
    coeffs.emplace(lower_deg, ml);
  }
  return laurent(2, coeffs);
}

}  // namespace

TEST_CASE("analytic phi makes A = 0 feasible") {
  std::mt19937_64 rng(1);
  auto phi = laurent(2, {{0, random_matrix(rng, 2, 2)},
                         {2, Matrix::Identity(2, 2)}});
  auto psi = laurent(2, {{-1, Matrix::Identity(2, 2)}});
  auto res = find_feasible_A(phi, psi);
  REQUIRE(res.status == FeasibilityStatus::kFeasible);
  CHECK(res.box.A.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("analytic psi makes A = identity feasible") {
  std::mt19937_64 rng(2);
  auto phi = laurent(2, {{-1, random_matrix(rng, 2, 2)},
                         {-2, random_matrix(rng, 2, 2)}});
  auto psi = laurent(2, {{0, random_matrix(rng, 2, 2)},
                         {1, random_matrix(rng, 2, 2)}});
  auto res = find_feasible_A(phi, psi);
  REQUIRE(res.status == FeasibilityStatus::kFeasible);
  CHECK((res.box.A - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("both stacks zero reports the degenerate note") {
  auto phi = laurent(1, {{0, Matrix::Identity(1, 1)}});
  auto res = find_feasible_A(phi, phi);
  CHECK(res.status == FeasibilityStatus::kDegenerate);
  CHECK(!res.note.empty());
}

TEST_CASE("antidiagonal pair splits with the projection certificate") {
  auto phi = diag_symbol(c(1), -1, c(1), 1);  // diag(wbar, w)
  auto psi = diag_symbol(c(1), 1, c(1), -1);  // diag(w, wbar)
  auto res = find_feasible_A(phi, psi);
  REQUIRE(res.status == FeasibilityStatus::kFeasible);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 1.0;
  CHECK((res.box.A - expect).cwiseAbs().maxCoeff() < 1e-7);

  // with that A the product must be the Hankel operator of phi*A*psi = const
  const int N = 32;
  auto prod = compose(hankel_trunc(phi, N), toeplitz_trunc(psi, N));
  auto target = hankel_trunc(
      mul(phi, const_mul_left(res.box.A, psi)), N);
  CHECK(window_residual(prod, target, WindowSpec{0, 28, 0, 28}) < 1e-8);
  CHECK(prod.data().cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("scalar conjugate pair is infeasible with a half margin") {
  auto wbar = laurent({{-1, c(1)}});
  auto res = find_feasible_A(wbar, wbar);
  REQUIRE(res.status == FeasibilityStatus::kInfeasible);
  // |1-a|^2 + |a|^2 over the disk attains 1/2 at a = 1/2
  CHECK(res.margin == doctest::Approx(0.5).epsilon(1e-6));

  const int N = 32;
  auto prod = compose(hankel_trunc(wbar, N), toeplitz_trunc(wbar, N));
  CHECK(is_hankel_window(prod, WindowSpec{0, 8, 0, 8}) >= 0.5);
}

TEST_CASE("vanishing rank-one sums yield box certificates") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int r = 1 + static_cast<int>(rng() % (n - 1));
    std::vector<Vector> xs, ys;
    random_vanishing_family(rng, n, r, 12, xs, ys);
    auto cert = xy_certificate(xs, ys);
    REQUIRE_MESSAGE(cert.ok, cert.message);
    CHECK(cert.A.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);

    Matrix xmat(12, n), ymat(12, n);
    for (int i = 0; i < n; ++i) {
      xmat.col(i) = xs[i];
      ymat.col(i) = ys[i];
    }
    const double sx = xmat.norm() + 1.0;
    CHECK((xmat * (Matrix::Identity(n, n) - cert.A)).norm() < 1e-8 * sx);
    CHECK((ymat * cert.A.adjoint()).norm() < 1e-8 * (ymat.norm() + 1.0));
  }
}

TEST_CASE("degenerate certificate branches") {
  std::mt19937_64 rng(7);
  std::vector<Vector> xs{random_vector(rng, 6), random_vector(rng, 6)};
  std::vector<Vector> zeros{Vector::Zero(6), Vector::Zero(6)};

  // x arbitrary, y = 0: only A = I can absorb the x side
  auto cert_y0 = xy_certificate(xs, zeros);
  REQUIRE(cert_y0.ok);
  CHECK((cert_y0.A - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  // x = 0, y arbitrary: A = 0 satisfies both sides
  std::vector<Vector> ys{random_vector(rng, 6), random_vector(rng, 6)};
  auto cert_x0 = xy_certificate(zeros, ys);
  REQUIRE(cert_x0.ok);
  Matrix ymat(6, 2);
  ymat.col(0) = ys[0];
  ymat.col(1) = ys[1];
  CHECK((ymat * cert_x0.A.adjoint()).norm() < 1e-10);

  // a nonzero sum is refused with its norm reported
  auto bad = xy_certificate(xs, ys);
  CHECK(!bad.ok);
  CHECK(bad.message.find("not zero") != std::string::npos);

  // paired cancellation example
  Vector v = random_vector(rng, 8), u = random_vector(rng, 8);
  auto cert = xy_certificate({v, -v}, {u, u});
  REQUIRE(cert.ok);
  Matrix xm(8, 2), ym(8, 2);
  xm.col(0) = v;
  xm.col(1) = -v;
  ym.col(0) = u;
  ym.col(1) = u;
  CHECK((xm * (Matrix::Identity(2, 2) - cert.A)).norm() < 1e-10 * xm.norm());
  CHECK((ym * cert.A.adjoint()).norm() < 1e-10 * ym.norm());
}

TEST_CASE("basis extraction expresses dependents over spanners") {
  std::mt19937_64 rng(11);
  Vector u = random_vector(rng, 10), v = random_vector(rng, 10);

  auto dup = bounded_basis_extraction({u, u});
  REQUIRE(dup.B.rows() == 1);
  CHECK(std::abs(dup.B(0, 0) - c(1)) < 1e-10);

  auto tri = bounded_basis_extraction({u, v, u + v});
  // reconstruct the dependent vector from the returned ordering
  std::vector<Vector> fam{u, v, u + v};
  Matrix span_mat(10, 2);
  span_mat.col(0) = fam[tri.sigma[1]];
  span_mat.col(1) = fam[tri.sigma[2]];
  Vector rebuilt = span_mat * tri.B.col(0);
  CHECK((rebuilt - fam[tri.sigma[0]]).norm() < 1e-9);

  CHECK_THROWS_AS(bounded_basis_extraction({u, v}), HankelnessError);
  CHECK_THROWS_AS(bounded_basis_extraction({Vector::Zero(10)}),
                  HankelnessError);
}

TEST_CASE("basis extraction respects the exponential entry bound") {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(rng() % 4);
    const int r = 1 + static_cast<int>(rng() % (n - 1));
    Matrix basis = random_matrix(rng, 12, r);
    std::vector<Vector> fam;
    for (int i = 0; i < n; ++i) {
      Vector comb = Vector::Zero(12);
      for (int k = 0; k < r; ++k) {
        // coefficients near the unit circle stress the pivot bound
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        comb += basis.col(k) * Complex(u(rng), u(rng));
      }
      fam.push_back(comb);
    }
    // ensure the family really has rank r
    Matrix stacked(12, n);
    for (int i = 0; i < n; ++i) stacked.col(i) = fam[i];
    if (num_rank(stacked, 1e-8) != r) continue;
    auto ext = bounded_basis_extraction(fam, 1e-8);
    CHECK(ext.B.cwiseAbs().maxCoeff() <= std::pow(2.0, 2 * n) + 1e-9);
    Matrix span_mat(12, r);
    for (int i = 0; i < r; ++i) span_mat.col(i) = fam[ext.sigma[(n - r) + i]];
    Matrix dep_mat(12, n - r);
    for (int i = 0; i < n - r; ++i) dep_mat.col(i) = fam[ext.sigma[i]];
    CHECK((dep_mat - span_mat * ext.B).norm() <
          1e-6 * (1.0 + dep_mat.norm()));
  }
}

TEST_CASE("rank-one sum transport identity") {
  std::mt19937_64 rng(17);
  const int r = 2, n = 3, dim = 9;
  std::vector<Vector> zs, ys;
  for (int i = 0; i < r; ++i) zs.push_back(random_vector(rng, dim));
  for (int i = 0; i < n; ++i) ys.push_back(random_vector(rng, dim));
  Matrix a = random_matrix(rng, r, n);
  CHECK(xy0_check(zs, ys, a) < 1e-12 * (1.0 + a.norm()) * 100);
  CHECK(xy0_check(zs, {ys[0], ys[1]}, Matrix(Matrix::Identity(2, 2))) <
        1e-12);
}

TEST_CASE("decomposition roundtrip on assembled instances") {
  std::mt19937_64 rng(19);
  int built = 0;
  for (int t = 0; t < 8; ++t) {
    const int n = 2 + static_cast<int>(rng() % 2);
    const int l = 1 + static_cast<int>(rng() % (n - 1));
    // assemble Phi = [U1 W2] D and Psi = D^{-1} [W1; U2]
    Matrix dmat = random_matrix(rng, n, n) + 3.0 * Matrix::Identity(n, n);
    MatrixSymbol::CoeffMap phic, psic;
    for (int k = -2; k <= 2; ++k) {
      Matrix pf = Matrix::Zero(n, n);
      pf.leftCols(l) = random_matrix(rng, n, l);  // U1 may be two-sided
      if (k >= 0) pf.rightCols(n - l) = random_matrix(rng, n, n - l);
      phic.emplace(k, Matrix(pf * dmat));
      Matrix qf = Matrix::Zero(n, n);
      if (k >= 0) qf.topRows(l) = random_matrix(rng, l, n);
      qf.bottomRows(n - l) = random_matrix(rng, n - l, n);
      psic.emplace(k, Matrix(dmat.inverse() * qf));
    }
    auto phi = laurent(n, phic);
    auto psi = laurent(n, psic);
    auto dec = huw_decompose(phi, psi, std::pow(2.0, 2 * n));
    REQUIRE(dec.has_value());
    ++built;
    CHECK(dec->l >= 1);

    // analyticity of the W parts (limited by the rank cut inside the SVD)
    for (int k = -8; k < 0; ++k) {
      CHECK(dec->w1.coeff(k).cwiseAbs().maxCoeff() < 1e-5);
      CHECK(dec->w2.coeff(k).cwiseAbs().maxCoeff() < 1e-5);
    }

    // reassembly reproduces the pair
    for (int k = -2; k <= 2; ++k) {
      Matrix left(n, n);
      left.leftCols(dec->l) = dec->u1.coeff(k);
      left.rightCols(n - dec->l) = dec->w2.coeff(k);
      CHECK((left * dec->D - phi.coeff(k)).cwiseAbs().maxCoeff() < 1e-8);
      Matrix right(n, n);
      right.topRows(dec->l) = dec->w1.coeff(k);
      right.bottomRows(n - dec->l) = dec->u2.coeff(k);
      CHECK((dec->D.inverse() * right - psi.coeff(k)).cwiseAbs().maxCoeff() <
            1e-8);
    }

    // the product collapses to the Hankel operator of U1*W1
    const int N = 48;
    auto prod = compose(hankel_trunc(phi, N), toeplitz_trunc(psi, N));
    auto target = hankel_trunc(dec->product_symbol(), N);
    CHECK(window_residual(prod, target, WindowSpec{0, 36, 0, 36}) < 1e-6);
    CHECK(is_hankel_window(prod, WindowSpec{0, 36, 0, 36}) < 1e-6);
  }
  CHECK(built == 8);
}
