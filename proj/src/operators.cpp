#include "haplitz/operators.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <ostream>
#include <random>

namespace haplitz {

TruncatedOperator::TruncatedOperator(Matrix data, int block_size, int trunc,
                                     std::string provenance)
    : data_(std::move(data)),
      n_(block_size),
      N_(trunc),
      provenance_(std::move(provenance)) {
  if (n_ <= 0 || N_ <= 0) throw OperatorError("nonpositive dimensions");
  if (N_ * n_ > kMaxDenseDim) {
    throw OperatorError("dense side length exceeds cap " +
                        std::to_string(kMaxDenseDim));
  }
  if (data_.rows() != N_ * n_ || data_.cols() != N_ * n_) {
    throw OperatorError("data does not match N*n");
  }
}

Matrix TruncatedOperator::block(int i, int j) const {
  if (i < 0 || i >= N_ || j < 0 || j >= N_) {
    throw OperatorError("block index out of range");
  }
  return data_.block(i * n_, j * n_, n_, n_);
}

TruncatedOperator toeplitz_trunc(const MatrixSymbol& s, int N) {
  const int n = s.n();
  Matrix m = Matrix::Zero(N * n, N * n);
  for (int k = -(N - 1); k <= N - 1; ++k) {
    Matrix c = s.coeff(k);
    if (c.isZero(0.0)) continue;
    for (int j = std::max(0, -k); j < N && j + k < N; ++j) {
      m.block((j + k) * n, j * n, n, n) = c;
    }
  }
  return TruncatedOperator(std::move(m), n, N, "toeplitz");
}

TruncatedOperator hankel_trunc(const MatrixSymbol& s, int N) {
  const int n = s.n();
  Matrix m = Matrix::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Matrix c = s.coeff(-i - j - 1);
      if (c.isZero(0.0)) continue;
      m.block(i * n, j * n, n, n) = c;
    }
  }
  return TruncatedOperator(std::move(m), n, N, "hankel");
}

namespace {

void check_match(const TruncatedOperator& x, const TruncatedOperator& y) {
  if (x.block_size() != y.block_size() || x.trunc() != y.trunc()) {
    throw OperatorError("operator shape mismatch");
  }
}

}  // namespace

TruncatedOperator compose(const TruncatedOperator& x,
                          const TruncatedOperator& y) {
  check_match(x, y);
  return TruncatedOperator(x.data() * y.data(), x.block_size(), x.trunc(),
                           "composite");
}

TruncatedOperator adjoint(const TruncatedOperator& x) {
  return TruncatedOperator(x.data().adjoint(), x.block_size(), x.trunc(),
                           "composite");
}

TruncatedOperator add(const TruncatedOperator& x, const TruncatedOperator& y) {
  check_match(x, y);
  return TruncatedOperator(x.data() + y.data(), x.block_size(), x.trunc(),
                           "composite");
}

TruncatedOperator sub(const TruncatedOperator& x, const TruncatedOperator& y) {
  check_match(x, y);
  return TruncatedOperator(x.data() - y.data(), x.block_size(), x.trunc(),
                           "composite");
}

TruncatedOperator scale(const TruncatedOperator& x, Complex c) {
  return TruncatedOperator(c * x.data(), x.block_size(), x.trunc(),
                           "composite");
}

TruncatedOperator identity_trunc(int n, int N) {
  return TruncatedOperator(Matrix::Identity(N * n, N * n), n, N, "composite");
}

TruncatedOperator rank_one_sum(
    const std::vector<std::pair<Vector, Vector>>& pairs, int block_size) {
  if (pairs.empty()) throw OperatorError("rank_one_sum of no pairs");
  const auto dim = pairs.front().first.size();
  if (dim % block_size != 0) {
    throw OperatorError("vector length not a multiple of the block size");
  }
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& [u, v] : pairs) {
    if (u.size() != dim || v.size() != dim) {
      throw OperatorError("rank_one_sum length mismatch");
    }
    m += u * v.adjoint();
  }
  return TruncatedOperator(std::move(m), block_size,
                           static_cast<int>(dim) / block_size,
                           "rank-one-sum");
}

double op_norm(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) return 0.0;
  if (std::max(x.rows(), x.cols()) <= 1024) {
    return Eigen::BDCSVD<Matrix>(x).singularValues()(0);
  }
  // Power iteration on X^dagger X. The Rayleigh quotient gives a lower
  // bound; ||X^dagger X v - lambda v|| certifies the two-sided gap.
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> gauss;
  Vector v(x.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Vector w = x.adjoint() * (x * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::real((w.adjoint() * (x.adjoint() * (x * w)))(0));
    const double resid = (x.adjoint() * (x * w) - next * w).norm();
    v = std::move(w);
    lambda = next;
    // lambda in [next, next + resid]; stop when sqrt spread is tight.
    if (std::sqrt(next + resid) - std::sqrt(next) < 1e-10 * std::sqrt(next)) {
      return std::sqrt(next);
    }
  }
  throw OperatorError("power iteration did not certify the norm");
}

double op_norm(const TruncatedOperator& x) { return op_norm(x.data()); }

double frob_norm(const Matrix& x) { return x.norm(); }
double frob_norm(const TruncatedOperator& x) { return x.data().norm(); }

Complex trace_of(const Matrix& x) { return x.trace(); }
Complex trace_of(const TruncatedOperator& x) { return x.data().trace(); }

int num_rank(const Matrix& x, double tol_factor) {
  if (x.rows() == 0 || x.cols() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(x);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0;
  const double cut = tol_factor * sv(0);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

int num_rank(const TruncatedOperator& x, double tol_factor) {
  return num_rank(x.data(), tol_factor);
}

WindowSpec WindowSpec::interior(int N, int margin) {
  if (2 * margin >= N) throw OperatorError("margin swallows the truncation");
  return {0, N - margin, 0, N - margin};
}

namespace {

void check_window(const TruncatedOperator& x, const WindowSpec& w,
                  int row_slack, int col_slack) {
  if (w.row_begin < 0 || w.col_begin < 0 ||
      w.row_end + row_slack > x.trunc() || w.col_end + col_slack > x.trunc() ||
      w.row_begin >= w.row_end || w.col_begin >= w.col_end) {
    throw OperatorError("window leaves the truncation");
  }
}

}  // namespace

double is_toeplitz_window(const TruncatedOperator& x, const WindowSpec& w) {
  check_window(x, w, 1, 1);
  double worst = 0.0;
  for (int i = w.row_begin; i < w.row_end; ++i) {
    for (int j = w.col_begin; j < w.col_end; ++j) {
      worst = std::max(
          worst, (x.block(i + 1, j + 1) - x.block(i, j)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double is_hankel_window(const TruncatedOperator& x, const WindowSpec& w) {
  check_window(x, w, 1, 1);
  double worst = 0.0;
  for (int i = w.row_begin; i < w.row_end; ++i) {
    for (int j = w.col_begin; j < w.col_end; ++j) {
      worst = std::max(
          worst, (x.block(i, j + 1) - x.block(i + 1, j)).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double window_residual(const TruncatedOperator& x, const TruncatedOperator& y,
                       const WindowSpec& w) {
  check_match(x, y);
  check_window(x, w, 0, 0);
  const int n = x.block_size();
  return (x.data().block((w.row_begin) * n, (w.col_begin) * n,
                         (w.row_end - w.row_begin) * n,
                         (w.col_end - w.col_begin) * n) -
          y.data().block((w.row_begin) * n, (w.col_begin) * n,
                         (w.row_end - w.row_begin) * n,
                         (w.col_end - w.col_begin) * n))
      .cwiseAbs()
      .maxCoeff();
}

void dump_csv(std::ostream& os, const TruncatedOperator& x) {
  os << "# n=" << x.block_size() << " N=" << x.trunc()
     << " provenance=" << x.provenance() << "\n";
  const auto& m = x.data();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << m(i, j).real() << "," << m(i, j).imag();
    }
    os << "\n";
  }
}

}  // namespace haplitz
