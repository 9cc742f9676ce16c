#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "haplitz/symbol.hpp"

namespace haplitz {

struct OperatorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Hard cap on the dense side length N*n.
inline constexpr int kMaxDenseDim = 4096;

/// Dense truncation of an operator on the vector Hardy space: N monomial
/// blocks of size n, stored as one (N*n) x (N*n) matrix. Immutable.
class TruncatedOperator {
 public:
  TruncatedOperator(Matrix data, int block_size, int trunc,
                    std::string provenance);

  const Matrix& data() const { return data_; }
  int block_size() const { return n_; }
  int trunc() const { return N_; }
  int dim() const { return N_ * n_; }
  const std::string& provenance() const { return provenance_; }

  /// Block (i, j), an n x n slice.
  Matrix block(int i, int j) const;

 private:
  Matrix data_;
  int n_;
  int N_;
  std::string provenance_;
};

/// Toeplitz truncation: block (i, j) = coeff(s, i - j).
TruncatedOperator toeplitz_trunc(const MatrixSymbol& s, int N);

/// Hankel truncation: block (i, j) = coeff(s, -i - j - 1). Depends only on
/// minus_part(s); analytic symbols truncate to zero.
TruncatedOperator hankel_trunc(const MatrixSymbol& s, int N);

TruncatedOperator compose(const TruncatedOperator& x,
                          const TruncatedOperator& y);
TruncatedOperator adjoint(const TruncatedOperator& x);
TruncatedOperator add(const TruncatedOperator& x, const TruncatedOperator& y);
TruncatedOperator sub(const TruncatedOperator& x, const TruncatedOperator& y);
TruncatedOperator scale(const TruncatedOperator& x, Complex c);
TruncatedOperator identity_trunc(int n, int N);

/// Sum of rank-one operators u_i (x) v_i, acting as f -> <f, v_i> u_i; the
/// matrix is sum u_i v_i^dagger.
TruncatedOperator rank_one_sum(
    const std::vector<std::pair<Vector, Vector>>& pairs, int block_size);

/// Largest singular value. Full SVD up to side length 1024; beyond that a
/// power iteration on X^dagger X with a certified two-sided bound.
double op_norm(const Matrix& x);
double op_norm(const TruncatedOperator& x);

double frob_norm(const Matrix& x);
double frob_norm(const TruncatedOperator& x);
Complex trace_of(const Matrix& x);
Complex trace_of(const TruncatedOperator& x);

/// Number of singular values above tol_factor * sigma_max.
int num_rank(const Matrix& x, double tol_factor = 1e-9);
int num_rank(const TruncatedOperator& x, double tol_factor = 1e-9);

/// Block-index window [row_begin, row_end) x [col_begin, col_end).
struct WindowSpec {
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;

  /// Symmetric interior window for truncation length N with the given edge
  /// margin on every side.
  static WindowSpec interior(int N, int margin);
};

/// Max block-entry deviation of the shift-invariance relation on the window:
/// Toeplitz structure means block(i+1, j+1) = block(i, j).
double is_toeplitz_window(const TruncatedOperator& x, const WindowSpec& w);

/// Hankel structure means block(i, j+1) = block(i+1, j).
double is_hankel_window(const TruncatedOperator& x, const WindowSpec& w);

/// Max block-entry deviation |x - y| over the window.
double window_residual(const TruncatedOperator& x, const TruncatedOperator& y,
                       const WindowSpec& w);

/// CSV dump: header line `# n=<n> N=<N> provenance=<tag>`, then row-major
/// interleaved re,im entries.
void dump_csv(std::ostream& os, const TruncatedOperator& x);

}  // namespace haplitz
