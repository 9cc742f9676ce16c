#pragma once

#include <string>
#include <utility>
#include <vector>

#include "haplitz/operators.hpp"

namespace haplitz {

/// Cached truncations tied to one Moebius parameter z: the Toeplitz and
/// Hankel truncations of phi_z and its conjugate, the model-space projections
/// C_{z,E} and C_{zbar,E}, and the truncated kernel vectors k_z e_i.
struct MobiusFrame {
  DiskPoint z;
  int n;
  int N;
  TruncatedOperator t_phi_z;      // T_{phi_z I}
  TruncatedOperator t_phi_zbar;   // T_{phi_zbar I}
  TruncatedOperator h_phibar_z;   // H_{conj(phi_z) I}
  TruncatedOperator h_phibar_zbar;
  TruncatedOperator c_z;     // I - T_{phi_z} T_{phi_z}^*
  TruncatedOperator c_zbar;  // I - T_{phi_zbar} T_{phi_zbar}^*
  std::vector<Vector> kz_basis;     // k_z e_i, i = 0..n-1
  std::vector<Vector> kzbar_basis;  // k_zbar e_i

  static MobiusFrame make(const DiskPoint& z, int n, int N);

  /// Mass of the kernel tail dropped by truncation: |z|^(2N).
  double kernel_tail() const;
};

/// Delta_z(X) = X - T_{phi_z}^* X T_{phi_z}.
TruncatedOperator delta_z(const TruncatedOperator& x, const MobiusFrame& f);

/// Omega_z(X) = X T_{phi_z} - T_{phi_zbar}^* X.
TruncatedOperator omega_z(const TruncatedOperator& x, const MobiusFrame& f);

/// Principal submatrix of the block window.
Matrix window_submatrix(const TruncatedOperator& x, const WindowSpec& w);

struct IdentityReport {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  int N = 0;
  int margin = 0;
  int eval_trunc = 0;  // padded truncation used internally
};

/// Names accepted by verify_identity.
std::vector<std::string> registered_identities();

/// Evaluate a named identity on the symbol pair (a, b) at Moebius parameter
/// z. Both sides are built at a padded truncation (padding from the effective
/// coefficient supports) and compared on the window [0, N - margin)^2.
IdentityReport verify_identity(const std::string& name, const MatrixSymbol& a,
                               const MatrixSymbol& b, const DiskPoint& z,
                               int N, int margin, double tolerance = 1e-10);

/// (Frobenius^2 of sum x_i (x) y_i, trace of W_x W_y) for the Gram matrices
/// W_x = [<x_j, x_i>]_{ij}; the two agree for the true operators.
std::pair<double, double> gram_trace_check(
    const std::vector<std::pair<Vector, Vector>>& pairs);

/// One factor of an operator word: a Toeplitz or Hankel truncation symbol.
struct WordFactor {
  bool hankel = false;
  MatrixSymbol symbol;
};

/// Observed interior-window rank of Delta_z applied to a pure-Toeplitz word,
/// against the bound (atom count) * n. Throws if any factor is Hankel.
std::pair<int, int> rank_bound_delta(const std::vector<WordFactor>& word,
                                     const DiskPoint& z, int N, int margin);

/// Observed interior-window rank of Omega_z applied to a word with an odd
/// number of Hankel factors, against the bound (atom count) * n.
std::pair<int, int> rank_bound_omega(const std::vector<WordFactor>& word,
                                     const DiskPoint& z, int N, int margin);

}  // namespace haplitz
