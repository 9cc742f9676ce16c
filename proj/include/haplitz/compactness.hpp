#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "haplitz/operators.hpp"

namespace haplitz {

struct CompactnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Truncation policy for boundary diagnostics: N grows like 12/(1-|z|) so the
/// kernel tail |z|^(2N) stays below 1e-10 up to |z| = 0.995, capped by the
/// dense-dimension limit.
int diagnostic_trunc(const DiskPoint& z, int n);

/// trace[ |Phi_- - Phi_-(z)|^2(z) * |(Psi_-~)* - (Psi_-~)*(zbar)|^2(zbar) ].
/// Equals Trace(T*T) for T = sum_i H_Phi(k_z e_i) (x) H_Psi*(k_zbar e_i).
double c1_trace(const MatrixSymbol& phi, const MatrixSymbol& psi,
                const DiskPoint& z);

/// trace of the harmonic extension at z of
/// |(Phi_- Psi_+)_- - (Phi_- Psi_+)_-(z) + (Phi_- - Phi_-(z)) Psi_-(z)|^2,
/// the squared kernel-image norm sum_i ||H_Phi T_Psi (k_z e_i)||^2.
double c2_trace(const MatrixSymbol& phi, const MatrixSymbol& psi,
                const DiskPoint& z);

/// Scalar criterion |phi_- - phi_-(z)|^2(z) * |psi_- - psi_-(z)|^2(z).
double zheng_product(const MatrixSymbol& phi, const MatrixSymbol& psi,
                     const DiskPoint& z);

/// (series value, truncated value) of trace|Phi_- - Phi_-(z)|^2(z): the
/// coefficient-series evaluation against Frobenius^2 of the truncated
/// product of H_Phi with the conjugate-Moebius Hankel truncation.
std::pair<double, double> hankel_trace_crosscheck(const MatrixSymbol& phi,
                                             const DiskPoint& z, int N);

struct GammaResult {
  double value = 0.0;
  Matrix argmin;
  double grad_norm = 0.0;  // projected-gradient norm of the smooth surrogate
  bool converged = false;
};

/// Gamma_1(z) = inf over the entrywise box of radius d of
///   ||H_{Phi(I-A)} H_{conj(phi_zbar)}|| + ||H_{conj(phi_zbar)} H_{A Psi}||.
/// Convex in A; minimized by projected gradient on the squared surrogate
/// followed by a compass polish of the true objective. An explicit `start`
/// replaces the default multi-start set.
GammaResult gamma1(const MatrixSymbol& phi, const MatrixSymbol& psi,
                   const DiskPoint& z, int N, double d,
                   const std::optional<Matrix>& start = std::nullopt);

/// Gamma_2 adds the third term ||H_{Phi A Psi} H_{conj(phi_zbar)}||.
GammaResult gamma2(const MatrixSymbol& phi, const MatrixSymbol& psi,
                   const DiskPoint& z, int N, double d,
                   const std::optional<Matrix>& start = std::nullopt);

/// || sum_i H_Phi(k_z e_i) (x) H_Psi*(k_zbar e_i) ||, the norm of
/// Omega_z(H_Phi T_Psi) evaluated through its rank-n kernel form.
double omega_norm(const MatrixSymbol& phi, const MatrixSymbol& psi,
                  const DiskPoint& z, int N);

/// || sum_i (H_Phi T_Psi)(k_z e_i) (x) (k_zbar e_i) ||.
double product_kernel_norm(const MatrixSymbol& phi, const MatrixSymbol& psi,
                           const DiskPoint& z, int N);

/// Boundary sampling grid: every (theta, r) pair with r strictly increasing
/// and inside the disk margin.
struct SweepGrid {
  std::vector<double> rays;
  std::vector<double> radii;
  int min_trunc = 64;

  void validate() const;
};

struct DiagnosticRow {
  double theta = 0.0;
  double r = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double zheng = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double omega = 0.0;
  double product_kernel = 0.0;
  Matrix gamma1_A;
  Matrix gamma2_A;
  int N = 0;
  double tail_bound = 0.0;
  bool ok = true;
  std::string error;
};

struct RayTrend {
  double theta = 0.0;
  // least-squares slope of each computed quantity against r
  std::vector<std::pair<std::string, double>> slope;
};

struct DiagnosticReport {
  std::vector<DiagnosticRow> rows;
  std::vector<RayTrend> trends;
};

/// Names accepted in the `which` set of radial_sweep.
const std::set<std::string>& sweep_quantities();

/// Evaluate the requested quantities over the grid. Points are independent
/// and processed in parallel (HAPLITZ_THREADS bounds the worker count); rows
/// come back sorted by (theta, r) regardless of scheduling. Per-point
/// failures are recorded in the row and do not abort the sweep.
DiagnosticReport radial_sweep(const MatrixSymbol& phi, const MatrixSymbol& psi,
                              const SweepGrid& grid,
                              const std::set<std::string>& which,
                              double box_d = 1.0);

/// Embed scalar pairs (phi_i, psi_i) into one block pair: Phi carries the
/// phi_i along its first row and Psi the psi_i down its first column, so the
/// (1,1) block of H_Phi T_Psi realizes sum_i H_{phi_i} T_{psi_i}.
std::pair<MatrixSymbol, MatrixSymbol> embed_sum(
    const std::vector<std::pair<MatrixSymbol, MatrixSymbol>>& pairs);

}  // namespace haplitz
