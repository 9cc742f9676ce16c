#pragma once

#include <optional>
#include <string>
#include <vector>

#include "haplitz/operators.hpp"

namespace haplitz {

struct HankelnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix constrained to the entrywise-modulus box of radius `bound`.
struct BoxMatrix {
  Matrix A;
  double bound = 1.0;

  /// Throws if any entry exceeds the box (with 1e-12 slack).
  void validate() const;
};

enum class FeasibilityStatus { kFeasible, kInfeasible, kDegenerate };

/// Outcome of the analytic-splitting search: either a box matrix A making
/// Phi(I-A) and A*Psi analytic, or an infeasibility margin (the attained
/// minimum of the residual functional over the box).
struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::kInfeasible;
  BoxMatrix box;
  double margin = 0.0;    // attained minimum of the objective
  double resid_x = 0.0;   // ||X(I-A)||_F
  double resid_y = 0.0;   // ||A Y||_F
  std::string note;
};

/// Search the entrywise box of radius d for A with X(I-A) = 0 and A Y = 0,
/// where X stacks the negative coefficients of phi (vertically) and Y those
/// of psi (horizontally), up to degree_cap. Convex quadratic objective
/// ||X(I-A)||^2 + ||A Y||^2 minimized by projected gradient with exact line
/// search; infeasibility margin is the attained minimum.
FeasibilityResult find_feasible_A(const MatrixSymbol& phi,
                                  const MatrixSymbol& psi, double d = 1.0,
                                  int degree_cap = 64);

struct XyCertificate {
  bool ok = false;
  std::string message;
  std::vector<int> sigma;  // position -> original index
  Matrix A;
};

/// Constructive witness for a vanishing rank-one sum: if sum x_i (x) y_i = 0
/// (checked first), produce A with unit entry box such that [x](I-A) = 0 and
/// [y]A^* = 0. Recursive max-norm pivot on the y family; among maximizing
/// indices the smallest wins.
XyCertificate xy_certificate(const std::vector<Vector>& xs,
                             const std::vector<Vector>& ys,
                             double tol = 1e-10);

struct BasisExtraction {
  std::vector<int> sigma;  // dependent vectors first, spanning ones last
  Matrix B;                // r x (n-r); dependents = spanners * B
};

/// For a family of rank r with 0 < r < n, order it so the last r vectors
/// span and express the first n-r over them with entries bounded by 2^(2n).
/// Throws for zero or full-rank families.
BasisExtraction bounded_basis_extraction(const std::vector<Vector>& xs,
                                         double tol = 1e-9);

/// Residual of the rank-one sum transport: with x = z A and w = y A^*,
/// sum x_i (x) y_i equals sum z_i (x) w_i. zs has r vectors, ys has n,
/// A is r x n.
double xy0_check(const std::vector<Vector>& zs, const std::vector<Vector>& ys,
                 const Matrix& A);

/// Splitting of a feasible pair in the invertible-frame format: Phi = [U1 W2] D
/// and Psi = D^{-1} [W1; U2] with W1, W2 analytic; the Hankel-Toeplitz
/// product then collapses to the Hankel operator of U1*W1.
struct HuwDecomposition {
  Matrix D;
  int l = 0;
  MatrixSymbol u1;  // n x l
  MatrixSymbol w2;  // n x (n-l), analytic
  MatrixSymbol w1;  // l x n, analytic
  MatrixSymbol u2;  // (n-l) x n
  double cond_d = 1.0;
  FeasibilityResult feasibility;

  /// The n x n product symbol U1*W1 (zero symbol when l = 0).
  MatrixSymbol product_symbol() const;
};

std::optional<HuwDecomposition> huw_decompose(const MatrixSymbol& phi,
                                              const MatrixSymbol& psi,
                                              double d = 4.0,
                                              int degree_cap = 64);

}  // namespace haplitz
