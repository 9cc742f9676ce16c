#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "haplitz/quadrature.hpp"

namespace haplitz {

struct SymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Margin keeping evaluation points strictly inside the disk.
inline constexpr double kBoundaryEpsilon = 1e-6;

/// A point z with |z| < 1 - kBoundaryEpsilon, validated at construction.
class DiskPoint {
 public:
  explicit DiskPoint(Complex z);
  Complex value() const { return z_; }
  double abs() const { return std::abs(z_); }
  DiskPoint conj() const { return DiskPoint(std::conj(z_)); }

 private:
  Complex z_;
};

/// Closed-form rule for coefficients outside the explicit map. The rule is
/// active on the degree range [min_degree, max_degree] (inclusive, with
/// kDegInf sentinels) and is bounded by ||coeff(k)|| <= decay_C * decay_r^|k|.
struct TailRule {
  static constexpr int kDegInf = std::numeric_limits<int>::max() / 2;

  std::function<Matrix(int)> coeff;
  int min_degree = 1;
  int max_degree = 0;  // empty range by default
  double decay_C = 0.0;
  double decay_r = 1.0;
  std::string kind;  // blaschke_conj, singular_inner_conj, half_indicator,
                     // geometric, mobius_phi
  // Tails with sub-geometric coefficient decay evaluate their harmonic
  // extension by Poisson quadrature instead of the coefficient series.
  bool prefer_quadrature = false;
  int quadrature_floor = 2048;

  bool empty() const { return min_degree > max_degree; }
  bool contains(int k) const { return k >= min_degree && k <= max_degree; }
  bool unbounded() const {
    return min_degree <= -kDegInf || max_degree >= kDegInf;
  }
};

/// Matrix-valued function on the unit circle held as Fourier coefficients:
/// an explicit finite map plus an optional closed-form tail rule. Immutable
/// after construction; all operations return new values.
class MatrixSymbol {
 public:
  using CoeffMap = std::map<int, Matrix>;

  MatrixSymbol() : rows_(1), cols_(1) {}
  MatrixSymbol(int rows, int cols, CoeffMap coeffs);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  /// Block dimension for square symbols.
  int n() const;

  /// Fourier coefficient at degree k (explicit value, else tail rule value,
  /// else zero).
  Matrix coeff(int k) const;

  const CoeffMap& explicit_coeffs() const { return coeffs_; }
  const std::optional<TailRule>& tail() const { return tail_; }
  const std::optional<CircleSampler>& sampler() const { return sampler_; }
  std::optional<double> norm_hint() const { return norm_hint_; }

  bool has_unbounded_support() const { return tail_ && tail_->unbounded(); }

  /// Smallest degree window [-D, D] containing all coefficients of modulus
  /// above `tol`; requires bounded support or a decaying tail.
  int support_bound(double tol) const;

  /// Largest |k| over the explicit map and any bounded tail range; throws for
  /// unbounded tails.
  int exact_degree_bound() const;

  /// Circle value at angle theta when a sampler is available; otherwise
  /// evaluates the truncated Fourier series to degree `series_degree`.
  Matrix value_on_circle(double theta, int series_degree = 256) const;

  /// Sup over quadrature samples of the matrix 2-norm on the circle.
  double sup_norm_estimate(int samples = 512) const;

  MatrixSymbol with_norm_hint(double bound) const;
  MatrixSymbol with_sampler(CircleSampler sampler) const;
  MatrixSymbol with_tail(TailRule tail) const;

 private:
  int rows_;
  int cols_;
  CoeffMap coeffs_;
  std::optional<TailRule> tail_;
  std::optional<CircleSampler> sampler_;
  std::optional<double> norm_hint_;

  friend MatrixSymbol plus_part(const MatrixSymbol&);
  friend MatrixSymbol minus_part(const MatrixSymbol&);
  friend MatrixSymbol tilde(const MatrixSymbol&);
  friend MatrixSymbol star(const MatrixSymbol&);
  friend MatrixSymbol const_mul_left(const Matrix&, const MatrixSymbol&);
  friend MatrixSymbol const_mul_right(const MatrixSymbol&, const Matrix&);
  friend MatrixSymbol scale(const MatrixSymbol&, Complex);
  friend MatrixSymbol add(const MatrixSymbol&, const MatrixSymbol&);
};

/// Degree split Phi = Phi_+ + Phi_-: plus_part keeps k >= 0, minus_part
/// keeps k < 0.
MatrixSymbol plus_part(const MatrixSymbol& s);
MatrixSymbol minus_part(const MatrixSymbol& s);

/// Coefficient reflection (tilde s)^(k) = s^(-k), i.e. s(conj(z)).
MatrixSymbol tilde(const MatrixSymbol& s);

/// Adjoint symbol, (s*)^(k) = (s^(-k))^dagger.
MatrixSymbol star(const MatrixSymbol& s);

/// Cauchy product. Both operands need bounded effective support; symbols with
/// unbounded tails must supply `trunc_degree` (tail clipped to [-T, T]).
/// The result keeps every degree reachable from the clipped supports.
MatrixSymbol mul(const MatrixSymbol& a, const MatrixSymbol& b,
                 std::optional<int> trunc_degree = std::nullopt);

MatrixSymbol const_mul_left(const Matrix& A, const MatrixSymbol& s);
MatrixSymbol const_mul_right(const MatrixSymbol& s, const Matrix& A);
MatrixSymbol scale(const MatrixSymbol& s, Complex c);
MatrixSymbol add(const MatrixSymbol& a, const MatrixSymbol& b);
inline MatrixSymbol sub(const MatrixSymbol& a, const MatrixSymbol& b) {
  return add(a, scale(b, Complex(-1.0, 0.0)));
}

/// Harmonic (Poisson) extension at z:
///   sum_{k>=0} s^(k) z^k + sum_{k<0} s^(k) conj(z)^|k|.
/// Uses the coefficient series with a decay-controlled cutoff; tails flagged
/// prefer_quadrature evaluate the Poisson integral instead.
Matrix harmonic_ext(const MatrixSymbol& s, const DiskPoint& z,
                    double tol = 1e-10);

/// Series-only evaluation path (cutoff from the tail decay bound).
Matrix harmonic_ext_series(const MatrixSymbol& s, const DiskPoint& z,
                           double tol = 1e-10);

// ---- Builders -------------------------------------------------------------

/// Scalar Laurent polynomial from {degree -> value}.
MatrixSymbol laurent(const std::map<int, Complex>& coeffs);
/// Matrix Laurent polynomial from {degree -> matrix}.
MatrixSymbol laurent(int n, const MatrixSymbol::CoeffMap& coeffs);
/// Constant symbol.
MatrixSymbol constant(const Matrix& value);
MatrixSymbol zero_symbol(int rows, int cols);
MatrixSymbol identity_symbol(int n);

/// s * I_n for scalar s (block embedding).
MatrixSymbol times_identity(const MatrixSymbol& s, int n);

/// Conjugate reflection of the Blaschke factor b_a(w) = (w-a)/(1-conj(a)w):
/// coefficient at 0 is -conj(a), at -m (m>=1) it is (1-|a|^2) a^(m-1).
MatrixSymbol blaschke_conj(Complex a);

/// Conjugate reflection of the singular inner function
/// exp(mass*(w+xi)/(w-xi)) with point mass at xi on the circle; coefficients
/// by quadrature (node floor 8192), memoized.
MatrixSymbol singular_inner_conj(Complex xi = Complex(1.0, 0.0),
                                 double mass = 1.0);

/// Indicator of the upper half circle theta in (0, pi); coefficients 1/2 at
/// degree 0 and -i/(pi k) at odd k.
MatrixSymbol half_indicator();

/// Two-sided geometric tail: coeff(k) = base * ratio^|k|.
MatrixSymbol geometric(const Matrix& base, double ratio);

/// Moebius automorphism phi_z(w) = (w-z)/(1-conj(z)w) as an analytic symbol:
/// coefficient at 0 is -z, at m>=1 it is (1-|z|^2) conj(z)^(m-1).
MatrixSymbol mobius_phi(const DiskPoint& z);

/// The symbol conj(phi_z) (coefficientwise conjugate reflection).
MatrixSymbol mobius_phi_conj(const DiskPoint& z);

/// Coefficient vector of the normalized reproducing kernel k_z truncated to
/// monomial degrees 0..M-1: sqrt(1-|z|^2) * conj(z)^m.
Vector kernel_kz(const DiskPoint& z, int M);

}  // namespace haplitz
