#include "haplitz/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace haplitz {

namespace {

constexpr int kInf = TailRule::kDegInf;

int clamp_deg(long long v) {
  return static_cast<int>(std::clamp<long long>(v, -kInf, kInf));
}

Matrix zero_matrix(int rows, int cols) { return Matrix::Zero(rows, cols); }

double spectral_norm(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace

DiskPoint::DiskPoint(Complex z) : z_(z) {
  if (std::abs(z) >= 1.0 - kBoundaryEpsilon) {
    throw SymbolError("disk point with |z| >= 1 - 1e-6");
  }
}

MatrixSymbol::MatrixSymbol(int rows, int cols, CoeffMap coeffs)
    : rows_(rows), cols_(cols), coeffs_(std::move(coeffs)) {
  if (rows_ <= 0 || cols_ <= 0) throw SymbolError("nonpositive dimension");
  for (const auto& [k, m] : coeffs_) {
    if (m.rows() != rows_ || m.cols() != cols_) {
      throw SymbolError("coefficient dimension mismatch at degree " +
                        std::to_string(k));
    }
  }
}

int MatrixSymbol::n() const {
  if (rows_ != cols_) throw SymbolError("rectangular symbol has no block size");
  return rows_;
}

Matrix MatrixSymbol::coeff(int k) const {
  auto it = coeffs_.find(k);
  if (it != coeffs_.end()) return it->second;
  if (tail_ && tail_->contains(k)) return tail_->coeff(k);
  return zero_matrix(rows_, cols_);
}

int MatrixSymbol::support_bound(double tol) const {
  int bound = 0;
  for (const auto& [k, m] : coeffs_) bound = std::max(bound, std::abs(k));
  if (tail_ && !tail_->empty()) {
    if (!tail_->unbounded()) {
      bound = std::max({bound, std::abs(tail_->min_degree),
                        std::abs(tail_->max_degree)});
    } else if (tail_->decay_r < 1.0 && tail_->decay_C > 0.0) {
      const double d =
          std::log(tol / tail_->decay_C) / std::log(tail_->decay_r);
      bound = std::max(bound, static_cast<int>(std::ceil(std::max(1.0, d))));
    } else if (tail_->decay_C == 0.0) {
      // zero tail
    } else {
      throw SymbolError("support_bound: tail without geometric decay");
    }
  }
  return bound;
}

int MatrixSymbol::exact_degree_bound() const {
  if (has_unbounded_support()) {
    throw SymbolError("exact_degree_bound: unbounded tail");
  }
  int bound = 0;
  for (const auto& [k, m] : coeffs_) bound = std::max(bound, std::abs(k));
  if (tail_ && !tail_->empty()) {
    bound = std::max({bound, std::abs(tail_->min_degree),
                      std::abs(tail_->max_degree)});
  }
  return bound;
}

Matrix MatrixSymbol::value_on_circle(double theta, int series_degree) const {
  if (sampler_) return (*sampler_)(theta);
  Matrix acc = zero_matrix(rows_, cols_);
  const int d = has_unbounded_support()
                    ? std::min(series_degree, support_bound(1e-12))
                    : exact_degree_bound();
  for (int k = -d; k <= d; ++k) {
    Matrix c = coeff(k);
    if (c.isZero(0.0)) continue;
    acc += c * std::exp(Complex(0.0, k * theta));
  }
  return acc;
}

double MatrixSymbol::sup_norm_estimate(int samples) const {
  if (norm_hint_) return *norm_hint_;
  double sup = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / samples;
    sup = std::max(sup, spectral_norm(value_on_circle(theta)));
  }
  return sup;
}

MatrixSymbol MatrixSymbol::with_norm_hint(double bound) const {
  MatrixSymbol out = *this;
  out.norm_hint_ = bound;
  return out;
}

MatrixSymbol MatrixSymbol::with_sampler(CircleSampler sampler) const {
  MatrixSymbol out = *this;
  out.sampler_ = std::move(sampler);
  return out;
}

MatrixSymbol MatrixSymbol::with_tail(TailRule tail) const {
  MatrixSymbol out = *this;
  for (const auto& [k, m] : coeffs_) {
    if (tail.contains(k)) {
      throw SymbolError("tail rule overlaps explicit coefficient at degree " +
                        std::to_string(k));
    }
  }
  out.tail_ = std::move(tail);
  return out;
}

namespace {

/// Keep only degrees in [lo, hi]. Restores a sampler for the kept part when
/// the discarded part is a finite Laurent polynomial.
MatrixSymbol restrict_degrees(const MatrixSymbol& s, int lo, int hi) {
  MatrixSymbol::CoeffMap kept;
  std::vector<std::pair<int, Matrix>> dropped;
  for (const auto& [k, m] : s.explicit_coeffs()) {
    if (k >= lo && k <= hi) {
      kept.emplace(k, m);
    } else {
      dropped.emplace_back(k, m);
    }
  }
  MatrixSymbol out(s.rows(), s.cols(), std::move(kept));

  bool dropped_bounded = true;
  if (s.tail() && !s.tail()->empty()) {
    TailRule clipped = *s.tail();
    clipped.min_degree = std::max(clipped.min_degree, lo);
    clipped.max_degree = std::min(clipped.max_degree, hi);
    if (!clipped.empty()) out = out.with_tail(clipped);

    // Parts of the tail range falling outside [lo, hi].
    const auto collect = [&](int a, int b) {
      if (a > b) return;
      if (a <= -kInf || b >= kInf) {
        dropped_bounded = false;
        return;
      }
      for (int k = a; k <= b; ++k) dropped.emplace_back(k, s.tail()->coeff(k));
    };
    collect(s.tail()->min_degree, std::min(s.tail()->max_degree, lo - 1));
    collect(std::max(s.tail()->min_degree, hi + 1), s.tail()->max_degree);
  }

  if (s.sampler() && dropped_bounded) {
    auto base = *s.sampler();
    auto rows = s.rows();
    auto cols = s.cols();
    out = out.with_sampler([base, dropped, rows, cols](double theta) {
      Matrix v = base(theta);
      for (const auto& [k, m] : dropped) {
        v -= m * std::exp(Complex(0.0, k * theta));
      }
      return v;
    });
  }
  if (s.norm_hint() && lo <= -kInf && hi >= kInf) {
    out = out.with_norm_hint(*s.norm_hint());
  }
  return out;
}

}  // namespace

MatrixSymbol plus_part(const MatrixSymbol& s) {
  return restrict_degrees(s, 0, kInf);
}

MatrixSymbol minus_part(const MatrixSymbol& s) {
  return restrict_degrees(s, -kInf, -1);
}

MatrixSymbol tilde(const MatrixSymbol& s) {
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.coeffs_) out.emplace(-k, m);
  MatrixSymbol r(s.rows_, s.cols_, std::move(out));
  if (s.tail_ && !s.tail_->empty()) {
    TailRule t = *s.tail_;
    auto base = s.tail_->coeff;
    t.coeff = [base](int k) { return base(-k); };
    t.min_degree = clamp_deg(-static_cast<long long>(s.tail_->max_degree));
    t.max_degree = clamp_deg(-static_cast<long long>(s.tail_->min_degree));
    r = r.with_tail(std::move(t));
  }
  if (s.sampler_) {
    auto base = *s.sampler_;
    r = r.with_sampler([base](double theta) { return base(-theta); });
  }
  if (s.norm_hint_) r = r.with_norm_hint(*s.norm_hint_);
  return r;
}

MatrixSymbol star(const MatrixSymbol& s) {
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.coeffs_) out.emplace(-k, m.adjoint());
  MatrixSymbol r(s.cols_, s.rows_, std::move(out));
  if (s.tail_ && !s.tail_->empty()) {
    TailRule t = *s.tail_;
    auto base = s.tail_->coeff;
    t.coeff = [base](int k) { return Matrix(base(-k).adjoint()); };
    t.min_degree = clamp_deg(-static_cast<long long>(s.tail_->max_degree));
    t.max_degree = clamp_deg(-static_cast<long long>(s.tail_->min_degree));
    r = r.with_tail(std::move(t));
  }
  if (s.sampler_) {
    auto base = *s.sampler_;
    r = r.with_sampler(
        [base](double theta) { return Matrix(base(theta).adjoint()); });
  }
  if (s.norm_hint_) r = r.with_norm_hint(*s.norm_hint_);
  return r;
}

MatrixSymbol const_mul_left(const Matrix& A, const MatrixSymbol& s) {
  if (A.cols() != s.rows_) throw SymbolError("const_mul dimension mismatch");
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.coeffs_) out.emplace(k, A * m);
  MatrixSymbol r(static_cast<int>(A.rows()), s.cols_, std::move(out));
  if (s.tail_ && !s.tail_->empty()) {
    TailRule t = *s.tail_;
    auto base = s.tail_->coeff;
    Matrix a = A;
    t.coeff = [base, a](int k) { return Matrix(a * base(k)); };
    t.decay_C = s.tail_->decay_C * spectral_norm(A);
    r = r.with_tail(std::move(t));
  }
  if (s.sampler_) {
    auto base = *s.sampler_;
    Matrix a = A;
    r = r.with_sampler(
        [base, a](double theta) { return Matrix(a * base(theta)); });
  }
  return r;
}

MatrixSymbol const_mul_right(const MatrixSymbol& s, const Matrix& A) {
  if (s.cols_ != A.rows()) throw SymbolError("const_mul dimension mismatch");
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.coeffs_) out.emplace(k, m * A);
  MatrixSymbol r(s.rows_, static_cast<int>(A.cols()), std::move(out));
  if (s.tail_ && !s.tail_->empty()) {
    TailRule t = *s.tail_;
    auto base = s.tail_->coeff;
    Matrix a = A;
    t.coeff = [base, a](int k) { return Matrix(base(k) * a); };
    t.decay_C = s.tail_->decay_C * spectral_norm(A);
    r = r.with_tail(std::move(t));
  }
  if (s.sampler_) {
    auto base = *s.sampler_;
    Matrix a = A;
    r = r.with_sampler(
        [base, a](double theta) { return Matrix(base(theta) * a); });
  }
  return r;
}

MatrixSymbol scale(const MatrixSymbol& s, Complex c) {
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.coeffs_) out.emplace(k, c * m);
  MatrixSymbol r(s.rows_, s.cols_, std::move(out));
  if (s.tail_ && !s.tail_->empty()) {
    TailRule t = *s.tail_;
    auto base = s.tail_->coeff;
    t.coeff = [base, c](int k) { return Matrix(c * base(k)); };
    t.decay_C = s.tail_->decay_C * std::abs(c);
    r = r.with_tail(std::move(t));
  }
  if (s.sampler_) {
    auto base = *s.sampler_;
    r = r.with_sampler(
        [base, c](double theta) { return Matrix(c * base(theta)); });
  }
  if (s.norm_hint_) r = r.with_norm_hint(*s.norm_hint_ * std::abs(c));
  return r;
}

MatrixSymbol add(const MatrixSymbol& a, const MatrixSymbol& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
    throw SymbolError("add dimension mismatch");
  }
  const bool a_tail = a.tail_ && !a.tail_->empty();
  const bool b_tail = b.tail_ && !b.tail_->empty();
  if (a_tail && b_tail) {
    throw SymbolError("add: both operands carry tails; truncate one first");
  }
  const MatrixSymbol& tailed = a_tail ? a : b;
  const MatrixSymbol& plain = a_tail ? b : a;

  MatrixSymbol::CoeffMap out = tailed.coeffs_;
  for (const auto& [k, m] : plain.coeffs_) {
    auto it = out.find(k);
    if (it == out.end()) {
      // Keep the tail rule authoritative where it applies.
      if (tailed.tail_ && tailed.tail_->contains(k)) {
        out.emplace(k, Matrix(tailed.tail_->coeff(k) + m));
      } else {
        out.emplace(k, m);
      }
    } else {
      it->second += m;
    }
  }
  MatrixSymbol r(a.rows_, a.cols_, std::move(out));
  if (tailed.tail_ && !tailed.tail_->empty()) {
    // Touched endpoint degrees shrink the rule range; interior overlaps move
    // back under the rule through a wrapping closure, preserving the
    // no-overlap invariant without materializing unbounded ranges.
    TailRule t = *tailed.tail_;
    std::map<int, Matrix> folded;
    for (const auto& [k, m] : plain.coeffs_) {
      if (!t.contains(k)) continue;
      if (k == t.min_degree) {
        ++t.min_degree;
      } else if (k == t.max_degree) {
        --t.max_degree;
      } else {
        auto it = r.coeffs_.find(k);
        folded.emplace(k, it->second);
        r.coeffs_.erase(it);
      }
    }
    if (!folded.empty()) {
      double extra = 0.0;
      for (const auto& [k, m] : folded) {
        const double scale =
            t.decay_r < 1.0 ? std::pow(t.decay_r, std::abs(k)) : 1.0;
        extra = std::max(extra, m.cwiseAbs().maxCoeff() / scale);
      }
      auto base = t.coeff;
      t.coeff = [base, folded](int k) {
        auto it = folded.find(k);
        return it != folded.end() ? it->second : base(k);
      };
      t.decay_C += extra;
    }
    if (!t.empty()) r = r.with_tail(std::move(t));
  }
  if (tailed.sampler_ && plain.sampler_) {
    auto f = *tailed.sampler_;
    auto g = *plain.sampler_;
    r = r.with_sampler(
        [f, g](double theta) { return Matrix(f(theta) + g(theta)); });
  } else if (tailed.sampler_ && !plain.tail_) {
    auto f = *tailed.sampler_;
    auto terms = plain.coeffs_;
    r = r.with_sampler([f, terms](double theta) {
      Matrix v = f(theta);
      for (const auto& [k, m] : terms) {
        v += m * std::exp(Complex(0.0, k * theta));
      }
      return v;
    });
  }
  return r;
}

MatrixSymbol mul(const MatrixSymbol& a, const MatrixSymbol& b,
                 std::optional<int> trunc_degree) {
  if (a.cols() != b.rows()) throw SymbolError("mul dimension mismatch");
  if ((a.has_unbounded_support() || b.has_unbounded_support()) &&
      !trunc_degree) {
    throw SymbolError(
        "mul: unbounded effective support; supply a truncation degree");
  }
  const auto collect = [&](const MatrixSymbol& s) {
    std::vector<std::pair<int, Matrix>> terms;
    const int cap = trunc_degree ? *trunc_degree : s.exact_degree_bound();
    for (const auto& [k, m] : s.explicit_coeffs()) {
      if (std::abs(k) <= cap || !trunc_degree) terms.emplace_back(k, m);
    }
    if (s.tail() && !s.tail()->empty()) {
      const int lo = std::max(s.tail()->min_degree, -cap);
      const int hi = std::min(s.tail()->max_degree, cap);
      for (int k = lo; k <= hi; ++k) {
        terms.emplace_back(k, s.tail()->coeff(k));
      }
    }
    return terms;
  };
  const auto ta = collect(a);
  const auto tb = collect(b);
  MatrixSymbol::CoeffMap out;
  for (const auto& [ka, ma] : ta) {
    for (const auto& [kb, mb] : tb) {
      const int k = ka + kb;
      auto it = out.find(k);
      if (it == out.end()) {
        out.emplace(k, Matrix(ma * mb));
      } else {
        it->second += ma * mb;
      }
    }
  }
  // Drop exact zeros to keep supports tight.
  for (auto it = out.begin(); it != out.end();) {
    if (it->second.isZero(0.0)) {
      it = out.erase(it);
    } else {
      ++it;
    }
  }
  return MatrixSymbol(a.rows(), b.cols(), std::move(out));
}

Matrix harmonic_ext_series(const MatrixSymbol& s, const DiskPoint& z,
                           double tol) {
  const Complex zv = z.value();
  const Complex zc = std::conj(zv);
  Matrix acc = Matrix::Zero(s.rows(), s.cols());
  const auto term_weight = [&](int k) {
    return k >= 0 ? std::pow(zv, k) : std::pow(zc, -k);
  };
  for (const auto& [k, m] : s.explicit_coeffs()) acc += m * term_weight(k);
  if (s.tail() && !s.tail()->empty()) {
    int lo = s.tail()->min_degree;
    int hi = s.tail()->max_degree;
    if (s.tail()->unbounded()) {
      const double rho =
          std::min(1.0 - 1e-12, s.tail()->decay_r * std::abs(zv));
      const double c = std::max(s.tail()->decay_C, 1e-300);
      const double d = std::log(tol * (1.0 - rho) / c) / std::log(rho);
      const auto cutoff = static_cast<long long>(std::ceil(std::max(1.0, d)));
      if (cutoff > 2'000'000) {
        throw SymbolError("harmonic_ext: series cutoff policy cannot meet " +
                          std::to_string(tol));
      }
      lo = std::max<long long>(lo, -cutoff);
      hi = std::min<long long>(hi, cutoff);
    }
    for (int k = lo; k <= hi; ++k) {
      Matrix c = s.tail()->coeff(k);
      if (c.isZero(0.0)) continue;
      acc += c * term_weight(k);
    }
  }
  return acc;
}

Matrix harmonic_ext(const MatrixSymbol& s, const DiskPoint& z, double tol) {
  if (s.tail() && s.tail()->prefer_quadrature && s.sampler()) {
    return poisson_integral(*s.sampler(), z.value(), tol,
                            std::max(2048, s.tail()->quadrature_floor));
  }
  return harmonic_ext_series(s, z, tol);
}

// ---- Builders -------------------------------------------------------------

MatrixSymbol laurent(const std::map<int, Complex>& coeffs) {
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, v] : coeffs) {
    Matrix m(1, 1);
    m(0, 0) = v;
    out.emplace(k, std::move(m));
  }
  return MatrixSymbol(1, 1, std::move(out));
}

MatrixSymbol laurent(int n, const MatrixSymbol::CoeffMap& coeffs) {
  return MatrixSymbol(n, n, coeffs);
}

MatrixSymbol constant(const Matrix& value) {
  MatrixSymbol::CoeffMap out;
  if (!value.isZero(0.0)) out.emplace(0, value);
  return MatrixSymbol(static_cast<int>(value.rows()),
                      static_cast<int>(value.cols()), std::move(out));
}

MatrixSymbol zero_symbol(int rows, int cols) {
  return MatrixSymbol(rows, cols, {});
}

MatrixSymbol identity_symbol(int n) {
  return constant(Matrix::Identity(n, n));
}

MatrixSymbol times_identity(const MatrixSymbol& s, int n) {
  if (s.rows() != 1 || s.cols() != 1) {
    throw SymbolError("times_identity expects a scalar symbol");
  }
  MatrixSymbol::CoeffMap out;
  for (const auto& [k, m] : s.explicit_coeffs()) {
    out.emplace(k, Matrix(m(0, 0) * Matrix::Identity(n, n)));
  }
  MatrixSymbol r(n, n, std::move(out));
  if (s.tail() && !s.tail()->empty()) {
    TailRule t = *s.tail();
    auto base = s.tail()->coeff;
    t.coeff = [base, n](int k) {
      return Matrix(base(k)(0, 0) * Matrix::Identity(n, n));
    };
    r = r.with_tail(std::move(t));
  }
  if (s.sampler()) {
    auto base = *s.sampler();
    r = r.with_sampler([base, n](double theta) {
      return Matrix(base(theta)(0, 0) * Matrix::Identity(n, n));
    });
  }
  if (s.norm_hint()) r = r.with_norm_hint(*s.norm_hint());
  return r;
}

MatrixSymbol blaschke_conj(Complex a) {
  if (std::abs(a) >= 1.0) throw SymbolError("Blaschke parameter outside disk");
  const double defect = 1.0 - std::norm(a);
  MatrixSymbol::CoeffMap out;
  Matrix c0(1, 1);
  c0(0, 0) = -std::conj(a);
  if (std::abs(a) > 0.0) out.emplace(0, c0);
  MatrixSymbol r(1, 1, std::move(out));
  if (std::abs(a) == 0.0) {
    // b_0(w) = w, so the conjugate reflection is the single coefficient w^-1.
    MatrixSymbol::CoeffMap shift;
    Matrix one(1, 1);
    one(0, 0) = 1.0;
    shift.emplace(-1, one);
    r = MatrixSymbol(1, 1, std::move(shift));
  } else {
    TailRule t;
    t.kind = "blaschke_conj";
    t.min_degree = -TailRule::kDegInf;
    t.max_degree = -1;
    t.decay_C = defect / std::abs(a);
    t.decay_r = std::abs(a);
    t.coeff = [a, defect](int k) {
      Matrix m(1, 1);
      m(0, 0) = defect * std::pow(a, -k - 1);
      return m;
    };
    r = r.with_tail(std::move(t));
  }
  r = r.with_sampler([a](double theta) {
    const Complex w = std::exp(Complex(0.0, theta));
    Matrix m(1, 1);
    m(0, 0) = std::conj((w - a) / (1.0 - std::conj(a) * w));
    return m;
  });
  return r.with_norm_hint(1.0);
}

MatrixSymbol singular_inner_conj(Complex xi, double mass) {
  if (std::abs(std::abs(xi) - 1.0) > 1e-12) {
    throw SymbolError("singular inner mass point must lie on the circle");
  }
  auto sampler = [xi, mass](double theta) {
    const Complex w = std::exp(Complex(0.0, theta));
    Matrix m(1, 1);
    if (std::abs(w - xi) < 1e-12) {
      m(0, 0) = 0.0;  // measure-zero singular point
    } else {
      m(0, 0) = std::conj(std::exp(mass * (w + xi) / (w - xi)));
    }
    return m;
  };
  auto cache = std::make_shared<std::map<int, Complex>>();
  auto mtx = std::make_shared<std::mutex>();
  TailRule t;
  t.kind = "singular_inner_conj";
  t.min_degree = -TailRule::kDegInf;
  t.max_degree = 0;
  t.decay_C = 1.0;
  t.decay_r = 1.0;
  t.prefer_quadrature = true;
  t.quadrature_floor = 8192;
  t.coeff = [sampler, cache, mtx](int k) {
    {
      std::lock_guard lock(*mtx);
      auto it = cache->find(k);
      if (it != cache->end()) {
        Matrix m(1, 1);
        m(0, 0) = it->second;
        return m;
      }
    }
    Matrix m = fourier_coefficient(sampler, k, 1 << 17);
    std::lock_guard lock(*mtx);
    (*cache)[k] = m(0, 0);
    return m;
  };
  MatrixSymbol r(1, 1, {});
  r = r.with_tail(std::move(t));
  r = r.with_sampler(sampler);
  return r.with_norm_hint(1.0);
}

MatrixSymbol half_indicator() {
  TailRule t;
  t.kind = "half_indicator";
  t.min_degree = -TailRule::kDegInf;
  t.max_degree = TailRule::kDegInf;
  t.decay_C = 0.5;
  t.decay_r = 1.0;
  t.prefer_quadrature = true;
  t.coeff = [](int k) {
    Matrix m(1, 1);
    if (k == 0) {
      m(0, 0) = 0.5;
    } else if (k % 2 != 0) {
      m(0, 0) = Complex(0.0, -1.0 / (std::numbers::pi * k));
    } else {
      m(0, 0) = 0.0;
    }
    return m;
  };
  MatrixSymbol r(1, 1, {});
  r = r.with_tail(std::move(t));
  r = r.with_sampler([](double theta) {
    const double wrapped =
        theta - 2.0 * std::numbers::pi *
                    std::floor(theta / (2.0 * std::numbers::pi));
    Matrix m(1, 1);
    m(0, 0) = (wrapped > 0.0 && wrapped < std::numbers::pi) ? 1.0 : 0.0;
    return m;
  });
  return r.with_norm_hint(1.0);
}

MatrixSymbol geometric(const Matrix& base, double ratio) {
  if (ratio <= 0.0 || ratio >= 1.0) {
    throw SymbolError("geometric ratio must lie in (0, 1)");
  }
  TailRule t;
  t.kind = "geometric";
  t.min_degree = -TailRule::kDegInf;
  t.max_degree = TailRule::kDegInf;
  t.decay_C = spectral_norm(base);
  t.decay_r = ratio;
  Matrix b = base;
  t.coeff = [b, ratio](int k) {
    return Matrix(b * std::pow(ratio, std::abs(k)));
  };
  MatrixSymbol r(static_cast<int>(base.rows()), static_cast<int>(base.cols()),
                 {});
  r = r.with_tail(std::move(t));
  return r.with_sampler([b, ratio](double theta) {
    // Closed form of the two-sided geometric series (Poisson-kernel shape).
    const Complex w = std::exp(Complex(0.0, theta));
    const Complex g = ratio * w / (1.0 - ratio * w);
    return Matrix(b * (1.0 + 2.0 * g.real()));
  });
}

MatrixSymbol mobius_phi(const DiskPoint& z) {
  const Complex zv = z.value();
  if (std::abs(zv) == 0.0) {
    return laurent({{1, Complex(1.0, 0.0)}}).with_norm_hint(1.0);
  }
  const double defect = 1.0 - std::norm(zv);
  MatrixSymbol::CoeffMap out;
  Matrix c0(1, 1);
  c0(0, 0) = -zv;
  out.emplace(0, c0);
  MatrixSymbol r(1, 1, std::move(out));
  TailRule t;
  t.kind = "mobius_phi";
  t.min_degree = 1;
  t.max_degree = TailRule::kDegInf;
  t.decay_C = defect / std::abs(zv);
  t.decay_r = std::abs(zv);
  t.coeff = [zv, defect](int k) {
    Matrix m(1, 1);
    m(0, 0) = defect * std::pow(std::conj(zv), k - 1);
    return m;
  };
  r = r.with_tail(std::move(t));
  r = r.with_sampler([zv](double theta) {
    const Complex w = std::exp(Complex(0.0, theta));
    Matrix m(1, 1);
    m(0, 0) = (w - zv) / (1.0 - std::conj(zv) * w);
    return m;
  });
  return r.with_norm_hint(1.0);
}

MatrixSymbol mobius_phi_conj(const DiskPoint& z) { return star(mobius_phi(z)); }

Vector kernel_kz(const DiskPoint& z, int M) {
  const Complex zc = std::conj(z.value());
  const double scale = std::sqrt(1.0 - std::norm(z.value()));
  Vector v(M);
  Complex p = 1.0;
  for (int m = 0; m < M; ++m) {
    v(m) = scale * p;
    p *= zc;
  }
  return v;
}

}  // namespace haplitz
