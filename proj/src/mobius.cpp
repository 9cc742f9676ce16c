#include "haplitz/mobius.hpp"

#include <algorithm>
#include <cmath>

namespace haplitz {

namespace {

Vector kron_basis(const Vector& scalar_coeffs, int n, int i) {
  Vector v = Vector::Zero(scalar_coeffs.size() * n);
  for (Eigen::Index m = 0; m < scalar_coeffs.size(); ++m) {
    v(m * n + i) = scalar_coeffs(m);
  }
  return v;
}

}  // namespace

MobiusFrame MobiusFrame::make(const DiskPoint& z, int n, int N) {
  const DiskPoint zb = z.conj();
  auto phi_z = times_identity(mobius_phi(z), n);
  auto phi_zb = times_identity(mobius_phi(zb), n);
  auto phibar_z = times_identity(mobius_phi_conj(z), n);
  auto phibar_zb = times_identity(mobius_phi_conj(zb), n);

  TruncatedOperator t_z = toeplitz_trunc(phi_z, N);
  TruncatedOperator t_zb = toeplitz_trunc(phi_zb, N);
  TruncatedOperator id = identity_trunc(n, N);
  TruncatedOperator c_z = sub(id, compose(t_z, adjoint(t_z)));
  TruncatedOperator c_zb = sub(id, compose(t_zb, adjoint(t_zb)));

  std::vector<Vector> kz, kzb;
  const Vector kz_scalar = kernel_kz(z, N);
  const Vector kzb_scalar = kernel_kz(zb, N);
  for (int i = 0; i < n; ++i) {
    kz.push_back(kron_basis(kz_scalar, n, i));
    kzb.push_back(kron_basis(kzb_scalar, n, i));
  }

  return MobiusFrame{z,
                     n,
                     N,
                     std::move(t_z),
                     std::move(t_zb),
                     hankel_trunc(phibar_z, N),
                     hankel_trunc(phibar_zb, N),
                     std::move(c_z),
                     std::move(c_zb),
                     std::move(kz),
                     std::move(kzb)};
}

double MobiusFrame::kernel_tail() const {
  return std::pow(z.abs(), 2.0 * N);
}

TruncatedOperator delta_z(const TruncatedOperator& x, const MobiusFrame& f) {
  return sub(x, compose(adjoint(f.t_phi_z), compose(x, f.t_phi_z)));
}

TruncatedOperator omega_z(const TruncatedOperator& x, const MobiusFrame& f) {
  return sub(compose(x, f.t_phi_z), compose(adjoint(f.t_phi_zbar), x));
}

namespace {

/// The same maps taken at the conjugate parameter; the frame caches both
/// phi_z and phi_zbar truncations, so no second frame is needed.
TruncatedOperator omega_zbar(const TruncatedOperator& x,
                             const MobiusFrame& f) {
  return sub(compose(x, f.t_phi_zbar), compose(adjoint(f.t_phi_z), x));
}

}  // namespace

Matrix window_submatrix(const TruncatedOperator& x, const WindowSpec& w) {
  const int n = x.block_size();
  return x.data().block(w.row_begin * n, w.col_begin * n,
                        (w.row_end - w.row_begin) * n,
                        (w.col_end - w.col_begin) * n);
}

std::vector<std::string> registered_identities() {
  return {"t1",  "h1",   "t2",     "h2",   "aa",         "bb",
          "ccc", "mobius", "key1", "key2", "relation",   "omega_star",
          "trace"};
}

namespace {

int effective_degree(const MatrixSymbol& s) { return s.support_bound(1e-13); }

struct EvalContext {
  int N;            // requested truncation
  int margin;       // window margin at the requested truncation
  int N_eval;       // padded truncation
  WindowSpec window;
};

EvalContext make_context(int N, int margin, int n, int word_degree) {
  const int window_end = N - margin;
  if (window_end <= 0) throw OperatorError("margin swallows the truncation");
  int N_eval = std::max(N, window_end + 2 * word_degree);
  N_eval = std::min(N_eval, kMaxDenseDim / n);
  if (N_eval < N) throw OperatorError("padded truncation exceeds dense cap");
  return {N, margin, N_eval, WindowSpec{0, window_end, 0, window_end}};
}

TruncatedOperator kernel_pairs(const MobiusFrame& f,
                               const TruncatedOperator& left,
                               const TruncatedOperator& right, bool negate) {
  // sum_i left(k_z e_i) (x) right^*(k_zbar e_i)
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int i = 0; i < f.n; ++i) {
    Vector u = left.data() * f.kz_basis[i];
    Vector v = right.data().adjoint() * f.kzbar_basis[i];
    if (negate) u = -u;
    pairs.emplace_back(std::move(u), std::move(v));
  }
  return rank_one_sum(pairs, f.n);
}

}  // namespace

IdentityReport verify_identity(const std::string& name, const MatrixSymbol& a,
                               const MatrixSymbol& b, const DiskPoint& z,
                               int N, int margin, double tolerance) {
  const int n = a.n();
  if (b.n() != n) throw OperatorError("symbol pair block sizes differ");

  const int d_phi =
      z.abs() > 0.0 ? effective_degree(mobius_phi(z)) : 1;
  // Padding uses the largest effective degree among the word's factors: a
  // single excursion past the window already costs that factor's full decay.
  const int d_ab = std::max(effective_degree(a), effective_degree(b));

  IdentityReport rep;
  rep.name = name;
  rep.N = N;
  rep.margin = margin;
  rep.tolerance = tolerance;

  const auto finish = [&](double residual, const EvalContext& ctx) {
    rep.residual = residual;
    rep.eval_trunc = ctx.N_eval;
    rep.pass = residual <= tolerance;
    return rep;
  };

  if (name == "t1" || name == "h1" || name == "t2" || name == "h2") {
    EvalContext ctx = make_context(N, margin, n, d_ab);
    const int M = ctx.N_eval;
    const MatrixSymbol bb_sym =
        (name == "t2" || name == "h2") ? plus_part(b) : b;
    auto lhs = (name == "t1" || name == "t2")
                   ? toeplitz_trunc(mul(a, bb_sym), M)
                   : hankel_trunc(mul(a, bb_sym), M);
    TruncatedOperator rhs = [&] {
      if (name == "t1") {
        return add(compose(toeplitz_trunc(a, M), toeplitz_trunc(bb_sym, M)),
                   compose(hankel_trunc(tilde(a), M),
                           hankel_trunc(bb_sym, M)));
      }
      if (name == "h1") {
        return add(compose(hankel_trunc(a, M), toeplitz_trunc(bb_sym, M)),
                   compose(toeplitz_trunc(tilde(a), M),
                           hankel_trunc(bb_sym, M)));
      }
      if (name == "t2") {
        return compose(toeplitz_trunc(a, M), toeplitz_trunc(bb_sym, M));
      }
      return compose(hankel_trunc(a, M), toeplitz_trunc(bb_sym, M));
    }();
    return finish(window_residual(lhs, rhs, ctx.window), ctx);
  }

  if (name == "aa" || name == "bb" || name == "ccc") {
    EvalContext ctx = make_context(N, margin, n, std::max(d_phi, d_ab));
    MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
    auto ta = toeplitz_trunc(a, ctx.N_eval);
    auto ha = hankel_trunc(a, ctx.N_eval);
    if (name == "aa") {
      auto lhs = compose(adjoint(f.t_phi_z), ta);
      auto rhs = add(compose(ta, adjoint(f.t_phi_z)),
                     compose(adjoint(f.t_phi_z), compose(ta, f.c_z)));
      return finish(window_residual(lhs, rhs, ctx.window), ctx);
    }
    if (name == "bb") {
      auto lhs = compose(ta, f.t_phi_z);
      auto rhs = add(compose(f.t_phi_z, ta),
                     compose(f.c_z, compose(ta, f.t_phi_z)));
      return finish(window_residual(lhs, rhs, ctx.window), ctx);
    }
    auto lhs = compose(ha, adjoint(f.t_phi_z));
    auto rhs = add(sub(compose(f.t_phi_zbar, ha),
                       compose(f.t_phi_zbar, compose(ha, f.c_z))),
                   compose(f.c_zbar, compose(ha, adjoint(f.t_phi_z))));
    return finish(window_residual(lhs, rhs, ctx.window), ctx);
  }

  if (name == "mobius") {
    EvalContext ctx = make_context(N, margin, n, d_phi);
    MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
    std::vector<std::pair<Vector, Vector>> hp, cp;
    for (int i = 0; i < n; ++i) {
      hp.emplace_back(f.kzbar_basis[i], f.kz_basis[i]);
      cp.emplace_back(f.kz_basis[i], f.kz_basis[i]);
    }
    const double r1 =
        (f.h_phibar_z.data() - rank_one_sum(hp, n).data())
            .cwiseAbs()
            .maxCoeff();
    const double r2 =
        window_residual(f.c_z, rank_one_sum(cp, n), ctx.window);
    return finish(std::max(r1, r2), ctx);
  }

  if (name == "key1" || name == "key2") {
    EvalContext ctx = make_context(N, margin, n, std::max(d_phi, d_ab));
    MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
    auto ha = hankel_trunc(a, ctx.N_eval);
    auto tb = toeplitz_trunc(b, ctx.N_eval);
    if (name == "key1") {
      auto lhs = omega_z(compose(ha, tb), f);
      auto mid = compose(ha, compose(f.h_phibar_zbar,
                                     hankel_trunc(b, ctx.N_eval)));
      auto rhs = kernel_pairs(f, ha, hankel_trunc(b, ctx.N_eval), false);
      const double r = std::max(window_residual(lhs, mid, ctx.window),
                                window_residual(lhs, rhs, ctx.window));
      return finish(r, ctx);
    }
    auto lhs = omega_z(compose(tb, ha), f);
    auto rhs = kernel_pairs(f, hankel_trunc(tilde(b), ctx.N_eval), ha, true);
    return finish(window_residual(lhs, rhs, ctx.window), ctx);
  }

  if (name == "relation" || name == "omega_star") {
    EvalContext ctx = make_context(N, margin, n, std::max(d_phi, d_ab));
    MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
    auto X = toeplitz_trunc(a, ctx.N_eval);
    auto Y = hankel_trunc(b, ctx.N_eval);
    if (name == "relation") {
      auto lhs = delta_z(compose(X, Y), f);
      auto rhs = add(
          add(sub(compose(X, compose(f.c_zbar, Y)),
                  compose(X, compose(f.t_phi_zbar, omega_z(Y, f)))),
              compose(omega_zbar(X, f), omega_z(Y, f))),
          compose(omega_zbar(X, f), compose(adjoint(f.t_phi_zbar), Y)));
      return finish(window_residual(lhs, rhs, ctx.window), ctx);
    }
    auto XY = compose(X, Y);
    auto lhs = omega_z(adjoint(XY), f);
    auto rhs = scale(adjoint(omega_zbar(XY, f)), Complex(-1.0, 0.0));
    return finish(window_residual(lhs, rhs, ctx.window), ctx);
  }

  if (name == "trace") {
    EvalContext ctx = make_context(N, margin, n, std::max(d_phi, d_ab));
    MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
    auto ha = hankel_trunc(a, ctx.N_eval);
    auto hb = hankel_trunc(b, ctx.N_eval);
    std::vector<std::pair<Vector, Vector>> pairs;
    for (int i = 0; i < n; ++i) {
      pairs.emplace_back(ha.data() * f.kz_basis[i],
                         hb.data().adjoint() * f.kzbar_basis[i]);
    }
    auto [lhs, rhs] = gram_trace_check(pairs);
    return finish(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), ctx);
  }

  throw OperatorError("unknown identity: " + name);
}

std::pair<double, double> gram_trace_check(
    const std::vector<std::pair<Vector, Vector>>& pairs) {
  const int m = static_cast<int>(pairs.size());
  if (m == 0) return {0.0, 0.0};
  const auto dim = pairs.front().first.size();
  Matrix t = Matrix::Zero(dim, dim);
  Matrix wx(m, m), wy(m, m);
  for (int i = 0; i < m; ++i) {
    t += pairs[i].first * pairs[i].second.adjoint();
    for (int j = 0; j < m; ++j) {
      // <x_i, x_j> with the inner product <u, v> = v^dagger u
      wx(i, j) = pairs[j].first.adjoint() * pairs[i].first;
      wy(i, j) = pairs[j].second.adjoint() * pairs[i].second;
    }
  }
  const double lhs = t.squaredNorm();
  const double rhs = std::real((wx * wy).trace());
  return {lhs, rhs};
}

namespace {

int window_rank(const TruncatedOperator& x, const WindowSpec& w) {
  Matrix sub = window_submatrix(x, w);
  Eigen::BDCSVD<Matrix> svd(sub);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) < 1e-10) return 0;
  const double cut = std::max(1e-9 * sv(0), 1e-10);
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cut) ++r;
  }
  return r;
}

std::pair<int, int> rank_bound_impl(const std::vector<WordFactor>& word,
                                    const DiskPoint& z, int N, int margin,
                                    bool use_omega) {
  if (word.empty()) throw OperatorError("empty word");
  int hankels = 0;
  int degree = 0;
  const int n = word.front().symbol.n();
  for (const auto& f : word) {
    if (f.symbol.n() != n) throw OperatorError("mixed block sizes in word");
    hankels += f.hankel ? 1 : 0;
    degree += f.symbol.support_bound(1e-13);
  }
  if (use_omega && hankels % 2 == 0) {
    throw OperatorError("Omega_z rank bound needs an odd Hankel count");
  }
  if (!use_omega && hankels != 0) {
    throw OperatorError("Delta_z rank bound needs a pure Toeplitz word");
  }
  const int d_phi = z.abs() > 0.0
                        ? mobius_phi(z).support_bound(1e-13)
                        : 1;
  EvalContext ctx = make_context(N, margin, n, std::max(degree, d_phi));
  MobiusFrame f = MobiusFrame::make(z, n, ctx.N_eval);
  TruncatedOperator acc = identity_trunc(n, ctx.N_eval);
  for (const auto& w : word) {
    acc = compose(acc, w.hankel ? hankel_trunc(w.symbol, ctx.N_eval)
                                : toeplitz_trunc(w.symbol, ctx.N_eval));
  }
  TruncatedOperator mapped = use_omega ? omega_z(acc, f) : delta_z(acc, f);
  return {window_rank(mapped, ctx.window),
          static_cast<int>(word.size()) * n};
}

}  // namespace

std::pair<int, int> rank_bound_delta(const std::vector<WordFactor>& word,
                                     const DiskPoint& z, int N, int margin) {
  return rank_bound_impl(word, z, N, margin, false);
}

std::pair<int, int> rank_bound_omega(const std::vector<WordFactor>& word,
                                     const DiskPoint& z, int N, int margin) {
  return rank_bound_impl(word, z, N, margin, true);
}

}  // namespace haplitz
