#include "haplitz/compactness.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <thread>

namespace haplitz {

namespace {

// Budget for the coefficient series when a tail decays too slowly for a
// tolerance-driven cutoff (e.g. 1/k coefficients). The dropped mass is
// reported through the sweep's tail_bound column.
constexpr int kSeriesCap = 4096;
constexpr int kProductCap = 1024;

bool slow_tail(const MatrixSymbol& s) {
  return s.tail() && !s.tail()->empty() && s.tail()->unbounded() &&
         !(s.tail()->decay_r < 1.0 && s.tail()->decay_C > 0.0);
}

int minus_depth(const MatrixSymbol& s, int cap) {
  int d = 0;
  for (const auto& [k, m] : s.explicit_coeffs()) {
    if (k < 0) d = std::max(d, -k);
  }
  if (s.tail() && !s.tail()->empty() && s.tail()->min_degree < 0) {
    const TailRule& t = *s.tail();
    if (t.min_degree > -TailRule::kDegInf) {
      d = std::max(d, -t.min_degree);
    } else if (t.decay_r < 1.0 && t.decay_C > 0.0) {
      d = std::max(d, s.support_bound(1e-13));
    } else {
      d = cap;
    }
  }
  return std::min(d, cap);
}

int plus_depth(const MatrixSymbol& s, int cap) {
  int d = 0;
  for (const auto& [k, m] : s.explicit_coeffs()) {
    if (k > 0) d = std::max(d, k);
  }
  if (s.tail() && !s.tail()->empty() && s.tail()->max_degree > 0) {
    const TailRule& t = *s.tail();
    if (t.max_degree < TailRule::kDegInf) {
      d = std::max(d, t.max_degree);
    } else if (t.decay_r < 1.0 && t.decay_C > 0.0) {
      d = std::max(d, s.support_bound(1e-13));
    } else {
      d = cap;
    }
  }
  return std::min(d, cap);
}

/// Harmonic extension at zc of g^* g for g(w) = sum_j g[j] w^(-j):
///   sum_{j,k} g[j]^dagger g[k] * (zc^(j-k) if j >= k else conj(zc)^(k-j)).
/// Evaluated in O(D) through the prefix A_j = sum_{k<=j} g[k] zc^(j-k).
Matrix gram_ext(const std::vector<Matrix>& g, Complex zc) {
  const auto dim = g.front().cols();
  Matrix acc = Matrix::Zero(dim, dim);
  Matrix prefix = Matrix::Zero(g.front().rows(), dim);
  for (size_t j = 0; j < g.size(); ++j) {
    Matrix shifted = zc * prefix;
    prefix = shifted + g[j];
    acc += g[j].adjoint() * prefix + shifted.adjoint() * g[j];
  }
  return acc;
}

std::vector<Matrix> minus_list_starred(const MatrixSymbol& s,
                                       const DiskPoint& z, int cap,
                                       bool starred) {
  const int d = minus_depth(s, cap);
  std::vector<Matrix> g(d + 1);
  const Complex w = starred ? z.value() : std::conj(z.value());
  Matrix at_z = Matrix::Zero(starred ? s.cols() : s.rows(),
                             starred ? s.rows() : s.cols());
  Complex wpow = 1.0;
  for (int j = 1; j <= d; ++j) {
    Matrix c = s.coeff(-j);
    g[j] = starred ? Matrix(c.adjoint()) : std::move(c);
    wpow *= w;
    at_z += wpow * g[j];
  }
  g[0] = -at_z;
  if (d == 0) g[0] = Matrix::Zero(at_z.rows(), at_z.cols());
  return g;
}

/// sigma_max(U W^dagger) via thin QR of both factors.
double pair_norm(const Matrix& u, const Matrix& w) {
  const auto c = u.cols();
  Eigen::HouseholderQR<Matrix> qu(u), qw(w);
  Matrix ru = qu.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  Matrix rw = qw.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  return op_norm(Matrix(ru * rw.adjoint()));
}

/// Cached coefficient table for matrix-free application of the N-truncation
/// (the dense path would need the full (N n)^2 matrix).
struct Applier {
  int n = 1;
  int N = 0;
  std::vector<Matrix> neg;  // neg[k] = coeff(-k), k = 0 .. 2N-1
  std::vector<Matrix> pos;  // pos[k] = coeff(k),  k = 0 .. N-1

  Applier(const MatrixSymbol& s, int trunc) : n(s.n()), N(trunc) {
    neg.reserve(2 * N);
    pos.reserve(N);
    for (int k = 0; k < 2 * N; ++k) neg.push_back(s.coeff(-k));
    for (int k = 0; k < N; ++k) pos.push_back(s.coeff(k));
  }

  Vector toeplitz(const Vector& f) const {
    Vector out = Vector::Zero(N * n);
    for (int m = 0; m < N; ++m) {
      for (int j = 0; j < N; ++j) {
        const Matrix& c = m >= j ? pos[m - j] : neg[j - m];
        out.segment(m * n, n) += c * f.segment(j * n, n);
      }
    }
    return out;
  }

  Vector hankel(const Vector& f) const {
    Vector out = Vector::Zero(N * n);
    for (int m = 0; m < N; ++m) {
      for (int j = 0; j + m + 1 < 2 * N && j < N; ++j) {
        out.segment(m * n, n) += neg[m + j + 1] * f.segment(j * n, n);
      }
    }
    return out;
  }

  Vector hankel_adjoint(const Vector& f) const {
    Vector out = Vector::Zero(N * n);
    for (int m = 0; m < N; ++m) {
      for (int j = 0; j + m + 1 < 2 * N && j < N; ++j) {
        out.segment(m * n, n) += neg[m + j + 1].adjoint() * f.segment(j * n, n);
      }
    }
    return out;
  }
};

Vector kernel_column(const DiskPoint& z, int n, int N, int i) {
  Vector kz = kernel_kz(z, N);
  Vector out = Vector::Zero(N * n);
  for (int m = 0; m < N; ++m) out(m * n + i) = kz(m);
  return out;
}

Vector block_scale(const Matrix& a, const Vector& f, int n, int N) {
  Vector out(N * n);
  for (int m = 0; m < N; ++m) out.segment(m * n, n) = a * f.segment(m * n, n);
  return out;
}

Matrix project_disk_box(Matrix a, double d) {
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double m = std::abs(a(i, j));
      if (m > d) a(i, j) *= d / m;
    }
  }
  return a;
}

struct GammaContext {
  int n = 1;
  int N = 0;
  bool with_third = false;
  Matrix m0;   // columns H_Phi(k_z e_i)
  Matrix v0;   // columns H_Psi^*(k_zbar e_i)
  Matrix kz;   // columns k_z e_i
  Matrix kzb;  // columns k_zbar e_i
  std::vector<Matrix> gpq;  // columns H_{Phi E_pq Psi}(k_z e_i)

  Matrix third(const Matrix& a) const {
    Matrix out = Matrix::Zero(m0.rows(), n);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) out += a(p, q) * gpq[p * n + q];
    }
    return out;
  }

  double objective(const Matrix& a) const {
    const Matrix eye = Matrix::Identity(n, n);
    double v = pair_norm(m0 * (eye - a), kzb) +
               pair_norm(kz, Matrix(v0 * a.adjoint()));
    if (with_third) v += pair_norm(third(a), kzb);
    return v;
  }
};

GammaContext make_gamma_context(const MatrixSymbol& phi,
                                const MatrixSymbol& psi, const DiskPoint& z,
                                int N, bool with_third) {
  const int n = phi.n();
  if (psi.n() != n) throw CompactnessError("block sizes differ");
  if (N * n > kMaxDenseDim) throw CompactnessError("truncation too large");
  GammaContext ctx;
  ctx.n = n;
  ctx.N = N;
  ctx.with_third = with_third;
  Applier aphi(phi, N), apsi(psi, N);
  const DiskPoint zb = z.conj();
  ctx.m0 = Matrix(N * n, n);
  ctx.v0 = Matrix(N * n, n);
  ctx.kz = Matrix(N * n, n);
  ctx.kzb = Matrix(N * n, n);
  std::vector<Vector> tpsi(n), hpsi(n);
  for (int i = 0; i < n; ++i) {
    Vector ki = kernel_column(z, n, N, i);
    Vector kbi = kernel_column(zb, n, N, i);
    ctx.kz.col(i) = ki;
    ctx.kzb.col(i) = kbi;
    ctx.m0.col(i) = aphi.hankel(ki);
    ctx.v0.col(i) = apsi.hankel_adjoint(kbi);
    if (with_third) {
      tpsi[i] = apsi.toeplitz(ki);
      hpsi[i] = apsi.hankel(ki);
    }
  }
  if (with_third) {
    // H_{Phi A Psi} = H_Phi T_{A Psi} + T_{tilde Phi} H_{A Psi} and the
    // constant A factors out of the truncations blockwise, so the third term
    // is assembled from n^2 precomputed elementary columns, linear in A.
    Applier atphi(tilde(phi), N);
    ctx.gpq.resize(n * n);
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        Matrix epq = Matrix::Zero(n, n);
        epq(p, q) = 1.0;
        Matrix cols(N * n, n);
        for (int i = 0; i < n; ++i) {
          cols.col(i) = aphi.hankel(block_scale(epq, tpsi[i], n, N)) +
                        atphi.toeplitz(block_scale(epq, hpsi[i], n, N));
        }
        ctx.gpq[p * n + q] = std::move(cols);
      }
    }
  }
  return ctx;
}

GammaResult minimize_gamma(const GammaContext& ctx, double d,
                           const std::vector<Matrix>& starts) {
  const int n = ctx.n;
  const Matrix eye = Matrix::Identity(n, n);
  const Matrix m0h = ctx.m0.adjoint() * ctx.m0;
  const Matrix v0h = ctx.v0.adjoint() * ctx.v0;

  const auto surrogate_grad = [&](const Matrix& a) {
    Matrix g = m0h * (a - eye) + a * v0h;
    if (ctx.with_third) {
      Matrix t = ctx.third(a);
      for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
          g(p, q) += trace_of(Matrix(ctx.gpq[p * n + q].adjoint() * t));
        }
      }
    }
    return g;
  };
  const auto curvature = [&](const Matrix& dir) {
    double q = (ctx.m0 * dir).squaredNorm() +
               (ctx.v0 * dir.adjoint()).squaredNorm();
    if (ctx.with_third) q += ctx.third(dir).squaredNorm();
    return q;
  };

  GammaResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (const Matrix& start : starts) {
    Matrix a = project_disk_box(start, d);
    // phase 1: projected gradient with exact line search on the squared
    // surrogate (smooth, convex quadratic)
    for (int it = 0; it < 400; ++it) {
      Matrix g = surrogate_grad(a);
      const double q = curvature(g);
      if (q <= 0.0) break;
      Matrix next = project_disk_box(a - (g.squaredNorm() / q) * g, d);
      const double moved = (next - a).norm();
      a = std::move(next);
      if (moved < 1e-13 * (1.0 + a.norm())) break;
    }
    // phase 2: compass polish of the true (nonsmooth) objective
    double val = ctx.objective(a);
    bool settled = false;
    const Complex dirs[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (double step = 0.25 * std::max(1.0, d); step > 1e-8; step *= 0.35) {
      bool improved_at_step = true;
      for (int sweep = 0; sweep < 60 && improved_at_step; ++sweep) {
        improved_at_step = false;
        for (int p = 0; p < n; ++p) {
          for (int q = 0; q < n; ++q) {
            for (const Complex& dir : dirs) {
              Matrix cand = a;
              cand(p, q) += step * dir;
              cand = project_disk_box(std::move(cand), d);
              const double cv = ctx.objective(cand);
              if (cv < val - 1e-15) {
                val = cv;
                a = std::move(cand);
                improved_at_step = true;
              }
            }
          }
        }
      }
      settled = !improved_at_step;
    }
    if (val < best.value) {
      best.value = val;
      best.argmin = a;
      best.converged = settled;
      Matrix g = surrogate_grad(a);
      best.grad_norm = (a - project_disk_box(a - g, d)).norm();
    }
  }
  return best;
}

std::vector<Matrix> default_starts(int n) {
  return {Matrix::Zero(n, n), Matrix::Identity(n, n),
          Matrix(0.5 * Matrix::Identity(n, n))};
}

int sweep_threads() {
  if (const char* env = std::getenv("HAPLITZ_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace

int diagnostic_trunc(const DiskPoint& z, int n) {
  const int policy =
      std::max(64, static_cast<int>(std::ceil(12.0 / (1.0 - z.abs()))));
  return std::min(policy, kMaxDenseDim / std::max(1, n));
}

double c1_trace(const MatrixSymbol& phi, const MatrixSymbol& psi,
                const DiskPoint& z) {
  if (phi.n() != psi.n()) throw CompactnessError("block sizes differ");
  const Matrix m1 = gram_ext(minus_list_starred(phi, z, kSeriesCap, false),
                             z.value());
  const Matrix m2 = gram_ext(minus_list_starred(psi, z, kSeriesCap, true),
                             std::conj(z.value()));
  return trace_of(Matrix(m1 * m2)).real();
}

double c2_trace(const MatrixSymbol& phi, const MatrixSymbol& psi,
                const DiskPoint& z) {
  const int n = phi.n();
  if (psi.n() != n) throw CompactnessError("block sizes differ");
  const int dphi = minus_depth(phi, kProductCap);
  const int dpsi_plus = plus_depth(psi, kProductCap);
  const int dpsi_minus = minus_depth(psi, kProductCap);
  const Complex zb = std::conj(z.value());

  std::vector<Matrix> fm(dphi + 1, Matrix::Zero(n, n));
  Matrix phim_z = Matrix::Zero(n, n);
  {
    Complex wp = 1.0;
    for (int j = 1; j <= dphi; ++j) {
      fm[j] = phi.coeff(-j);
      wp *= zb;
      phim_z += wp * fm[j];
    }
  }
  Matrix psim_z = Matrix::Zero(n, n);
  {
    Complex wp = 1.0;
    for (int j = 1; j <= dpsi_minus; ++j) {
      wp *= zb;
      psim_z += wp * psi.coeff(-j);
    }
  }
  std::vector<Matrix> pp(dpsi_plus + 1);
  for (int p = 0; p <= dpsi_plus; ++p) pp[p] = psi.coeff(p);

  // (Phi_- Psi_+)^(-m) and its harmonic value, then the full kernel symbol
  std::vector<Matrix> e(dphi + 1, Matrix::Zero(n, n));
  Matrix prod_z = Matrix::Zero(n, n);
  Complex wp = 1.0;
  for (int m = 1; m <= dphi; ++m) {
    Matrix pm = Matrix::Zero(n, n);
    for (int j = m; j <= dphi && j - m <= dpsi_plus; ++j) {
      pm += fm[j] * pp[j - m];
    }
    wp *= zb;
    prod_z += wp * pm;
    e[m] = pm + fm[m] * psim_z;
  }
  e[0] = -prod_z - phim_z * psim_z;
  return trace_of(gram_ext(e, z.value())).real();
}

double zheng_product(const MatrixSymbol& phi, const MatrixSymbol& psi,
                     const DiskPoint& z) {
  if (phi.n() != 1 || psi.n() != 1) {
    throw CompactnessError("zheng_product expects scalar symbols");
  }
  const double f1 =
      gram_ext(minus_list_starred(phi, z, kSeriesCap, false), z.value())(0, 0)
          .real();
  const double f2 =
      gram_ext(minus_list_starred(psi, z, kSeriesCap, false), z.value())(0, 0)
          .real();
  return f1 * f2;
}

std::pair<double, double> hankel_trace_crosscheck(const MatrixSymbol& phi,
                                             const DiskPoint& z, int N) {
  const Matrix m1 = gram_ext(minus_list_starred(phi, z, kSeriesCap, false),
                             z.value());
  const double series = trace_of(m1).real();
  const MatrixSymbol conj_mob =
      times_identity(mobius_phi_conj(z.conj()), phi.n());
  const double trunc = frob_norm(
      compose(hankel_trunc(phi, N), hankel_trunc(conj_mob, N)));
  return {series, trunc * trunc};
}

GammaResult gamma1(const MatrixSymbol& phi, const MatrixSymbol& psi,
                   const DiskPoint& z, int N, double d,
                   const std::optional<Matrix>& start) {
  GammaContext ctx = make_gamma_context(phi, psi, z, N, false);
  return minimize_gamma(
      ctx, d, start ? std::vector<Matrix>{*start} : default_starts(ctx.n));
}

GammaResult gamma2(const MatrixSymbol& phi, const MatrixSymbol& psi,
                   const DiskPoint& z, int N, double d,
                   const std::optional<Matrix>& start) {
  GammaContext ctx = make_gamma_context(phi, psi, z, N, true);
  return minimize_gamma(
      ctx, d, start ? std::vector<Matrix>{*start} : default_starts(ctx.n));
}

double omega_norm(const MatrixSymbol& phi, const MatrixSymbol& psi,
                  const DiskPoint& z, int N) {
  const int n = phi.n();
  if (psi.n() != n) throw CompactnessError("block sizes differ");
  Applier aphi(phi, N), apsi(psi, N);
  Matrix u(N * n, n), v(N * n, n);
  const DiskPoint zb = z.conj();
  for (int i = 0; i < n; ++i) {
    u.col(i) = aphi.hankel(kernel_column(z, n, N, i));
    v.col(i) = apsi.hankel_adjoint(kernel_column(zb, n, N, i));
  }
  return pair_norm(u, v);
}

double product_kernel_norm(const MatrixSymbol& phi, const MatrixSymbol& psi,
                           const DiskPoint& z, int N) {
  const int n = phi.n();
  if (psi.n() != n) throw CompactnessError("block sizes differ");
  Applier aphi(phi, N), apsi(psi, N);
  Matrix u(N * n, n), v(N * n, n);
  const DiskPoint zb = z.conj();
  for (int i = 0; i < n; ++i) {
    u.col(i) = aphi.hankel(apsi.toeplitz(kernel_column(z, n, N, i)));
    v.col(i) = kernel_column(zb, n, N, i);
  }
  return pair_norm(u, v);
}

void SweepGrid::validate() const {
  if (rays.empty() || radii.empty()) {
    throw CompactnessError("sweep grid needs rays and radii");
  }
  double prev = 0.0;
  for (double r : radii) {
    if (r <= prev || r >= 1.0 - kBoundaryEpsilon) {
      throw CompactnessError("radii must increase strictly inside the disk");
    }
    prev = r;
  }
  if (min_trunc < 1) throw CompactnessError("min_trunc must be positive");
}

const std::set<std::string>& sweep_quantities() {
  static const std::set<std::string> names{
      "c1",     "c2",    "zheng",         "gamma1",
      "gamma2", "omega", "product_kernel"};
  return names;
}

DiagnosticReport radial_sweep(const MatrixSymbol& phi, const MatrixSymbol& psi,
                              const SweepGrid& grid,
                              const std::set<std::string>& which,
                              double box_d) {
  grid.validate();
  for (const auto& name : which) {
    if (!sweep_quantities().count(name)) {
      throw CompactnessError("unknown sweep quantity: " + name);
    }
  }
  DiagnosticReport report;
  if (which.empty()) return report;

  std::vector<double> rays = grid.rays;
  std::sort(rays.begin(), rays.end());
  const int n = phi.n();
  const bool slow = slow_tail(phi) || slow_tail(psi);

  report.rows.resize(rays.size() * grid.radii.size());
  std::atomic<size_t> cursor{0};
  const auto worker = [&] {
    for (;;) {
      const size_t idx = cursor.fetch_add(1);
      if (idx >= report.rows.size()) return;
      const double theta = rays[idx / grid.radii.size()];
      const double r = grid.radii[idx % grid.radii.size()];
      DiagnosticRow row;
      row.theta = theta;
      row.r = r;
      row.c1 = row.c2 = row.zheng = row.gamma1 = row.gamma2 = row.omega =
          row.product_kernel = std::numeric_limits<double>::quiet_NaN();
      try {
        const DiskPoint z(std::polar(r, theta));
        const int N = std::max(grid.min_trunc, diagnostic_trunc(z, n));
        row.N = N;
        row.tail_bound = std::pow(r, 2.0 * N) +
                         (slow ? 2.0 / ((1.0 - r) * kSeriesCap) : 0.0);
        if (which.count("c1")) row.c1 = c1_trace(phi, psi, z);
        if (which.count("c2")) row.c2 = c2_trace(phi, psi, z);
        if (which.count("zheng")) row.zheng = zheng_product(phi, psi, z);
        if (which.count("gamma1")) {
          auto g = gamma1(phi, psi, z, N, box_d);
          row.gamma1 = g.value;
          row.gamma1_A = g.argmin;
        }
        if (which.count("gamma2")) {
          auto g = gamma2(phi, psi, z, N, box_d);
          row.gamma2 = g.value;
          row.gamma2_A = g.argmin;
        }
        if (which.count("omega")) row.omega = omega_norm(phi, psi, z, N);
        if (which.count("product_kernel")) {
          row.product_kernel = product_kernel_norm(phi, psi, z, N);
        }
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
      report.rows[idx] = std::move(row);
    }
  };
  const int workers = std::min<int>(sweep_threads(),
                                    static_cast<int>(report.rows.size()));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // per-ray least squares slope of each quantity against r
  const auto field = [](const DiagnosticRow& row,
                        const std::string& name) -> double {
    if (name == "c1") return row.c1;
    if (name == "c2") return row.c2;
    if (name == "zheng") return row.zheng;
    if (name == "gamma1") return row.gamma1;
    if (name == "gamma2") return row.gamma2;
    if (name == "omega") return row.omega;
    return row.product_kernel;
  };
  for (size_t a = 0; a < rays.size(); ++a) {
    RayTrend trend;
    trend.theta = rays[a];
    for (const auto& name : which) {
      double sr = 0, sv = 0, srr = 0, srv = 0;
      int count = 0;
      for (size_t b = 0; b < grid.radii.size(); ++b) {
        const DiagnosticRow& row = report.rows[a * grid.radii.size() + b];
        const double v = field(row, name);
        if (!row.ok || !std::isfinite(v)) continue;
        sr += row.r;
        sv += v;
        srr += row.r * row.r;
        srv += row.r * v;
        ++count;
      }
      const double den = count * srr - sr * sr;
      if (count >= 2 && std::abs(den) > 1e-14) {
        trend.slope.emplace_back(name, (count * srv - sr * sv) / den);
      }
    }
    report.trends.push_back(std::move(trend));
  }
  return report;
}

std::pair<MatrixSymbol, MatrixSymbol> embed_sum(
    const std::vector<std::pair<MatrixSymbol, MatrixSymbol>>& pairs) {
  if (pairs.empty()) throw CompactnessError("embed_sum needs at least one pair");
  const int n = static_cast<int>(pairs.size());
  for (const auto& [f, g] : pairs) {
    if (f.rows() != 1 || f.cols() != 1 || g.rows() != 1 || g.cols() != 1) {
      throw CompactnessError("embed_sum expects scalar symbols");
    }
  }

  const auto assemble = [n](std::vector<MatrixSymbol> scalars,
                            bool along_row) {
    bool any_tail = false;
    for (const auto& s : scalars) {
      any_tail = any_tail || (s.tail() && !s.tail()->empty());
    }
    if (!any_tail) {
      MatrixSymbol::CoeffMap coeffs;
      for (int i = 0; i < n; ++i) {
        for (const auto& [k, m] : scalars[i].explicit_coeffs()) {
          auto [it, fresh] = coeffs.try_emplace(k, Matrix::Zero(n, n));
          (void)fresh;
          if (along_row) {
            it->second(0, i) = m(0, 0);
          } else {
            it->second(i, 0) = m(0, 0);
          }
        }
      }
      return laurent(n, coeffs);
    }
    TailRule t;
    t.kind = "embedded_sum";
    int lo = 0, hi = 0;
    double decay_r = 0.0, tail_c = 0.0, expl_norm = 0.0;
    int expl_deg = 0;
    bool geometric = true;
    for (const auto& s : scalars) {
      for (const auto& [k, m] : s.explicit_coeffs()) {
        lo = std::min(lo, k);
        hi = std::max(hi, k);
        expl_norm = std::max(expl_norm, std::abs(m(0, 0)));
        expl_deg = std::max(expl_deg, std::abs(k));
      }
      if (s.tail() && !s.tail()->empty()) {
        const TailRule& st = *s.tail();
        lo = std::min(lo, st.min_degree);
        hi = std::max(hi, st.max_degree);
        if (st.decay_r < 1.0 && st.decay_C > 0.0) {
          decay_r = std::max(decay_r, st.decay_r);
          tail_c += st.decay_C;
        } else {
          geometric = false;
        }
      }
    }
    t.min_degree = lo;
    t.max_degree = hi;
    if (geometric && decay_r > 0.0) {
      t.decay_r = decay_r;
      t.decay_C = tail_c + (expl_norm > 0.0
                                ? expl_norm / std::pow(decay_r, expl_deg)
                                : 0.0);
    } else {
      t.decay_r = 1.0;
      t.decay_C = std::max(1.0, expl_norm + tail_c);
    }
    auto held = std::make_shared<std::vector<MatrixSymbol>>(std::move(scalars));
    t.coeff = [held, n, along_row](int k) {
      Matrix m = Matrix::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const Complex v = (*held)[i].coeff(k)(0, 0);
        if (along_row) {
          m(0, i) = v;
        } else {
          m(i, 0) = v;
        }
      }
      return m;
    };
    MatrixSymbol out(n, n, {});
    out = out.with_tail(std::move(t));
    bool all_sampled = true;
    bool want_quadrature = false;
    for (const auto& s : *held) {
      all_sampled = all_sampled && s.sampler().has_value();
      want_quadrature =
          want_quadrature || (s.tail() && s.tail()->prefer_quadrature);
    }
    if (all_sampled) {
      out = out.with_sampler([held, n, along_row](double theta) {
        Matrix m = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
          const Complex v = (*held)[i].value_on_circle(theta)(0, 0);
          if (along_row) {
            m(0, i) = v;
          } else {
            m(i, 0) = v;
          }
        }
        return m;
      });
      if (want_quadrature) {
        TailRule t2 = *out.tail();
        t2.prefer_quadrature = true;
        out = out.with_tail(std::move(t2));
      }
    }
    return out;
  };

  std::vector<MatrixSymbol> phis, psis;
  for (const auto& [f, g] : pairs) {
    phis.push_back(f);
    psis.push_back(g);
  }
  return {assemble(std::move(phis), true), assemble(std::move(psis), false)};
}

}  // namespace haplitz
