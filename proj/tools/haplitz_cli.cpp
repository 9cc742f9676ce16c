// haplitz: truncated block Toeplitz/Hankel operator toolkit.
//
// Subcommands:
//   fourier     print Fourier coefficients of a symbol file
//   verify      run the operator-identity suite on seeded random symbols
//   hankelness  decide whether H_Phi T_Psi is a block Hankel operator
//   diagnose    compactness diagnostics along radial sweeps
//   normalize   rewrite an operator word to trailing-Hankel normal form

#include <CLI11.hpp>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "haplitz/compactness.hpp"
#include "haplitz/hankelness.hpp"
#include "haplitz/mobius.hpp"
#include "haplitz/symbol_io.hpp"
#include "haplitz/wordalg.hpp"

using namespace haplitz;
using nlohmann::json;

namespace {

std::vector<double> parse_grid_list(const std::string& text) {
  // "a,b,c" or "start:end:count"
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0.0, b = 0.0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &count) != 3 ||
        count < 1) {
      throw CLI::ValidationError("grid", "expected start:end:count");
    }
    for (int i = 0; i < count; ++i) {
      out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  if (out.empty()) throw CLI::ValidationError("grid", "empty list");
  return out;
}

MatrixSymbol random_laurent(std::mt19937_64& rng, int n, int deg) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MatrixSymbol::CoeffMap coeffs;
  for (int k = -deg; k <= deg; ++k) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
    }
    coeffs.emplace(k, std::move(m));
  }
  return laurent(n, coeffs);
}

json matrix_to_json(const Matrix& m) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return {{"re", std::move(re)}, {"im", std::move(im)}};
}

int run_fourier(const std::string& path, int kmin, int kmax,
                const std::string& emit) {
  const MatrixSymbol s = read_symbol_file(path);
  if (emit == "json") {
    std::cout << symbol_to_json(s, std::max(std::abs(kmin), std::abs(kmax)))
              << "\n";
    return 0;
  }
  std::cout << "k,i,j,re,im\n";
  for (int k = kmin; k <= kmax; ++k) {
    const Matrix m = s.coeff(k);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::printf("%d,%lld,%lld,%.17g,%.17g\n", k,
                    static_cast<long long>(i), static_cast<long long>(j),
                    m(i, j).real(), m(i, j).imag());
      }
    }
  }
  return 0;
}

int run_verify(unsigned long long seed, int draws, int max_n, int deg, int N,
               int margin, double tol) {
  const Complex zs[3] = {{0.0, 0.0}, {0.5, 0.0}, {0.3, 0.4}};
  bool all_pass = true;
  std::cout << "identity,seed,N,window,residual,result\n";
  for (int d = 0; d < draws; ++d) {
    const unsigned long long s = seed + d;
    std::mt19937_64 rng(s);
    const int n = 1 + static_cast<int>(rng() % max_n);
    const int degree = 1 + static_cast<int>(rng() % deg);
    const MatrixSymbol a = random_laurent(rng, n, degree);
    const MatrixSymbol b = random_laurent(rng, n, degree);
    const DiskPoint z(zs[d % 3]);
    for (const std::string& name : registered_identities()) {
      const IdentityReport rep = verify_identity(name, a, b, z, N, margin, tol);
      all_pass = all_pass && rep.pass;
      std::printf("%s,%llu,%d,%d,%.3e,%s\n", rep.name.c_str(), s, rep.N,
                  rep.N - rep.margin, rep.residual,
                  rep.pass ? "PASS" : "FAIL");
    }
  }
  return all_pass ? 0 : 2;
}

int run_hankelness(const std::string& phi_path, const std::string& psi_path,
                   double d, int degree_cap, int N, int margin,
                   const std::string& dump_path) {
  const MatrixSymbol phi = read_symbol_file(phi_path);
  const MatrixSymbol psi = read_symbol_file(psi_path);
  const FeasibilityResult fr = find_feasible_A(phi, psi, d, degree_cap);
  if (fr.status != FeasibilityStatus::kInfeasible) {
    const MatrixSymbol split = mul(phi, const_mul_left(fr.box.A, psi), 2 * N);
    const TruncatedOperator prod =
        compose(hankel_trunc(phi, N), toeplitz_trunc(psi, N));
    const double window_resid = window_residual(
        prod, hankel_trunc(split, N), WindowSpec::interior(N, margin));
    std::cout << "verdict: HANKEL\n";
    std::cout << "A:\n" << fr.box.A << "\n";
    std::printf("resid_x: %.3e\nresid_y: %.3e\nproduct_window_resid: %.3e\n",
                fr.resid_x, fr.resid_y, window_resid);
    if (!fr.note.empty()) std::cout << "note: " << fr.note << "\n";
    if (!dump_path.empty()) {
      json out{{"verdict", "HANKEL"},
               {"A", matrix_to_json(fr.box.A)},
               {"resid_x", fr.resid_x},
               {"resid_y", fr.resid_y},
               {"product_window_resid", window_resid}};
      if (const auto dec = huw_decompose(phi, psi, std::max(d, 1.0),
                                         degree_cap)) {
        out["decomposition"] = {
            {"l", dec->l},
            {"D", matrix_to_json(dec->D)},
            {"cond_D", dec->cond_d},
            {"product_symbol", json::parse(symbol_to_json(
                                   dec->product_symbol(), degree_cap))}};
      }
      std::ofstream(dump_path) << out.dump(2) << "\n";
    }
    return 0;
  }
  std::cout << "verdict: NOT-HANKEL\n";
  std::printf("margin: %.6g\n", fr.margin);
  if (!dump_path.empty()) {
    json out{{"verdict", "NOT-HANKEL"}, {"margin", fr.margin}};
    std::ofstream(dump_path) << out.dump(2) << "\n";
  }
  return 0;
}

int run_diagnose(const std::string& phi_path, const std::string& psi_path,
                 const std::string& rays_text, const std::string& radii_text,
                 const std::vector<std::string>& which_list, double box_d,
                 int min_trunc, const std::string& emit,
                 const std::string& summary_path) {
  const MatrixSymbol phi = read_symbol_file(phi_path);
  const MatrixSymbol psi = read_symbol_file(psi_path);
  SweepGrid grid;
  grid.rays = parse_grid_list(rays_text);
  grid.radii = parse_grid_list(radii_text);
  grid.min_trunc = min_trunc;
  std::set<std::string> which(which_list.begin(), which_list.end());
  if (which.empty()) which = sweep_quantities();

  const DiagnosticReport rep = radial_sweep(phi, psi, grid, which, box_d);
  bool any_failed = false;
  for (const DiagnosticRow& row : rep.rows) any_failed |= !row.ok;

  json trends = json::array();
  for (const RayTrend& tr : rep.trends) {
    json slopes;
    for (const auto& [name, slope] : tr.slope) slopes[name] = slope;
    trends.push_back({{"theta", tr.theta}, {"slope", std::move(slopes)}});
  }

  if (emit == "json") {
    json rows = json::array();
    for (const DiagnosticRow& row : rep.rows) {
      rows.push_back({{"theta", row.theta},
                      {"r", row.r},
                      {"c1", row.c1},
                      {"c2", row.c2},
                      {"zheng", row.zheng},
                      {"gamma1", row.gamma1},
                      {"gamma2", row.gamma2},
                      {"omega_norm", row.omega},
                      {"product_kernel_norm", row.product_kernel},
                      {"N", row.N},
                      {"tail_bound", row.tail_bound},
                      {"ok", row.ok},
                      {"error", row.error}});
    }
    std::cout << json{{"rows", std::move(rows)}, {"trends", trends}}.dump(2)
              << "\n";
  } else {
    std::cout << "theta,r,c1,c2,zheng,gamma1,gamma2,omega_norm,"
                 "product_kernel_norm,N,tail_bound\n";
    for (const DiagnosticRow& row : rep.rows) {
      std::printf("%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d,"
                  "%.3e\n",
                  row.theta, row.r, row.c1, row.c2, row.zheng, row.gamma1,
                  row.gamma2, row.omega, row.product_kernel, row.N,
                  row.tail_bound);
    }
  }
  if (!summary_path.empty()) {
    std::ofstream(summary_path)
        << json{{"trends", std::move(trends)},
                {"failed_points", any_failed}}.dump(2)
        << "\n";
  }
  return any_failed ? 2 : 0;
}

int run_normalize(const std::string& word_text, unsigned long long seed, int n,
                  int deg, int N) {
  const OperatorWord w = parse_word(word_text);
  const WordSum ns = normalize(w);
  std::cout << "input:  " << word_to_string(w) << "\n";
  std::cout << "normal: " << word_sum_to_string(ns) << "\n";

  std::mt19937_64 rng(seed);
  SymbolEnv env;
  std::function<void(const ExprPtr&)> bind = [&](const ExprPtr& e) {
    if (!e) return;
    if (e->kind == SymbolExpr::Kind::kAtom && !env.count(e->name)) {
      env.emplace(e->name, random_laurent(rng, n, deg));
    }
    bind(e->a);
    bind(e->b);
  };
  for (const WordAtomExpr& atom : w.atoms) bind(atom.sym);

  const int margin = std::max(required_margin(w, env),
                              required_margin(ns, env)) + 2;
  const int trunc = std::max(N, 4 * margin);
  const double resid =
      window_residual(evaluate(w, env, trunc), evaluate(ns, env, trunc),
                      WindowSpec::interior(trunc, margin));
  std::printf("certification_residual: %.3e (N=%d, margin=%d, seed=%llu)\n",
              resid, trunc, margin, seed);
  return resid <= 1e-10 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truncated block Toeplitz/Hankel operator toolkit"};
  app.set_config("--config");
  app.require_subcommand(1);

  // fourier
  std::string f_path, f_emit = "csv";
  int f_kmin = -8, f_kmax = 8;
  auto* fourier = app.add_subcommand("fourier", "print symbol coefficients");
  fourier->add_option("file", f_path, "symbol spec (JSON)")->required();
  fourier->add_option("--kmin", f_kmin, "lowest degree");
  fourier->add_option("--kmax", f_kmax, "highest degree");
  fourier->add_option("--emit", f_emit)->check(CLI::IsMember({"csv", "json"}));

  // verify
  unsigned long long v_seed = 7;
  int v_draws = 5, v_n = 2, v_deg = 3, v_N = 64, v_margin = 16;
  double v_tol = 1e-10;
  auto* verify = app.add_subcommand("verify", "operator identity suite");
  verify->add_option("--seed", v_seed);
  verify->add_option("--draws", v_draws);
  verify->add_option("--n", v_n, "max block size")->check(CLI::Range(1, 4));
  verify->add_option("--deg", v_deg, "max Laurent degree");
  verify->add_option("--N", v_N, "truncation length");
  verify->add_option("--margin", v_margin, "window margin");
  verify->add_option("--tol", v_tol);

  // hankelness
  std::string h_phi, h_psi, h_dump;
  double h_d = 1.0;
  int h_cap = 64, h_N = 48, h_margin = 8;
  auto* hank = app.add_subcommand("hankelness",
                                  "decide block-Hankelness of H_Phi T_Psi");
  hank->add_option("phi", h_phi, "symbol spec (JSON)")->required();
  hank->add_option("psi", h_psi, "symbol spec (JSON)")->required();
  hank->add_option("--d", h_d, "entrywise box radius");
  hank->add_option("--degree-cap", h_cap);
  hank->add_option("--N", h_N, "verification truncation");
  hank->add_option("--margin", h_margin);
  hank->add_option("--dump", h_dump, "write JSON decomposition here");

  // diagnose
  std::string d_phi, d_psi, d_rays = "0", d_radii = "0.5:0.95:4";
  std::string d_emit = "csv", d_summary;
  std::vector<std::string> d_which;
  double d_box = 1.0;
  int d_min_trunc = 64;
  auto* diag = app.add_subcommand("diagnose", "radial compactness sweep");
  diag->add_option("phi", d_phi, "symbol spec (JSON)")->required();
  diag->add_option("psi", d_psi, "symbol spec (JSON)")->required();
  diag->add_option("--rays", d_rays, "angles: list or start:end:count");
  diag->add_option("--radii", d_radii, "radii: list or start:end:count");
  diag->add_option("--which", d_which, "quantities (default: all)")
      ->delimiter(',');
  diag->add_option("--d", d_box, "box radius for the infima");
  diag->add_option("--min-trunc", d_min_trunc);
  diag->add_option("--emit", d_emit)->check(CLI::IsMember({"csv", "json"}));
  diag->add_option("--summary", d_summary, "write trend JSON here");

  // normalize
  std::string n_word;
  unsigned long long n_seed = 7;
  int n_n = 2, n_deg = 2, n_N = 64;
  auto* norm = app.add_subcommand("normalize", "word rewriting to normal form");
  norm->add_option("word", n_word, "e.g. H(a)*T(b)*H(c~)")->required();
  norm->add_option("--seed", n_seed);
  norm->add_option("--n", n_n, "block size of the certification draw");
  norm->add_option("--deg", n_deg, "degree of the certification draw");
  norm->add_option("--N", n_N, "certification truncation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fourier->parsed()) return run_fourier(f_path, f_kmin, f_kmax, f_emit);
    if (verify->parsed()) {
      return run_verify(v_seed, v_draws, v_n, v_deg, v_N, v_margin, v_tol);
    }
    if (hank->parsed()) {
      return run_hankelness(h_phi, h_psi, h_d, h_cap, h_N, h_margin, h_dump);
    }
    if (diag->parsed()) {
      return run_diagnose(d_phi, d_psi, d_rays, d_radii, d_which, d_box,
                          d_min_trunc, d_emit, d_summary);
    }
    if (norm->parsed()) return run_normalize(n_word, n_seed, n_n, n_deg, n_N);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
