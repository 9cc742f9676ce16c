#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "haplitz/wordalg.hpp"

using namespace haplitz;

namespace {

Complex c(double re, double im = 0.0) { return {re, im}; }

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

SymbolEnv random_env(std::mt19937_64& rng, int n, int deg) {
  SymbolEnv env;
  env.emplace("a", random_laurent(rng, n, deg));
  env.emplace("b", random_laurent(rng, n, deg));
  env.emplace("c", random_laurent(rng, n, deg));
  return env;
}

OperatorWord random_word(std::mt19937_64& rng, int len) {
  const char* names[] = {"a", "b", "c"};
  OperatorWord w;
  for (int i = 0; i < len; ++i) {
    ExprPtr e = expr_atom(names[rng() % 3]);
    if (rng() % 4 == 0) e = expr_tilde(e);
    if (rng() % 4 == 0) e = expr_star(e);
    w.atoms.push_back({rng() % 2 == 0, std::move(e)});
  }
  return w;
}

bool is_normal(const OperatorWord& w) {
  for (size_t i = 0; i + 1 < w.atoms.size(); ++i) {
    if (w.atoms[i].hankel) return false;
  }
  return true;
}

int hankel_count(const OperatorWord& w) {
  int h = 0;
  for (const auto& a : w.atoms) h += a.hankel ? 1 : 0;
  return h;
}

}  // namespace

TEST_CASE("parity counting") {
  auto tt = parse_word("T(a) * T(b)");
  CHECK(h_parity(tt) == 0);
  auto hthh = parse_word("H(a)*T(b)*H(c)*H(a)");
  CHECK(h_parity(hthh) == 1);
}

TEST_CASE("normal form shape of the two base rules") {
  auto hh = normalize(parse_word("H(a)*H(b)"));
  REQUIRE(hh.terms.size() == 2);
  CHECK(word_to_string(hh.terms[0].word) == "T((a~ b))");
  CHECK(hh.terms[0].coeff == c(1));
  CHECK(word_to_string(hh.terms[1].word) == "T(a~)*T(b)");
  CHECK(hh.terms[1].coeff == c(-1));

  auto ht = normalize(parse_word("H(a)*T(b)"));
  REQUIRE(ht.terms.size() == 2);
  CHECK(word_to_string(ht.terms[0].word) == "H((a b))");
  CHECK(word_to_string(ht.terms[1].word) == "T(a~)*H(b)");

  auto t = normalize(parse_word("T(a)"));
  REQUIRE(t.terms.size() == 1);
  CHECK(word_to_string(t.terms[0].word) == "T(a)");
}

TEST_CASE("normalize is idempotent and produces normal words") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 10; ++i) {
    auto w = random_word(rng, 1 + static_cast<int>(rng() % 6));
    auto ns = normalize(w);
    for (const auto& t : ns.terms) CHECK(is_normal(t.word));
    auto again = normalize(ns);
    REQUIRE(again.terms.size() == ns.terms.size());
    for (size_t j = 0; j < ns.terms.size(); ++j) {
      CHECK(word_to_string(again.terms[j].word) ==
            word_to_string(ns.terms[j].word));
    }
  }
}

TEST_CASE("parity is preserved and shapes match parity") {
  std::mt19937_64 rng(37);
  for (int i = 0; i < 20; ++i) {
    auto w = random_word(rng, 1 + static_cast<int>(rng() % 6));
    const int parity = h_parity(w);
    for (const auto& t : normalize(w).terms) {
      CHECK(h_parity(t.word) == parity);
      CHECK(hankel_count(t.word) == parity);  // pure T, or one trailing H
    }
  }
}

TEST_CASE("output word count stays under the splitting bound") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 20; ++i) {
    const int len = 1 + static_cast<int>(rng() % 6);
    auto w = random_word(rng, len);
    CHECK(normalize(w).terms.size() <= (1u << (len - 1)) + 0u);
  }
}

TEST_CASE("evaluation matches the truncation builders") {
  std::mt19937_64 rng(43);
  auto env = random_env(rng, 2, 3);
  OperatorWord w{{{false, expr_atom("a")}}};
  auto e = evaluate(w, env, 16);
  CHECK((e.data() - toeplitz_trunc(env.at("a"), 16).data())
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK_THROWS_AS(evaluate(w, SymbolEnv{}, 16), WordError);
  CHECK_THROWS_AS(evaluate(w, env, 2), WordError);
}

TEST_CASE("analytic right factors collapse Toeplitz products") {
  std::mt19937_64 rng(47);
  auto a = random_laurent(rng, 2, 3);
  auto b_plus = plus_part(random_laurent(rng, 2, 3));
  SymbolEnv env{{"a", a}, {"p", b_plus}};
  const int N = 48;
  auto lhs = evaluate(parse_word("T(a)*T(p)"), env, N);
  auto rhs = toeplitz_trunc(mul(a, b_plus), N);
  CHECK(window_residual(lhs, rhs, WindowSpec{0, 40, 0, 40}) < 1e-12);
}

TEST_CASE("normalization is certified by window evaluation") {
  std::mt19937_64 rng(53);
  for (int i = 0; i < 30; ++i) {
    const int n = 1 + static_cast<int>(rng() % 2);
    auto env = random_env(rng, n, 3);
    auto w = random_word(rng, 1 + static_cast<int>(rng() % 6));
    auto ns = normalize(w);
    const int N = 64;
    const int margin =
        std::max(required_margin(w, env), required_margin(ns, env)) + 2;
    auto direct = evaluate(w, env, N);
    auto rewritten = evaluate(ns, env, N);
    WindowSpec window{0, N - margin, 0, N - margin};
    INFO("word ", word_to_string(w));
    CHECK(window_residual(direct, rewritten, window) < 1e-10);
  }
}

TEST_CASE("alternative elimination orders agree after evaluation") {
  // Split H(a)*H(b)*H(c) at the back pair first, by hand, then normalize.
  std::mt19937_64 rng(59);
  auto env = random_env(rng, 2, 2);
  auto w = parse_word("H(a)*H(b)*H(c)");
  auto front = normalize(w);

  ExprPtr a = expr_atom("a"), b = expr_atom("b"), cc = expr_atom("c");
  WordSum back{{
      {c(1), OperatorWord{{{true, a},
                           {false, expr_mul(expr_tilde(b), cc)}}}},
      {c(-1), OperatorWord{{{true, a},
                            {false, expr_tilde(b)},
                            {false, cc}}}},
  }};
  auto back_norm = normalize(back);

  const int N = 48;
  const int margin = required_margin(front, env) + 4;
  WindowSpec window{0, N - margin, 0, N - margin};
  CHECK(window_residual(evaluate(front, env, N), evaluate(back_norm, env, N),
                        window) < 1e-10);
}

TEST_CASE("parser rejects malformed words") {
  CHECK_THROWS_AS(parse_word(""), WordError);
  CHECK_THROWS_AS(parse_word("T(a"), WordError);
  CHECK_THROWS_AS(parse_word("X(a)"), WordError);
  CHECK_THROWS_AS(parse_word("T()"), WordError);
  CHECK_THROWS_AS(parse_word("T(a) H(b)"), WordError);
  auto w = parse_word("  T( a~* ) * H(b_2)");
  CHECK(word_to_string(w) == "T(a~*)*H(b_2)");
}
