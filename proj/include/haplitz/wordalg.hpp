#pragma once

#include <memory>
#include <string>
#include <vector>

#include "haplitz/operators.hpp"

namespace haplitz {

struct WordError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class SymbolExpr;
using ExprPtr = std::shared_ptr<const SymbolExpr>;

/// Unevaluated symbol expression: named atoms closed under product, tilde,
/// star, coefficient-half projections, and constant matrix factors. Shared
/// immutably so rewriting never copies symbol data.
class SymbolExpr {
 public:
  enum class Kind {
    kAtom,
    kMul,
    kTilde,
    kStar,
    kPlusPart,
    kMinusPart,
    kConstLeft,
    kConstRight,
  };

  Kind kind;
  std::string name;  // kAtom
  ExprPtr a, b;
  Matrix constant;  // kConstLeft / kConstRight
};

ExprPtr expr_atom(std::string name);
ExprPtr expr_mul(ExprPtr l, ExprPtr r);
/// Collapses tilde(tilde(x)) to x.
ExprPtr expr_tilde(ExprPtr x);
/// Collapses star(star(x)) to x.
ExprPtr expr_star(ExprPtr x);
ExprPtr expr_plus(ExprPtr x);
ExprPtr expr_minus(ExprPtr x);
ExprPtr expr_const_left(Matrix c, ExprPtr x);
ExprPtr expr_const_right(ExprPtr x, Matrix c);

using SymbolEnv = std::map<std::string, MatrixSymbol>;

/// Materialize the expression; throws WordError on unbound names.
MatrixSymbol eval_expr(const ExprPtr& e, const SymbolEnv& env);

std::string expr_to_string(const ExprPtr& e);

/// One factor of an operator word: T(expr) or H(expr).
struct WordAtomExpr {
  bool hankel = false;
  ExprPtr sym;
};

struct OperatorWord {
  std::vector<WordAtomExpr> atoms;
};

struct WeightedWord {
  Complex coeff{1.0, 0.0};
  OperatorWord word;
};

struct WordSum {
  std::vector<WeightedWord> terms;
};

/// Number of Hankel atoms mod 2.
int h_parity(const OperatorWord& w);

/// Rewrite to trailing-H normal form with the two splitting rules
///   H(a)H(b) -> T(tilde(a) b) - T(tilde(a))T(b)
///   H(a)T(b) -> H(a b)        - T(tilde(a))H(b)
/// applied at the leftmost non-final Hankel atom until fixpoint. Every output
/// word is all-Toeplitz or ends in its single Hankel atom; parity per source
/// word is preserved.
WordSum normalize(const WordSum& ws);
WordSum normalize(const OperatorWord& w);

/// Dense evaluation: compose the truncations of the materialized atom
/// symbols at length N. Throws when N cannot hold the largest atom degree.
TruncatedOperator evaluate(const OperatorWord& w, const SymbolEnv& env, int N);
TruncatedOperator evaluate(const WordSum& ws, const SymbolEnv& env, int N);

/// Sum over atoms of the materialized coefficient degrees; window
/// comparisons of evaluations need at least this much margin.
int required_margin(const OperatorWord& w, const SymbolEnv& env);
int required_margin(const WordSum& ws, const SymbolEnv& env);

/// Parse `atom ('*' atom)*` with `atom := ('T'|'H') '(' name markers ')'`,
/// markers a sequence of '~' (tilde) and '*' (star).
OperatorWord parse_word(const std::string& text);

std::string word_to_string(const OperatorWord& w);
std::string word_sum_to_string(const WordSum& ws);

}  // namespace haplitz
