#include "haplitz/wordalg.hpp"

#include <cctype>
#include <deque>
#include <sstream>

namespace haplitz {

namespace {

ExprPtr make(SymbolExpr::Kind kind, ExprPtr a = nullptr, ExprPtr b = nullptr) {
  auto e = std::make_shared<SymbolExpr>();
  e->kind = kind;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

}  // namespace

ExprPtr expr_atom(std::string name) {
  auto e = std::make_shared<SymbolExpr>();
  e->kind = SymbolExpr::Kind::kAtom;
  e->name = std::move(name);
  return e;
}

ExprPtr expr_mul(ExprPtr l, ExprPtr r) {
  return make(SymbolExpr::Kind::kMul, std::move(l), std::move(r));
}

ExprPtr expr_tilde(ExprPtr x) {
  if (x->kind == SymbolExpr::Kind::kTilde) return x->a;
  return make(SymbolExpr::Kind::kTilde, std::move(x));
}

ExprPtr expr_star(ExprPtr x) {
  if (x->kind == SymbolExpr::Kind::kStar) return x->a;
  return make(SymbolExpr::Kind::kStar, std::move(x));
}

ExprPtr expr_plus(ExprPtr x) {
  return make(SymbolExpr::Kind::kPlusPart, std::move(x));
}

ExprPtr expr_minus(ExprPtr x) {
  return make(SymbolExpr::Kind::kMinusPart, std::move(x));
}

ExprPtr expr_const_left(Matrix c, ExprPtr x) {
  auto e = std::make_shared<SymbolExpr>();
  e->kind = SymbolExpr::Kind::kConstLeft;
  e->a = std::move(x);
  e->constant = std::move(c);
  return e;
}

ExprPtr expr_const_right(ExprPtr x, Matrix c) {
  auto e = std::make_shared<SymbolExpr>();
  e->kind = SymbolExpr::Kind::kConstRight;
  e->a = std::move(x);
  e->constant = std::move(c);
  return e;
}

MatrixSymbol eval_expr(const ExprPtr& e, const SymbolEnv& env) {
  if (!e) throw WordError("null expression");
  switch (e->kind) {
    case SymbolExpr::Kind::kAtom: {
      auto it = env.find(e->name);
      if (it == env.end()) throw WordError("unbound symbol: " + e->name);
      return it->second;
    }
    case SymbolExpr::Kind::kMul:
      return mul(eval_expr(e->a, env), eval_expr(e->b, env));
    case SymbolExpr::Kind::kTilde:
      return tilde(eval_expr(e->a, env));
    case SymbolExpr::Kind::kStar:
      return star(eval_expr(e->a, env));
    case SymbolExpr::Kind::kPlusPart:
      return plus_part(eval_expr(e->a, env));
    case SymbolExpr::Kind::kMinusPart:
      return minus_part(eval_expr(e->a, env));
    case SymbolExpr::Kind::kConstLeft:
      return const_mul_left(e->constant, eval_expr(e->a, env));
    case SymbolExpr::Kind::kConstRight:
      return const_mul_right(eval_expr(e->a, env), e->constant);
  }
  throw WordError("corrupt expression node");
}

std::string expr_to_string(const ExprPtr& e) {
  if (!e) return "<null>";
  switch (e->kind) {
    case SymbolExpr::Kind::kAtom:
      return e->name;
    case SymbolExpr::Kind::kMul:
      return "(" + expr_to_string(e->a) + " " + expr_to_string(e->b) + ")";
    case SymbolExpr::Kind::kTilde:
      return expr_to_string(e->a) + "~";
    case SymbolExpr::Kind::kStar:
      return expr_to_string(e->a) + "*";
    case SymbolExpr::Kind::kPlusPart:
      return "(" + expr_to_string(e->a) + ")+";
    case SymbolExpr::Kind::kMinusPart:
      return "(" + expr_to_string(e->a) + ")-";
    case SymbolExpr::Kind::kConstLeft:
      return "[C]" + expr_to_string(e->a);
    case SymbolExpr::Kind::kConstRight:
      return expr_to_string(e->a) + "[C]";
  }
  return "<corrupt>";
}

int h_parity(const OperatorWord& w) {
  int h = 0;
  for (const auto& a : w.atoms) h += a.hankel ? 1 : 0;
  return h % 2;
}

namespace {

/// Index of the leftmost Hankel atom with a successor, or -1 if the word is
/// already in trailing-H normal form.
int reducible_position(const OperatorWord& w) {
  for (size_t i = 0; i + 1 < w.atoms.size(); ++i) {
    if (w.atoms[i].hankel) return static_cast<int>(i);
  }
  return -1;
}

OperatorWord splice(const OperatorWord& w, int pos,
                    std::vector<WordAtomExpr> repl) {
  OperatorWord out;
  out.atoms.insert(out.atoms.end(), w.atoms.begin(), w.atoms.begin() + pos);
  out.atoms.insert(out.atoms.end(), repl.begin(), repl.end());
  out.atoms.insert(out.atoms.end(), w.atoms.begin() + pos + 2, w.atoms.end());
  return out;
}

}  // namespace

WordSum normalize(const WordSum& ws) {
  WordSum out;
  std::deque<WeightedWord> work(ws.terms.begin(), ws.terms.end());
  while (!work.empty()) {
    WeightedWord t = std::move(work.front());
    work.pop_front();
    const int pos = reducible_position(t.word);
    if (pos < 0) {
      out.terms.push_back(std::move(t));
      continue;
    }
    const ExprPtr a = t.word.atoms[pos].sym;
    const WordAtomExpr& next = t.word.atoms[pos + 1];
    if (next.hankel) {
      // H(a)H(b) -> T(tilde(a) b) - T(tilde(a))T(b)
      work.push_back(
          {t.coeff,
           splice(t.word, pos,
                  {{false, expr_mul(expr_tilde(a), next.sym)}})});
      work.push_back({-t.coeff,
                      splice(t.word, pos,
                             {{false, expr_tilde(a)}, {false, next.sym}})});
    } else {
      // H(a)T(b) -> H(a b) - T(tilde(a))H(b)
      work.push_back(
          {t.coeff,
           splice(t.word, pos, {{true, expr_mul(a, next.sym)}})});
      work.push_back({-t.coeff,
                      splice(t.word, pos,
                             {{false, expr_tilde(a)}, {true, next.sym}})});
    }
  }
  return out;
}

WordSum normalize(const OperatorWord& w) {
  return normalize(WordSum{{WeightedWord{Complex(1.0, 0.0), w}}});
}

int required_margin(const OperatorWord& w, const SymbolEnv& env) {
  int total = 0;
  for (const auto& a : w.atoms) {
    total += eval_expr(a.sym, env).support_bound(1e-13);
  }
  return total;
}

int required_margin(const WordSum& ws, const SymbolEnv& env) {
  int worst = 0;
  for (const auto& t : ws.terms) {
    worst = std::max(worst, required_margin(t.word, env));
  }
  return worst;
}

TruncatedOperator evaluate(const OperatorWord& w, const SymbolEnv& env,
                           int N) {
  if (w.atoms.empty()) throw WordError("empty word");
  std::vector<std::pair<bool, MatrixSymbol>> factors;
  int max_degree = 0;
  for (const auto& a : w.atoms) {
    MatrixSymbol s = eval_expr(a.sym, env);
    max_degree = std::max(max_degree, s.support_bound(1e-13));
    factors.emplace_back(a.hankel, std::move(s));
  }
  if (N <= max_degree) {
    throw WordError("truncation too short; need N > " +
                    std::to_string(max_degree));
  }
  const int n = factors.front().second.n();
  TruncatedOperator acc = identity_trunc(n, N);
  for (const auto& [hankel, s] : factors) {
    acc = compose(acc, hankel ? hankel_trunc(s, N) : toeplitz_trunc(s, N));
  }
  return acc;
}

TruncatedOperator evaluate(const WordSum& ws, const SymbolEnv& env, int N) {
  if (ws.terms.empty()) throw WordError("empty word sum");
  TruncatedOperator acc = evaluate(ws.terms.front().word, env, N);
  acc = scale(acc, ws.terms.front().coeff);
  for (size_t i = 1; i < ws.terms.size(); ++i) {
    acc = add(acc, scale(evaluate(ws.terms[i].word, env, N),
                         ws.terms[i].coeff));
  }
  return acc;
}

OperatorWord parse_word(const std::string& text) {
  OperatorWord out;
  size_t i = 0;
  const auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  const auto expect = [&](char c) {
    skip_ws();
    if (i >= text.size() || text[i] != c) {
      throw WordError("parse error at offset " + std::to_string(i) +
                      ": expected '" + c + "'");
    }
    ++i;
  };
  bool first = true;
  while (true) {
    skip_ws();
    if (i >= text.size()) {
      if (first) throw WordError("empty word");
      break;
    }
    if (!first) expect('*');
    skip_ws();
    if (i >= text.size() || (text[i] != 'T' && text[i] != 'H')) {
      throw WordError("parse error at offset " + std::to_string(i) +
                      ": expected 'T' or 'H'");
    }
    const bool hankel = text[i] == 'H';
    ++i;
    expect('(');
    skip_ws();
    std::string name;
    while (i < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[i])) ||
            text[i] == '_')) {
      name += text[i++];
    }
    if (name.empty()) {
      throw WordError("parse error at offset " + std::to_string(i) +
                      ": expected a symbol name");
    }
    ExprPtr e = expr_atom(name);
    skip_ws();
    while (i < text.size() && (text[i] == '~' || text[i] == '*')) {
      e = text[i] == '~' ? expr_tilde(e) : expr_star(e);
      ++i;
      skip_ws();
    }
    expect(')');
    out.atoms.push_back({hankel, std::move(e)});
    first = false;
    skip_ws();
    if (i >= text.size()) break;
  }
  return out;
}

std::string word_to_string(const OperatorWord& w) {
  std::string out;
  for (size_t i = 0; i < w.atoms.size(); ++i) {
    if (i) out += "*";
    out += w.atoms[i].hankel ? "H(" : "T(";
    out += expr_to_string(w.atoms[i].sym);
    out += ")";
  }
  return out;
}

std::string word_sum_to_string(const WordSum& ws) {
  std::ostringstream os;
  for (size_t i = 0; i < ws.terms.size(); ++i) {
    const Complex c = ws.terms[i].coeff;
    if (c == Complex(1.0, 0.0)) {
      if (i) os << " + ";
    } else if (c == Complex(-1.0, 0.0)) {
      os << (i ? " - " : "-");
    } else {
      if (i) os << " + ";
      os << "(" << c.real() << (c.imag() < 0 ? "-" : "+")
         << std::abs(c.imag()) << "i)·";
    }
    os << word_to_string(ws.terms[i].word);
  }
  return os.str();
}

}  // namespace haplitz
