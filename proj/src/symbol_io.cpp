#include "haplitz/symbol_io.hpp"

#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace haplitz {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw SymbolIoError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw SymbolIoError(where + ": unknown key \"" + key + "\"");
    }
  }
}

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  throw SymbolIoError(where + ": expected a number or [re, im]");
}

Matrix parse_real_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) {
    throw SymbolIoError(where + ": expected " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      throw SymbolIoError(where + ": row " + std::to_string(i) +
                          " needs " + std::to_string(n) + " entries");
    }
    for (int k = 0; k < n; ++k) {
      if (!row[k].is_number()) throw SymbolIoError(where + ": non-numeric entry");
      m(i, k) = Complex(row[k].get<double>(), 0.0);
    }
  }
  return m;
}

MatrixSymbol parse_special(const json& j, int n) {
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw SymbolIoError("special: missing \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "blaschke_conj") {
    require_keys(j, {"kind", "a"}, "special(blaschke_conj)");
    if (!j.contains("a")) throw SymbolIoError("blaschke_conj: missing \"a\"");
    if (n != 1) throw SymbolIoError("blaschke_conj is scalar; n must be 1");
    return blaschke_conj(parse_complex(j["a"], "blaschke_conj.a"));
  }
  if (kind == "singular_inner_conj") {
    require_keys(j, {"kind", "xi", "mass"}, "special(singular_inner_conj)");
    if (n != 1) {
      throw SymbolIoError("singular_inner_conj is scalar; n must be 1");
    }
    Complex xi(1.0, 0.0);
    double mass = 1.0;
    if (j.contains("xi")) xi = parse_complex(j["xi"], "singular_inner_conj.xi");
    if (j.contains("mass")) {
      if (!j["mass"].is_number()) throw SymbolIoError("mass must be a number");
      mass = j["mass"].get<double>();
    }
    return singular_inner_conj(xi, mass);
  }
  if (kind == "half_indicator") {
    require_keys(j, {"kind"}, "special(half_indicator)");
    if (n != 1) throw SymbolIoError("half_indicator is scalar; n must be 1");
    return half_indicator();
  }
  if (kind == "geometric") {
    require_keys(j, {"kind", "re", "im", "ratio"}, "special(geometric)");
    if (!j.contains("re") || !j.contains("ratio")) {
      throw SymbolIoError("geometric: needs \"re\" and \"ratio\"");
    }
    Matrix base = parse_real_matrix(j["re"], n, "geometric.re");
    if (j.contains("im")) {
      base += Complex(0.0, 1.0) * parse_real_matrix(j["im"], n, "geometric.im");
    }
    if (!j["ratio"].is_number()) throw SymbolIoError("ratio must be a number");
    const double ratio = j["ratio"].get<double>();
    if (ratio <= 0.0 || ratio >= 1.0) {
      throw SymbolIoError("geometric: ratio must lie in (0, 1)");
    }
    return geometric(base, ratio);
  }
  throw SymbolIoError("special: unknown kind \"" + kind + "\"");
}

}  // namespace

MatrixSymbol parse_symbol_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SymbolIoError(std::string("invalid JSON: ") + e.what());
  }
  require_keys(j, {"n", "terms", "special"}, "symbol");
  if (!j.contains("n") || !j["n"].is_number_integer()) {
    throw SymbolIoError("symbol: missing integer \"n\"");
  }
  const int n = j["n"].get<int>();
  if (n < 1 || n > 8) throw SymbolIoError("symbol: n out of range [1, 8]");

  MatrixSymbol::CoeffMap coeffs;
  if (j.contains("terms")) {
    if (!j["terms"].is_array()) throw SymbolIoError("terms: expected an array");
    for (const json& term : j["terms"]) {
      require_keys(term, {"k", "re", "im"}, "term");
      if (!term.contains("k") || !term["k"].is_number_integer()) {
        throw SymbolIoError("term: missing integer \"k\"");
      }
      const int k = term["k"].get<int>();
      if (coeffs.count(k)) {
        throw SymbolIoError("term: duplicate degree " + std::to_string(k));
      }
      Matrix m = Matrix::Zero(n, n);
      if (term.contains("re")) m += parse_real_matrix(term["re"], n, "term.re");
      if (term.contains("im")) {
        m += Complex(0.0, 1.0) * parse_real_matrix(term["im"], n, "term.im");
      }
      coeffs.emplace(k, std::move(m));
    }
  }
  MatrixSymbol out = laurent(n, coeffs);
  if (j.contains("special")) {
    MatrixSymbol sp = parse_special(j["special"], n);
    out = coeffs.empty() ? std::move(sp) : add(out, sp);
  }
  return out;
}

MatrixSymbol read_symbol_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SymbolIoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_symbol_json(buf.str());
}

std::string symbol_to_json(const MatrixSymbol& s, int degree_cap) {
  json terms = json::array();
  const auto emit = [&](int k, const Matrix& m) {
    if (m.cwiseAbs().maxCoeff() == 0.0) return;
    json re = json::array(), im = json::array();
    for (int i = 0; i < m.rows(); ++i) {
      json rrow = json::array(), irow = json::array();
      for (int c = 0; c < m.cols(); ++c) {
        rrow.push_back(m(i, c).real());
        irow.push_back(m(i, c).imag());
      }
      re.push_back(std::move(rrow));
      im.push_back(std::move(irow));
    }
    terms.push_back({{"k", k}, {"re", std::move(re)}, {"im", std::move(im)}});
  };
  for (int k = -degree_cap; k <= degree_cap; ++k) emit(k, s.coeff(k));
  json j{{"n", s.n()}, {"terms", std::move(terms)}};
  return j.dump(2);
}

}  // namespace haplitz
