#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "haplitz/symbol_io.hpp"

using namespace haplitz;

TEST_CASE("terms parse into explicit coefficients") {
  const MatrixSymbol s = parse_symbol_json(R"({
    "n": 2,
    "terms": [
      { "k": -1, "re": [[1, 0], [0, 0]], "im": [[0, 0.5], [0, 0]] },
      { "k": 2,  "re": [[0, 0], [0, 3]] }
    ]
  })");
  CHECK(s.n() == 2);
  CHECK(s.coeff(-1)(0, 0) == Complex(1.0, 0.0));
  CHECK(s.coeff(-1)(0, 1) == Complex(0.0, 0.5));
  CHECK(s.coeff(2)(1, 1) == Complex(3.0, 0.0));
  CHECK(s.coeff(0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK_THROWS_AS(parse_symbol_json(R"({"n": 1, "bogus": 1})"), SymbolIoError);
  CHECK_THROWS_AS(
      parse_symbol_json(R"({"n": 1, "terms": [{"k": 0, "re": [[1]], "x": 1}]})"),
      SymbolIoError);
  CHECK_THROWS_AS(
      parse_symbol_json(
          R"({"n": 1, "special": {"kind": "half_indicator", "y": 2}})"),
      SymbolIoError);
  CHECK_THROWS_AS(parse_symbol_json(R"({"terms": []})"), SymbolIoError);
  CHECK_THROWS_AS(parse_symbol_json(R"({"n": 1, "terms": [{"re": [[1]]}]})"),
                  SymbolIoError);
  CHECK_THROWS_AS(
      parse_symbol_json(
          R"({"n": 1, "terms": [{"k": 0, "re": [[1]]}, {"k": 0, "re": [[2]]}]})"),
      SymbolIoError);
  CHECK_THROWS_AS(parse_symbol_json("not json at all"), SymbolIoError);
}

TEST_CASE("special builders come through the schema") {
  const MatrixSymbol b = parse_symbol_json(
      R"({"n": 1, "special": {"kind": "blaschke_conj", "a": [0.5, 0.0]}})");
  const MatrixSymbol direct = blaschke_conj(Complex(0.5, 0.0));
  for (int k : {-4, -1, 0}) {
    CHECK(std::abs(b.coeff(k)(0, 0) - direct.coeff(k)(0, 0)) < 1e-15);
  }

  const MatrixSymbol h =
      parse_symbol_json(R"({"n": 1, "special": {"kind": "half_indicator"}})");
  CHECK(h.coeff(0)(0, 0) == Complex(0.5, 0.0));

  const MatrixSymbol g = parse_symbol_json(R"({
    "n": 2,
    "special": {"kind": "geometric", "re": [[1, 0], [0, 1]],
                "im": [[0, 0], [0, 0]], "ratio": 0.5}
  })");
  CHECK(std::abs(g.coeff(-3)(0, 0) - Complex(0.125, 0.0)) < 1e-15);

  CHECK_THROWS_AS(
      parse_symbol_json(R"({"n": 2, "special": {"kind": "half_indicator"}})"),
      SymbolIoError);
  CHECK_THROWS_AS(
      parse_symbol_json(R"({"n": 1, "special": {"kind": "mystery"}})"),
      SymbolIoError);
}

TEST_CASE("terms and special combine additively") {
  const MatrixSymbol s = parse_symbol_json(R"({
    "n": 1,
    "terms": [ { "k": 0, "re": [[2]] } ],
    "special": {"kind": "half_indicator"}
  })");
  CHECK(std::abs(s.coeff(0)(0, 0) - Complex(2.5, 0.0)) < 1e-15);
}

TEST_CASE("explicit symbols roundtrip through serialization") {
  const std::string text = R"({
    "n": 2,
    "terms": [
      { "k": -2, "re": [[0.25, 1], [0, 0]], "im": [[0, 0], [-1, 0]] },
      { "k": 3,  "re": [[0, 0], [0, 0.5]], "im": [[2, 0], [0, 0]] }
    ]
  })";
  const MatrixSymbol s = parse_symbol_json(text);
  const MatrixSymbol back = parse_symbol_json(symbol_to_json(s, 8));
  for (int k = -8; k <= 8; ++k) {
    CHECK((s.coeff(k) - back.coeff(k)).cwiseAbs().maxCoeff() < 1e-15);
  }
}
