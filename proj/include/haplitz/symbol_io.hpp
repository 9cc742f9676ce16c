#pragma once

#include <string>

#include "haplitz/symbol.hpp"

namespace haplitz {

struct SymbolIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse a symbol specification document:
///   { "n": int,
///     "terms": [ { "k": int, "re": [[...]], "im": [[...]] }, ... ],
///     "special": { "kind": "blaschke_conj" | "singular_inner_conj" |
///                          "half_indicator" | "geometric", ... } }
/// "terms" builds an explicit Laurent part; "special" adds one closed-form
/// scalar builder (n must be 1 when present, except geometric which takes an
/// n x n "base"). Unknown keys are rejected at every level.
MatrixSymbol parse_symbol_json(const std::string& text);

/// parse_symbol_json over the contents of a file.
MatrixSymbol read_symbol_file(const std::string& path);

/// Serialize the explicit coefficients back into the "terms" schema
/// (closed-form tails are not round-tripped; degrees clipped to |k| <= cap).
std::string symbol_to_json(const MatrixSymbol& s, int degree_cap = 64);

}  // namespace haplitz
