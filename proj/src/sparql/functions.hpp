#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kgforge/rdf/term.hpp"

namespace kgforge::sparql::detail {

using rdf::Term;
using Value = std::optional<Term>;  // nullopt is an evaluation error

enum class NumKind { Integer, Decimal, Float, Double };

struct Numeric {
  NumKind kind = NumKind::Integer;
  std::int64_t integer = 0;  // when kind == Integer
  double value = 0;          // all kinds
};

std::optional<Numeric> numeric_value(const Term& t);
Term numeric_term(const Numeric& n);

Term boolean_term(bool b);
// Effective boolean value; nullopt for a type error.
std::optional<bool> ebv(const Term& t);

// String-like literal: simple, xsd:string or language-tagged.
bool is_string_literal(const Term& t);

// Operators. Errors propagate as nullopt.
Value op_equal(const Term& a, const Term& b);
Value op_compare(const Term& a, const Term& b, int want);  // want: -2 <, -1 <=, 1 >=, 2 >
Value op_arith(char op, const Term& a, const Term& b);
Value op_negate(const Term& a);

// Casts by target datatype IRI.
Value cast(const std::string& datatype, const Term& arg);

// Builtin functions (upper-case names) over evaluated arguments. BOUND,
// COALESCE and IF are handled by the evaluator.
Value call_builtin(const std::string& name, const std::vector<Value>& args);

// Total order used by ORDER BY: unbound < blank < IRI < literal; numeric
// literals by value before other literals; strings by code point.
int order_compare(const Term* a, const Term* b);

}  // namespace kgforge::sparql::detail
