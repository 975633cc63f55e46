#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kgforge/rdf/prefix_map.hpp"
#include "kgforge/rdf/term.hpp"

namespace kgforge::sparql {

struct Var {
  std::string name;  // without the leading '?'
  friend bool operator==(const Var&, const Var&) = default;
};

using TermOrVar = std::variant<rdf::Term, Var>;

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  Var,
  Const,
  Or,
  And,
  Not,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  Call,       // builtin by upper-case name, or a cast by datatype IRI
  Aggregate,  // name = COUNT/SUM/MIN/MAX/AVG/SAMPLE
};

struct Expr {
  ExprKind kind = ExprKind::Const;
  std::string name;  // variable name, function name or cast IRI
  rdf::Term constant;
  std::vector<ExprPtr> args;
  bool distinct = false;  // aggregates
  bool star = false;      // COUNT(*)
};

struct TriplePatternAst {
  TermOrVar subject;
  TermOrVar predicate;
  TermOrVar object;
};

struct GroupPattern;

struct BgpElement {
  std::vector<TriplePatternAst> triples;
};
struct FilterElement {
  ExprPtr expr;
};
struct BindElement {
  ExprPtr expr;
  std::string var;
};
struct OptionalElement {
  std::shared_ptr<GroupPattern> group;
};
struct UnionElement {
  std::vector<std::shared_ptr<GroupPattern>> branches;
};
struct SubGroupElement {
  std::shared_ptr<GroupPattern> group;
};
struct ValuesElement {
  std::vector<std::string> vars;
  std::vector<std::vector<std::optional<rdf::Term>>> rows;
};
struct ServiceElement {
  rdf::Term endpoint;
  bool silent = false;
  std::shared_ptr<GroupPattern> group;
  std::string text;  // source text between the group's braces
};

using PatternElement = std::variant<BgpElement, FilterElement, BindElement, OptionalElement, UnionElement,
                                    SubGroupElement, ValuesElement, ServiceElement>;

struct GroupPattern {
  std::vector<PatternElement> elements;
};

struct Projection {
  std::string var;
  ExprPtr expr;  // null for a plain variable
};

struct OrderKey {
  ExprPtr expr;
  bool descending = false;
};

struct GroupKey {
  ExprPtr expr;
  std::string alias;  // set for GROUP BY (expr AS ?v) and plain variables
};

struct Query {
  rdf::PrefixMap prefixes;
  std::string base;
  bool distinct = false;
  bool reduced = false;
  bool select_all = false;
  std::vector<Projection> projection;
  GroupPattern where;
  std::vector<GroupKey> group_by;
  std::vector<ExprPtr> having;
  std::vector<OrderKey> order_by;
  std::optional<std::size_t> limit;
  std::size_t offset = 0;
  std::optional<ValuesElement> values;

  // Variable names in the order they first appear in the WHERE clause,
  // excluding blank-node placeholders.
  std::vector<std::string> pattern_variables() const;
  bool is_aggregate() const;
};

// Every variable mentioned by the group, including nested groups, in first
// appearance order.
void collect_variables(const GroupPattern& group, std::vector<std::string>& out);
void collect_variables(const Expr& expr, std::vector<std::string>& out);
bool contains_aggregate(const Expr& expr);

}  // namespace kgforge::sparql
