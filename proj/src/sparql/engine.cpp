#include "kgforge/sparql/engine.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "functions.hpp"
#include "kgforge/sparql/parser.hpp"

namespace kgforge::sparql {

namespace {

using rdf::Term;
using store::kNoTerm;
using store::TermId;
using Row = std::vector<TermId>;
using Rows = std::vector<Row>;
using detail::Value;
using Clock = std::chrono::steady_clock;

struct RowHash {
  std::size_t operator()(const Row& r) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto id : r) h = (h ^ id) * 1099511628211ull;
    return h;
  }
};

class Deadline {
 public:
  explicit Deadline(std::chrono::milliseconds budget) : end_(Clock::now() + budget) {}
  void tick() {
    if ((++counter_ & 1023) == 0) check();
  }
  void check() const {
    if (Clock::now() > end_) throw Timeout();
  }
  std::chrono::milliseconds remaining() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(end_ - Clock::now());
  }

 private:
  Clock::time_point end_;
  unsigned counter_ = 0;
};

class Context {
 public:
  Context(const store::Snapshot& data, const Query& query, const EvalOptions& options)
      : data(data),
        graph(data.graph()),
        query(query),
        options(options),
        deadline(options.timeout),
        base_size_(data.dictionary().size()) {}

  const store::Snapshot& data;
  const store::IndexedGraph& graph;
  const Query& query;
  const EvalOptions& options;
  Deadline deadline;

  std::unordered_map<std::string, int> slots;
  std::vector<std::string> slot_names;
  std::unordered_map<const Expr*, int> aggregate_slots;

  int add_slot(const std::string& name) {
    auto [it, inserted] = slots.emplace(name, static_cast<int>(slot_names.size()));
    if (inserted) slot_names.push_back(name);
    return it->second;
  }
  int add_hidden_slot() {
    slot_names.push_back("");
    return static_cast<int>(slot_names.size() - 1);
  }
  int slot(const std::string& name) const {
    auto it = slots.find(name);
    return it == slots.end() ? -1 : it->second;
  }
  std::size_t width() const { return slot_names.size(); }

  // Only ids from the dataset dictionary can occur in stored triples.
  bool stored(TermId id) const { return id != kNoTerm && id <= base_size_; }

  std::optional<TermId> find_stored(const Term& t) const { return data.dictionary().find(t); }

  TermId intern(const Term& t) {
    if (auto id = data.dictionary().find(t)) return *id;
    auto it = local_ids_.find(t);
    if (it != local_ids_.end()) return it->second;
    local_.push_back(t);
    auto id = static_cast<TermId>(base_size_ + local_.size());
    local_ids_.emplace(t, id);
    return id;
  }

  const Term& term(TermId id) const {
    return id <= base_size_ ? data.dictionary().term(id) : local_[id - base_size_ - 1];
  }

 private:
  std::size_t base_size_;
  std::vector<Term> local_;
  std::unordered_map<Term, TermId, rdf::TermHash> local_ids_;
};

// ---------------------------------------------------------------------------
// Expressions

Value eval(const Expr& e, const Row& row, Context& cx);

std::optional<bool> eval_bool(const Expr& e, const Row& row, Context& cx) {
  auto v = eval(e, row, cx);
  if (!v) return std::nullopt;
  return detail::ebv(*v);
}

Value eval(const Expr& e, const Row& row, Context& cx) {
  switch (e.kind) {
    case ExprKind::Var: {
      int s = cx.slot(e.name);
      if (s < 0 || row[s] == kNoTerm) return std::nullopt;
      return cx.term(row[s]);
    }
    case ExprKind::Const: return e.constant;
    case ExprKind::Aggregate: {
      auto it = cx.aggregate_slots.find(&e);
      if (it == cx.aggregate_slots.end() || row[it->second] == kNoTerm) return std::nullopt;
      return cx.term(row[it->second]);
    }
    case ExprKind::Or: {
      auto a = eval_bool(*e.args[0], row, cx);
      if (a && *a) return detail::boolean_term(true);
      auto b = eval_bool(*e.args[1], row, cx);
      if (b && *b) return detail::boolean_term(true);
      if (a && b) return detail::boolean_term(false);
      return std::nullopt;
    }
    case ExprKind::And: {
      auto a = eval_bool(*e.args[0], row, cx);
      if (a && !*a) return detail::boolean_term(false);
      auto b = eval_bool(*e.args[1], row, cx);
      if (b && !*b) return detail::boolean_term(false);
      if (a && b) return detail::boolean_term(true);
      return std::nullopt;
    }
    case ExprKind::Not: {
      auto a = eval_bool(*e.args[0], row, cx);
      if (!a) return std::nullopt;
      return detail::boolean_term(!*a);
    }
    case ExprKind::Neg: {
      auto a = eval(*e.args[0], row, cx);
      if (!a) return std::nullopt;
      return detail::op_negate(*a);
    }
    case ExprKind::Call: {
      if (e.name == "BOUND") {
        int s = cx.slot(e.args[0]->name);
        return detail::boolean_term(s >= 0 && row[s] != kNoTerm);
      }
      if (e.name == "COALESCE") {
        for (const auto& a : e.args) {
          if (auto v = eval(*a, row, cx)) return v;
        }
        return std::nullopt;
      }
      if (e.name == "IF") {
        auto c = eval_bool(*e.args[0], row, cx);
        if (!c) return std::nullopt;
        return eval(*e.args[*c ? 1 : 2], row, cx);
      }
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(*a, row, cx));
      if (e.name.find(':') != std::string::npos) {
        if (!args[0]) return std::nullopt;
        return detail::cast(e.name, *args[0]);
      }
      return detail::call_builtin(e.name, args);
    }
    default: break;
  }
  auto a = eval(*e.args[0], row, cx);
  auto b = eval(*e.args[1], row, cx);
  if (!a || !b) return std::nullopt;
  switch (e.kind) {
    case ExprKind::Eq: return detail::op_equal(*a, *b);
    case ExprKind::Ne: {
      auto r = detail::op_equal(*a, *b);
      if (!r) return std::nullopt;
      return detail::boolean_term(r->value() == "false");
    }
    case ExprKind::Lt: return detail::op_compare(*a, *b, -2);
    case ExprKind::Le: return detail::op_compare(*a, *b, -1);
    case ExprKind::Ge: return detail::op_compare(*a, *b, 1);
    case ExprKind::Gt: return detail::op_compare(*a, *b, 2);
    case ExprKind::Add: return detail::op_arith('+', *a, *b);
    case ExprKind::Sub: return detail::op_arith('-', *a, *b);
    case ExprKind::Mul: return detail::op_arith('*', *a, *b);
    case ExprKind::Div: return detail::op_arith('/', *a, *b);
    default: return std::nullopt;
  }
}

bool passes(const std::vector<const Expr*>& filters, const Row& row, Context& cx) {
  for (const auto* f : filters) {
    auto b = eval_bool(*f, row, cx);
    if (!b || !*b) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Joins

struct Schema {
  std::vector<bool> maybe;   // bound in some row
  std::vector<bool> always;  // bound in every row
};

Schema schema_of(const Rows& rows, std::size_t width) {
  Schema s{std::vector<bool>(width, false), std::vector<bool>(width, !rows.empty())};
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < width; ++i) {
      bool b = r[i] != kNoTerm;
      s.maybe[i] = s.maybe[i] || b;
      s.always[i] = s.always[i] && b;
    }
  }
  return s;
}

bool merge_into(Row& out, const Row& right) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (right[i] == kNoTerm) continue;
    if (out[i] == kNoTerm) {
      out[i] = right[i];
    } else if (out[i] != right[i]) {
      return false;
    }
  }
  return true;
}

// Join (optional = false) or left join with the given filters.
Rows join(const Rows& left, const Rows& right, Context& cx, bool optional = false,
          const std::vector<const Expr*>& filters = {}) {
  const std::size_t width = cx.width();
  auto ls = schema_of(left, width);
  auto rs = schema_of(right, width);
  std::vector<std::size_t> key;
  for (std::size_t i = 0; i < width; ++i) {
    if (ls.always[i] && rs.always[i]) key.push_back(i);
  }
  auto key_of = [&](const Row& r) {
    Row k;
    k.reserve(key.size());
    for (auto i : key) k.push_back(r[i]);
    return k;
  };
  std::unordered_map<Row, std::vector<std::size_t>, RowHash> index;
  if (!key.empty()) {
    for (std::size_t j = 0; j < right.size(); ++j) index[key_of(right[j])].push_back(j);
  }
  std::vector<std::size_t> all(key.empty() ? right.size() : 0);
  std::iota(all.begin(), all.end(), 0);

  Rows out;
  for (const auto& l : left) {
    const std::vector<std::size_t>* candidates = &all;
    if (!key.empty()) {
      auto it = index.find(key_of(l));
      static const std::vector<std::size_t> kNone;
      candidates = it == index.end() ? &kNone : &it->second;
    }
    bool matched = false;
    for (auto j : *candidates) {
      cx.deadline.tick();
      Row merged = l;
      if (!merge_into(merged, right[j])) continue;
      if (!filters.empty() && !passes(filters, merged, cx)) continue;
      matched = true;
      out.push_back(std::move(merged));
    }
    if (optional && !matched) out.push_back(l);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Basic graph patterns

struct Slot {
  TermId id = kNoTerm;  // constant
  int var = -1;         // variable slot
};

struct CompiledPattern {
  Slot s, p, o;
};

Slot compile(const TermOrVar& t, Context& cx, bool& impossible) {
  if (const auto* v = std::get_if<Var>(&t)) return {kNoTerm, cx.slot(v->name)};
  auto id = cx.find_stored(std::get<Term>(t));
  if (!id) impossible = true;
  return {id.value_or(kNoTerm), -1};
}

std::size_t estimate(const CompiledPattern& p, const std::vector<bool>& bound, Context& cx) {
  store::IdPattern ids{p.s.id, p.p.id, p.o.id};
  double est = static_cast<double>(cx.graph.count(ids));
  for (const auto* s : {&p.s, &p.p, &p.o}) {
    if (s->var >= 0 && bound[s->var]) est /= (s == &p.p ? 4.0 : 100.0);
  }
  return static_cast<std::size_t>(est);
}

bool connected(const CompiledPattern& p, const std::vector<bool>& bound) {
  for (const auto* s : {&p.s, &p.p, &p.o}) {
    if (s->var >= 0 && bound[s->var]) return true;
  }
  return false;
}

std::vector<CompiledPattern> plan_bgp(std::vector<CompiledPattern> patterns, std::vector<bool> bound, Context& cx) {
  std::vector<CompiledPattern> ordered;
  bool any_bound = std::find(bound.begin(), bound.end(), true) != bound.end();
  while (!patterns.empty()) {
    std::size_t best = 0;
    std::pair<int, std::size_t> best_score{2, 0};
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      int tier = (!any_bound || connected(patterns[i], bound)) ? 0 : 1;
      std::pair<int, std::size_t> score{tier, estimate(patterns[i], bound, cx)};
      if (score < best_score) {
        best_score = score;
        best = i;
      }
    }
    for (const auto* s : {&patterns[best].s, &patterns[best].p, &patterns[best].o}) {
      if (s->var >= 0) bound[s->var] = true;
    }
    any_bound = true;
    ordered.push_back(patterns[best]);
    patterns.erase(patterns.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return ordered;
}

void match_from(const std::vector<CompiledPattern>& ps, std::size_t i, Row& row, Rows& out, Context& cx) {
  if (i == ps.size()) {
    out.push_back(row);
    return;
  }
  const auto& p = ps[i];
  store::IdPattern ids;
  TermId* targets[3] = {&ids.s, &ids.p, &ids.o};
  const Slot* slots[3] = {&p.s, &p.p, &p.o};
  for (int k = 0; k < 3; ++k) {
    if (slots[k]->var < 0) {
      *targets[k] = slots[k]->id;
    } else if (TermId v = row[slots[k]->var]; v != kNoTerm) {
      if (!cx.stored(v)) return;
      *targets[k] = v;
    }
  }
  cx.graph.scan(ids, [&](const store::IdTriple& t) {
    cx.deadline.tick();
    const TermId values[3] = {t.s, t.p, t.o};
    int assigned[3];
    int n = 0;
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      int var = slots[k]->var;
      if (var < 0) continue;
      if (row[var] == kNoTerm) {
        row[var] = values[k];
        assigned[n++] = var;
      } else if (row[var] != values[k]) {
        ok = false;
      }
    }
    if (ok) match_from(ps, i + 1, row, out, cx);
    for (int k = 0; k < n; ++k) row[assigned[k]] = kNoTerm;
    return true;
  });
}

Rows eval_bgp(const BgpElement& bgp, const Rows& input, Context& cx) {
  bool impossible = false;
  std::vector<CompiledPattern> patterns;
  for (const auto& t : bgp.triples) {
    patterns.push_back({compile(t.subject, cx, impossible), compile(t.predicate, cx, impossible),
                        compile(t.object, cx, impossible)});
  }
  if (impossible || input.empty()) return {};
  auto ordered = plan_bgp(std::move(patterns), schema_of(input, cx.width()).always, cx);
  Rows out;
  for (const auto& in : input) {
    Row row = in;
    match_from(ordered, 0, row, out, cx);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SERVICE

std::string prologue(const Query& q) {
  std::string out;
  if (!q.base.empty()) out += "BASE <" + q.base + ">\n";
  for (const auto& [label, ns] : q.prefixes.entries()) out += "PREFIX " + label + ": <" + ns + ">\n";
  return out;
}

Rows eval_service(const ServiceElement& s, const Rows& input, Context& cx) {
  const std::string& endpoint = s.endpoint.value();
  if (input.empty()) return {};
  try {
    if (!cx.options.federation) throw std::runtime_error("no federation client configured");

    std::vector<std::string> vars;
    collect_variables(*s.group, vars);
    auto always = schema_of(input, cx.width()).always;
    std::vector<int> shared;
    for (const auto& v : vars) {
      int slot = cx.slot(v);
      if (v.rfind("_:", 0) == 0 || slot < 0 || !always[slot]) continue;
      bool has_blank = std::any_of(input.begin(), input.end(), [&](const Row& r) { return cx.term(r[slot]).is_blank(); });
      if (!has_blank) shared.push_back(slot);
    }

    std::vector<Row> tuples;
    if (!shared.empty()) {
      std::unordered_set<Row, RowHash> seen;
      for (const auto& r : input) {
        Row t;
        for (int slot : shared) t.push_back(r[slot]);
        if (seen.insert(t).second) tuples.push_back(std::move(t));
      }
    }

    std::vector<std::string> queries;
    std::string head = prologue(cx.query) + "SELECT * WHERE {\n";
    if (shared.empty()) {
      queries.push_back(head + s.text + "\n}\n");
    } else {
      std::size_t batch = std::max<std::size_t>(1, cx.options.service_batch);
      for (std::size_t start = 0; start < tuples.size(); start += batch) {
        std::string values = "  VALUES (";
        for (int slot : shared) values += " ?" + cx.slot_names[slot];
        values += " ) {\n";
        for (std::size_t k = start; k < std::min(tuples.size(), start + batch); ++k) {
          values += "    (";
          for (auto id : tuples[k]) values += " " + cx.term(id).to_ntriples();
          values += " )\n";
        }
        values += "  }\n";
        queries.push_back(head + values + s.text + "\n}\n");
      }
    }

    Rows remote;
    for (const auto& q : queries) {
      cx.deadline.check();
      auto budget = std::min(cx.options.service_timeout, cx.deadline.remaining());
      if (budget.count() <= 0) throw Timeout();
      auto table = cx.options.federation->select(endpoint, q, budget);
      std::vector<int> map;
      for (const auto& v : table.vars) map.push_back(cx.slot(v));
      for (const auto& r : table.rows) {
        if (r.size() != table.vars.size()) throw std::runtime_error("malformed result row");
        Row row(cx.width(), kNoTerm);
        for (std::size_t k = 0; k < r.size(); ++k) {
          if (map[k] >= 0 && r[k]) row[map[k]] = cx.intern(*r[k]);
        }
        remote.push_back(std::move(row));
      }
    }
    return join(input, remote, cx);
  } catch (const Timeout&) {
    if (s.silent) return input;
    throw FederationError(endpoint, "timed out");
  } catch (const FederationError&) {
    if (s.silent) return input;
    throw;
  } catch (const std::exception& e) {
    if (s.silent) return input;
    throw FederationError(endpoint, e.what());
  }
}

// ---------------------------------------------------------------------------
// Groups

Rows unit(Context& cx) { return Rows{Row(cx.width(), kNoTerm)}; }

Rows eval_group(const GroupPattern& g, Context& cx, std::vector<const Expr*>* filters_out = nullptr);

Rows values_rows(const ValuesElement& v, Context& cx) {
  Rows out;
  for (const auto& r : v.rows) {
    Row row(cx.width(), kNoTerm);
    for (std::size_t k = 0; k < v.vars.size(); ++k) {
      if (r[k]) row[cx.slot(v.vars[k])] = cx.intern(*r[k]);
    }
    out.push_back(std::move(row));
  }
  return out;
}

// Element order: SERVICE calls move behind the inner-join elements of their
// OPTIONAL/BIND-delimited segment.
std::vector<const PatternElement*> schedule(const GroupPattern& g) {
  std::vector<const PatternElement*> out;
  std::vector<const PatternElement*> services;
  auto flush = [&] {
    out.insert(out.end(), services.begin(), services.end());
    services.clear();
  };
  for (const auto& el : g.elements) {
    if (std::holds_alternative<ServiceElement>(el)) {
      services.push_back(&el);
    } else if (std::holds_alternative<OptionalElement>(el) || std::holds_alternative<BindElement>(el)) {
      flush();
      out.push_back(&el);
    } else {
      out.push_back(&el);
    }
  }
  flush();
  return out;
}

Rows eval_group(const GroupPattern& g, Context& cx, std::vector<const Expr*>* filters_out) {
  Rows rows = unit(cx);
  std::vector<const Expr*> filters;
  for (const auto* el : schedule(g)) {
    cx.deadline.check();
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, BgpElement>) {
            rows = eval_bgp(e, rows, cx);
          } else if constexpr (std::is_same_v<T, FilterElement>) {
            filters.push_back(e.expr.get());
          } else if constexpr (std::is_same_v<T, BindElement>) {
            int slot = cx.slot(e.var);
            for (auto& r : rows) {
              if (r[slot] != kNoTerm) continue;
              if (auto v = eval(*e.expr, r, cx)) r[slot] = cx.intern(*v);
            }
          } else if constexpr (std::is_same_v<T, OptionalElement>) {
            std::vector<const Expr*> inner_filters;
            auto right = eval_group(*e.group, cx, &inner_filters);
            rows = join(rows, right, cx, true, inner_filters);
          } else if constexpr (std::is_same_v<T, UnionElement>) {
            Rows all;
            for (const auto& b : e.branches) {
              auto part = eval_group(*b, cx);
              all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
            }
            rows = join(rows, all, cx);
          } else if constexpr (std::is_same_v<T, SubGroupElement>) {
            rows = join(rows, eval_group(*e.group, cx), cx);
          } else if constexpr (std::is_same_v<T, ValuesElement>) {
            rows = join(rows, values_rows(e, cx), cx);
          } else if constexpr (std::is_same_v<T, ServiceElement>) {
            rows = eval_service(e, rows, cx);
          }
        },
        *el);
  }
  if (filters_out) {
    *filters_out = std::move(filters);
    return rows;
  }
  if (filters.empty()) return rows;
  Rows kept;
  for (auto& r : rows) {
    if (passes(filters, r, cx)) kept.push_back(std::move(r));
  }
  return kept;
}

// ---------------------------------------------------------------------------
// Planning

void add_expr_slots(const Expr& e, Context& cx) {
  if (e.kind == ExprKind::Var) cx.add_slot(e.name);
  for (const auto& a : e.args) add_expr_slots(*a, cx);
}

void add_group_slots(const GroupPattern& g, Context& cx) {
  std::vector<std::string> vars;
  collect_variables(g, vars);
  for (const auto& v : vars) cx.add_slot(v);
  for (const auto& el : g.elements) {
    std::visit(
        [&](const auto& e) {
          using T = std::decay_t<decltype(e)>;
          if constexpr (std::is_same_v<T, FilterElement> || std::is_same_v<T, BindElement>) {
            add_expr_slots(*e.expr, cx);
          } else if constexpr (std::is_same_v<T, OptionalElement> || std::is_same_v<T, SubGroupElement> ||
                               std::is_same_v<T, ServiceElement>) {
            add_group_slots(*e.group, cx);
          } else if constexpr (std::is_same_v<T, UnionElement>) {
            for (const auto& b : e.branches) add_group_slots(*b, cx);
          }
        },
        el);
  }
}

void collect_aggregates(const Expr& e, std::vector<const Expr*>& out) {
  if (e.kind == ExprKind::Aggregate) {
    out.push_back(&e);
    return;
  }
  for (const auto& a : e.args) collect_aggregates(*a, out);
}

// ---------------------------------------------------------------------------
// Aggregation

Value aggregate_value(const Expr& agg, const std::vector<const Row*>& rows, Context& cx) {
  std::vector<Term> values;
  if (agg.star) {
    std::size_t n = rows.size();
    if (agg.distinct) {
      std::unordered_set<Row, RowHash> seen;
      for (const auto* r : rows) seen.insert(*r);
      n = seen.size();
    }
    detail::Numeric c;
    c.integer = static_cast<std::int64_t>(n);
    return detail::numeric_term(c);
  }
  bool had_error = false;
  for (const auto* r : rows) {
    if (auto v = eval(*agg.args[0], *r, cx)) {
      values.push_back(std::move(*v));
    } else {
      had_error = true;
    }
  }
  if (agg.distinct) {
    std::vector<Term> unique;
    std::unordered_set<Term, rdf::TermHash> seen;
    for (auto& v : values) {
      if (seen.insert(v).second) unique.push_back(std::move(v));
    }
    values = std::move(unique);
  }
  const std::string& name = agg.name;
  if (name == "COUNT") {
    detail::Numeric c;
    c.integer = static_cast<std::int64_t>(values.size());
    return detail::numeric_term(c);
  }
  if (name == "SAMPLE") {
    if (values.empty()) return std::nullopt;
    return values.front();
  }
  if (name == "GROUP_CONCAT") {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!detail::is_string_literal(values[i]) && !values[i].is_literal()) return std::nullopt;
      if (i) out += agg.constant.value();
      out += values[i].value();
    }
    return Term::literal(out);
  }
  if (name == "MIN" || name == "MAX") {
    if (values.empty()) return std::nullopt;
    const Term* best = &values.front();
    for (const auto& v : values) {
      int c = detail::order_compare(&v, best);
      if ((name == "MIN" && c < 0) || (name == "MAX" && c > 0)) best = &v;
    }
    return *best;
  }
  // SUM / AVG
  if (had_error) return std::nullopt;
  Term sum = Term::typed("0", "http://www.w3.org/2001/XMLSchema#integer");
  for (const auto& v : values) {
    auto s = detail::op_arith('+', sum, v);
    if (!s) return std::nullopt;
    sum = *s;
  }
  if (name == "SUM") return sum;
  if (values.empty()) return sum;
  return detail::op_arith('/', sum, Term::typed(std::to_string(values.size()), "http://www.w3.org/2001/XMLSchema#integer"));
}

Rows group_rows(const Rows& rows, const std::vector<const Expr*>& aggregates, Context& cx) {
  const auto& q = cx.query;
  std::vector<int> key_slots;
  for (const auto& k : q.group_by) key_slots.push_back(k.alias.empty() ? -1 : cx.slot(k.alias));

  std::unordered_map<Row, std::size_t, RowHash> index;
  std::vector<std::vector<const Row*>> members;
  std::vector<Row> keys;
  for (const auto& r : rows) {
    cx.deadline.tick();
    Row key;
    for (const auto& k : q.group_by) {
      auto v = eval(*k.expr, r, cx);
      key.push_back(v ? cx.intern(*v) : kNoTerm);
    }
    auto [it, inserted] = index.emplace(key, members.size());
    if (inserted) {
      members.emplace_back();
      keys.push_back(key);
    }
    members[it->second].push_back(&r);
  }
  if (members.empty() && q.group_by.empty()) {
    members.emplace_back();
    keys.emplace_back();
  }

  Rows out;
  for (std::size_t g = 0; g < members.size(); ++g) {
    Row row = members[g].empty() ? Row(cx.width(), kNoTerm) : *members[g].front();
    // Only group keys and aggregates are visible after grouping.
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!cx.slot_names[i].empty()) row[i] = kNoTerm;
    }
    for (std::size_t k = 0; k < key_slots.size(); ++k) {
      if (key_slots[k] >= 0) row[key_slots[k]] = keys[g][k];
    }
    for (const auto* agg : aggregates) {
      auto v = aggregate_value(*agg, members[g], cx);
      row[cx.aggregate_slots.at(agg)] = v ? cx.intern(*v) : kNoTerm;
    }
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

ResultTable evaluate(const store::Snapshot& data, const Query& query, const EvalOptions& options) {
  Context cx(data, query, options);

  add_group_slots(query.where, cx);
  if (query.values) {
    for (const auto& v : query.values->vars) cx.add_slot(v);
  }
  for (const auto& k : query.group_by) {
    add_expr_slots(*k.expr, cx);
    if (!k.alias.empty()) cx.add_slot(k.alias);
  }
  for (const auto& p : query.projection) {
    if (p.expr) add_expr_slots(*p.expr, cx);
    cx.add_slot(p.var);
  }
  for (const auto& h : query.having) add_expr_slots(*h, cx);
  for (const auto& o : query.order_by) add_expr_slots(*o.expr, cx);
  std::vector<const Expr*> aggregates;
  for (const auto& p : query.projection) {
    if (p.expr) collect_aggregates(*p.expr, aggregates);
  }
  for (const auto& h : query.having) collect_aggregates(*h, aggregates);
  for (const auto& o : query.order_by) collect_aggregates(*o.expr, aggregates);
  for (const auto* a : aggregates) cx.aggregate_slots[a] = cx.add_hidden_slot();

  Rows rows = eval_group(query.where, cx);
  if (query.values) rows = join(rows, values_rows(*query.values, cx), cx);

  if (query.is_aggregate()) {
    rows = group_rows(rows, aggregates, cx);
    if (!query.having.empty()) {
      std::vector<const Expr*> having;
      for (const auto& h : query.having) having.push_back(h.get());
      Rows kept;
      for (auto& r : rows) {
        if (passes(having, r, cx)) kept.push_back(std::move(r));
      }
      rows = std::move(kept);
    }
  }

  for (const auto& p : query.projection) {
    if (!p.expr) continue;
    int slot = cx.slot(p.var);
    for (auto& r : rows) {
      if (auto v = eval(*p.expr, r, cx)) r[slot] = cx.intern(*v);
    }
  }

  if (!query.order_by.empty()) {
    std::vector<std::vector<Value>> keys(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      cx.deadline.tick();
      for (const auto& o : query.order_by) keys[i].push_back(eval(*o.expr, rows[i], cx));
    }
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      for (std::size_t k = 0; k < query.order_by.size(); ++k) {
        const Term* x = keys[a][k] ? &*keys[a][k] : nullptr;
        const Term* y = keys[b][k] ? &*keys[b][k] : nullptr;
        int c = detail::order_compare(x, y);
        if (query.order_by[k].descending) c = -c;
        if (c != 0) return c < 0;
      }
      return false;
    });
    Rows sorted;
    sorted.reserve(rows.size());
    for (auto i : order) sorted.push_back(std::move(rows[i]));
    rows = std::move(sorted);
  }

  ResultTable table;
  table.ordered = !query.order_by.empty();
  std::vector<int> projected;
  if (query.select_all) {
    for (const auto& v : query.pattern_variables()) {
      table.vars.push_back(v);
      projected.push_back(cx.slot(v));
    }
  } else {
    for (const auto& p : query.projection) {
      table.vars.push_back(p.var);
      projected.push_back(cx.slot(p.var));
    }
  }

  std::unordered_set<Row, RowHash> seen;
  std::size_t skipped = 0;
  for (const auto& r : rows) {
    Row out;
    out.reserve(projected.size());
    for (int s : projected) out.push_back(r[s]);
    if (query.distinct && !seen.insert(out).second) continue;
    if (skipped < query.offset) {
      ++skipped;
      continue;
    }
    if (query.limit && table.rows.size() >= *query.limit) break;
    std::vector<std::optional<Term>> cells;
    cells.reserve(out.size());
    for (auto id : out) cells.push_back(id == kNoTerm ? std::nullopt : std::optional<Term>(cx.term(id)));
    table.rows.push_back(std::move(cells));
  }
  return table;
}

ResultTable run_query(const store::Snapshot& data, std::string_view text, const EvalOptions& options) {
  return evaluate(data, parse_query(text), options);
}

}  // namespace kgforge::sparql
