#include "functions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <regex>
#include <unordered_map>

#include "../rdf/utf8.hpp"
#include "kgforge/rdf/iri.hpp"
#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::sparql::detail {

namespace vocab = rdf::vocab;

namespace {

bool is_integer_type(std::string_view dt) {
  if (dt.substr(0, vocab::kXsd.size()) != vocab::kXsd) return false;
  auto local = dt.substr(vocab::kXsd.size());
  static const std::string_view kNames[] = {"integer",         "int",           "long",
                                            "short",           "byte",          "nonNegativeInteger",
                                            "positiveInteger", "negativeInteger", "nonPositiveInteger",
                                            "unsignedLong",    "unsignedInt",   "unsignedShort",
                                            "unsignedByte"};
  return std::find(std::begin(kNames), std::end(kNames), local) != std::end(kNames);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string_view strip_sign(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  return s;
}

bool integer_lexical(std::string_view s) { return digits(strip_sign(s)); }

bool decimal_lexical(std::string_view s) {
  s = strip_sign(s);
  auto dot = s.find('.');
  if (dot == std::string_view::npos) return digits(s);
  auto whole = s.substr(0, dot);
  auto frac = s.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  return (whole.empty() || digits(whole)) && (frac.empty() || digits(frac));
}

bool double_lexical(std::string_view s) {
  if (s == "INF" || s == "-INF" || s == "+INF" || s == "NaN") return true;
  auto e = s.find_first_of("eE");
  if (e == std::string_view::npos) return decimal_lexical(s);
  return decimal_lexical(s.substr(0, e)) && integer_lexical(s.substr(e + 1));
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_double(std::string_view s) {
  if (s == "INF" || s == "+INF") return HUGE_VAL;
  if (s == "-INF") return -HUGE_VAL;
  if (s == "NaN") return std::nan("");
  return std::strtod(std::string(s).c_str(), nullptr);
}

std::string format_floating(double v, bool single) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "INF" : "-INF";
  char buf[64];
  auto res = single ? std::to_chars(buf, buf + sizeof buf, static_cast<float>(v))
                    : std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_decimal(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string out(buf, res.ptr);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

Term simple(std::string s) { return Term::literal(std::move(s)); }

// Same language (or none) for both string arguments of a binary string function.
bool compatible(const Term& a, const Term& b) {
  return is_string_literal(a) && is_string_literal(b) && (b.language().empty() || a.language() == b.language());
}

Term like(const Term& model, std::string lexical) {
  if (!model.language().empty()) return Term::lang(std::move(lexical), model.language());
  return simple(std::move(lexical));
}

std::string lower_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

std::string upper_ascii(std::string s) {
  for (auto& c : s) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return s;
}

const std::regex* compiled_regex(const std::string& pattern, const std::string& flags) {
  thread_local std::unordered_map<std::string, std::optional<std::regex>> cache;
  std::string key = flags + '\x01' + pattern;
  auto it = cache.find(key);
  if (it == cache.end()) {
    auto options = std::regex::ECMAScript;
    if (flags.find('i') != std::string::npos) options |= std::regex::icase;
    std::optional<std::regex> re;
    try {
      re.emplace(pattern, options);
    } catch (const std::regex_error&) {
    }
    if (cache.size() > 1000) cache.clear();
    it = cache.emplace(key, std::move(re)).first;
  }
  return it->second ? &*it->second : nullptr;
}

int sign(double d) { return d < 0 ? -1 : d > 0 ? 1 : 0; }

int compare_numeric(const Numeric& a, const Numeric& b) {
  if (a.kind == NumKind::Integer && b.kind == NumKind::Integer) return a.integer < b.integer ? -1 : a.integer > b.integer;
  return sign(a.value - b.value);
}

bool is_boolean(const Term& t) { return t.is_literal() && t.datatype() == vocab::kXsdBoolean; }

std::optional<bool> boolean_value(const Term& t) {
  auto s = trim(t.value());
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  return std::nullopt;
}

bool is_date_type(std::string_view dt) {
  return dt == vocab::kXsdDate || dt == std::string(vocab::kXsd) + "dateTime";
}

}  // namespace

std::optional<Numeric> numeric_value(const Term& t) {
  if (!t.is_literal() || t.datatype().empty()) return std::nullopt;
  const auto& dt = t.datatype();
  auto lex = trim(t.value());
  Numeric n;
  if (is_integer_type(dt)) {
    if (!integer_lexical(lex)) return std::nullopt;
    if (auto v = parse_int(lex)) {
      n.kind = NumKind::Integer;
      n.integer = *v;
      n.value = static_cast<double>(*v);
    } else {
      n.kind = NumKind::Decimal;
      n.value = parse_double(lex);
    }
    return n;
  }
  if (dt == vocab::kXsdDecimal) {
    if (!decimal_lexical(lex)) return std::nullopt;
    n.kind = NumKind::Decimal;
    n.value = parse_double(lex);
    return n;
  }
  if (dt == vocab::kXsdFloat || dt == vocab::kXsdDouble) {
    if (!double_lexical(lex)) return std::nullopt;
    n.kind = dt == vocab::kXsdFloat ? NumKind::Float : NumKind::Double;
    n.value = parse_double(lex);
    if (n.kind == NumKind::Float) n.value = static_cast<float>(n.value);
    return n;
  }
  return std::nullopt;
}

Term numeric_term(const Numeric& n) {
  switch (n.kind) {
    case NumKind::Integer: return Term::typed(std::to_string(n.integer), std::string(vocab::kXsdInteger));
    case NumKind::Decimal: return Term::typed(format_decimal(n.value), std::string(vocab::kXsdDecimal));
    case NumKind::Float: return Term::typed(format_floating(n.value, true), std::string(vocab::kXsdFloat));
    case NumKind::Double: return Term::typed(format_floating(n.value, false), std::string(vocab::kXsdDouble));
  }
  return Term();
}

Term boolean_term(bool b) { return Term::typed(b ? "true" : "false", std::string(vocab::kXsdBoolean)); }

bool is_string_literal(const Term& t) { return t.is_literal() && t.datatype().empty(); }

std::optional<bool> ebv(const Term& t) {
  if (!t.is_literal()) return std::nullopt;
  if (is_boolean(t)) return boolean_value(t).value_or(false);
  if (is_string_literal(t)) return !t.value().empty();
  if (auto n = numeric_value(t)) return !(n->value == 0 || std::isnan(n->value));
  if (is_integer_type(t.datatype()) || t.datatype() == vocab::kXsdDecimal || t.datatype() == vocab::kXsdFloat ||
      t.datatype() == vocab::kXsdDouble) {
    return false;
  }
  return std::nullopt;
}

Value op_equal(const Term& a, const Term& b) {
  auto na = numeric_value(a);
  auto nb = numeric_value(b);
  if (na && nb) return boolean_term(compare_numeric(*na, *nb) == 0 && !std::isnan(na->value));
  if (a == b) return boolean_term(true);
  if (!a.is_literal() || !b.is_literal()) return boolean_term(false);
  if (is_string_literal(a) && is_string_literal(b)) return boolean_term(false);
  if (is_boolean(a) && is_boolean(b)) {
    auto x = boolean_value(a);
    auto y = boolean_value(b);
    if (!x || !y) return std::nullopt;
    return boolean_term(*x == *y);
  }
  if (a.datatype() == b.datatype() && is_date_type(a.datatype())) return boolean_term(false);
  bool known_a = is_string_literal(a) || na || is_boolean(a);
  bool known_b = is_string_literal(b) || nb || is_boolean(b);
  if (known_a && known_b) return boolean_term(false);
  return std::nullopt;
}

Value op_compare(const Term& a, const Term& b, int want) {
  int c = 0;
  auto na = numeric_value(a);
  auto nb = numeric_value(b);
  if (na && nb) {
    if (std::isnan(na->value) || std::isnan(nb->value)) return boolean_term(false);
    c = compare_numeric(*na, *nb);
  } else if (is_string_literal(a) && is_string_literal(b) && a.language().empty() && b.language().empty()) {
    c = a.value().compare(b.value());
    c = c < 0 ? -1 : c > 0;
  } else if (is_boolean(a) && is_boolean(b)) {
    auto x = boolean_value(a);
    auto y = boolean_value(b);
    if (!x || !y) return std::nullopt;
    c = static_cast<int>(*x) - static_cast<int>(*y);
  } else if (a.is_literal() && b.is_literal() && a.datatype() == b.datatype() && is_date_type(a.datatype())) {
    c = a.value().compare(b.value());
    c = c < 0 ? -1 : c > 0;
  } else {
    return std::nullopt;
  }
  switch (want) {
    case -2: return boolean_term(c < 0);
    case -1: return boolean_term(c <= 0);
    case 1: return boolean_term(c >= 0);
    default: return boolean_term(c > 0);
  }
}

Value op_arith(char op, const Term& a, const Term& b) {
  auto na = numeric_value(a);
  auto nb = numeric_value(b);
  if (!na || !nb) return std::nullopt;
  Numeric r;
  r.kind = std::max(na->kind, nb->kind);
  if (op == '/' && r.kind == NumKind::Integer) r.kind = NumKind::Decimal;
  if (r.kind == NumKind::Integer) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (op) {
      case '+': overflow = __builtin_add_overflow(na->integer, nb->integer, &out); break;
      case '-': overflow = __builtin_sub_overflow(na->integer, nb->integer, &out); break;
      default: overflow = __builtin_mul_overflow(na->integer, nb->integer, &out); break;
    }
    if (!overflow) {
      r.integer = out;
      r.value = static_cast<double>(out);
      return numeric_term(r);
    }
    r.kind = NumKind::Decimal;
  }
  switch (op) {
    case '+': r.value = na->value + nb->value; break;
    case '-': r.value = na->value - nb->value; break;
    case '*': r.value = na->value * nb->value; break;
    default:
      if (nb->value == 0 && r.kind == NumKind::Decimal) return std::nullopt;
      r.value = na->value / nb->value;
      break;
  }
  if (r.kind == NumKind::Decimal && !std::isfinite(r.value)) return std::nullopt;
  return numeric_term(r);
}

Value op_negate(const Term& a) {
  auto n = numeric_value(a);
  if (!n) return std::nullopt;
  if (n->kind == NumKind::Integer) {
    if (n->integer == INT64_MIN) return std::nullopt;
    n->integer = -n->integer;
  }
  n->value = -n->value;
  return numeric_term(*n);
}

Value cast(const std::string& datatype, const Term& arg) {
  if (arg.is_blank()) return std::nullopt;
  if (datatype == vocab::kXsdString) return simple(arg.value());
  if (arg.is_iri()) return std::nullopt;
  bool from_string = is_string_literal(arg) && arg.language().empty();
  auto lex = trim(arg.value());
  auto num = numeric_value(arg);

  if (datatype == vocab::kXsdBoolean) {
    if (from_string || is_boolean(arg)) {
      if (auto b = boolean_value(arg); b && (lex == "true" || lex == "false" || lex == "1" || lex == "0")) {
        return boolean_term(*b);
      }
      return std::nullopt;
    }
    if (num) return boolean_term(!(num->value == 0 || std::isnan(num->value)));
    return std::nullopt;
  }

  Numeric out;
  if (datatype == vocab::kXsdInteger) {
    out.kind = NumKind::Integer;
    if (from_string) {
      if (!integer_lexical(lex)) return std::nullopt;
      auto v = parse_int(lex);
      if (!v) return std::nullopt;
      out.integer = *v;
    } else if (num) {
      if (num->kind == NumKind::Integer) {
        out.integer = num->integer;
      } else {
        if (!std::isfinite(num->value) || std::fabs(num->value) >= 9.2e18) return std::nullopt;
        out.integer = static_cast<std::int64_t>(std::trunc(num->value));
      }
    } else if (is_boolean(arg)) {
      auto b = boolean_value(arg);
      if (!b) return std::nullopt;
      out.integer = *b ? 1 : 0;
    } else {
      return std::nullopt;
    }
    out.value = static_cast<double>(out.integer);
    return numeric_term(out);
  }
  if (datatype == vocab::kXsdDecimal) {
    out.kind = NumKind::Decimal;
    if (from_string) {
      if (!decimal_lexical(lex)) return std::nullopt;
      out.value = parse_double(lex);
    } else if (num) {
      if (!std::isfinite(num->value)) return std::nullopt;
      out.value = num->value;
    } else if (is_boolean(arg)) {
      auto b = boolean_value(arg);
      if (!b) return std::nullopt;
      out.value = *b ? 1 : 0;
    } else {
      return std::nullopt;
    }
    return numeric_term(out);
  }
  if (datatype == vocab::kXsdFloat || datatype == vocab::kXsdDouble) {
    out.kind = datatype == vocab::kXsdFloat ? NumKind::Float : NumKind::Double;
    if (from_string) {
      if (!double_lexical(lex)) return std::nullopt;
      out.value = parse_double(lex);
    } else if (num) {
      out.value = num->value;
    } else if (is_boolean(arg)) {
      auto b = boolean_value(arg);
      if (!b) return std::nullopt;
      out.value = *b ? 1 : 0;
    } else {
      return std::nullopt;
    }
    return numeric_term(out);
  }
  return std::nullopt;
}

Value call_builtin(const std::string& name, const std::vector<Value>& args) {
  for (const auto& a : args) {
    if (!a) return std::nullopt;
  }
  auto arg = [&](std::size_t i) -> const Term& { return *args[i]; };

  if (name == "STR") {
    if (arg(0).is_blank()) return std::nullopt;
    return simple(arg(0).value());
  }
  if (name == "LANG") {
    if (!arg(0).is_literal()) return std::nullopt;
    return simple(arg(0).language());
  }
  if (name == "DATATYPE") {
    if (!arg(0).is_literal()) return std::nullopt;
    return Term::iri(arg(0).effective_datatype());
  }
  if (name == "LANGMATCHES") {
    if (!is_string_literal(arg(0)) || !is_string_literal(arg(1))) return std::nullopt;
    auto tag = lower_ascii(arg(0).value());
    auto range = lower_ascii(arg(1).value());
    if (range == "*") return boolean_term(!tag.empty());
    return boolean_term(tag == range || (tag.size() > range.size() && tag.compare(0, range.size(), range) == 0 &&
                                         tag[range.size()] == '-'));
  }
  if (name == "IRI") {
    if (arg(0).is_iri()) return arg(0);
    if (!is_string_literal(arg(0)) || !arg(0).language().empty()) return std::nullopt;
    try {
      return Term::iri(arg(0).value());
    } catch (const rdf::TermError&) {
      return std::nullopt;
    }
  }
  if (name == "CONCAT") {
    std::string out;
    std::optional<std::string> lang;
    bool mixed = false;
    for (const auto& a : args) {
      if (!is_string_literal(*a)) return std::nullopt;
      out += a->value();
      if (!lang) {
        lang = a->language();
      } else if (*lang != a->language()) {
        mixed = true;
      }
    }
    if (!mixed && lang && !lang->empty()) return Term::lang(out, *lang);
    return simple(out);
  }
  if (name == "ENCODE_FOR_URI") {
    if (!is_string_literal(arg(0))) return std::nullopt;
    return simple(rdf::percent_encode(arg(0).value()));
  }
  if (name == "CONTAINS" || name == "STRSTARTS" || name == "STRENDS") {
    if (!compatible(arg(0), arg(1))) return std::nullopt;
    const auto& s = arg(0).value();
    const auto& t = arg(1).value();
    if (name == "CONTAINS") return boolean_term(s.find(t) != std::string::npos);
    if (name == "STRSTARTS") return boolean_term(s.compare(0, t.size(), t) == 0 && s.size() >= t.size());
    return boolean_term(s.size() >= t.size() && s.compare(s.size() - t.size(), t.size(), t) == 0);
  }
  if (name == "STRLEN") {
    if (!is_string_literal(arg(0))) return std::nullopt;
    std::int64_t n = 0;
    const auto& s = arg(0).value();
    for (std::size_t pos = 0; pos < s.size(); ++n) rdf::detail::decode_utf8(s, pos);
    Numeric r;
    r.integer = n;
    r.value = static_cast<double>(n);
    return numeric_term(r);
  }
  if (name == "LCASE" || name == "UCASE") {
    if (!is_string_literal(arg(0))) return std::nullopt;
    return like(arg(0), name == "LCASE" ? lower_ascii(arg(0).value()) : upper_ascii(arg(0).value()));
  }
  if (name == "REGEX") {
    if (!is_string_literal(arg(0)) || !is_string_literal(arg(1)) || !arg(1).language().empty()) return std::nullopt;
    std::string flags;
    if (args.size() == 3) {
      if (!is_string_literal(arg(2))) return std::nullopt;
      flags = arg(2).value();
    }
    const auto* re = compiled_regex(arg(1).value(), flags);
    if (!re) return std::nullopt;
    return boolean_term(std::regex_search(arg(0).value(), *re));
  }
  if (name == "ISIRI") return boolean_term(arg(0).is_iri());
  if (name == "ISBLANK") return boolean_term(arg(0).is_blank());
  if (name == "ISLITERAL") return boolean_term(arg(0).is_literal());
  if (name == "ISNUMERIC") return boolean_term(numeric_value(arg(0)).has_value());
  if (name == "SAMETERM") return boolean_term(arg(0) == arg(1));
  return std::nullopt;
}

int order_compare(const Term* a, const Term* b) {
  auto category = [](const Term* t) { return !t ? 0 : t->is_blank() ? 1 : t->is_iri() ? 2 : 3; };
  int ca = category(a);
  int cb = category(b);
  if (ca != cb) return ca < cb ? -1 : 1;
  if (ca == 0) return 0;
  if (ca != 3) {
    int c = a->value().compare(b->value());
    return c < 0 ? -1 : c > 0;
  }
  auto na = numeric_value(*a);
  auto nb = numeric_value(*b);
  auto group = [](const std::optional<Numeric>& n) { return !n ? 2 : std::isnan(n->value) ? 1 : 0; };
  int ga = group(na);
  int gb = group(nb);
  if (ga != gb) return ga < gb ? -1 : 1;
  if (ga == 0) return compare_numeric(*na, *nb);
  if (ga == 1) return 0;
  int c = a->value().compare(b->value());
  if (c != 0) return c < 0 ? -1 : 1;
  c = a->language().compare(b->language());
  if (c != 0) return c < 0 ? -1 : 1;
  c = a->datatype().compare(b->datatype());
  return c < 0 ? -1 : c > 0;
}

}  // namespace kgforge::sparql::detail
