#include "kgforge/sparql/results.hpp"

#include <json.hpp>

#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::sparql {

using nlohmann::json;
using rdf::Term;

namespace {

json term_json(const Term& t) {
  json j;
  if (t.is_iri()) {
    j["type"] = "uri";
    j["value"] = t.value();
  } else if (t.is_blank()) {
    j["type"] = "bnode";
    j["value"] = t.value();
  } else {
    j["type"] = "literal";
    j["value"] = t.value();
    if (!t.language().empty()) {
      j["xml:lang"] = t.language();
    } else if (!t.datatype().empty() && t.datatype() != rdf::vocab::kXsdString) {
      j["datatype"] = t.datatype();
    }
  }
  return j;
}

Term json_term(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j.contains("value")) {
    throw ResultsFormatError("binding lacks 'type' or 'value'");
  }
  const auto type = j.at("type").get<std::string>();
  auto value = j.at("value").get<std::string>();
  if (type == "uri") return Term::iri(std::move(value));
  if (type == "bnode") return Term::blank(std::move(value));
  if (type == "literal" || type == "typed-literal") {
    if (j.contains("xml:lang")) return Term::lang(std::move(value), j.at("xml:lang").get<std::string>());
    if (j.contains("datatype")) return Term::typed(std::move(value), j.at("datatype").get<std::string>());
    return Term::literal(std::move(value));
  }
  throw ResultsFormatError("unknown binding type '" + type + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string to_json(const ResultTable& table) {
  json doc;
  doc["head"]["vars"] = table.vars;
  json bindings = json::array();
  for (const auto& row : table.rows) {
    json b = json::object();
    for (std::size_t i = 0; i < row.size() && i < table.vars.size(); ++i) {
      if (row[i]) b[table.vars[i]] = term_json(*row[i]);
    }
    bindings.push_back(std::move(b));
  }
  doc["results"]["ordered"] = table.ordered;
  doc["results"]["bindings"] = std::move(bindings);
  return doc.dump();
}

std::string to_csv(const ResultTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.vars.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.vars[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (!row[i]) continue;
      out += csv_field(row[i]->is_blank() ? "_:" + row[i]->value() : row[i]->value());
    }
    out += "\r\n";
  }
  return out;
}

ResultTable parse_json_results(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ResultsFormatError(std::string("invalid JSON: ") + e.what());
  }
  try {
    ResultTable table;
    table.vars = doc.at("head").at("vars").get<std::vector<std::string>>();
    const auto& results = doc.at("results");
    table.ordered = results.value("ordered", false);
    for (const auto& b : results.at("bindings")) {
      std::vector<std::optional<Term>> row(table.vars.size());
      for (std::size_t i = 0; i < table.vars.size(); ++i) {
        if (b.contains(table.vars[i])) row[i] = json_term(b.at(table.vars[i]));
      }
      table.rows.push_back(std::move(row));
    }
    return table;
  } catch (const json::exception& e) {
    throw ResultsFormatError(std::string("malformed results: ") + e.what());
  } catch (const rdf::TermError& e) {
    throw ResultsFormatError(std::string("invalid term: ") + e.what());
  }
}

}  // namespace kgforge::sparql
