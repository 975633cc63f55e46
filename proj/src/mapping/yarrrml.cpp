#include "kgforge/mapping/yarrrml.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::mapping {

namespace {

bool is_one_of(const std::string& key, std::initializer_list<const char*> names) {
  return std::any_of(names.begin(), names.end(), [&](const char* n) { return key == n; });
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw MappingSyntaxError(path, "expected a scalar value");
  return node.as<std::string>();
}

class DocumentParser {
 public:
  MappingDocument parse(const YAML::Node& root) {
    if (!root.IsMap()) throw MappingSyntaxError("<root>", "expected a mapping document");
    for (const auto& kv : root) {
      auto key = kv.first.as<std::string>();
      if (key == "prefixes") {
        parse_prefixes(kv.second);
      } else if (key != "mappings") {
        throw MappingSyntaxError(key, "unknown key");
      }
    }
    auto mappings = root["mappings"];
    if (!mappings) throw MappingSyntaxError("mappings", "missing key");
    if (!mappings.IsMap()) throw MappingSyntaxError("mappings", "expected a map of triples maps");
    for (const auto& kv : mappings) {
      auto name = kv.first.as<std::string>();
      if (name.empty()) throw MappingSyntaxError("mappings", "empty mapping name");
      if (doc_.find(name)) throw MappingSyntaxError("mappings." + name, "duplicate mapping name");
      doc_.maps.push_back(parse_map(name, kv.second, "mappings." + name));
    }
    return std::move(doc_);
  }

 private:
  void parse_prefixes(const YAML::Node& node) {
    if (node.IsNull()) return;
    if (!node.IsMap()) throw MappingSyntaxError("prefixes", "expected a map");
    for (const auto& kv : node) {
      auto label = kv.first.as<std::string>();
      auto path = "prefixes." + label;
      try {
        doc_.prefixes.add(label, scalar(kv.second, path));
      } catch (const std::invalid_argument& e) {
        throw MappingSyntaxError(path, e.what());
      }
    }
  }

  // CURIE with a declared prefix, `a`, or an absolute IRI.
  rdf::Term resolve_iri(const std::string& text, const std::string& path) const {
    if (text == "a") return rdf::Term::iri(std::string(rdf::vocab::kRdfType));
    auto colon = text.find(':');
    if (colon != std::string::npos && doc_.prefixes.contains(std::string_view(text).substr(0, colon))) {
      try {
        return rdf::expand_curie(text, doc_.prefixes);
      } catch (const std::exception& e) {
        throw MappingSyntaxError(path, e.what());
      }
    }
    if (rdf::has_uri_scheme(text) && rdf::is_valid_iri(text)) return rdf::Term::iri(text);
    if (colon != std::string::npos) {
      throw MappingSyntaxError(path, "unknown prefix '" + text.substr(0, colon) + "'");
    }
    throw MappingSyntaxError(path, "'" + text + "' is not an IRI or CURIE");
  }

  // Expands a leading declared prefix in a template ("repr:x_$(id)").
  TemplateExpr resolve_template(const std::string& text, const std::string& path) const {
    std::string expanded = text;
    auto colon = text.find(':');
    auto dollar = text.find("$(");
    if (colon != std::string::npos && (dollar == std::string::npos || colon < dollar) &&
        text.compare(colon, 3, "://") != 0) {
      auto label = std::string_view(text).substr(0, colon);
      if (auto ns = doc_.prefixes.find(label)) expanded = std::string(*ns) + text.substr(colon + 1);
    }
    try {
      return TemplateExpr::parse(expanded);
    } catch (const std::invalid_argument& e) {
      throw MappingSyntaxError(path, e.what());
    }
  }

  LogicalSource parse_source_string(std::string text, const std::string& path) const {
    LogicalSource src;
    auto tilde = text.rfind('~');
    if (tilde != std::string::npos) {
      auto format = text.substr(tilde + 1);
      text.resize(tilde);
      if (format != "csv") throw UnsupportedFeature(path, "source format '" + format + "'");
    } else if (!ends_with(text, ".csv")) {
      throw UnsupportedFeature(path, "source without csv format: '" + text + "'");
    }
    if (text.empty()) throw MappingSyntaxError(path, "empty source path");
    src.path = std::move(text);
    return src;
  }

  std::vector<LogicalSource> parse_sources(const YAML::Node& node, const std::string& path) const {
    std::vector<LogicalSource> out;
    if (node.IsScalar()) {
      out.push_back(parse_source_string(node.as<std::string>(), path));
      return out;
    }
    if (!node.IsSequence()) throw MappingSyntaxError(path, "expected a list of sources");
    // `sources: [a.csv~csv]` and `sources: [[a.csv~csv], [b.csv~csv]]` are both accepted.
    for (std::size_t i = 0; i < node.size(); ++i) {
      auto entry = node[i];
      auto entry_path = path + "[" + std::to_string(i) + "]";
      if (entry.IsScalar()) {
        out.push_back(parse_source_string(entry.as<std::string>(), entry_path));
      } else if (entry.IsSequence()) {
        if (entry.size() != 1) {
          throw UnsupportedFeature(entry_path, "source iterator (only plain CSV sources)");
        }
        out.push_back(parse_source_string(scalar(entry[0], entry_path), entry_path));
      } else if (entry.IsMap()) {
        std::string access;
        std::string format = "csv";
        for (const auto& kv : entry) {
          auto key = kv.first.as<std::string>();
          if (key == "access") {
            access = scalar(kv.second, entry_path + "." + key);
          } else if (key == "referenceFormulation") {
            format = scalar(kv.second, entry_path + "." + key);
          } else {
            throw MappingSyntaxError(entry_path + "." + key, "unknown key");
          }
        }
        out.push_back(parse_source_string(access + "~" + format, entry_path));
      } else {
        throw MappingSyntaxError(entry_path, "invalid source");
      }
    }
    if (out.empty()) throw MappingSyntaxError(path, "no sources");
    return out;
  }

  // Splits a trailing "~iri" marker off an object value.
  static bool strip_iri_marker(std::string& text) {
    if (ends_with(text, "~iri")) {
      text.resize(text.size() - 4);
      return true;
    }
    return false;
  }

  ObjectSpec parse_object_value(std::string text, const rdf::Term& predicate,
                                const std::string& annotation, const std::string& path) const {
    bool force_iri = strip_iri_marker(text);
    bool type_predicate = predicate.value() == rdf::vocab::kRdfType;
    if (text.find("$(") != std::string::npos) {
      TemplateExpr expr = resolve_template(text, path);
      bool single_column = expr.segments.size() == 1 && std::holds_alternative<ColumnRef>(expr.segments[0]);
      if (single_column && !force_iri && !type_predicate) {
        ColumnObject obj{std::get<ColumnRef>(expr.segments[0]), {}, {}};
        apply_annotation(obj.datatype, obj.language, annotation, path);
        return obj;
      }
      if (!annotation.empty()) throw MappingSyntaxError(path, "datatype or language on an IRI object");
      return TemplateObject{std::move(expr)};
    }
    if (force_iri || type_predicate) {
      if (!annotation.empty()) throw MappingSyntaxError(path, "datatype or language on an IRI object");
      return ConstantObject{resolve_iri(text, path)};
    }
    std::string datatype;
    std::string language;
    apply_annotation(datatype, language, annotation, path);
    try {
      if (!language.empty()) return ConstantObject{rdf::Term::lang(text, language)};
      if (!datatype.empty()) return ConstantObject{rdf::Term::typed(text, datatype)};
    } catch (const rdf::TermError& e) {
      throw MappingSyntaxError(path, e.what());
    }
    return ConstantObject{rdf::Term::literal(text)};
  }

  void apply_annotation(std::string& datatype, std::string& language, const std::string& annotation,
                        const std::string& path) const {
    if (annotation.empty()) return;
    if (ends_with(annotation, "~lang")) {
      language = annotation.substr(0, annotation.size() - 5);
      if (!rdf::is_valid_language_tag(language)) {
        throw MappingSyntaxError(path, "invalid language tag '" + language + "'");
      }
      return;
    }
    datatype = resolve_iri(annotation, path).value();
  }

  JoinRef parse_join(const YAML::Node& node, const std::string& po_path) const {
    JoinRef join;
    YAML::Node condition;
    for (const auto& kv : node) {
      auto key = kv.first.as<std::string>();
      if (key == "mapping") {
        join.parent_map = scalar(kv.second, po_path + ".o.mapping");
      } else if (key == "condition") {
        condition = kv.second;
      } else {
        throw MappingSyntaxError(po_path + ".o." + key, "unknown key");
      }
    }
    if (join.parent_map.empty()) throw MappingSyntaxError(po_path, "join without mapping name");
    if (!condition) throw UnsupportedFeature(po_path, "join without condition");
    if (condition.IsSequence()) {
      if (condition.size() != 1) throw UnsupportedFeature(po_path, "multiple join conditions");
      condition = condition[0];
    }
    if (!condition.IsMap()) throw MappingSyntaxError(po_path + ".condition", "expected a map");

    std::string function;
    YAML::Node parameters;
    for (const auto& kv : condition) {
      auto key = kv.first.as<std::string>();
      if (key == "function" || key == "fn") {
        function = scalar(kv.second, po_path + ".condition.function");
      } else if (key == "parameters" || key == "pms") {
        parameters = kv.second;
      } else {
        throw MappingSyntaxError(po_path + ".condition." + key, "unknown key");
      }
    }
    if (function != "equal") throw UnsupportedFeature(po_path, "join function '" + function + "'");
    if (!parameters || !parameters.IsSequence() || parameters.size() != 2) {
      throw MappingSyntaxError(po_path + ".condition.parameters", "expected two parameters");
    }
    bool have_child = false;
    bool have_parent = false;
    for (std::size_t i = 0; i < 2; ++i) {
      auto p = parameters[i];
      auto p_path = po_path + ".condition.parameters[" + std::to_string(i) + "]";
      std::string name, value, role;
      if (p.IsSequence()) {
        if (p.size() < 2 || p.size() > 3) throw MappingSyntaxError(p_path, "expected [name, value, role]");
        name = scalar(p[0], p_path);
        value = scalar(p[1], p_path);
        if (p.size() == 3) role = scalar(p[2], p_path);
      } else if (p.IsMap()) {
        for (const auto& kv : p) {
          auto key = kv.first.as<std::string>();
          if (key == "parameter") name = scalar(kv.second, p_path);
          else if (key == "value") value = scalar(kv.second, p_path);
          else if (key == "from") role = scalar(kv.second, p_path);
          else throw MappingSyntaxError(p_path + "." + key, "unknown key");
        }
      } else {
        throw MappingSyntaxError(p_path, "invalid parameter");
      }
      if (role.empty()) role = (name == "str1") ? "s" : "o";
      if (role != "s" && role != "o") throw MappingSyntaxError(p_path, "role must be 's' or 'o'");
      TemplateExpr expr = resolve_template(value, p_path);
      if (expr.segments.size() != 1 || !std::holds_alternative<ColumnRef>(expr.segments[0])) {
        throw UnsupportedFeature(p_path, "join parameter other than a single column reference");
      }
      auto column = std::get<ColumnRef>(expr.segments[0]);
      if (role == "s") {
        if (have_child) throw MappingSyntaxError(p_path, "two child-side parameters");
        join.child = column;
        have_child = true;
      } else {
        if (have_parent) throw MappingSyntaxError(p_path, "two parent-side parameters");
        join.parent = column;
        have_parent = true;
      }
    }
    return join;
  }

  void parse_po_entry(const YAML::Node& entry, const std::string& path,
                      std::vector<PredicateObjectSpec>& out) const {
    if (entry.IsSequence()) {
      if (entry.size() < 2 || entry.size() > 3) {
        throw MappingSyntaxError(path, "expected [predicate, object(, datatype)]");
      }
      auto predicate = resolve_iri(scalar(entry[0], path), path);
      std::string annotation = entry.size() == 3 ? scalar(entry[2], path) : "";
      out.push_back({predicate, parse_object_value(scalar(entry[1], path), predicate, annotation, path)});
      return;
    }
    if (!entry.IsMap()) throw MappingSyntaxError(path, "expected a predicate-object entry");

    YAML::Node predicates;
    YAML::Node objects;
    for (const auto& kv : entry) {
      auto key = kv.first.as<std::string>();
      if (is_one_of(key, {"p", "predicates", "predicate"})) {
        predicates = kv.second;
      } else if (is_one_of(key, {"o", "objects", "object"})) {
        objects = kv.second;
      } else {
        throw MappingSyntaxError(path + "." + key, "unknown key");
      }
    }
    if (!predicates) throw MappingSyntaxError(path, "missing predicate");
    if (!objects) throw MappingSyntaxError(path, "missing object");

    std::vector<rdf::Term> preds;
    if (predicates.IsSequence()) {
      for (std::size_t i = 0; i < predicates.size(); ++i) {
        preds.push_back(resolve_iri(scalar(predicates[i], path + ".p"), path + ".p"));
      }
    } else {
      preds.push_back(resolve_iri(scalar(predicates, path + ".p"), path + ".p"));
    }

    std::vector<YAML::Node> object_nodes;
    if (objects.IsSequence()) {
      for (std::size_t i = 0; i < objects.size(); ++i) object_nodes.push_back(objects[i]);
    } else {
      object_nodes.push_back(objects);
    }

    for (const auto& predicate : preds) {
      for (const auto& o : object_nodes) {
        if (o.IsScalar()) {
          out.push_back({predicate, parse_object_value(o.as<std::string>(), predicate, "", path + ".o")});
        } else if (o.IsSequence()) {
          if (o.size() < 1 || o.size() > 2) throw MappingSyntaxError(path + ".o", "expected [value(, datatype)]");
          std::string annotation = o.size() == 2 ? scalar(o[1], path + ".o") : "";
          out.push_back({predicate, parse_object_value(scalar(o[0], path + ".o"), predicate, annotation, path + ".o")});
        } else if (o.IsMap()) {
          if (o["mapping"]) {
            out.push_back({predicate, parse_join(o, path)});
            continue;
          }
          std::string value, annotation, type;
          for (const auto& kv : o) {
            auto key = kv.first.as<std::string>();
            if (key == "value") value = scalar(kv.second, path + ".o.value");
            else if (key == "datatype") annotation = scalar(kv.second, path + ".o.datatype");
            else if (key == "language") annotation = scalar(kv.second, path + ".o.language") + "~lang";
            else if (key == "type") type = scalar(kv.second, path + ".o.type");
            else throw MappingSyntaxError(path + ".o." + key, "unknown key");
          }
          if (type == "iri") value += "~iri";
          else if (!type.empty() && type != "literal") throw UnsupportedFeature(path + ".o.type", "term type '" + type + "'");
          out.push_back({predicate, parse_object_value(value, predicate, annotation, path + ".o")});
        } else {
          throw MappingSyntaxError(path + ".o", "invalid object");
        }
      }
    }
  }

  TriplesMapSpec parse_map(const std::string& name, const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) throw MappingSyntaxError(path, "expected a triples map");
    TriplesMapSpec map;
    map.name = name;
    bool have_subject = false;
    for (const auto& kv : node) {
      auto key = kv.first.as<std::string>();
      auto key_path = path + "." + key;
      if (is_one_of(key, {"sources", "source"})) {
        map.sources = parse_sources(kv.second, key_path);
      } else if (is_one_of(key, {"s", "subject", "subjects"})) {
        auto s = kv.second;
        if (s.IsSequence()) {
          if (s.size() != 1) throw UnsupportedFeature(key_path, "multiple subjects");
          s = s[0];
        }
        map.subject = resolve_template(scalar(s, key_path), key_path);
        have_subject = true;
      } else if (is_one_of(key, {"po", "predicateobjects"})) {
        const auto& po = kv.second;
        if (po.IsNull()) continue;
        if (!po.IsSequence()) throw MappingSyntaxError(key_path, "expected a list");
        for (std::size_t i = 0; i < po.size(); ++i) {
          parse_po_entry(po[i], path + ".po[" + std::to_string(i) + "]", map.pos);
        }
      } else {
        throw MappingSyntaxError(key_path, "unknown key");
      }
    }
    if (map.sources.empty()) throw MappingSyntaxError(path, "missing sources");
    if (!have_subject) throw MappingSyntaxError(path, "missing subject");
    return map;
  }

  MappingDocument doc_;
};

}  // namespace

MappingDocument parse_yarrrml(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw MappingSyntaxError("<document>", std::string("YAML error: ") + e.what());
  }
  return DocumentParser{}.parse(root);
}

MappingDocument parse_yarrrml_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mapping file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_yarrrml(buf.str());
  } catch (const MappingSyntaxError& e) {
    throw MappingSyntaxError(path.filename().string() + ":" + e.path(),
                             std::string(e.what()).substr(e.path().size() + 2));
  }
}

std::string to_string(const Diagnostic& d) {
  switch (d.kind) {
    case Diagnostic::Kind::MissingColumn:
      return "MissingColumn(" + d.map + ", " + d.detail + ")";
    case Diagnostic::Kind::UnknownParentMap:
      return "UnknownParentMap(" + d.map + ", " + d.detail + ")";
    case Diagnostic::Kind::MissingSource:
      return "MissingSource(" + d.map + ", " + d.detail + ")";
    case Diagnostic::Kind::InvalidTemplate:
      return "InvalidTemplate(" + d.map + ", " + d.detail + ")";
  }
  return {};
}

std::vector<Diagnostic> validate(const MappingDocument& doc,
                                 const std::map<std::string, std::vector<std::string>>& headers) {
  std::vector<Diagnostic> out;
  auto add = [&](Diagnostic d) {
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(std::move(d));
  };

  auto check_template = [&](const TriplesMapSpec& m, const TemplateExpr& t) {
    for (const auto& seg : t.segments) {
      if (const auto* c = std::get_if<ConstantText>(&seg)) {
        if (!rdf::is_valid_iri(c->text)) {
          add({Diagnostic::Kind::InvalidTemplate, m.name, t.to_yarrrml()});
          return;
        }
      }
    }
  };

  for (const auto& m : doc.maps) {
    auto it = headers.find(m.name);
    const std::vector<std::string>* header = it == headers.end() ? nullptr : &it->second;
    if (!header) {
      std::string paths;
      for (const auto& s : m.sources) paths += (paths.empty() ? "" : ",") + s.path;
      add({Diagnostic::Kind::MissingSource, m.name, paths});
    }
    auto need = [&](const std::string& column) {
      if (header && std::find(header->begin(), header->end(), column) == header->end()) {
        add({Diagnostic::Kind::MissingColumn, m.name, column});
      }
    };

    check_template(m, m.subject);
    for (const auto& c : m.subject.columns()) need(c);
    for (const auto& po : m.pos) {
      std::visit(
          [&](const auto& obj) {
            using T = std::decay_t<decltype(obj)>;
            if constexpr (std::is_same_v<T, ColumnObject>) {
              need(obj.column.column);
            } else if constexpr (std::is_same_v<T, TemplateObject>) {
              check_template(m, obj.expr);
              for (const auto& c : obj.expr.columns()) need(c);
            } else if constexpr (std::is_same_v<T, JoinRef>) {
              need(obj.child.column);
              if (!doc.find(obj.parent_map)) {
                add({Diagnostic::Kind::UnknownParentMap, m.name, obj.parent_map});
                return;
              }
              auto pit = headers.find(obj.parent_map);
              if (pit != headers.end() &&
                  std::find(pit->second.begin(), pit->second.end(), obj.parent.column) == pit->second.end()) {
                add({Diagnostic::Kind::MissingColumn, obj.parent_map, obj.parent.column});
              }
            }
          },
          po.object);
    }
  }
  return out;
}

}  // namespace kgforge::mapping
