#include "kgforge/mapping/model.hpp"

namespace kgforge::mapping {

TemplateExpr TemplateExpr::parse(std::string_view text) {
  TemplateExpr out;
  std::string constant;
  std::size_t i = 0;
  auto flush = [&] {
    if (!constant.empty()) out.segments.emplace_back(ConstantText{std::move(constant)});
    constant.clear();
  };
  while (i < text.size()) {
    if (text[i] == '\\' && text.substr(i + 1, 2) == "$(") {
      constant += "$(";
      i += 3;
      continue;
    }
    if (text.substr(i, 2) == "$(") {
      auto close = text.find(')', i + 2);
      if (close == std::string_view::npos) {
        throw std::invalid_argument("unterminated column reference in template '" +
                                    std::string(text) + "'");
      }
      auto column = text.substr(i + 2, close - i - 2);
      if (column.empty()) {
        throw std::invalid_argument("empty column reference in template '" + std::string(text) +
                                    "'");
      }
      flush();
      out.segments.emplace_back(ColumnRef{std::string(column)});
      i = close + 1;
      continue;
    }
    constant += text[i++];
  }
  flush();
  if (out.segments.empty()) throw std::invalid_argument("empty template");
  return out;
}

std::vector<std::string> TemplateExpr::columns() const {
  std::vector<std::string> out;
  for (const auto& seg : segments) {
    if (const auto* c = std::get_if<ColumnRef>(&seg)) out.push_back(c->column);
  }
  return out;
}

std::string TemplateExpr::constant_prefix() const {
  std::string out;
  for (const auto& seg : segments) {
    if (const auto* c = std::get_if<ConstantText>(&seg)) {
      out += c->text;
    } else {
      break;
    }
  }
  return out;
}

std::string TemplateExpr::to_rml() const {
  std::string out;
  for (const auto& seg : segments) {
    if (const auto* c = std::get_if<ConstantText>(&seg)) {
      for (char ch : c->text) {
        if (ch == '{' || ch == '}' || ch == '\\') out += '\\';
        out += ch;
      }
    } else {
      out += "{" + std::get<ColumnRef>(seg).column + "}";
    }
  }
  return out;
}

std::string TemplateExpr::to_yarrrml() const {
  std::string out;
  for (const auto& seg : segments) {
    if (const auto* c = std::get_if<ConstantText>(&seg)) {
      out += c->text;
    } else {
      out += "$(" + std::get<ColumnRef>(seg).column + ")";
    }
  }
  return out;
}

const TriplesMapSpec* MappingDocument::find(std::string_view name) const {
  for (const auto& m : maps) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::size_t MappingDocument::rule_count() const {
  std::size_t n = 0;
  for (const auto& m : maps) n += m.pos.size();
  return n;
}

void MappingDocument::merge(const MappingDocument& other) {
  for (const auto& m : other.maps) {
    if (find(m.name)) throw MappingSyntaxError("mappings." + m.name, "duplicate mapping name");
  }
  prefixes.merge(other.prefixes);
  maps.insert(maps.end(), other.maps.begin(), other.maps.end());
}

}  // namespace kgforge::mapping
