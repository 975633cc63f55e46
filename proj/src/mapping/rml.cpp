#include "kgforge/mapping/rml.hpp"

#include "kgforge/rdf/iri.hpp"
#include "kgforge/rdf/vocabulary.hpp"

namespace kgforge::mapping {

namespace {

using rdf::Term;
using rdf::Triple;

Term rr(std::string_view local) { return Term::iri(std::string(rdf::vocab::kRr) + std::string(local)); }
Term rml(std::string_view local) { return Term::iri(std::string(rdf::vocab::kRml) + std::string(local)); }

class RmlWriter {
 public:
  explicit RmlWriter(const MappingDocument& doc) : doc_(doc) {}

  std::vector<Triple> run() {
    for (const auto& m : doc_.maps) {
      for (std::size_t k = 0; k < m.sources.size(); ++k) write_map(m, k);
    }
    return std::move(out_);
  }

 private:
  Term fresh() { return Term::blank("b" + std::to_string(next_blank_++)); }

  void emit(const Term& s, const Term& p, Term o) { out_.emplace_back(s, p, std::move(o)); }

  static Term map_node(const TriplesMapSpec& m, std::size_t source_index) {
    std::string name = rdf::percent_encode(m.name);
    if (m.sources.size() > 1) name += "_" + std::to_string(source_index);
    return Term::iri(std::string(kRmlMapBase) + name);
  }

  void write_map(const TriplesMapSpec& m, std::size_t source_index) {
    const Term node = map_node(m, source_index);
    const Term type = Term::iri(std::string(rdf::vocab::kRdfType));
    emit(node, type, rr("TriplesMap"));

    Term ls = fresh();
    emit(node, rml("logicalSource"), ls);
    emit(ls, rml("source"), Term::literal(m.sources[source_index].path));
    emit(ls, rml("referenceFormulation"), Term::iri(std::string(rdf::vocab::kQl) + "CSV"));

    Term sm = fresh();
    emit(node, rr("subjectMap"), sm);
    emit(sm, rr("template"), Term::literal(m.subject.to_rml()));

    for (const auto& po : m.pos) {
      Term pom = fresh();
      emit(node, rr("predicateObjectMap"), pom);
      emit(pom, rr("predicate"), po.predicate);
      std::visit([&](const auto& obj) { write_object(pom, obj); }, po.object);
    }
  }

  void write_object(const Term& pom, const ConstantObject& obj) {
    Term om = fresh();
    emit(pom, rr("objectMap"), om);
    emit(om, rr("constant"), obj.term);
  }

  void write_object(const Term& pom, const ColumnObject& obj) {
    Term om = fresh();
    emit(pom, rr("objectMap"), om);
    emit(om, rml("reference"), Term::literal(obj.column.column));
    emit(om, rr("termType"), rr("Literal"));
    if (!obj.datatype.empty()) emit(om, rr("datatype"), Term::iri(obj.datatype));
    if (!obj.language.empty()) emit(om, rr("language"), Term::literal(obj.language));
  }

  void write_object(const Term& pom, const TemplateObject& obj) {
    Term om = fresh();
    emit(pom, rr("objectMap"), om);
    emit(om, rr("template"), Term::literal(obj.expr.to_rml()));
    emit(om, rr("termType"), rr("IRI"));
  }

  void write_object(const Term& pom, const JoinRef& obj) {
    const TriplesMapSpec* parent = doc_.find(obj.parent_map);
    std::size_t parent_sources = parent ? parent->sources.size() : 1;
    for (std::size_t k = 0; k < parent_sources; ++k) {
      Term om = fresh();
      emit(pom, rr("objectMap"), om);
      Term parent_node = parent ? map_node(*parent, k)
                                : Term::iri(std::string(kRmlMapBase) + rdf::percent_encode(obj.parent_map));
      emit(om, rr("parentTriplesMap"), parent_node);
      Term jc = fresh();
      emit(om, rr("joinCondition"), jc);
      emit(jc, rr("child"), Term::literal(obj.child.column));
      emit(jc, rr("parent"), Term::literal(obj.parent.column));
    }
  }

  const MappingDocument& doc_;
  std::vector<Triple> out_;
  std::size_t next_blank_ = 0;
};

}  // namespace

std::vector<rdf::Triple> export_rml(const MappingDocument& doc) { return RmlWriter(doc).run(); }

}  // namespace kgforge::mapping
