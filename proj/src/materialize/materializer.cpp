#include "kgforge/materialize/materializer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "kgforge/mapping/yarrrml.hpp"
#include "kgforge/rdf/iri.hpp"

namespace kgforge::materialize {

namespace fs = std::filesystem;
using mapping::ColumnObject;
using mapping::ColumnRef;
using mapping::ConstantObject;
using mapping::ConstantText;
using mapping::JoinRef;
using mapping::TemplateExpr;
using mapping::TemplateObject;
using rdf::Term;
using rdf::Triple;

// ---------------------------------------------------------------------------
// Sources

SourceCatalog::SourceCatalog(fs::path data_dir, std::vector<SuppressedColumn> suppressed)
    : data_dir_(std::move(data_dir)), suppressed_(std::move(suppressed)) {}

fs::path SourceCatalog::resolve(const std::string& path) const {
  fs::path p(path);
  if (p.is_absolute()) return p;
  fs::path direct = data_dir_ / p;
  if (fs::exists(direct)) return direct;
  fs::path by_name = data_dir_ / p.filename();
  if (fs::exists(by_name)) return by_name;
  return direct;
}

const RowSource& SourceCatalog::get(const mapping::LogicalSource& source) {
  auto it = cache_.find(source.path);
  if (it != cache_.end()) return *it->second;

  fs::path resolved = resolve(source.path);
  if (!fs::exists(resolved)) throw SourceNotFound(source.path);
  auto rows = std::make_unique<RowSource>(read_csv(resolved));
  for (const auto& s : suppressed_) {
    bool same_source = s.source == source.path || s.source == fs::path(source.path).filename().string();
    if (!same_source) continue;
    int col = rows->column_index(s.column);
    if (col < 0) continue;
    for (auto& row : rows->rows) row[static_cast<std::size_t>(col)].clear();
  }
  return *cache_.emplace(source.path, std::move(rows)).first->second;
}

const RowSource& SourceCatalog::get(const mapping::LogicalSource& source) const {
  auto it = cache_.find(source.path);
  if (it == cache_.end()) throw std::logic_error("source '" + source.path + "' was not preloaded");
  return *it->second;
}

void SourceCatalog::preload(const mapping::MappingDocument& doc) {
  for (const auto& m : doc.maps) {
    for (const auto& s : m.sources) get(s);
  }
}

std::map<std::string, std::vector<std::string>> SourceCatalog::headers(const mapping::MappingDocument& doc) {
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& m : doc.maps) {
    std::vector<std::string> common;
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
      const auto& h = get(m.sources[i]).header;
      if (i == 0) {
        common = h;
      } else {
        std::erase_if(common, [&](const std::string& c) { return std::find(h.begin(), h.end(), c) == h.end(); });
      }
    }
    out[m.name] = std::move(common);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Templates

namespace {

// Template with column names resolved to indices for one source.
struct CompiledTemplate {
  std::vector<std::pair<std::string, int>> segments;  // (constant, -1) or ("", column)

  static CompiledTemplate compile(const TemplateExpr& t, const RowSource& src) {
    CompiledTemplate out;
    for (const auto& seg : t.segments) {
      if (const auto* c = std::get_if<ConstantText>(&seg)) {
        out.segments.emplace_back(c->text, -1);
      } else {
        const auto& column = std::get<ColumnRef>(seg).column;
        int idx = src.column_index(column);
        if (idx < 0) {
          throw std::logic_error("internal error: column '" + column + "' missing from " + src.origin);
        }
        out.segments.emplace_back(std::string(), idx);
      }
    }
    return out;
  }

  std::optional<Term> expand(const std::vector<std::string>& row) const {
    std::string iri;
    for (const auto& [text, idx] : segments) {
      if (idx < 0) {
        iri += text;
      } else {
        const auto& value = row[static_cast<std::size_t>(idx)];
        if (value.empty()) return std::nullopt;
        iri += rdf::percent_encode(value);
      }
    }
    return Term::iri(std::move(iri));
  }
};

int checked_index(const RowSource& src, const std::string& column) {
  int idx = src.column_index(column);
  if (idx < 0) throw std::logic_error("internal error: column '" + column + "' missing from " + src.origin);
  return idx;
}

// Emits the triples of one predicate-object rule over one source.
template <typename Sink>
void run_rule(const mapping::TriplesMapSpec& map, const mapping::PredicateObjectSpec& po, const RowSource& src,
              const ParentIndex& parents, Sink&& sink) {
  auto subject = CompiledTemplate::compile(map.subject, src);
  std::visit(
      [&](const auto& obj) {
        using T = std::decay_t<decltype(obj)>;
        if constexpr (std::is_same_v<T, ConstantObject>) {
          for (const auto& row : src.rows) {
            if (auto s = subject.expand(row)) sink(Triple(std::move(*s), po.predicate, obj.term));
          }
        } else if constexpr (std::is_same_v<T, ColumnObject>) {
          int col = checked_index(src, obj.column.column);
          for (const auto& row : src.rows) {
            const auto& value = row[static_cast<std::size_t>(col)];
            if (value.empty()) continue;
            auto s = subject.expand(row);
            if (!s) continue;
            Term o = !obj.language.empty()  ? Term::lang(value, obj.language)
                     : !obj.datatype.empty() ? Term::typed(value, obj.datatype)
                                             : Term::literal(value);
            sink(Triple(std::move(*s), po.predicate, std::move(o)));
          }
        } else if constexpr (std::is_same_v<T, TemplateObject>) {
          auto object = CompiledTemplate::compile(obj.expr, src);
          for (const auto& row : src.rows) {
            auto s = subject.expand(row);
            if (!s) continue;
            if (auto o = object.expand(row)) sink(Triple(std::move(*s), po.predicate, std::move(*o)));
          }
        } else {
          auto it = parents.find({obj.parent_map, obj.parent.column});
          if (it == parents.end()) {
            throw std::logic_error("internal error: no parent index for " + obj.parent_map + "." + obj.parent.column);
          }
          const auto& index = it->second;
          int col = checked_index(src, obj.child.column);
          for (const auto& row : src.rows) {
            const auto& key = row[static_cast<std::size_t>(col)];
            if (key.empty()) continue;
            auto hit = index.find(key);
            if (hit == index.end()) continue;
            auto s = subject.expand(row);
            if (!s) continue;
            for (const auto& parent_subject : hit->second) sink(Triple(*s, po.predicate, parent_subject));
          }
        }
      },
      po.object);
}

}  // namespace

std::optional<Term> expand_template(const TemplateExpr& t, const std::vector<std::string>& header,
                                    const std::vector<std::string>& row) {
  std::string iri;
  for (const auto& seg : t.segments) {
    if (const auto* c = std::get_if<ConstantText>(&seg)) {
      iri += c->text;
      continue;
    }
    const auto& column = std::get<ColumnRef>(seg).column;
    auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end()) return std::nullopt;
    const auto& value = row[static_cast<std::size_t>(it - header.begin())];
    if (value.empty()) return std::nullopt;
    iri += rdf::percent_encode(value);
  }
  return Term::iri(std::move(iri));
}

std::optional<Term> expand_template(const TemplateExpr& t, const std::map<std::string, std::string>& row) {
  std::vector<std::string> header;
  std::vector<std::string> values;
  for (const auto& [k, v] : row) {
    header.push_back(k);
    values.push_back(v);
  }
  return expand_template(t, header, values);
}

// ---------------------------------------------------------------------------
// Joins and single maps

ParentIndex build_parent_index(const mapping::MappingDocument& doc, const SourceCatalog& sources) {
  ParentIndex index;
  for (const auto& m : doc.maps) {
    for (const auto& po : m.pos) {
      const auto* join = std::get_if<JoinRef>(&po.object);
      if (!join) continue;
      auto key = std::make_pair(join->parent_map, join->parent.column);
      if (index.contains(key)) continue;
      const auto* parent = doc.find(join->parent_map);
      if (!parent) throw std::logic_error("join to unknown map '" + join->parent_map + "'");
      auto& values = index[key];
      for (const auto& source : parent->sources) {
        const RowSource& src = sources.get(source);
        auto subject = CompiledTemplate::compile(parent->subject, src);
        int col = checked_index(src, join->parent.column);
        for (const auto& row : src.rows) {
          const auto& value = row[static_cast<std::size_t>(col)];
          if (value.empty()) continue;
          auto s = subject.expand(row);
          if (!s) continue;
          auto& subjects = values[value];
          if (std::find(subjects.begin(), subjects.end(), *s) == subjects.end()) subjects.push_back(std::move(*s));
        }
      }
    }
  }
  return index;
}

std::vector<Triple> materialize_map(const mapping::TriplesMapSpec& map, const SourceCatalog& sources,
                                    const ParentIndex& parents) {
  std::vector<Triple> out;
  std::unordered_set<Triple, rdf::TripleHash> seen;
  auto sink = [&](Triple&& t) {
    if (seen.insert(t).second) out.push_back(std::move(t));
  };
  for (const auto& source : map.sources) {
    const RowSource& src = sources.get(source);
    for (const auto& po : map.pos) run_rule(map, po, src, parents, sink);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Partitions

std::string PartitionKey::to_string() const {
  return "(" + subject_prefix + ", " + predicate + ", " + graph + ")";
}

std::vector<MappingPartition> partition(const mapping::MappingDocument& doc) {
  return partition(doc, std::vector<std::string>(doc.maps.size()));
}

std::vector<MappingPartition> partition(const mapping::MappingDocument& doc,
                                        const std::vector<std::string>& graph_of_map) {
  if (graph_of_map.size() != doc.maps.size()) throw std::invalid_argument("graph_of_map size mismatch");

  struct Unit {
    RuleRef ref;
    std::string prefix;
    std::string predicate;
    std::string graph;
  };
  std::vector<Unit> units;
  for (std::size_t m = 0; m < doc.maps.size(); ++m) {
    const auto& map = doc.maps[m];
    auto prefix = map.subject.constant_prefix();
    for (std::size_t p = 0; p < map.pos.size(); ++p) {
      units.push_back({{m, p}, prefix, map.pos[p].predicate.value(), graph_of_map[m]});
    }
  }

  // Union-find over units: same predicate and graph, prefix-related subject prefixes.
  std::vector<std::size_t> parent(units.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto related = [](const std::string& a, const std::string& b) {
    return a.size() <= b.size() ? b.compare(0, a.size(), a) == 0 : a.compare(0, b.size(), b) == 0;
  };
  for (std::size_t i = 0; i < units.size(); ++i) {
    for (std::size_t j = i + 1; j < units.size(); ++j) {
      if (units[i].predicate == units[j].predicate && units[i].graph == units[j].graph &&
          related(units[i].prefix, units[j].prefix)) {
        auto a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  std::vector<MappingPartition> out;
  std::map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto root = find(i);
    auto [it, inserted] = slot_of_root.emplace(root, out.size());
    if (inserted) out.push_back({{units[i].prefix, units[i].predicate, units[i].graph}, {}});
    auto& part = out[it->second];
    part.members.push_back(units[i].ref);
    if (units[i].prefix.size() < part.key.subject_prefix.size()) part.key.subject_prefix = units[i].prefix;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Whole-corpus runs

std::vector<EntityMapping> load_mappings(const fs::path& dir_or_file) {
  std::vector<fs::path> files;
  if (fs::is_directory(dir_or_file)) {
    for (const auto& entry : fs::directory_iterator(dir_or_file)) {
      auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".yml" || ext == ".yaml")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(dir_or_file)) {
    files.push_back(dir_or_file);
  } else {
    throw std::runtime_error("mapping path not found: '" + dir_or_file.string() + "'");
  }
  std::vector<EntityMapping> out;
  for (const auto& f : files) out.push_back({f.stem().string(), mapping::parse_yarrrml_file(f)});
  return out;
}

namespace {

mapping::MappingDocument combine(const std::vector<EntityMapping>& entities, std::vector<std::string>& graph_of_map) {
  mapping::MappingDocument combined;
  for (const auto& e : entities) {
    combined.merge(e.doc);
    graph_of_map.insert(graph_of_map.end(), e.doc.maps.size(), e.entity);
  }
  return combined;
}

}  // namespace

std::vector<EntityOutput> materialize_entities(const std::vector<EntityMapping>& entities, SourceCatalog& sources,
                                               unsigned jobs) {
  std::vector<std::string> graph_of_map;
  auto doc = combine(entities, graph_of_map);
  sources.preload(doc);
  const SourceCatalog& shared = sources;
  const ParentIndex parents = build_parent_index(doc, shared);
  const auto partitions = partition(doc, graph_of_map);

  struct PartitionResult {
    std::vector<Triple> triples;
    double seconds = 0;
  };
  std::vector<PartitionResult> results(partitions.size());

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::string error_key;

  auto worker = [&] {
    while (!failed.load()) {
      std::size_t i = next.fetch_add(1);
      if (i >= partitions.size()) return;
      const auto& part = partitions[i];
      auto start = std::chrono::steady_clock::now();
      try {
        std::unordered_set<Triple, rdf::TripleHash> seen;
        auto& out = results[i].triples;
        auto sink = [&](Triple&& t) {
          if (seen.insert(t).second) out.push_back(std::move(t));
        };
        for (const auto& ref : part.members) {
          const auto& map = doc.maps[ref.map_index];
          for (const auto& source : map.sources) {
            run_rule(map, map.pos[ref.po_index], shared.get(source), parents, sink);
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) {
          error = std::current_exception();
          error_key = part.key.to_string();
        }
        return;
      }
      results[i].seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(partitions.size(), 1))));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw MaterializationError(error_key, e.what());
    }
  }

  std::vector<EntityOutput> out;
  for (const auto& e : entities) out.push_back({e.entity, e.doc.rule_count(), 0, {}});
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    auto it = std::find_if(out.begin(), out.end(), [&](const EntityOutput& o) { return o.entity == partitions[i].key.graph; });
    it->seconds += results[i].seconds;
    auto& dst = it->triples;
    dst.insert(dst.end(), std::make_move_iterator(results[i].triples.begin()),
               std::make_move_iterator(results[i].triples.end()));
  }
  return out;
}

MaterializationReport materialize_all(const std::vector<EntityMapping>& entities, const MaterializeOptions& options) {
  SourceCatalog sources(options.data_dir, options.suppressed);
  std::vector<std::string> graph_of_map;
  auto doc = combine(entities, graph_of_map);
  auto diagnostics = mapping::validate(doc, sources.headers(doc));
  if (!diagnostics.empty()) {
    std::string msg = "mapping validation failed:";
    for (const auto& d : diagnostics) msg += " " + mapping::to_string(d);
    throw std::runtime_error(msg);
  }

  auto outputs = materialize_entities(entities, sources, options.jobs);
  fs::create_directories(options.out_dir);
  MaterializationReport report;
  for (auto& o : outputs) {
    auto start = std::chrono::steady_clock::now();
    fs::path file = options.out_dir / (o.entity + ".nt");
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write '" + file.string() + "'");
      for (const auto& t : o.triples) out << t.to_ntriples() << '\n';
    }
    double write_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back({o.entity, o.seconds + write_seconds, o.mappings, o.triples.size(), fs::file_size(file)});
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report

ReportRow MaterializationReport::total() const {
  ReportRow t;
  t.entity = "Total";
  for (const auto& r : rows) {
    t.seconds += r.seconds;
    t.mappings += r.mappings;
    t.triples += r.triples;
    t.bytes += r.bytes;
  }
  return t;
}

std::string format_size(std::uintmax_t bytes) {
  char buf[32];
  double b = static_cast<double>(bytes);
  if (b >= 1e9) {
    std::snprintf(buf, sizeof buf, "%.1f GB", b / 1e9);
  } else if (b >= 1e6) {
    std::snprintf(buf, sizeof buf, "%.1f MB", b / 1e6);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f MB", b / 1e6);
  }
  return buf;
}

namespace {

std::vector<std::string> cells_of(const ReportRow& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
  return {r.entity, secs, std::to_string(r.mappings), std::to_string(r.triples), format_size(r.bytes)};
}

const std::vector<std::string> kReportHeader = {"Entity", "Time (in sec)", "No. of mappings", "Triples generated",
                                                "File Size"};

}  // namespace

void MaterializationReport::write_csv(std::ostream& out) const {
  write_csv_row(out, kReportHeader);
  for (const auto& r : rows) write_csv_row(out, cells_of(r));
  write_csv_row(out, cells_of(total()));
}

std::string MaterializationReport::to_text() const {
  std::vector<std::vector<std::string>> table;
  table.push_back(kReportHeader);
  for (const auto& r : rows) table.push_back(cells_of(r));
  table.push_back(cells_of(total()));

  std::vector<std::size_t> width(kReportHeader.size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      if (c) out << " | ";
      const auto& cell = table[r][c];
      std::string pad(width[c] - cell.size(), ' ');
      // Entity left-aligned, numbers right-aligned.
      if (c == 0 || r == 0) {
        out << cell << (c + 1 < table[r].size() ? pad : "");
      } else {
        out << pad << cell;
      }
    }
    out << '\n';
    if (r == 0 || r + 2 == table.size()) {
      for (std::size_t c = 0; c < width.size(); ++c) {
        if (c) out << "-+-";
        out << std::string(width[c], '-');
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace kgforge::materialize
