#pragma once

// Distills parsed RRF tables into the benchmark knowledge graph: entities are
// whitelisted by semantic type, relations are restricted to the canonical set
// and inverse relations are rewritten onto their canonical direction.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "kgds/common.hpp"
#include "kgds/registry.hpp"
#include "kgds/rrf.hpp"

namespace kgds {

struct Entity {
  std::string cui;
  std::set<std::string> tuis;  // whitelisted semantic types only
  std::string group;
  std::set<std::string> names;

  bool operator==(const Entity&) const = default;
};

using EntityTable = std::map<std::string, Entity>;

struct KgDiagnostics {
  std::size_t concepts_without_types = 0;
  std::size_t concepts_not_whitelisted = 0;
  std::size_t rels_missing_rela = 0;
  std::size_t rels_excluded = 0;
  std::size_t rels_unmapped = 0;
  std::size_t rels_endpoint_not_entity = 0;
  std::size_t rels_self_loop = 0;
  std::size_t rels_inverted = 0;
  std::size_t duplicates_merged = 0;
  std::size_t inactive_entities_dropped = 0;
};

// A concept is kept when at least one of its semantic types is whitelisted.
// Its group is that of its smallest whitelisted TUI, so an entity typed
// across two groups still lands in exactly one.
inline EntityTable build_entity_set(const std::vector<ConceptRow>& concepts, const TypeTable& types,
                                    const SemanticTypeRegistry& registry, const TuiSet& whitelist,
                                    KgDiagnostics* diag = nullptr) {
  if (whitelist.empty()) throw UsageError("semantic type whitelist is empty");
  std::map<std::string, std::set<std::string>> names;
  for (const auto& c : concepts) names[c.cui].insert(std::string(trim(c.surface)));

  EntityTable out;
  for (auto& [cui, surfaces] : names) {
    if (!types.has(cui)) {
      if (diag) ++diag->concepts_without_types;
      continue;
    }
    Entity e{cui, {}, {}, std::move(surfaces)};
    for (const auto& tui : types.tuis_of(cui))
      if (whitelist.count(tui) && registry.contains(tui)) e.tuis.insert(tui);
    if (e.tuis.empty()) {
      if (diag) ++diag->concepts_not_whitelisted;
      continue;
    }
    e.group = *registry.group_of(*e.tuis.begin());
    out.emplace(cui, std::move(e));
  }
  return out;
}

// Maps relation rows onto canonical triples. Rows with an excluded, unknown
// or missing relation label are dropped, as are rows whose endpoints are not
// entities. The result is a set, so a fact stated in both directions merges.
inline TripleSet canonicalize_triples(const std::vector<RawRelRow>& rels, const EntityTable& entities,
                                      const RelationCanonMap& canon, RelDirection direction = RelDirection::kUmls,
                                      KgDiagnostics* diag = nullptr) {
  TripleSet out;
  auto bump = [&](std::size_t KgDiagnostics::*field) {
    if (diag) ++(diag->*field);
  };
  for (const auto& row : rels) {
    auto d = direct(row, direction);
    if (!d) {
      bump(&KgDiagnostics::rels_missing_rela);
      continue;
    }
    Triple t{d->head, d->rela, d->tail};
    switch (canon.classify(t.relation)) {
      case RelationCanonMap::Kind::kCanonical:
        break;
      case RelationCanonMap::Kind::kInverse:
        t = canon.to_canonical(t);
        bump(&KgDiagnostics::rels_inverted);
        break;
      case RelationCanonMap::Kind::kExcluded:
        bump(&KgDiagnostics::rels_excluded);
        continue;
      case RelationCanonMap::Kind::kUnknown:
        bump(&KgDiagnostics::rels_unmapped);
        continue;
    }
    if (t.head == t.tail) {
      bump(&KgDiagnostics::rels_self_loop);
      continue;
    }
    if (!entities.count(t.head) || !entities.count(t.tail)) {
      bump(&KgDiagnostics::rels_endpoint_not_entity);
      continue;
    }
    if (!out.insert(std::move(t)).second) bump(&KgDiagnostics::duplicates_merged);
  }
  return out;
}

// Keeps only entities that take part in at least one triple.
inline EntityTable prune_inactive_entities(const EntityTable& entities, const TripleSet& triples,
                                           KgDiagnostics* diag = nullptr) {
  std::set<std::string> active;
  for (const auto& t : triples) {
    active.insert(t.head);
    active.insert(t.tail);
  }
  EntityTable out;
  for (const auto& [cui, e] : entities) {
    if (active.count(cui))
      out.emplace(cui, e);
    else if (diag)
      ++diag->inactive_entities_dropped;
  }
  return out;
}

// entities.tsv: CUI, comma-joined TUIs, group, '|'-joined surface forms.
// RRF strings never contain '|', so the join is unambiguous.
inline void write_entities_tsv(std::ostream& os, const EntityTable& entities) {
  for (const auto& [cui, e] : entities) {
    os << cui << '\t' << join({e.tuis.begin(), e.tuis.end()}, ",") << '\t' << e.group << '\t'
       << join({e.names.begin(), e.names.end()}, "|") << '\n';
  }
}

inline EntityTable read_entities_tsv(const std::string& path) {
  auto in = open_input(path);
  EntityTable out;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto cols = split_view(line, '\t');
    if (cols.size() != 4 || !is_cui(cols[0]))
      throw DataError(path + ":" + std::to_string(lineno) + ": expected CUI, TUIs, group, names");
    Entity e;
    e.cui = std::string(cols[0]);
    for (auto t : split_view(cols[1], ','))
      if (!t.empty()) e.tuis.emplace(t);
    e.group = std::string(cols[2]);
    for (auto n : split_view(cols[3], '|'))
      if (!n.empty()) e.names.emplace(n);
    out.emplace(e.cui, std::move(e));
  }
  return out;
}

}  // namespace kgds
