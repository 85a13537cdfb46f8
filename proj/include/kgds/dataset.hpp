#pragma once

// Dataset serialization in the OpenNRE line format and summary statistics.
//
// Each line is one instance:
//   {"text": "...", "h": {"id": "C0032005", "pos": [130, 145], "name": "pituitary gland"},
//    "t": {"id": ..., "pos": [..], "name": ...}, "relation": "finding_site_of"}
// Separators are ", " and ": ", field order is fixed, strings are raw UTF-8.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgds/aligner.hpp"
#include "kgds/common.hpp"
#include "kgds/kg_builder.hpp"

namespace kgds {

namespace detail {

inline void put_json_string(std::ostream& os, const std::string& s) { os << nlohmann::json(s).dump(); }

inline void put_entity(std::ostream& os, const Mention& m) {
  os << "{\"id\": ";
  put_json_string(os, m.cui);
  os << ", \"pos\": [" << m.start << ", " << m.end << "], \"name\": ";
  put_json_string(os, m.surface);
  os << '}';
}

inline void check_mention(const std::string& text, const Mention& m) {
  auto slice = utf8_slice(text, m.start, m.end);
  if (!slice || *slice != m.surface || m.start >= m.end)
    throw DataError("instance mention " + m.cui + " [" + std::to_string(m.start) + ", " + std::to_string(m.end) +
                    ") does not slice to '" + m.surface + "'");
}

}  // namespace detail

inline void write_instance(std::ostream& os, const RelationalInstance& inst) {
  detail::check_mention(inst.text, inst.head);
  detail::check_mention(inst.text, inst.tail);
  os << "{\"text\": ";
  detail::put_json_string(os, inst.text);
  os << ", \"h\": ";
  detail::put_entity(os, inst.head);
  os << ", \"t\": ";
  detail::put_entity(os, inst.tail);
  os << ", \"relation\": ";
  detail::put_json_string(os, inst.relation);
  os << "}\n";
}

inline std::size_t write_instances(std::ostream& os, const std::vector<RelationalInstance>& instances) {
  for (const auto& inst : instances) write_instance(os, inst);
  return instances.size();
}

inline std::size_t write_instances(const std::string& path, const std::vector<RelationalInstance>& instances) {
  auto out = open_output(path);
  const auto n = write_instances(out, instances);
  out.flush();
  if (!out) throw DataError("write failed: " + path);
  return n;
}

inline RelationalInstance parse_instance(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  RelationalInstance inst;
  inst.text = j.at("text").get<std::string>();
  auto entity = [&](const nlohmann::json& e) {
    Mention m;
    m.cui = e.at("id").get<std::string>();
    const auto& pos = e.at("pos");
    if (!pos.is_array() || pos.size() != 2) throw DataError("pos must be a two-element array");
    m.start = pos[0].get<std::size_t>();
    m.end = pos[1].get<std::size_t>();
    m.surface = e.at("name").get<std::string>();
    detail::check_mention(inst.text, m);
    return m;
  };
  inst.head = entity(j.at("h"));
  inst.tail = entity(j.at("t"));
  inst.relation = j.at("relation").get<std::string>();
  return inst;
}

// sentence_id is assigned per distinct text in file order.
inline std::vector<RelationalInstance> read_instances(std::istream& in, const std::string& name) {
  std::vector<RelationalInstance> out;
  std::map<std::string, std::size_t> ids;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      auto inst = parse_instance(line);
      inst.sentence_id = ids.emplace(inst.text, ids.size()).first->second;
      out.push_back(std::move(inst));
    } catch (const DataError& e) {
      throw DataError(name + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError(name + ":" + std::to_string(lineno) + ": malformed instance: " + e.what());
    }
  }
  return out;
}

inline std::vector<RelationalInstance> read_instances(const std::string& path) {
  auto in = open_input(path);
  return read_instances(in, path);
}

// NA = 0, then relation names in lexicographic order.
inline std::map<std::string, int> make_rel2id(const std::set<std::string>& relations) {
  std::map<std::string, int> out{{std::string(kNoRelation), 0}};
  int next = 1;
  for (const auto& r : relations)
    if (r != kNoRelation) out.emplace(r, next++);
  return out;
}

inline void write_rel2id(std::ostream& os, const std::map<std::string, int>& rel2id) {
  std::vector<std::pair<std::string, int>> rows(rel2id.begin(), rel2id.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, id] : rows) j[name] = id;
  os << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Statistics

struct SplitSummary {
  std::size_t instances = 0;
  std::size_t facts = 0;  // distinct non-NA (head, relation, tail)
  std::size_t bags = 0;   // distinct ordered pairs
  std::size_t na_instances = 0;
  double mean_instances_per_bag() const { return bags ? static_cast<double>(instances) / bags : 0.0; }
  double na_percent() const { return instances ? 100.0 * na_instances / instances : 0.0; }
};

struct DatasetManifest {
  std::array<SplitSummary, 3> splits;
  std::size_t entities = 0;
  std::size_t relations = 0;  // includes NA
  std::size_t semantic_types = 0;
  std::size_t semantic_groups = 0;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["summary"] = {{"entities", entities},
                    {"relations", relations},
                    {"semantic_types", semantic_types},
                    {"semantic_groups", semantic_groups}};
    for (std::size_t s = 0; s < 3; ++s) {
      const auto& sp = splits[s];
      j["splits"][to_string(kSplits[s])] = {{"instances", sp.instances},
                                            {"facts", sp.facts},
                                            {"bags", sp.bags},
                                            {"instances_per_bag", std::round(sp.mean_instances_per_bag() * 100) / 100},
                                            {"na_percent", std::round(sp.na_percent() * 10) / 10}};
    }
    j["config"] = config;
    return j;
  }
};

inline SplitSummary summarize_split(const std::vector<RelationalInstance>& instances) {
  SplitSummary s;
  std::set<Triple> facts;
  std::set<CuiPair> pairs;
  for (const auto& inst : instances) {
    ++s.instances;
    pairs.insert(inst.pair());
    if (inst.is_na())
      ++s.na_instances;
    else
      facts.insert({inst.head.cui, inst.relation, inst.tail.cui});
  }
  s.facts = facts.size();
  s.bags = pairs.size();
  return s;
}

// `entities` supplies semantic types and groups; without it those counts
// stay 0.
inline DatasetManifest summarize(const SplitInstances& splits, const EntityTable* entities = nullptr) {
  DatasetManifest m;
  std::set<std::string> cuis, relations{std::string(kNoRelation)};
  for (std::size_t s = 0; s < 3; ++s) {
    m.splits[s] = summarize_split(splits[s]);
    for (const auto& inst : splits[s]) {
      cuis.insert(inst.head.cui);
      cuis.insert(inst.tail.cui);
      relations.insert(inst.relation);
    }
  }
  m.entities = cuis.size();
  m.relations = relations.size();
  if (entities) {
    std::set<std::string> tuis, groups;
    for (const auto& c : cuis) {
      auto it = entities->find(c);
      if (it == entities->end()) continue;
      tuis.insert(it->second.tuis.begin(), it->second.tuis.end());
      groups.insert(it->second.group);
    }
    m.semantic_types = tuis.size();
    m.semantic_groups = groups.size();
  }
  return m;
}

}  // namespace kgds
