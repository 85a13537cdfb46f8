#pragma once

// Train/evaluation triple leakage audit for relation extraction benchmarks.
//
// Evaluation triples are mapped to CUIs (when a benchmark ships surface
// forms) and counted as leaked when the same CUI triple, or its image under
// the inverse-relation map, occurs in the training split.

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kgds/common.hpp"

namespace kgds {

// Surface -> CUI multimap keyed by lowercase, whitespace-collapsed surface.
// In identity mode the map is bypassed and triples are taken as CUIs.
class NormalizationMap {
 public:
  static NormalizationMap identity() {
    NormalizationMap m;
    m.identity_ = true;
    return m;
  }

  // surface<TAB>CUI
  static NormalizationMap load(const std::string& path) {
    NormalizationMap m;
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (read_line(in, line)) {
      ++lineno;
      if (trim(line).empty() || line[0] == '#') continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() != 2) throw DataError(path + ":" + std::to_string(lineno) + ": expected surface<TAB>CUI");
      m.add(cols[0], cols[1]);
    }
    return m;
  }

  void add(std::string_view surface, std::string_view cui) { map_[normalize_surface(surface)].emplace(cui); }

  bool is_identity() const { return identity_; }

  std::vector<std::string> lookup(const std::string& s) const {
    if (identity_) return {s};
    auto it = map_.find(normalize_surface(s));
    if (it == map_.end()) return {};
    return {it->second.begin(), it->second.end()};
  }

 private:
  bool identity_ = false;
  std::map<std::string, std::set<std::string>> map_;
};

// Relation -> inverse relation, closed in both directions on construction.
class InverseMap {
 public:
  InverseMap() = default;
  explicit InverseMap(const std::map<std::string, std::string>& pairs) {
    for (const auto& [a, b] : pairs) add(a, b);
  }

  void add(const std::string& rel, const std::string& inverse) {
    inv_[rel] = inverse;
    inv_.emplace(inverse, rel);
  }

  // rel<TAB>inverse
  static InverseMap load(const std::string& path) {
    InverseMap m;
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (read_line(in, line)) {
      ++lineno;
      if (trim(line).empty() || line[0] == '#') continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() < 2) throw DataError(path + ":" + std::to_string(lineno) + ": expected relation<TAB>inverse");
      // Accept the relations.tsv layout too: "canonical<TAB>rel<TAB>inverse".
      if (cols.size() == 3 && cols[0] == "canonical")
        m.add(std::string(cols[1]), std::string(cols[2]));
      else if (cols.size() == 2 && cols[0] != "exclude")
        m.add(std::string(cols[0]), std::string(cols[1]));
    }
    return m;
  }

  // The smaller of a triple and its inverse image: equal for (h, r, t) and
  // (t, r^-1, h).
  Triple key(const Triple& t) const {
    auto it = inv_.find(t.relation);
    if (it == inv_.end()) return t;
    Triple flipped{t.tail, it->second, t.head};
    return std::min(t, flipped);
  }

  bool empty() const { return inv_.empty(); }

 private:
  std::map<std::string, std::string> inv_;
};

struct EvalOverlap {
  std::string name;
  std::size_t total = 0;
  std::size_t direct = 0;
  std::size_t inverse_aware = 0;
  std::size_t unmapped = 0;

  // Percentages as integer hundredths, rounded half up.
  static std::int64_t hundredths(std::size_t num, std::size_t den) {
    if (den == 0) return 0;
    return static_cast<std::int64_t>((num * 20000 + den) / (2 * den));
  }
  std::int64_t direct_hundredths() const { return hundredths(direct, total); }
  std::int64_t inverse_aware_hundredths() const { return hundredths(inverse_aware, total); }
};

inline std::string format_percent(std::int64_t hundredths) {
  std::ostringstream os;
  os << hundredths / 100 << '.' << (hundredths % 100 < 10 ? "0" : "") << hundredths % 100;
  return os.str();
}

struct OverlapReport {
  std::size_t train_total = 0;
  std::size_t train_unmapped = 0;
  std::vector<EvalOverlap> evals;

  std::string to_text() const {
    std::ostringstream os;
    os << "train: " << train_total << " triples";
    if (train_unmapped) os << " (" << train_unmapped << " unmapped)";
    os << '\n';
    for (const auto& e : evals) {
      os << e.name << ": " << e.total << " triples, direct overlap " << e.direct << " ("
         << format_percent(e.direct_hundredths()) << "%), inverse-aware overlap " << e.inverse_aware << " ("
         << format_percent(e.inverse_aware_hundredths()) << "%)";
      if (e.unmapped) os << ", " << e.unmapped << " unmapped";
      os << '\n';
    }
    return os.str();
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["train"] = {{"total", train_total}, {"unmapped", train_unmapped}};
    j["evals"] = nlohmann::ordered_json::array();
    for (const auto& e : evals)
      j["evals"].push_back({{"name", e.name},
                            {"total", e.total},
                            {"direct", e.direct},
                            {"inverse_aware", e.inverse_aware},
                            {"direct_percent", format_percent(e.direct_hundredths())},
                            {"inverse_aware_percent", format_percent(e.inverse_aware_hundredths())},
                            {"unmapped", e.unmapped}});
    return j;
  }
};

// Labeled triple file: head<TAB>relation<TAB>tail per line, duplicates kept.
inline std::vector<Triple> read_labeled_triples(const std::string& path) {
  auto in = open_input(path);
  std::vector<Triple> out;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto cols = split_view(line, '\t');
    if (cols.size() != 3) throw DataError(path + ":" + std::to_string(lineno) + ": expected head, relation, tail");
    out.push_back({std::string(trim(cols[0])), std::string(trim(cols[1])), std::string(trim(cols[2]))});
  }
  return out;
}

namespace detail {

// All CUI readings of a triple; empty when either side has no mapping.
inline std::vector<Triple> cui_readings(const Triple& t, const NormalizationMap& norm) {
  std::vector<Triple> out;
  for (const auto& h : norm.lookup(t.head))
    for (const auto& tl : norm.lookup(t.tail)) out.push_back({h, t.relation, tl});
  return out;
}

}  // namespace detail

// A surface mapped to several CUIs contributes every reading; an evaluation
// triple overlaps when any of its readings does.
inline OverlapReport audit_overlap(const std::vector<Triple>& train,
                                   const std::vector<std::pair<std::string, std::vector<Triple>>>& evals,
                                   const NormalizationMap& norm, const InverseMap& inverse) {
  OverlapReport report;
  std::unordered_set<Triple, TripleHash> direct, keyed;
  for (const auto& t : train) {
    const auto readings = detail::cui_readings(t, norm);
    if (readings.empty()) {
      ++report.train_unmapped;
      continue;
    }
    ++report.train_total;
    for (const auto& r : readings) {
      direct.insert(r);
      keyed.insert(inverse.key(r));
    }
  }
  for (const auto& [name, triples] : evals) {
    EvalOverlap e;
    e.name = name;
    for (const auto& t : triples) {
      const auto readings = detail::cui_readings(t, norm);
      if (readings.empty()) {
        ++e.unmapped;
        continue;
      }
      ++e.total;
      bool d = false, k = false;
      for (const auto& r : readings) {
        d = d || direct.count(r);
        k = k || keyed.count(inverse.key(r));
      }
      e.direct += d;
      e.inverse_aware += k;
    }
    report.evals.push_back(std::move(e));
  }
  return report;
}

}  // namespace kgds
