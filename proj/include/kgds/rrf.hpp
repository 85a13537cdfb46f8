#pragma once

// Streaming readers for the UMLS Rich Release Format tables MRCONSO, MRSTY
// and MRREL. Rows are pipe-delimited with a trailing pipe and no header.
//
// Malformed rows never abort a run: they are recorded in a RejectLog with
// their line number and parsing continues. Only I/O failure is fatal.

#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgds/common.hpp"
#include "kgds/registry.hpp"

namespace kgds {

struct ConceptRow {
  std::string cui;
  std::string language;
  std::string term_status;
  bool is_pref = false;
  std::string source_vocab;
  std::string term_type;
  std::string surface;
  std::string suppress;

  bool operator==(const ConceptRow&) const = default;
};

struct TypeAssignment {
  std::string cui;
  std::string tui;
  std::string sty_name;

  auto operator<=>(const TypeAssignment&) const = default;
  bool operator==(const TypeAssignment&) const = default;
};

struct RawRelRow {
  std::string cui1;
  std::string rel;
  std::optional<std::string> rela;
  std::string cui2;
  std::string source_vocab;

  bool operator==(const RawRelRow&) const = default;
};

// MRREL states the relationship of the second concept to the first, so a row
// CUI1|..|RELA|CUI2 reads "CUI2 RELA CUI1". kFirstIsHead reads it the other
// way round, for relation dumps produced by tools that flip the columns.
enum class RelDirection { kUmls, kFirstIsHead };

struct DirectedRel {
  std::string head;
  std::string rela;
  std::string tail;
};

inline std::optional<DirectedRel> direct(const RawRelRow& row, RelDirection dir = RelDirection::kUmls) {
  if (!row.rela) return std::nullopt;
  if (dir == RelDirection::kUmls) return DirectedRel{row.cui2, *row.rela, row.cui1};
  return DirectedRel{row.cui1, *row.rela, row.cui2};
}

enum class SuppressPolicy {
  kDropSuppressed,  // keep only SUPPRESS == "N"
  kKeepAll,
};

struct RrfFilter {
  // Empty set accepts every source vocabulary / language.
  std::set<std::string> source_vocabs{"SNOMEDCT_US"};
  std::set<std::string> languages;
  SuppressPolicy suppress = SuppressPolicy::kDropSuppressed;
};

struct RelFilter {
  std::set<std::string> categories{"RO"};
  std::set<std::string> source_vocabs{"SNOMEDCT_US"};
  SuppressPolicy suppress = SuppressPolicy::kDropSuppressed;
};

// Per-call row accounting; rows == yielded + filtered + rejected.
struct ParseStats {
  std::size_t rows = 0;
  std::size_t yielded = 0;
  std::size_t filtered = 0;
  std::size_t rejected = 0;
};

namespace detail {

// Splits an RRF row. Returns nullopt when the column count is not `expected`
// (with or without the trailing pipe).
inline std::optional<std::vector<std::string_view>> rrf_fields(std::string_view line, std::size_t expected) {
  auto cols = split_view(line, '|');
  if (cols.size() == expected + 1 && cols.back().empty()) cols.pop_back();
  if (cols.size() != expected) return std::nullopt;
  return cols;
}

inline bool suppressed(std::string_view flag, SuppressPolicy policy) {
  return policy == SuppressPolicy::kDropSuppressed && flag != "N" && !flag.empty();
}

template <typename Row>
using RowSink = std::function<void(Row&&)>;

}  // namespace detail

// MRCONSO: CUI|LAT|TS|LUI|STT|SUI|ISPREF|AUI|SAUI|SCUI|SDUI|SAB|TTY|CODE|STR|SRL|SUPPRESS|CVF|
inline ParseStats parse_mrconso(std::istream& in, const std::string& name, const RrfFilter& filter,
                                RejectLog& rejects, const detail::RowSink<ConceptRow>& sink) {
  ParseStats st;
  std::string line;
  while (read_line(in, line)) {
    ++st.rows;
    auto reject = [&](std::string reason) {
      rejects.add(name, st.rows, std::move(reason));
      ++st.rejected;
    };
    if (!utf8_valid(line)) {
      reject("invalid UTF-8");
      continue;
    }
    auto cols = detail::rrf_fields(line, 18);
    if (!cols) {
      reject("expected 18 columns, got " + std::to_string(split_view(line, '|').size()));
      continue;
    }
    const auto& c = *cols;
    if (!is_cui(c[0])) {
      reject("malformed CUI '" + std::string(c[0]) + "'");
      continue;
    }
    if (trim(c[14]).empty()) {
      reject("empty concept string");
      continue;
    }
    if (c[14].find('\t') != std::string_view::npos) {
      reject("tab in concept string");
      continue;
    }
    if ((!filter.source_vocabs.empty() && !filter.source_vocabs.count(std::string(c[11]))) ||
        (!filter.languages.empty() && !filter.languages.count(std::string(c[1]))) ||
        detail::suppressed(c[16], filter.suppress)) {
      ++st.filtered;
      continue;
    }
    ConceptRow row{std::string(c[0]),  std::string(c[1]),  std::string(c[2]),  c[6] == "Y",
                   std::string(c[11]), std::string(c[12]), std::string(c[14]), std::string(c[16])};
    ++st.yielded;
    sink(std::move(row));
  }
  if (in.bad()) throw DataError("read error in " + name);
  return st;
}

inline std::vector<ConceptRow> parse_mrconso(const std::string& path, const RrfFilter& filter, RejectLog& rejects,
                                             ParseStats* stats = nullptr) {
  auto in = open_input(path);
  std::vector<ConceptRow> out;
  auto st = parse_mrconso(in, path, filter, rejects, [&](ConceptRow&& r) { out.push_back(std::move(r)); });
  if (stats) *stats = st;
  return out;
}

// Unique (cui, tui) assignments, sorted by (cui, tui).
class TypeTable {
 public:
  void insert(TypeAssignment a) { rows_.emplace(std::make_pair(a.cui, a.tui), std::move(a.sty_name)); }

  std::vector<TypeAssignment> rows() const {
    std::vector<TypeAssignment> out;
    out.reserve(rows_.size());
    for (const auto& [key, name] : rows_) out.push_back({key.first, key.second, name});
    return out;
  }

  std::vector<std::string> tuis_of(const std::string& cui) const {
    std::vector<std::string> out;
    for (auto it = rows_.lower_bound({cui, ""}); it != rows_.end() && it->first.first == cui; ++it)
      out.push_back(it->first.second);
    return out;
  }

  bool has(const std::string& cui) const {
    auto it = rows_.lower_bound({cui, ""});
    return it != rows_.end() && it->first.first == cui;
  }

  std::size_t size() const { return rows_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, std::string> rows_;
};

// MRSTY: CUI|TUI|STN|STY|ATUI|CVF|
inline ParseStats parse_mrsty(std::istream& in, const std::string& name, const SemanticTypeRegistry& registry,
                              RejectLog& rejects, TypeTable& out) {
  ParseStats st;
  std::string line;
  while (read_line(in, line)) {
    ++st.rows;
    auto reject = [&](std::string reason) {
      rejects.add(name, st.rows, std::move(reason));
      ++st.rejected;
    };
    if (!utf8_valid(line)) {
      reject("invalid UTF-8");
      continue;
    }
    auto cols = detail::rrf_fields(line, 6);
    if (!cols) {
      reject("expected 6 columns, got " + std::to_string(split_view(line, '|').size()));
      continue;
    }
    const auto& c = *cols;
    if (!is_cui(c[0])) {
      reject("malformed CUI '" + std::string(c[0]) + "'");
      continue;
    }
    const auto* entry = registry.find(c[1]);
    if (!entry) {
      reject("unknown TUI '" + std::string(c[1]) + "'");
      continue;
    }
    out.insert({std::string(c[0]), std::string(c[1]), c[3].empty() ? entry->name : std::string(c[3])});
    ++st.yielded;
  }
  if (in.bad()) throw DataError("read error in " + name);
  return st;
}

inline TypeTable parse_mrsty(const std::string& path, const SemanticTypeRegistry& registry, RejectLog& rejects,
                             ParseStats* stats = nullptr) {
  auto in = open_input(path);
  TypeTable out;
  auto st = parse_mrsty(in, path, registry, rejects, out);
  if (stats) *stats = st;
  return out;
}

// MRREL: CUI1|AUI1|STYPE1|REL|CUI2|AUI2|STYPE2|RELA|RUI|SRUI|SAB|SL|RG|DIR|SUPPRESS|CVF|
inline ParseStats parse_mrrel(std::istream& in, const std::string& name, const RelFilter& filter, RejectLog& rejects,
                              const detail::RowSink<RawRelRow>& sink) {
  ParseStats st;
  std::string line;
  while (read_line(in, line)) {
    ++st.rows;
    auto reject = [&](std::string reason) {
      rejects.add(name, st.rows, std::move(reason));
      ++st.rejected;
    };
    if (!utf8_valid(line)) {
      reject("invalid UTF-8");
      continue;
    }
    auto cols = detail::rrf_fields(line, 16);
    if (!cols) {
      reject("expected 16 columns, got " + std::to_string(split_view(line, '|').size()));
      continue;
    }
    const auto& c = *cols;
    if (!is_cui(c[0]) || !is_cui(c[4])) {
      reject("malformed CUI");
      continue;
    }
    if (c[3].empty()) {
      reject("empty REL");
      continue;
    }
    if (!filter.categories.count(std::string(c[3])) ||
        (!filter.source_vocabs.empty() && !filter.source_vocabs.count(std::string(c[10]))) ||
        detail::suppressed(c[14], filter.suppress) || c[0] == c[4]) {
      ++st.filtered;
      continue;
    }
    RawRelRow row{std::string(c[0]), std::string(c[3]),
                  c[7].empty() ? std::nullopt : std::optional<std::string>(std::string(c[7])), std::string(c[4]),
                  std::string(c[10])};
    ++st.yielded;
    sink(std::move(row));
  }
  if (in.bad()) throw DataError("read error in " + name);
  return st;
}

inline std::vector<RawRelRow> parse_mrrel(const std::string& path, const RelFilter& filter, RejectLog& rejects,
                                         ParseStats* stats = nullptr) {
  auto in = open_input(path);
  std::vector<RawRelRow> out;
  auto st = parse_mrrel(in, path, filter, rejects, [&](RawRelRow&& r) { out.push_back(std::move(r)); });
  if (stats) *stats = st;
  return out;
}

// Intermediate TSV serializations used by the `parse` subcommand.
inline void write_concepts_tsv(std::ostream& os, const std::vector<ConceptRow>& rows) {
  for (const auto& r : rows)
    os << r.cui << '\t' << r.language << '\t' << r.term_status << '\t' << (r.is_pref ? 'Y' : 'N') << '\t'
       << r.source_vocab << '\t' << r.term_type << '\t' << r.surface << '\t' << r.suppress << '\n';
}

inline void write_types_tsv(std::ostream& os, const TypeTable& types) {
  for (const auto& a : types.rows()) os << a.cui << '\t' << a.tui << '\t' << a.sty_name << '\n';
}

inline void write_rels_tsv(std::ostream& os, const std::vector<RawRelRow>& rows) {
  for (const auto& r : rows)
    os << r.cui1 << '\t' << r.rel << '\t' << r.rela.value_or("") << '\t' << r.cui2 << '\t' << r.source_vocab << '\n';
}

namespace detail {

inline std::vector<std::string_view> tsv_row(const std::string& path, std::size_t lineno, const std::string& line,
                                             std::size_t expected) {
  auto cols = split_view(line, '\t');
  if (cols.size() != expected)
    throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(expected) + " columns");
  return cols;
}

template <typename Fn>
void for_each_tsv_row(const std::string& path, std::size_t expected, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    fn(tsv_row(path, lineno, line, expected));
  }
}

}  // namespace detail

inline std::vector<ConceptRow> read_concepts_tsv(const std::string& path) {
  std::vector<ConceptRow> out;
  detail::for_each_tsv_row(path, 8, [&](const std::vector<std::string_view>& c) {
    out.push_back({std::string(c[0]), std::string(c[1]), std::string(c[2]), c[3] == "Y", std::string(c[4]),
                   std::string(c[5]), std::string(c[6]), std::string(c[7])});
  });
  return out;
}

inline TypeTable read_types_tsv(const std::string& path) {
  TypeTable out;
  detail::for_each_tsv_row(path, 3, [&](const std::vector<std::string_view>& c) {
    out.insert({std::string(c[0]), std::string(c[1]), std::string(c[2])});
  });
  return out;
}

inline std::vector<RawRelRow> read_rels_tsv(const std::string& path) {
  std::vector<RawRelRow> out;
  detail::for_each_tsv_row(path, 5, [&](const std::vector<std::string_view>& c) {
    out.push_back({std::string(c[0]), std::string(c[1]),
                   c[2].empty() ? std::nullopt : std::optional<std::string>(std::string(c[2])), std::string(c[3]),
                   std::string(c[4])});
  });
  return out;
}

}  // namespace kgds
