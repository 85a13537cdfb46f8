#pragma once

// Shared vocabulary types and small text utilities used across the toolkit.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace kgds {

// Exit codes of the command-line front end; library errors carry one so the
// CLI can map an exception to a process status without re-classifying it.
enum class ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kConstraint = 3 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad input data or unreadable files.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// A structural constraint (coverage, ratio, disjointness) cannot be met.
class ConstraintError : public Error {
 public:
  explicit ConstraintError(const std::string& what) : Error(ExitCode::kConstraint, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

// ---------------------------------------------------------------------------
// Identifiers

inline bool is_cui(std::string_view s) {
  if (s.size() != 8 || s[0] != 'C') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline bool is_tui(std::string_view s) {
  if (s.size() != 4 || s[0] != 'T') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

inline constexpr std::string_view kNoRelation = "NA";

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

using TripleSet = std::set<Triple>;

// Ordered (head, tail) concept pair.
using CuiPair = std::pair<std::string, std::string>;

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::hash<std::string> h;
    std::size_t seed = h(t.head);
    seed ^= h(t.relation) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= h(t.tail) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

struct PairHash {
  std::size_t operator()(const CuiPair& p) const noexcept {
    std::hash<std::string> h;
    std::size_t seed = h(p.first);
    seed ^= h(p.second) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
  }
};

// ---------------------------------------------------------------------------
// Strings

inline std::vector<std::string_view> split_view(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Collapses every run of ASCII whitespace into one space and trims both ends.
inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char c : s) {
    if (is_space(c)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    out.push_back(c);
  }
  return out;
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

// Lowercase + whitespace collapse: the comparison key for surface strings.
inline std::string normalize_surface(std::string_view s) { return ascii_lower(collapse_whitespace(s)); }

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// UTF-8. Offsets in linked sentences count Unicode scalar values.

inline bool utf8_valid(std::string_view s) {
  std::size_t i = 0;
  const auto* p = reinterpret_cast<const unsigned char*>(s.data());
  while (i < s.size()) {
    const unsigned char c = p[i];
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    for (std::size_t k = 1; k < len; ++k) {
      if ((p[i + k] & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (p[i + k] & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

// Byte offset of every code point boundary; result has (code point count + 1)
// entries, the last one equal to s.size(). Input must be valid UTF-8.
inline std::vector<std::size_t> utf8_boundaries(std::string_view s) {
  std::vector<std::size_t> b;
  b.reserve(s.size() + 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) b.push_back(i);
  }
  b.push_back(s.size());
  return b;
}

inline std::size_t utf8_length(std::string_view s) { return utf8_boundaries(s).size() - 1; }

// Substring by code point range [start, end).
inline std::optional<std::string_view> utf8_slice(std::string_view s, std::size_t start, std::size_t end) {
  const auto b = utf8_boundaries(s);
  if (start > end || end >= b.size()) return std::nullopt;
  return s.substr(b[start], b[end] - b[start]);
}

// ---------------------------------------------------------------------------
// Reject log: rows skipped by a parser, kept as (file, line, reason).

struct Rejection {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

class RejectLog {
 public:
  void add(std::string file, std::size_t line, std::string reason) {
    entries_.push_back({std::move(file), line, std::move(reason)});
  }
  const std::vector<Rejection>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  void write_tsv(std::ostream& os) const {
    for (const auto& r : entries_) os << r.file << '\t' << r.line << '\t' << r.reason << '\n';
  }

 private:
  std::vector<Rejection> entries_;
};

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open input file: " + path);
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open output file: " + path);
  return out;
}

// getline that also strips a trailing '\r'.
inline bool read_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

// Three-column head/relation/tail TSV. Blank lines and '#' comments skipped.
inline TripleSet read_triples_tsv(const std::string& path) {
  auto in = open_input(path);
  TripleSet out;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto cols = split_view(line, '\t');
    if (cols.size() != 3)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected 3 tab-separated columns");
    out.insert(Triple{std::string(cols[0]), std::string(cols[1]), std::string(cols[2])});
  }
  return out;
}

inline void write_triples_tsv(std::ostream& os, const TripleSet& triples) {
  for (const auto& t : triples) os << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
}

}  // namespace kgds
