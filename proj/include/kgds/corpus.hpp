#pragma once

// Entity-linked sentence ingestion, deduplication and a dictionary linker.
//
// Mention offsets are half-open [start, end) ranges of Unicode scalar values
// (code points), not bytes: "pituitary gland" at [130, 145) counts characters.

#include <algorithm>
#include <array>
#include <functional>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "kgds/common.hpp"
#include "kgds/kg_builder.hpp"

namespace kgds {

struct Mention {
  std::string cui;
  std::size_t start = 0;
  std::size_t end = 0;
  std::string surface;

  bool operator==(const Mention&) const = default;
};

struct LinkedSentence {
  std::string text;
  std::vector<Mention> mentions;
  std::string source_id;

  bool operator==(const LinkedSentence&) const = default;
};

// Checks the Mention and LinkedSentence invariants; returns the first
// violation, or nullopt if the sentence is well formed. Sorts mentions.
inline std::optional<std::string> validate_sentence(LinkedSentence& s) {
  if (!utf8_valid(s.text)) return "text is not valid UTF-8";
  const auto bounds = utf8_boundaries(s.text);
  const std::size_t len = bounds.size() - 1;
  std::sort(s.mentions.begin(), s.mentions.end(),
            [](const Mention& a, const Mention& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });
  for (std::size_t i = 0; i < s.mentions.size(); ++i) {
    auto& m = s.mentions[i];
    if (!is_cui(m.cui)) return "mention has malformed CUI '" + m.cui + "'";
    if (m.end <= m.start) return "mention end <= start";
    if (m.end > len) return "mention offset beyond text length";
    const std::string_view slice(s.text.data() + bounds[m.start], bounds[m.end] - bounds[m.start]);
    if (m.surface.empty())
      m.surface = std::string(slice);
    else if (m.surface != slice)
      return "surface '" + m.surface + "' does not match text slice '" + std::string(slice) + "'";
    if (i > 0 && s.mentions[i - 1].end > m.start) return "overlapping mentions";
  }
  return std::nullopt;
}

// One JSON object per line:
//   {"text": ..., "mentions": [{"cui", "start", "end", "surface"?}], "source_id"?: ...}
inline std::size_t read_linked_sentences(std::istream& in, const std::string& name, RejectLog& rejects,
                                         const std::function<void(LinkedSentence&&)>& sink) {
  std::string line;
  std::size_t lineno = 0, accepted = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    LinkedSentence s;
    try {
      const auto j = nlohmann::json::parse(line);
      s.text = j.at("text").get<std::string>();
      if (j.contains("source_id")) s.source_id = j.at("source_id").get<std::string>();
      for (const auto& m : j.at("mentions")) {
        Mention mm;
        mm.cui = m.at("cui").get<std::string>();
        const auto start = m.at("start").get<long long>();
        const auto end = m.at("end").get<long long>();
        if (start < 0 || end < 0) throw std::invalid_argument("negative offset");
        mm.start = static_cast<std::size_t>(start);
        mm.end = static_cast<std::size_t>(end);
        if (m.contains("surface")) mm.surface = m.at("surface").get<std::string>();
        s.mentions.push_back(std::move(mm));
      }
    } catch (const std::exception& e) {
      rejects.add(name, lineno, std::string("malformed record: ") + e.what());
      continue;
    }
    if (auto err = validate_sentence(s)) {
      rejects.add(name, lineno, *err);
      continue;
    }
    ++accepted;
    sink(std::move(s));
  }
  if (in.bad()) throw DataError("read error in " + name);
  return accepted;
}

inline std::vector<LinkedSentence> read_linked_sentences(const std::string& path, RejectLog& rejects) {
  auto in = open_input(path);
  std::vector<LinkedSentence> out;
  read_linked_sentences(in, path, rejects, [&](LinkedSentence&& s) { out.push_back(std::move(s)); });
  return out;
}

inline void write_linked_sentence(std::ostream& os, const LinkedSentence& s) {
  nlohmann::ordered_json j;
  j["text"] = s.text;
  j["mentions"] = nlohmann::ordered_json::array();
  for (const auto& m : s.mentions)
    j["mentions"].push_back({{"cui", m.cui}, {"start", m.start}, {"end", m.end}, {"surface", m.surface}});
  if (!s.source_id.empty()) j["source_id"] = s.source_id;
  os << j.dump() << '\n';
}

// ---------------------------------------------------------------------------
// Deduplication

// Set of normalized sentence texts. insert() is atomic: of several threads
// racing on the same text, exactly one sees `true`.
class SentenceDeduplicator {
 public:
  bool insert(std::string_view text) {
    std::string key = collapse_whitespace(text);
    Shard& shard = shards_[std::hash<std::string>{}(key) % shards_.size()];
    std::lock_guard lock(shard.mutex);
    return shard.seen.insert(std::move(key)).second;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto& s : shards_) {
      std::lock_guard lock(s.mutex);
      n += s.seen.size();
    }
    return n;
  }

 private:
  struct Shard {
    mutable std::mutex mutex;
    std::unordered_set<std::string> seen;
  };
  std::array<Shard, 64> shards_;
};

// First occurrence of each whitespace-normalized text wins.
inline std::vector<LinkedSentence> dedup_sentences(std::vector<LinkedSentence> in) {
  SentenceDeduplicator seen;
  std::vector<LinkedSentence> out;
  out.reserve(in.size());
  for (auto& s : in)
    if (seen.insert(s.text)) out.push_back(std::move(s));
  return out;
}

// ---------------------------------------------------------------------------
// Dictionary linking

enum class AmbiguityPolicy {
  kSkip,      // surfaces naming several CUIs produce no mention
  kFirstCui,  // use the lexicographically smallest CUI
};

inline AmbiguityPolicy parse_ambiguity_policy(std::string_view s) {
  if (s == "skip") return AmbiguityPolicy::kSkip;
  if (s == "first" || s == "first-cui") return AmbiguityPolicy::kFirstCui;
  throw UsageError("unknown ambiguity policy '" + std::string(s) + "'");
}

namespace detail {

inline std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    char32_t cp;
    std::size_t len;
    if (c < 0x80) {
      cp = c;
      len = 1;
    } else if ((c & 0xE0) == 0xC0) {
      cp = c & 0x1F;
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      cp = c & 0x0F;
      len = 3;
    } else {
      cp = c & 0x07;
      len = 4;
    }
    for (std::size_t k = 1; k < len && i + k < s.size(); ++k) cp = (cp << 6) | (s[i + k] & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline char32_t fold(char32_t c) { return (c >= U'A' && c <= U'Z') ? c - U'A' + U'a' : c; }

// ASCII letters and digits, plus every non-ASCII code point (letters in
// other scripts, Greek symbols in drug names).
inline bool is_word_char(char32_t c) {
  return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || (c >= U'0' && c <= U'9') || c > 0x7F;
}

}  // namespace detail

// Case-insensitive surface -> CUI multimap.
class Lexicon {
 public:
  void add(std::string_view surface, std::string_view cui) {
    const std::string norm = collapse_whitespace(surface);
    if (norm.empty() || !utf8_valid(norm)) return;
    std::u32string key = detail::decode_utf8(norm);
    for (auto& c : key) c = detail::fold(c);
    lengths_.insert(key.size());
    entries_[std::move(key)].insert(std::string(cui));
  }

  // surface<TAB>CUI
  static Lexicon load(const std::string& path) {
    Lexicon lex;
    auto in = open_input(path);
    std::string line;
    std::size_t lineno = 0;
    while (read_line(in, line)) {
      ++lineno;
      if (trim(line).empty() || line[0] == '#') continue;
      const auto cols = split_view(line, '\t');
      if (cols.size() != 2 || !is_cui(cols[1]))
        throw DataError(path + ":" + std::to_string(lineno) + ": expected surface<TAB>CUI");
      lex.add(cols[0], cols[1]);
    }
    return lex;
  }

  static Lexicon from_entities(const EntityTable& entities) {
    Lexicon lex;
    for (const auto& [cui, e] : entities)
      for (const auto& n : e.names) lex.add(n, cui);
    return lex;
  }

  const std::set<std::string>* find(const std::u32string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Distinct key lengths, longest first.
  const std::set<std::size_t, std::greater<>>& lengths() const { return lengths_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::u32string, std::set<std::string>> entries_;
  std::set<std::size_t, std::greater<>> lengths_;
};

// Non-overlapping, token-bounded, case-insensitive lexicon matches. Longer
// matches are placed first; ties go to the earlier start.
inline std::vector<Mention> dictionary_link(std::string_view text, const Lexicon& lexicon,
                                            AmbiguityPolicy policy = AmbiguityPolicy::kSkip) {
  std::vector<Mention> out;
  if (lexicon.empty() || !utf8_valid(text)) return out;
  const std::u32string cps = detail::decode_utf8(text);
  std::u32string folded = cps;
  for (auto& c : folded) c = detail::fold(c);
  const auto bounds = utf8_boundaries(text);
  const std::size_t n = cps.size();

  struct Candidate {
    std::size_t start, end;
    std::string cui;
  };
  std::vector<Candidate> cands;
  std::u32string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && detail::is_word_char(cps[i - 1]) && detail::is_word_char(cps[i])) continue;
    for (std::size_t len : lexicon.lengths()) {
      if (i + len > n) continue;
      const std::size_t end = i + len;
      if (end < n && detail::is_word_char(cps[end]) && detail::is_word_char(cps[end - 1])) continue;
      key.assign(folded, i, len);
      const auto* cuis = lexicon.find(key);
      if (!cuis) continue;
      if (cuis->size() > 1 && policy == AmbiguityPolicy::kSkip) continue;
      cands.push_back({i, end, *cuis->begin()});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    const auto la = a.end - a.start, lb = b.end - b.start;
    return la != lb ? la > lb : a.start < b.start;
  });
  std::vector<bool> taken(n, false);
  for (const auto& c : cands) {
    if (std::any_of(taken.begin() + c.start, taken.begin() + c.end, [](bool t) { return t; })) continue;
    std::fill(taken.begin() + c.start, taken.begin() + c.end, true);
    out.push_back({c.cui, c.start, c.end, std::string(text.substr(bounds[c.start], bounds[c.end] - bounds[c.start]))});
  }
  std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) { return a.start < b.start; });
  return out;
}

}  // namespace kgds
