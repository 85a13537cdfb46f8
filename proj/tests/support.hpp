#pragma once

// Shared test helpers: fixture paths, temp directories, synthetic graphs and
// corpora, and brute-force oracles written independently of the library.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "kgds/kgds.hpp"

namespace kgds::test {

inline std::string source_path(const std::string& rel) { return std::string(KGDS_SOURCE_DIR) + "/" + rel; }
inline std::string fixture(const std::string& rel) { return source_path("fixtures/" + rel); }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("kgds_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str() const { return path_.string(); }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string cui(int n) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", n);
  return buf;
}

inline std::vector<std::string> canonical_relations() {
  const auto canon = RelationCanonMap::builtin();
  const auto& c = canon.canonical();
  return {c.begin(), c.end()};
}

// Uniform random graph: `n_triples` distinct canonical triples over
// `n_entities` entities, no self-loops, at most one relation per unordered
// pair so no triple's inverse image is another triple.
inline TripleSet random_kg(std::uint64_t seed, std::size_t n_triples, std::size_t n_entities) {
  std::mt19937_64 gen(seed * 7919 + 17);
  const auto rels = canonical_relations();
  std::uniform_int_distribution<std::size_t> ent(0, n_entities - 1), rel(0, rels.size() - 1);
  TripleSet out;
  std::set<std::pair<std::size_t, std::size_t>> used;
  while (out.size() < n_triples) {
    std::size_t a = ent(gen), b = ent(gen);
    if (a == b || used.count({std::min(a, b), std::max(a, b)})) continue;
    used.insert({std::min(a, b), std::max(a, b)});
    out.insert({cui(static_cast<int>(a) + 1), rels[rel(gen)], cui(static_cast<int>(b) + 1)});
  }
  return out;
}

// Preferential attachment: each new entity links to `m` existing entities
// chosen proportionally to degree.
inline TripleSet scale_free_kg(std::uint64_t seed, std::size_t n_triples, std::size_t m = 2) {
  std::mt19937_64 gen(seed);
  const auto rels = canonical_relations();
  std::vector<int> ends{1, 2};
  TripleSet out{{cui(1), rels[0], cui(2)}};
  std::set<std::pair<int, int>> used{{1, 2}};
  int next = 3;
  while (out.size() < n_triples) {
    const int v = next++;
    for (std::size_t k = 0; k < m && out.size() < n_triples; ++k) {
      const int u = ends[std::uniform_int_distribution<std::size_t>(0, ends.size() - 1)(gen)];
      if (u == v || used.count({std::min(u, v), std::max(u, v)})) continue;
      used.insert({std::min(u, v), std::max(u, v)});
      const auto& r = rels[std::uniform_int_distribution<std::size_t>(0, rels.size() - 1)(gen)];
      if (gen() & 1)
        out.insert({cui(u), r, cui(v)});
      else
        out.insert({cui(v), r, cui(u)});
      ends.push_back(u);
      ends.push_back(v);
    }
  }
  return out;
}

// Entity table over every CUI of `kg`, each with one or two TUIs drawn from
// `tuis`.
inline EntityTable typed_entities(const TripleSet& kg, std::uint64_t seed,
                                  const std::vector<std::string>& tuis = {"T023", "T047", "T121", "T061"}) {
  std::mt19937_64 gen(seed ^ 0x5eed);
  const auto reg = SemanticTypeRegistry::builtin();
  EntityTable out;
  for (const auto& c : entities_of(kg)) {
    Entity e;
    e.cui = c;
    e.tuis.insert(tuis[gen() % tuis.size()]);
    if (gen() % 5 == 0) e.tuis.insert(tuis[gen() % tuis.size()]);
    e.group = *reg.group_of(*e.tuis.begin());
    e.names.insert("name of " + c);
    out.emplace(c, std::move(e));
  }
  return out;
}

// Every ordered pair (x, y) over `universe` that is a constraint-satisfying
// corruption, computed by a plain scan.
inline std::set<CuiPair> brute_force_negatives(const TripleSet& split, const TripleSet& all_splits,
                                               const EntityTable& entities, const std::vector<std::string>& universe) {
  std::set<std::pair<std::string, std::string>> type_pairs;
  std::set<std::string> heads, tails;
  for (const auto& t : split) {
    heads.insert(t.head);
    tails.insert(t.tail);
    for (const auto& a : entities.at(t.head).tuis)
      for (const auto& b : entities.at(t.tail).tuis) type_pairs.insert({a, b});
  }
  std::set<CuiPair> out;
  for (const auto& x : universe) {
    for (const auto& y : universe) {
      if (x == y) continue;
      bool related = false;
      for (const auto& t : all_splits)
        if ((t.head == x && t.tail == y) || (t.head == y && t.tail == x)) related = true;
      if (related) continue;
      bool typed = false;
      for (const auto& a : entities.at(x).tuis)
        for (const auto& b : entities.at(y).tuis)
          if (type_pairs.count({a, b})) typed = true;
      if (!typed) continue;
      bool role = false;
      for (const auto& t : split) {
        if (t.tail == y && heads.count(x)) role = true;  // head replaced by x
        if (t.head == x && tails.count(y)) role = true;  // tail replaced by y
      }
      if (role) out.insert({x, y});
    }
  }
  return out;
}

// Linked sentences over the entities of `kg`: each mentions two or three
// distinct entities by their first name. About `related_share` of the
// sentences are seeded with the endpoints of a random triple; the rest pick
// entities uniformly.
inline std::vector<LinkedSentence> synthetic_corpus(const TripleSet& kg, const EntityTable& entities,
                                                    std::uint64_t seed, std::size_t n_sentences,
                                                    double related_share = 0.3) {
  std::mt19937_64 gen(seed ^ 0xc0ffee);
  const std::vector<Triple> triples(kg.begin(), kg.end());
  std::vector<std::string> cuis;
  for (const auto& [c, e] : entities) cuis.push_back(c);
  static const std::vector<std::string> fillers{"was seen with", "and", "after", "in patients with", "near"};
  std::vector<LinkedSentence> out;
  out.reserve(n_sentences);
  for (std::size_t i = 0; i < n_sentences; ++i) {
    std::vector<std::string> picked;
    if (std::uniform_real_distribution<double>(0, 1)(gen) < related_share) {
      const Triple& t = triples[gen() % triples.size()];
      picked = gen() % 2 ? std::vector<std::string>{t.head, t.tail} : std::vector<std::string>{t.tail, t.head};
    }
    const std::size_t want = 2 + gen() % 2;
    while (picked.size() < want) {
      const auto& c = cuis[gen() % cuis.size()];
      if (std::find(picked.begin(), picked.end(), c) == picked.end()) picked.push_back(c);
    }
    LinkedSentence s;
    s.text = "Case " + std::to_string(i) + ":";
    for (std::size_t k = 0; k < picked.size(); ++k) {
      s.text += ' ';
      if (k) s.text += fillers[gen() % fillers.size()] + " ";
      const std::string& name = *entities.at(picked[k]).names.begin();
      const std::size_t start = utf8_length(s.text);
      s.text += name;
      s.mentions.push_back({picked[k], start, start + utf8_length(name), name});
    }
    s.text += " .";
    out.push_back(std::move(s));
  }
  return out;
}

// Random instance with ASCII or multi-byte text and two non-overlapping
// mentions.
inline RelationalInstance random_instance(std::mt19937_64& gen, const std::vector<std::string>& relations) {
  static const std::vector<std::string> words{"alpha", "beta",  "gamma", "delta", "épsilon", "ζeta",
                                              "the",   "of",    "and",   "with",  "\"quoted\"", "back\\slash",
                                              "tab\there", "naïve", "κ-opioid", "日本"};
  std::uniform_int_distribution<std::size_t> wd(0, words.size() - 1);
  const std::size_t n = 4 + gen() % 12;
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < n; ++i) toks.push_back(words[wd(gen)]);
  std::size_t i = gen() % n, j = gen() % n;
  while (j == i) j = gen() % n;
  std::string text;
  std::vector<std::size_t> starts;
  for (std::size_t k = 0; k < n; ++k) {
    if (k) text += ' ';
    starts.push_back(utf8_length(text));
    text += toks[k];
  }
  auto mention = [&](std::size_t k, int id) {
    return Mention{cui(id), starts[k], starts[k] + utf8_length(toks[k]), toks[k]};
  };
  RelationalInstance inst;
  inst.text = text;
  inst.head = mention(i, 1 + static_cast<int>(gen() % 50));
  inst.tail = mention(j, 100 + static_cast<int>(gen() % 50));
  inst.relation = relations[gen() % relations.size()];
  return inst;
}

}  // namespace kgds::test
