#pragma once

// Knowledge-to-text alignment.
//
// Related pairs come from the split triples. Unrelated (NA) pairs are
// corruptions of related ones: one side is replaced by another entity such
// that the pair is not related anywhere in the graph (either direction),
// its types form a type pair seen among related pairs, and the substituted
// entity has itself been seen in that role. Pairs are matched against
// entity-linked sentences, frequent or generic mentions are pruned, surface
// pairs shared between splits are removed, and instances are grouped into
// one bag per ordered entity pair.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "kgds/common.hpp"
#include "kgds/corpus.hpp"
#include "kgds/kg_builder.hpp"
#include "kgds/kg_split.hpp"
#include "kgds/registry.hpp"
#include "kgds/rng.hpp"

namespace kgds {

enum class SplitName : std::size_t { kTrain = 0, kValid = 1, kTest = 2 };
inline constexpr std::array<SplitName, 3> kSplits{SplitName::kTrain, SplitName::kValid, SplitName::kTest};

inline std::string to_string(SplitName s) {
  switch (s) {
    case SplitName::kTrain:
      return "train";
    case SplitName::kValid:
      return "valid";
    case SplitName::kTest:
      return "test";
  }
  return "?";
}

inline std::size_t index_of(SplitName s) { return static_cast<std::size_t>(s); }

// Entity types used by the type constraint: fine-grained semantic types or
// coarse semantic groups.
enum class TypeGranularity { kSemanticType, kSemanticGroup };

inline TypeGranularity parse_type_granularity(std::string_view s) {
  if (s == "sty") return TypeGranularity::kSemanticType;
  if (s == "sg") return TypeGranularity::kSemanticGroup;
  throw UsageError("unknown type granularity '" + std::string(s) + "' (expected sty or sg)");
}

inline std::vector<std::string> type_keys(const EntityTable& entities, const std::string& cui, TypeGranularity g) {
  auto it = entities.find(cui);
  if (it == entities.end()) return {};
  if (g == TypeGranularity::kSemanticGroup) return {it->second.group};
  return {it->second.tuis.begin(), it->second.tuis.end()};
}

using PairLabels = std::map<CuiPair, std::string>;
using PairSetOrdered = std::set<CuiPair>;
using PairLookup = std::unordered_set<CuiPair, PairHash>;

struct TypeRoleIndex {
  std::set<std::pair<std::string, std::string>> type_pairs;
  std::set<std::string> head_roles;
  std::set<std::string> tail_roles;
  TypeGranularity granularity = TypeGranularity::kSemanticType;

  bool operator==(const TypeRoleIndex&) const = default;
};

struct PositivePairs {
  PairLabels labels;
  TypeRoleIndex index;
  // Pairs stated with more than one relation; the smallest name is kept.
  std::size_t multi_relation_pairs = 0;
};

struct PairSet {
  PairLabels positives;
  PairSetOrdered negatives;
  SplitName split = SplitName::kTrain;
};

inline PositivePairs build_positive_pairs(const TripleSet& triples, const EntityTable& entities,
                                          TypeGranularity granularity = TypeGranularity::kSemanticType) {
  PositivePairs out;
  out.index.granularity = granularity;
  std::set<CuiPair> conflicted;
  for (const auto& t : triples) {
    CuiPair p{t.head, t.tail};
    auto [it, inserted] = out.labels.emplace(p, t.relation);
    if (!inserted) {
      conflicted.insert(p);
      if (t.relation < it->second) it->second = t.relation;
    }
    out.index.head_roles.insert(t.head);
    out.index.tail_roles.insert(t.tail);
    for (const auto& a : type_keys(entities, t.head, granularity))
      for (const auto& b : type_keys(entities, t.tail, granularity)) out.index.type_pairs.emplace(a, b);
  }
  out.multi_relation_pairs = conflicted.size();
  return out;
}

// Related pairs of the whole graph, closed under reversal.
inline PairLookup symmetric_positive_pairs(std::initializer_list<const TripleSet*> splits) {
  PairLookup out;
  for (const TripleSet* s : splits) {
    for (const auto& t : *s) {
      out.emplace(t.head, t.tail);
      out.emplace(t.tail, t.head);
    }
  }
  return out;
}

// Admissibility test for a candidate unrelated pair (x, y): x != y, the pair
// is unrelated in either direction across all splits, not reserved by
// another split, some type combination is a known type pair, and it is a
// role-respecting corruption of a related pair (x seen as head with y as the
// kept tail, or y seen as tail with x as the kept head).
class NegativeConstraints {
 public:
  NegativeConstraints(const PairLabels& positives, const TypeRoleIndex& index, const PairLookup& global_positives,
                      const EntityTable& entities, const PairLookup* reserved = nullptr)
      : index_(index), global_(global_positives), entities_(entities), reserved_(reserved) {
    for (const auto& [p, r] : positives) {
      positive_heads_.insert(p.first);
      positive_tails_.insert(p.second);
    }
  }

  bool admits(const std::string& x, const std::string& y) const {
    if (x == y) return false;
    CuiPair p{x, y};
    if (global_.count(p)) return false;
    if (reserved_ && reserved_->count(p)) return false;
    const bool head_corruption = positive_tails_.count(y) && index_.head_roles.count(x);
    const bool tail_corruption = positive_heads_.count(x) && index_.tail_roles.count(y);
    if (!head_corruption && !tail_corruption) return false;
    return type_ok(x, y);
  }

  bool type_ok(const std::string& x, const std::string& y) const {
    const auto tx = type_keys(entities_, x, index_.granularity);
    const auto ty = type_keys(entities_, y, index_.granularity);
    for (const auto& a : tx)
      for (const auto& b : ty)
        if (index_.type_pairs.count({a, b})) return true;
    return false;
  }

  const std::set<std::string>& positive_heads() const { return positive_heads_; }
  const std::set<std::string>& positive_tails() const { return positive_tails_; }
  const TypeRoleIndex& index() const { return index_; }

 private:
  const TypeRoleIndex& index_;
  const PairLookup& global_;
  const EntityTable& entities_;
  const PairLookup* reserved_;
  std::set<std::string> positive_heads_;
  std::set<std::string> positive_tails_;
};

struct SampleStats {
  std::size_t attempts = 0;
  std::size_t exhaustive_fill = 0;
  std::size_t shortfall = 0;  // target_count - returned size
};

// Above this many corruption candidates the exhaustive fallback is skipped.
inline constexpr std::size_t kExhaustiveCandidateLimit = 4'000'000;

// Seeded corruption sampling. Random corruptions are tried first; if the
// attempt budget runs out before target_count, the remaining admissible
// corruptions are enumerated (when the space is small enough) and drawn in
// shuffled order. Returns fewer pairs than requested only when the
// admissible set is exhausted or too large to enumerate.
inline PairSetOrdered sample_negative_pairs(const PairLabels& positives, const TypeRoleIndex& index,
                                            const PairLookup& global_positives, const EntityTable& entities,
                                            std::uint64_t seed, std::size_t target_count,
                                            const PairLookup* reserved = nullptr, SampleStats* stats = nullptr) {
  PairSetOrdered out;
  SampleStats st;
  if (target_count == 0 || positives.empty()) {
    st.shortfall = target_count;
    if (stats) *stats = st;
    return out;
  }
  const NegativeConstraints check(positives, index, global_positives, entities, reserved);
  const std::vector<CuiPair> pos = [&] {
    std::vector<CuiPair> v;
    for (const auto& [p, r] : positives) v.push_back(p);
    return v;
  }();
  const std::vector<std::string> heads(index.head_roles.begin(), index.head_roles.end());
  const std::vector<std::string> tails(index.tail_roles.begin(), index.tail_roles.end());

  Rng rng(derive_seed(seed, "align/negatives"));
  const std::size_t budget = 20 * target_count + 1000;
  for (; st.attempts < budget && out.size() < target_count; ++st.attempts) {
    const CuiPair& p = pos[rng.below(pos.size())];
    CuiPair cand;
    if (rng.coin()) {
      if (heads.empty()) continue;
      cand = {heads[rng.below(heads.size())], p.second};
    } else {
      if (tails.empty()) continue;
      cand = {p.first, tails[rng.below(tails.size())]};
    }
    if (check.admits(cand.first, cand.second)) out.insert(std::move(cand));
  }

  if (out.size() < target_count) {
    const std::size_t space = check.positive_tails().size() * heads.size() + check.positive_heads().size() * tails.size();
    if (space <= kExhaustiveCandidateLimit) {
      PairSetOrdered rest;
      for (const auto& y : check.positive_tails())
        for (const auto& x : heads)
          if (check.admits(x, y) && !out.count({x, y})) rest.emplace(x, y);
      for (const auto& x : check.positive_heads())
        for (const auto& y : tails)
          if (check.admits(x, y) && !out.count({x, y})) rest.emplace(x, y);
      std::vector<CuiPair> pool(rest.begin(), rest.end());
      rng.shuffle(pool);
      for (auto& c : pool) {
        if (out.size() >= target_count) break;
        out.insert(std::move(c));
        ++st.exhaustive_fill;
      }
    }
  }
  st.shortfall = target_count - out.size();
  if (stats) *stats = st;
  return out;
}

// ---------------------------------------------------------------------------
// Sentence matching

struct RelationalInstance {
  std::string text;
  Mention head;
  Mention tail;
  std::string relation;
  // Position of the source sentence in its corpus; identifies mention
  // occurrences when counting. Not serialized.
  std::size_t sentence_id = 0;

  CuiPair pair() const { return {head.cui, tail.cui}; }
  bool is_na() const { return relation == kNoRelation; }

  bool operator==(const RelationalInstance& o) const {
    return text == o.text && head == o.head && tail == o.tail && relation == o.relation;
  }
};

namespace detail {

// Instances of one sentence, at most one per ordered CUI pair (earliest
// mention occurrences win).
template <typename Classify>
void match_one(const LinkedSentence& s, std::size_t sentence_id, const Classify& classify,
               std::vector<RelationalInstance>& out) {
  std::set<CuiPair> used;
  for (std::size_t i = 0; i < s.mentions.size(); ++i) {
    for (std::size_t j = 0; j < s.mentions.size(); ++j) {
      const Mention& h = s.mentions[i];
      const Mention& t = s.mentions[j];
      if (i == j || h.cui == t.cui) continue;
      CuiPair p{h.cui, t.cui};
      const std::string* label = classify(p);
      if (!label || used.count(p)) continue;
      used.insert(p);
      out.push_back({s.text, h, t, *label, sentence_id});
    }
  }
}

// Runs `fn(begin, end, out)` over contiguous shards and concatenates the
// shard outputs in order, so the result does not depend on thread count.
template <typename T, typename Fn>
std::vector<T> sharded(std::size_t n, unsigned threads, const Fn& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n / 64))));
  std::vector<std::vector<T>> parts(threads);
  if (threads == 1) {
    fn(0, n, parts[0]);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned k = 0; k < threads; ++k) {
      const std::size_t b = std::min(n, k * chunk), e = std::min(n, b + chunk);
      pool.emplace_back([&, k, b, e] { fn(b, e, parts[k]); });
    }
    for (auto& t : pool) t.join();
  }
  std::vector<T> out;
  for (auto& p : parts) std::move(p.begin(), p.end(), std::back_inserter(out));
  return out;
}

}  // namespace detail

// One instance per (sentence, ordered mention pair) whose CUI pair is a
// related pair (labelled with its relation) or an unrelated pair (NA).
inline std::vector<RelationalInstance> match_sentences(const PairSet& pairs, const std::vector<LinkedSentence>& sentences,
                                                       unsigned threads = 1) {
  const std::string na(kNoRelation);
  auto classify = [&](const CuiPair& p) -> const std::string* {
    if (auto it = pairs.positives.find(p); it != pairs.positives.end()) return &it->second;
    if (pairs.negatives.count(p)) return &na;
    return nullptr;
  };
  return detail::sharded<RelationalInstance>(
      sentences.size(), threads, [&](std::size_t b, std::size_t e, std::vector<RelationalInstance>& out) {
        for (std::size_t i = b; i < e; ++i) detail::match_one(sentences[i], i, classify, out);
      });
}

// Ordered CUI pairs co-mentioned in at least one sentence.
inline PairSetOrdered cooccurring_pairs(const std::vector<LinkedSentence>& sentences) {
  PairSetOrdered out;
  for (const auto& s : sentences)
    for (const auto& h : s.mentions)
      for (const auto& t : s.mentions)
        if (h.cui != t.cui) out.emplace(h.cui, t.cui);
  return out;
}

// ---------------------------------------------------------------------------
// Pruning and overlap removal

using PoolKey = std::pair<std::string, std::string>;  // (semantic type, normalized surface)

struct PruneStats {
  std::size_t removed_instances = 0;
  std::set<PoolKey> pruned_pools;
};

namespace detail {

inline std::vector<PoolKey> mention_pools(const Mention& m, const EntityTable& entities) {
  std::vector<PoolKey> keys;
  const std::string surface = normalize_surface(m.surface);
  auto types = type_keys(entities, m.cui, TypeGranularity::kSemanticType);
  if (types.empty()) types.emplace_back();
  for (auto& t : types) keys.emplace_back(std::move(t), surface);
  return keys;
}

inline bool touches_pool(const RelationalInstance& inst, const std::set<PoolKey>& pools, const EntityTable& entities) {
  for (const Mention* m : {&inst.head, &inst.tail})
    for (const auto& k : mention_pools(*m, entities))
      if (pools.count(k)) return true;
  return false;
}

}  // namespace detail

// Pools with more than `threshold` distinct mention occurrences (sentence,
// span) among the instances, plus every pool whose surface is stoplisted.
inline std::set<PoolKey> pruned_pools(const std::vector<RelationalInstance>& instances, std::size_t threshold,
                                      const Stoplist& stoplist, const EntityTable& entities) {
  if (threshold == 0) throw UsageError("prune threshold must be positive");
  std::map<PoolKey, std::set<std::tuple<std::size_t, std::size_t, std::size_t>>> occurrences;
  for (const auto& inst : instances)
    for (const Mention* m : {&inst.head, &inst.tail})
      for (auto& k : detail::mention_pools(*m, entities))
        occurrences[std::move(k)].emplace(inst.sentence_id, m->start, m->end);
  std::set<PoolKey> out;
  for (const auto& [key, occ] : occurrences)
    if (occ.size() > threshold || stoplist.contains(key.second)) out.insert(key);
  return out;
}

// Mentions are pooled by (semantic type, normalized surface); every instance
// with a head or tail mention in a pruned pool is removed.
inline std::vector<RelationalInstance> prune_mentions(const std::vector<RelationalInstance>& instances,
                                                      std::size_t threshold, const Stoplist& stoplist,
                                                      const EntityTable& entities, PruneStats* stats = nullptr) {
  auto pools = pruned_pools(instances, threshold, stoplist, entities);
  std::vector<RelationalInstance> out;
  out.reserve(instances.size());
  for (const auto& inst : instances)
    if (!detail::touches_pool(inst, pools, entities)) out.push_back(inst);
  if (stats) {
    stats->removed_instances = instances.size() - out.size();
    stats->pruned_pools = std::move(pools);
  }
  return out;
}

using SplitInstances = std::array<std::vector<RelationalInstance>, 3>;

inline std::pair<std::string, std::string> surface_key(const RelationalInstance& inst) {
  return {normalize_surface(inst.head.surface), normalize_surface(inst.tail.surface)};
}

// An ordered (head surface, tail surface) pair may occur in one split only;
// train has priority over valid, valid over test. Returns removals per split.
inline std::array<std::size_t, 3> remove_cross_split_mention_overlap(SplitInstances& splits) {
  std::array<std::size_t, 3> removed{0, 0, 0};
  std::set<std::pair<std::string, std::string>> claimed;
  for (std::size_t s = 0; s < 3; ++s) {
    std::set<std::pair<std::string, std::string>> mine;
    std::vector<RelationalInstance> kept;
    kept.reserve(splits[s].size());
    for (auto& inst : splits[s]) {
      auto key = surface_key(inst);
      if (claimed.count(key)) {
        ++removed[s];
        continue;
      }
      mine.insert(std::move(key));
      kept.push_back(std::move(inst));
    }
    splits[s] = std::move(kept);
    claimed.insert(mine.begin(), mine.end());
  }
  return removed;
}

// ---------------------------------------------------------------------------
// Bags

struct Bag {
  CuiPair pair;
  std::string relation;
  std::vector<RelationalInstance> instances;
};

struct BagAssembly {
  std::vector<Bag> bags;  // sorted by pair
  std::size_t instances = 0;
  std::size_t na_instances = 0;
  double na_fraction() const { return instances ? static_cast<double>(na_instances) / instances : 0.0; }
  double mean_bag_size() const { return bags.empty() ? 0.0 : static_cast<double>(instances) / bags.size(); }
};

inline BagAssembly assemble_bags(const std::vector<RelationalInstance>& instances) {
  std::map<CuiPair, Bag> by_pair;
  BagAssembly out;
  for (const auto& inst : instances) {
    auto [it, inserted] = by_pair.try_emplace(inst.pair());
    Bag& bag = it->second;
    if (inserted) {
      bag.pair = inst.pair();
      bag.relation = inst.relation;
    } else if (bag.relation != inst.relation) {
      throw ConstraintError("conflicting labels for pair (" + bag.pair.first + ", " + bag.pair.second +
                            "): " + bag.relation + " vs " + inst.relation);
    }
    bag.instances.push_back(inst);
    ++out.instances;
    out.na_instances += inst.is_na();
  }
  out.bags.reserve(by_pair.size());
  for (auto& [p, b] : by_pair) out.bags.push_back(std::move(b));
  return out;
}

// ---------------------------------------------------------------------------
// Whole-corpus alignment

struct AlignConfig {
  double na_target = 0.90;
  std::size_t prune_threshold = 10000;
  Stoplist stoplist = Stoplist::builtin();
  TypeGranularity granularity = TypeGranularity::kSemanticType;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SplitAlignStats {
  std::size_t positive_pairs = 0;
  std::size_t positive_pairs_reserved_elsewhere = 0;
  std::size_t multi_relation_pairs = 0;
  std::size_t candidate_negative_pairs = 0;
  std::size_t selected_negative_pairs = 0;
  std::size_t positive_instances = 0;
  std::size_t negative_instances = 0;
  std::size_t pruned_instances = 0;
  std::size_t overlap_removed = 0;
  double na_fraction = 0.0;
};

struct AlignResult {
  SplitInstances instances;
  std::array<SplitAlignStats, 3> stats;
  std::array<PairSet, 3> pairs;
};

// Full alignment over the three splits.
//
// Unrelated pairs are drawn from the admissible corruptions that co-occur in
// at least one sentence, in seeded random order, until the split's NA
// instance fraction reaches na_target (or candidates run out). Pruning is
// applied to the candidate pool of all splits together; then related
// instances are de-overlapped across splits, and NA pairs are accepted only
// with instances whose surface pair is not used by another split.
inline AlignResult align_corpus(const SplitTriples& split, const std::vector<LinkedSentence>& sentences,
                                const EntityTable& entities, const AlignConfig& cfg) {
  if (!(cfg.na_target >= 0.0 && cfg.na_target < 1.0)) throw UsageError("na_target must lie in [0, 1)");
  AlignResult res;
  const std::array<const TripleSet*, 3> triples{&split.train, &split.valid, &split.test};
  const PairLookup global = symmetric_positive_pairs({&split.train, &split.valid, &split.test});
  const PairSetOrdered cooccur = cooccurring_pairs(sentences);

  // Related pairs, each ordered pair owned by the first split stating it.
  std::array<PositivePairs, 3> positives;
  PairLookup owned;
  for (std::size_t s = 0; s < 3; ++s) {
    positives[s] = build_positive_pairs(*triples[s], entities, cfg.granularity);
    res.stats[s].multi_relation_pairs = positives[s].multi_relation_pairs;
    res.pairs[s].split = kSplits[s];
    for (const auto& [p, r] : positives[s].labels) {
      if (owned.count(p)) {
        ++res.stats[s].positive_pairs_reserved_elsewhere;
        continue;
      }
      owned.insert(p);
      res.pairs[s].positives.emplace(p, r);
    }
    res.stats[s].positive_pairs = res.pairs[s].positives.size();
  }

  // Candidate pools: every admissible unrelated pair that has text support.
  SplitInstances pool;
  for (std::size_t s = 0; s < 3; ++s) {
    NegativeConstraints check(res.pairs[s].positives, positives[s].index, global, entities);
    PairSet candidates{res.pairs[s].positives, {}, kSplits[s]};
    for (const auto& p : cooccur)
      if (check.admits(p.first, p.second)) candidates.negatives.insert(p);
    res.stats[s].candidate_negative_pairs = candidates.negatives.size();
    pool[s] = match_sentences(candidates, sentences, cfg.threads);
  }

  // Prune over the union of the pools.
  {
    std::vector<RelationalInstance> all;
    for (const auto& p : pool) all.insert(all.end(), p.begin(), p.end());
    const auto pools = pruned_pools(all, cfg.prune_threshold, cfg.stoplist, entities);
    for (std::size_t s = 0; s < 3; ++s) {
      const std::size_t before = pool[s].size();
      std::erase_if(pool[s], [&](const RelationalInstance& i) { return detail::touches_pool(i, pools, entities); });
      res.stats[s].pruned_instances = before - pool[s].size();
    }
  }

  // Related instances first, de-overlapped with train > valid > test.
  SplitInstances related;
  for (std::size_t s = 0; s < 3; ++s)
    for (const auto& inst : pool[s])
      if (!inst.is_na()) related[s].push_back(inst);
  auto removed = remove_cross_split_mention_overlap(related);
  for (std::size_t s = 0; s < 3; ++s) res.stats[s].overlap_removed = removed[s];

  // Surface pairs in use, by owning split.
  std::map<std::pair<std::string, std::string>, std::size_t> surface_owner;
  for (std::size_t s = 0; s < 3; ++s)
    for (const auto& inst : related[s]) surface_owner.emplace(surface_key(inst), s);

  // NA selection, one accepted pair per split per round so that no split
  // claims the shared surface pairs first.
  struct Cursor {
    std::map<CuiPair, std::vector<const RelationalInstance*>> by_pair;
    std::vector<CuiPair> order;
    std::size_t next = 0, n_pos = 0, n_neg = 0;
  };
  std::array<Cursor, 3> cur;
  for (std::size_t s = 0; s < 3; ++s) {
    for (const auto& inst : pool[s])
      if (inst.is_na()) cur[s].by_pair[inst.pair()].push_back(&inst);
    cur[s].order.reserve(cur[s].by_pair.size());
    for (const auto& [p, v] : cur[s].by_pair) cur[s].order.push_back(p);
    Rng rng(derive_seed(cfg.seed, "align/select/" + to_string(kSplits[s])));
    rng.shuffle(cur[s].order);
    res.instances[s] = related[s];
    cur[s].n_pos = related[s].size();
  }
  auto reached = [&](const Cursor& c) {
    return c.n_pos == 0 ||
           static_cast<double>(c.n_neg) >= cfg.na_target * static_cast<double>(c.n_pos + c.n_neg);
  };
  PairLookup taken_negatives;
  for (bool progress = true; progress;) {
    progress = false;
    for (std::size_t s = 0; s < 3; ++s) {
      auto& c = cur[s];
      while (!reached(c) && c.next < c.order.size()) {
        const auto& p = c.order[c.next++];
        if (taken_negatives.count(p)) continue;
        std::vector<const RelationalInstance*> usable;
        for (const auto* inst : c.by_pair[p]) {
          auto it = surface_owner.find(surface_key(*inst));
          if (it == surface_owner.end() || it->second == s) usable.push_back(inst);
        }
        if (usable.empty()) continue;
        taken_negatives.insert(p);
        res.pairs[s].negatives.insert(p);
        for (const auto* inst : usable) {
          surface_owner.emplace(surface_key(*inst), s);
          res.instances[s].push_back(*inst);
          ++c.n_neg;
        }
        progress = true;
        break;
      }
    }
  }

  for (std::size_t s = 0; s < 3; ++s) {
    auto& out = res.instances[s];
    res.stats[s].selected_negative_pairs = res.pairs[s].negatives.size();
    res.stats[s].positive_instances = cur[s].n_pos;
    res.stats[s].negative_instances = cur[s].n_neg;
    res.stats[s].na_fraction = out.empty() ? 0.0 : static_cast<double>(cur[s].n_neg) / out.size();

    // Canonical instance order: by sentence, then mention offsets.
    std::sort(out.begin(), out.end(), [](const RelationalInstance& a, const RelationalInstance& b) {
      return std::tie(a.sentence_id, a.head.start, a.tail.start) < std::tie(b.sentence_id, b.head.start, b.tail.start);
    });
  }
  return res;
}

}  // namespace kgds
