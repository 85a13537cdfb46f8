#pragma once

// Train/valid/test splitting of the knowledge graph.
//
// Transductive: every entity of a validation or test triple also occurs in a
// training triple. Inductive: every validation or test triple has at least
// one entity that never occurs in training.
//
// Both procedures sort their input before drawing from the seeded generator,
// so the result depends only on (graph, ratios, seed).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "kgds/common.hpp"
#include "kgds/registry.hpp"
#include "kgds/rng.hpp"

namespace kgds {

enum class SplitMode { kTransductive, kInductive };

inline std::string to_string(SplitMode m) { return m == SplitMode::kInductive ? "inductive" : "transductive"; }

inline SplitMode parse_split_mode(std::string_view s) {
  if (s == "inductive") return SplitMode::kInductive;
  if (s == "transductive") return SplitMode::kTransductive;
  throw UsageError("unknown split mode '" + std::string(s) + "'");
}

struct SplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;

  void validate() const {
    for (double r : {train, valid, test})
      if (!(r > 0.0 && r < 1.0)) throw UsageError("split ratios must lie in (0, 1)");
    if (std::abs(train + valid + test - 1.0) > 1e-9) throw UsageError("split ratios must sum to 1");
  }
};

// "0.7,0.1,0.2"
inline SplitRatios parse_ratios(std::string_view s) {
  const auto parts = split_view(s, ',');
  if (parts.size() != 3) throw UsageError("ratios must be three comma-separated fractions");
  SplitRatios r;
  try {
    r.train = std::stod(std::string(parts[0]));
    r.valid = std::stod(std::string(parts[1]));
    r.test = std::stod(std::string(parts[2]));
  } catch (const std::exception&) {
    throw UsageError("ratios must be numeric: '" + std::string(s) + "'");
  }
  r.validate();
  return r;
}

inline constexpr double kRatioTolerance = 0.02;
inline constexpr int kMaxSearchIterations = 50;

using CuiSet = std::set<std::string>;

struct SplitTriples {
  TripleSet train, valid, test;
  CuiSet train_entities, valid_entities, test_entities;
  SplitMode mode = SplitMode::kTransductive;
  std::uint64_t seed = 0;
  SplitRatios ratios;

  bool operator==(const SplitTriples& o) const {
    return train == o.train && valid == o.valid && test == o.test && train_entities == o.train_entities &&
           valid_entities == o.valid_entities && test_entities == o.test_entities && mode == o.mode;
  }
};

inline CuiSet entities_of(const TripleSet& triples) {
  CuiSet out;
  for (const auto& t : triples) {
    out.insert(t.head);
    out.insert(t.tail);
  }
  return out;
}

namespace detail {

inline void fill_entity_sets(SplitTriples& s) {
  s.train_entities = entities_of(s.train);
  s.valid_entities = entities_of(s.valid);
  s.test_entities = entities_of(s.test);
}

inline double max_ratio_deviation(std::size_t train, std::size_t valid, std::size_t test, const SplitRatios& r) {
  const double n = static_cast<double>(train + valid + test);
  return std::max({std::abs(train / n - r.train), std::abs(valid / n - r.valid), std::abs(test / n - r.test)});
}

}  // namespace detail

inline SplitTriples split_transductive(const TripleSet& kg, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  if (kg.empty()) throw ConstraintError("transductive split: knowledge graph is empty");

  std::vector<const Triple*> order;
  order.reserve(kg.size());
  for (const auto& t : kg) order.push_back(&t);
  Rng rng(derive_seed(seed, "split/transductive"));
  rng.shuffle(order);

  const std::size_t n = order.size();
  const auto n_valid = static_cast<std::size_t>(std::llround(n * ratios.valid));
  const auto n_test = static_cast<std::size_t>(std::llround(n * ratios.test));
  const std::size_t n_train = n - std::min(n, n_valid + n_test);

  // 0 = train, 1 = valid, 2 = test, indexed by position in `order`.
  std::vector<int> side(n, 0);
  for (std::size_t i = n_train; i < n; ++i) side[i] = (i < n_train + n_valid) ? 1 : 2;

  // Training triples per entity; a self-loop counts once.
  std::unordered_map<std::string, std::size_t> train_degree;
  auto add = [&](const Triple& t) {
    ++train_degree[t.head];
    if (t.tail != t.head) ++train_degree[t.tail];
  };
  for (std::size_t i = 0; i < n; ++i)
    if (side[i] == 0) add(*order[i]);

  // Move back evaluation triples that mention an entity unseen in training.
  // Moving only adds training entities, so the loop reaches a fixpoint.
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (side[i] == 0) continue;
      const Triple& t = *order[i];
      if (train_degree.count(t.head) && train_degree.count(t.tail)) continue;
      side[i] = 0;
      add(t);
      moved = true;
    }
  }

  // Refill the evaluation splits from training triples whose endpoints both
  // stay covered by another training triple.
  std::size_t have_valid = 0, have_test = 0;
  for (int s : side) {
    have_valid += s == 1;
    have_test += s == 2;
  }
  for (std::size_t j = n; j-- > 0 && (have_valid < n_valid || have_test < n_test);) {
    if (side[j] != 0) continue;
    const Triple& t = *order[j];
    if (train_degree[t.head] < 2 || train_degree[t.tail] < 2) continue;
    --train_degree[t.head];
    if (t.tail != t.head) --train_degree[t.tail];
    // Fill whichever split lags its target more (relative deficit).
    const double dv = n_valid ? 1.0 - static_cast<double>(have_valid) / n_valid : 0.0;
    const double dt = n_test ? 1.0 - static_cast<double>(have_test) / n_test : 0.0;
    if (have_valid < n_valid && (dv >= dt || have_test >= n_test)) {
      side[j] = 1;
      ++have_valid;
    } else {
      side[j] = 2;
      ++have_test;
    }
  }

  SplitTriples out;
  out.mode = SplitMode::kTransductive;
  out.seed = seed;
  out.ratios = ratios;
  for (std::size_t i = 0; i < n; ++i) {
    (side[i] == 0 ? out.train : side[i] == 1 ? out.valid : out.test).insert(*order[i]);
  }
  detail::fill_entity_sets(out);
  for (const CuiSet* s : {&out.valid_entities, &out.test_entities})
    for (const auto& e : *s)
      if (!out.train_entities.count(e))
        throw ConstraintError("transductive split: entity coverage violated for " + e);
  return out;
}

// Inductive split: entities are shuffled and a prefix of the order becomes
// the unseen pool. Training keeps the triples entirely outside the pool; the
// triples touching it are divided between validation and test. The pool size
// is scanned for the closest training fraction; a fresh entity order is drawn
// until all three fractions are within kRatioTolerance of the targets.
inline SplitTriples split_inductive(const TripleSet& kg, const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  if (kg.empty()) throw ConstraintError("inductive split: knowledge graph is empty");

  const CuiSet entity_set = entities_of(kg);
  std::vector<std::string> entities(entity_set.begin(), entity_set.end());
  std::vector<const Triple*> triples;
  triples.reserve(kg.size());
  for (const auto& t : kg) triples.push_back(&t);

  const std::size_t n = triples.size();
  Rng rng(derive_seed(seed, "split/inductive"));
  double best_dev = 2.0;
  std::size_t best_counts[3] = {0, 0, 0};

  for (int iter = 0; iter < kMaxSearchIterations; ++iter) {
    rng.shuffle(entities);
    std::unordered_map<std::string, std::size_t> pos;
    pos.reserve(entities.size());
    for (std::size_t i = 0; i < entities.size(); ++i) pos[entities[i]] = i;

    // A triple stays in training iff min(pos) >= pool size.
    std::vector<std::size_t> min_pos(n);
    for (std::size_t i = 0; i < n; ++i) min_pos[i] = std::min(pos[triples[i]->head], pos[triples[i]->tail]);
    std::vector<std::size_t> sorted_min = min_pos;
    std::sort(sorted_min.begin(), sorted_min.end());

    // Scan pool sizes; train_count(k) = #{i : min_pos[i] >= k}.
    std::size_t best_k = 0;
    double best_gap = 2.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k <= entities.size(); ++k) {
      while (idx < n && sorted_min[idx] < k) ++idx;
      const double gap = std::abs(static_cast<double>(n - idx) / n - ratios.train);
      if (gap < best_gap) {
        best_gap = gap;
        best_k = k;
      }
    }

    std::vector<const Triple*> eval;
    SplitTriples out;
    for (std::size_t i = 0; i < n; ++i) {
      if (min_pos[i] >= best_k)
        out.train.insert(*triples[i]);
      else
        eval.push_back(triples[i]);
    }
    rng.shuffle(eval);
    const auto n_valid =
        static_cast<std::size_t>(std::llround(eval.size() * ratios.valid / (ratios.valid + ratios.test)));
    for (std::size_t i = 0; i < eval.size(); ++i) (i < n_valid ? out.valid : out.test).insert(*eval[i]);

    const double dev = out.train.empty()
                           ? 2.0
                           : detail::max_ratio_deviation(out.train.size(), out.valid.size(), out.test.size(), ratios);
    if (dev < best_dev) {
      best_dev = dev;
      best_counts[0] = out.train.size();
      best_counts[1] = out.valid.size();
      best_counts[2] = out.test.size();
    }
    if (dev <= kRatioTolerance + 1e-12) {
      out.mode = SplitMode::kInductive;
      out.seed = seed;
      out.ratios = ratios;
      detail::fill_entity_sets(out);
      return out;
    }
  }

  std::ostringstream msg;
  msg << "inductive split: ratio targets unreachable within " << kRatioTolerance * 100 << " pp after "
      << kMaxSearchIterations << " iterations; closest achievable "
      << static_cast<double>(best_counts[0]) / n << "/" << static_cast<double>(best_counts[1]) / n << "/"
      << static_cast<double>(best_counts[2]) / n << " (" << best_counts[0] << "/" << best_counts[1] << "/"
      << best_counts[2] << " triples)";
  throw ConstraintError(msg.str());
}

inline SplitTriples split_kg(const TripleSet& kg, SplitMode mode, const SplitRatios& ratios, std::uint64_t seed) {
  return mode == SplitMode::kInductive ? split_inductive(kg, ratios, seed) : split_transductive(kg, ratios, seed);
}

// ---------------------------------------------------------------------------
// Verification

struct OverlapCounts {
  std::size_t train_valid = 0;
  std::size_t train_test = 0;
  std::size_t valid_test = 0;
  std::size_t total() const { return train_valid + train_test + valid_test; }
};

struct SplitReport {
  std::string mode;
  std::size_t train = 0, valid = 0, test = 0;
  OverlapCounts direct;
  OverlapCounts inverse_aware;
  // Transductive: evaluation entities missing from training.
  // Inductive: evaluation triples whose entities all occur in training.
  std::size_t coverage_violations = 0;
  // Declared entity sets that disagree with the triples they summarize.
  std::size_t entity_set_mismatches = 0;
  bool passed = false;

  nlohmann::ordered_json to_json() const {
    auto counts = [](const OverlapCounts& c) {
      return nlohmann::ordered_json{
          {"train_valid", c.train_valid}, {"train_test", c.train_test}, {"valid_test", c.valid_test}};
    };
    return {{"mode", mode},
            {"sizes", {{"train", train}, {"valid", valid}, {"test", test}}},
            {"direct_overlap", counts(direct)},
            {"inverse_aware_overlap", counts(inverse_aware)},
            {"coverage_violations", coverage_violations},
            {"entity_set_mismatches", entity_set_mismatches},
            {"passed", passed}};
  }
};

namespace detail {

inline std::size_t intersection_size(const TripleSet& a, const TripleSet& b) {
  std::size_t n = 0;
  const TripleSet& small = a.size() <= b.size() ? a : b;
  const TripleSet& large = a.size() <= b.size() ? b : a;
  for (const auto& t : small) n += large.count(t);
  return n;
}

inline TripleSet canonical_forms(const TripleSet& s, const RelationCanonMap& canon) {
  TripleSet out;
  for (const auto& t : s) out.insert(canon.to_canonical(t));
  return out;
}

}  // namespace detail

inline SplitReport verify_split(const SplitTriples& s, const RelationCanonMap& canon) {
  SplitReport r;
  r.mode = to_string(s.mode);
  r.train = s.train.size();
  r.valid = s.valid.size();
  r.test = s.test.size();
  r.direct = {detail::intersection_size(s.train, s.valid), detail::intersection_size(s.train, s.test),
              detail::intersection_size(s.valid, s.test)};
  const auto ct = detail::canonical_forms(s.train, canon);
  const auto cv = detail::canonical_forms(s.valid, canon);
  const auto ce = detail::canonical_forms(s.test, canon);
  r.inverse_aware = {detail::intersection_size(ct, cv), detail::intersection_size(ct, ce),
                     detail::intersection_size(cv, ce)};

  const CuiSet train_entities = entities_of(s.train);
  r.entity_set_mismatches = (train_entities != s.train_entities) + (entities_of(s.valid) != s.valid_entities) +
                            (entities_of(s.test) != s.test_entities);
  for (const TripleSet* eval : {&s.valid, &s.test}) {
    for (const auto& t : *eval) {
      const bool head_seen = train_entities.count(t.head) != 0;
      const bool tail_seen = train_entities.count(t.tail) != 0;
      if (s.mode == SplitMode::kTransductive)
        r.coverage_violations += !head_seen + !tail_seen;
      else
        r.coverage_violations += head_seen && tail_seen;
    }
  }
  r.passed = r.direct.total() == 0 && r.inverse_aware.total() == 0 && r.coverage_violations == 0 &&
             r.entity_set_mismatches == 0;
  return r;
}

}  // namespace kgds
