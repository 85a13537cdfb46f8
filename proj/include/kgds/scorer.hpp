#pragma once

// Corpus-level relation extraction metrics over ranked (pair, relation)
// predictions: precision/recall curve, average precision, P@k, micro and
// macro F1.
//
// AUC is average precision: the step-wise sum of precision over recall
// increments, i.e. sum of precision at each correct prediction / |gold|.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "kgds/common.hpp"

namespace kgds {

struct Prediction {
  CuiPair pair;
  std::string relation;
  double score = 0.0;
};

using Fact = std::pair<CuiPair, std::string>;
using GoldFacts = std::set<Fact>;

// NA predictions are dropped; the rest are sorted by descending score with
// ties broken by (pair, relation) ascending.
inline std::vector<Prediction> rank_predictions(const std::vector<Prediction>& preds) {
  std::vector<Prediction> out;
  out.reserve(preds.size());
  for (const auto& p : preds)
    if (p.relation != kNoRelation) out.push_back(p);
  std::sort(out.begin(), out.end(), [](const Prediction& a, const Prediction& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.pair, a.relation) < std::tie(b.pair, b.relation);
  });
  return out;
}

namespace detail {

// hit[i] is true when ranked[i] is a gold fact not already matched higher up.
inline std::vector<bool> hits(const std::vector<Prediction>& ranked, const GoldFacts& gold) {
  std::vector<bool> out(ranked.size(), false);
  std::set<Fact> matched;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    Fact f{ranked[i].pair, ranked[i].relation};
    if (gold.count(f) && matched.insert(f).second) out[i] = true;
  }
  return out;
}

}  // namespace detail

struct PrPoint {
  double precision = 0.0;
  double recall = 0.0;
};

inline std::vector<PrPoint> pr_curve(const std::vector<Prediction>& preds, const GoldFacts& gold) {
  if (gold.empty()) throw DataError("pr_curve: gold facts are empty");
  const auto ranked = rank_predictions(preds);
  const auto hit = detail::hits(ranked, gold);
  std::vector<PrPoint> curve;
  curve.reserve(ranked.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    h += hit[i];
    curve.push_back({static_cast<double>(h) / (i + 1), static_cast<double>(h) / gold.size()});
  }
  return curve;
}

// Sum of precision times recall increment. `empty_warning` is set when the
// curve is empty and 0 is returned.
inline double auc(const std::vector<PrPoint>& curve, bool* empty_warning = nullptr) {
  if (empty_warning) *empty_warning = curve.empty();
  double area = 0.0, prev_recall = 0.0;
  for (const auto& p : curve) {
    area += p.precision * (p.recall - prev_recall);
    prev_recall = p.recall;
  }
  return area;
}

inline double precision_at_k(const std::vector<Prediction>& preds, const GoldFacts& gold, std::size_t k) {
  if (k == 0) throw UsageError("precision_at_k: k must be >= 1");
  const auto ranked = rank_predictions(preds);
  if (ranked.empty()) return 0.0;
  const auto hit = detail::hits(ranked, gold);
  const std::size_t n = std::min(k, ranked.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < n; ++i) h += hit[i];
  return static_cast<double>(h) / n;
}

struct ThresholdPolicy {
  enum class Kind { kMaxMicroF1, kFixed } kind = Kind::kMaxMicroF1;
  double threshold = 0.0;  // used by kFixed: accept score >= threshold

  static ThresholdPolicy fixed(double t) { return {Kind::kFixed, t}; }
};

struct F1Result {
  double micro = 0.0;
  double macro = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double threshold = 0.0;  // lowest accepted score
  std::size_t accepted = 0;
};

// Micro F1 over all accepted decisions; macro F1 averages per-relation F1
// over the relations present in gold. The max-micro-F1 policy accepts the
// top-i ranked predictions for the i that maximizes micro F1 (smallest i on
// ties).
inline F1Result f1_scores(const std::vector<Prediction>& preds, const GoldFacts& gold,
                          const ThresholdPolicy& policy = {}) {
  F1Result res;
  const auto ranked = rank_predictions(preds);
  const auto hit = detail::hits(ranked, gold);

  std::size_t cut = 0;
  if (policy.kind == ThresholdPolicy::Kind::kFixed) {
    while (cut < ranked.size() && ranked[cut].score >= policy.threshold) ++cut;
    res.threshold = policy.threshold;
  } else {
    double best = -1.0;
    std::size_t h = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      h += hit[i];
      const double f = gold.empty() ? 0.0 : 2.0 * h / static_cast<double>(i + 1 + gold.size());
      if (f > best) {
        best = f;
        cut = i + 1;
      }
    }
    if (cut) res.threshold = ranked[cut - 1].score;
  }
  res.accepted = cut;

  std::size_t tp = 0;
  std::map<std::string, std::size_t> tp_r, pred_r, gold_r;
  for (const auto& [pair, rel] : gold) ++gold_r[rel];
  for (std::size_t i = 0; i < cut; ++i) {
    ++pred_r[ranked[i].relation];
    if (hit[i]) {
      ++tp;
      ++tp_r[ranked[i].relation];
    }
  }
  auto f1 = [](double p, double r) { return p + r > 0 ? 2 * p * r / (p + r) : 0.0; };
  res.precision = cut ? static_cast<double>(tp) / cut : 0.0;
  res.recall = gold.empty() ? 0.0 : static_cast<double>(tp) / gold.size();
  res.micro = f1(res.precision, res.recall);
  double sum = 0.0;
  for (const auto& [rel, g] : gold_r) {
    const double p = pred_r[rel] ? static_cast<double>(tp_r[rel]) / pred_r[rel] : 0.0;
    sum += f1(p, static_cast<double>(tp_r[rel]) / g);
  }
  res.macro = gold_r.empty() ? 0.0 : sum / gold_r.size();
  return res;
}

inline constexpr std::array<std::size_t, 5> kReportedK{100, 200, 300, 1000, 2000};

struct ScoreReport {
  double auc = 0.0;
  std::vector<std::pair<std::size_t, double>> precision_at;
  F1Result f1;
  std::size_t predictions = 0;
  std::size_t gold = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["predictions"] = predictions;
    j["gold_facts"] = gold;
    j["auc"] = auc;
    for (const auto& [k, v] : precision_at) j["p_at_k"][std::to_string(k)] = v;
    j["micro_f1"] = f1.micro;
    j["macro_f1"] = f1.macro;
    j["precision"] = f1.precision;
    j["recall"] = f1.recall;
    j["threshold"] = f1.threshold;
    return j;
  }
};

inline ScoreReport score(const std::vector<Prediction>& preds, const GoldFacts& gold,
                         const ThresholdPolicy& policy = {}) {
  ScoreReport r;
  r.predictions = rank_predictions(preds).size();
  r.gold = gold.size();
  r.auc = auc(pr_curve(preds, gold));
  for (auto k : kReportedK) r.precision_at.emplace_back(k, precision_at_k(preds, gold, k));
  r.f1 = f1_scores(preds, gold, policy);
  return r;
}

// head<TAB>tail<TAB>relation<TAB>score
inline std::vector<Prediction> read_predictions(const std::string& path) {
  auto in = open_input(path);
  std::vector<Prediction> out;
  std::string line;
  std::size_t lineno = 0;
  while (read_line(in, line)) {
    ++lineno;
    if (trim(line).empty() || line[0] == '#') continue;
    const auto cols = split_view(line, '\t');
    const std::string where = path + ":" + std::to_string(lineno);
    if (cols.size() != 4) throw DataError(where + ": expected head, tail, relation, score");
    Prediction p{{std::string(cols[0]), std::string(cols[1])}, std::string(cols[2]), 0.0};
    try {
      std::size_t used = 0;
      p.score = std::stod(std::string(cols[3]), &used);
      if (used != cols[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw DataError(where + ": score is not a number");
    }
    if (!std::isfinite(p.score)) throw DataError(where + ": score is not finite");
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace kgds
