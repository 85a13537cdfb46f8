#include <gtest/gtest.h>

#include <random>

#include "kgds/scorer.hpp"
#include "support.hpp"

namespace kgds {
namespace {

Prediction pred(int h, int t, const std::string& r, double s) { return {{test::cui(h), test::cui(t)}, r, s}; }
Fact fact(int h, int t, const std::string& r) { return {{test::cui(h), test::cui(t)}, r}; }

// preds ranked [hit, miss, hit], |gold| = 2
const std::vector<Prediction> kWorked{pred(1, 2, "cause_of", 0.9), pred(3, 4, "cause_of", 0.8),
                                      pred(5, 6, "focus_of", 0.7)};
const GoldFacts kWorkedGold{fact(1, 2, "cause_of"), fact(5, 6, "focus_of")};

TEST(PrCurve, WorkedExample) {
  const auto c = pr_curve(kWorked, kWorkedGold);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_DOUBLE_EQ(c[0].precision, 1.0);
  EXPECT_DOUBLE_EQ(c[0].recall, 0.5);
  EXPECT_DOUBLE_EQ(c[1].precision, 0.5);
  EXPECT_DOUBLE_EQ(c[1].recall, 0.5);
  EXPECT_NEAR(c[2].precision, 2.0 / 3, 1e-12);
  EXPECT_DOUBLE_EQ(c[2].recall, 1.0);
  EXPECT_NEAR(auc(c), 0.833, 0.001);
  EXPECT_NEAR(auc(c), (1.0 + 2.0 / 3) / 2, 1e-12);
}

TEST(PrCurve, ReversedRanking) {
  // [miss, hit, hit]: AP = (1/2 + 2/3) / 2
  const std::vector<Prediction> p{pred(3, 4, "cause_of", 0.9), pred(1, 2, "cause_of", 0.8), pred(5, 6, "focus_of", 0.7)};
  EXPECT_NEAR(auc(pr_curve(p, kWorkedGold)), 0.583, 0.001);
  // [miss, miss, hit] with |gold| = 2: AP = (1/3) / 2
  const std::vector<Prediction> q{pred(3, 4, "cause_of", 0.9), pred(7, 8, "cause_of", 0.8), pred(5, 6, "focus_of", 0.7)};
  EXPECT_NEAR(auc(pr_curve(q, kWorkedGold)), 1.0 / 6, 1e-12);
}

TEST(PrCurve, EmptyInputs) {
  bool warned = false;
  EXPECT_EQ(auc(pr_curve({}, kWorkedGold), &warned), 0.0);
  EXPECT_TRUE(warned);
  EXPECT_THROW(pr_curve(kWorked, {}), DataError);
}

TEST(PrCurve, PerfectRanking) {
  std::vector<Prediction> p;
  GoldFacts g;
  for (int i = 0; i < 50; ++i) {
    p.push_back(pred(i, i + 1000, "cause_of", 100.0 - i));
    g.insert(fact(i, i + 1000, "cause_of"));
  }
  const auto r = score(p, g);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_DOUBLE_EQ(precision_at_k(p, g, 10), 1.0);
  EXPECT_DOUBLE_EQ(precision_at_k(p, g, 100), 1.0);
  EXPECT_DOUBLE_EQ(r.f1.micro, 1.0);
  EXPECT_DOUBLE_EQ(r.f1.macro, 1.0);
}

TEST(PrecisionAtK, Basics) {
  // [hit, hit, miss, hit, miss]
  const std::vector<Prediction> p{pred(1, 2, "cause_of", 5), pred(2, 3, "cause_of", 4), pred(3, 4, "cause_of", 3),
                                  pred(4, 5, "cause_of", 2), pred(5, 6, "cause_of", 1)};
  const GoldFacts g{fact(1, 2, "cause_of"), fact(2, 3, "cause_of"), fact(4, 5, "cause_of")};
  EXPECT_DOUBLE_EQ(precision_at_k(p, g, 4), 0.75);
  EXPECT_DOUBLE_EQ(precision_at_k(p, g, 1000), 0.6);  // capped at |preds|
  EXPECT_THROW(precision_at_k(p, g, 0), UsageError);
}

TEST(Ranking, TiesBrokenByPairThenRelationAndNaDropped) {
  const std::vector<Prediction> p{pred(2, 1, "cause_of", 1.0), pred(1, 2, "focus_of", 1.0), pred(1, 2, "cause_of", 1.0),
                                  pred(9, 9, "NA", 5.0)};
  const auto r = rank_predictions(p);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0].pair, (CuiPair{test::cui(1), test::cui(2)}));
  EXPECT_EQ(r[0].relation, "cause_of");
  EXPECT_EQ(r[1].relation, "focus_of");
  EXPECT_EQ(r[2].pair.first, test::cui(2));
}

TEST(F1, MacroOverGoldRelations) {
  // cause_of: 1 of 1 gold found with 1 prediction -> F1 1.0
  // focus_of: 1 of 2 gold found with 1 prediction -> P 1, R 0.5, F1 2/3
  // interprets: 0 of 1 gold -> F1 0
  const std::vector<Prediction> p{pred(1, 2, "cause_of", 0.9), pred(3, 4, "focus_of", 0.8)};
  const GoldFacts g{fact(1, 2, "cause_of"), fact(3, 4, "focus_of"), fact(5, 6, "focus_of"), fact(7, 8, "interprets")};
  const auto f = f1_scores(p, g);
  EXPECT_EQ(f.accepted, 2u);
  EXPECT_NEAR(f.macro, (1.0 + 2.0 / 3 + 0.0) / 3, 1e-12);
  EXPECT_NEAR(f.micro, 2 * 1.0 * 0.5 / 1.5, 1e-12);
}

TEST(F1, MacroExampleThreeQuarters) {
  // Two relations; one perfect, one at P = R = 0.5 -> macro (1 + 0.5) / 2.
  const std::vector<Prediction> p{pred(1, 2, "cause_of", 0.9), pred(3, 4, "focus_of", 0.8), pred(9, 9, "focus_of", 0.7)};
  const GoldFacts g{fact(1, 2, "cause_of"), fact(3, 4, "focus_of"), fact(5, 6, "focus_of")};
  const auto f = f1_scores(p, g, ThresholdPolicy::fixed(0.0));
  EXPECT_EQ(f.accepted, 3u);
  EXPECT_NEAR(f.macro, 0.75, 1e-12);
}

TEST(F1, MaxMicroCutAndFixedThreshold) {
  // [hit, miss, miss, hit]: F1 at cut 1 = 2/3 (|gold| = 2), at cut 4 = 2/3; smallest cut wins.
  const std::vector<Prediction> p{pred(1, 2, "cause_of", 4), pred(3, 4, "cause_of", 3), pred(5, 6, "cause_of", 2),
                                  pred(7, 8, "cause_of", 1)};
  const GoldFacts g{fact(1, 2, "cause_of"), fact(7, 8, "cause_of")};
  const auto best = f1_scores(p, g);
  EXPECT_EQ(best.accepted, 1u);
  EXPECT_DOUBLE_EQ(best.threshold, 4.0);
  EXPECT_NEAR(best.micro, 2.0 / 3, 1e-12);
  const auto fixed = f1_scores(p, g, ThresholdPolicy::fixed(2.5));
  EXPECT_EQ(fixed.accepted, 2u);
  EXPECT_NEAR(fixed.micro, 0.5, 1e-12);
}

TEST(Auc, InvariantUnderPositiveScaling) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int round = 0; round < 100; ++round) {
    std::vector<Prediction> p;
    GoldFacts g;
    const int n = 5 + static_cast<int>(gen() % 60);
    for (int i = 0; i < n; ++i) {
      // Coarse scores force ties.
      p.push_back(pred(i, i + 500, "cause_of", std::floor(u(gen) * 10) / 10));
      if (gen() % 3 == 0) g.insert(fact(i, i + 500, "cause_of"));
    }
    g.insert(fact(9999, 9998, "cause_of"));
    const double c = std::exp(u(gen) * 10 - 5);
    auto scaled = p;
    for (auto& x : scaled) x.score *= c;
    EXPECT_DOUBLE_EQ(auc(pr_curve(scaled, g)), auc(pr_curve(p, g))) << "scale " << c;
  }
}

TEST(Auc, MatchesIndependentAveragePrecision) {
  std::mt19937_64 gen(77);
  for (int round = 0; round < 50; ++round) {
    std::vector<Prediction> p;
    GoldFacts g;
    for (int i = 0; i < 40; ++i) {
      p.push_back(pred(i, i + 1, "cause_of", static_cast<double>(gen() % 1000000)));
      if (gen() % 2) g.insert(fact(i, i + 1, "cause_of"));
    }
    g.insert(fact(500, 501, "cause_of"));  // never predicted
    auto sorted = p;
    std::sort(sorted.begin(), sorted.end(), [](const Prediction& a, const Prediction& b) {
      return a.score != b.score ? a.score > b.score : a.pair < b.pair;
    });
    double sum = 0;
    int hits = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (g.count({sorted[i].pair, sorted[i].relation})) sum += static_cast<double>(++hits) / (i + 1);
    EXPECT_NEAR(auc(pr_curve(p, g)), sum / g.size(), 1e-12);
  }
}

TEST(ReadPredictions, ParsesAndRejects) {
  test::TempDir dir;
  test::spit(dir / "p.tsv", "# head\ttail\trelation\tscore\nC0000001\tC0000002\tcause_of\t0.5\n\nC0000003\tC0000004\tNA\t1e-3\n");
  const auto p = read_predictions(dir / "p.tsv");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[1].score, 0.001);
  test::spit(dir / "bad.tsv", "C0000001\tC0000002\tcause_of\thigh\n");
  EXPECT_THROW(read_predictions(dir / "bad.tsv"), DataError);
  test::spit(dir / "short.tsv", "C0000001\tC0000002\t0.5\n");
  EXPECT_THROW(read_predictions(dir / "short.tsv"), DataError);
  test::spit(dir / "nan.tsv", "C0000001\tC0000002\tcause_of\tnan\n");
  EXPECT_THROW(read_predictions(dir / "nan.tsv"), DataError);
}

TEST(ScoreReport, JsonShape) {
  const auto r = score(kWorked, kWorkedGold);
  const auto j = r.to_json();
  EXPECT_EQ(j["predictions"], 3);
  EXPECT_EQ(j["gold_facts"], 2);
  EXPECT_TRUE(j["p_at_k"].contains("100"));
  EXPECT_NEAR(j["auc"].get<double>(), 0.8333, 1e-4);
}

}  // namespace
}  // namespace kgds
