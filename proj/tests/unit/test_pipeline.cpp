#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "kgds/pipeline.hpp"
#include "support.hpp"

namespace kgds {
namespace {

PipelineConfig e2e_config(const std::string& out_dir, unsigned threads = 1) {
  PipelineConfig c;
  c.mrconso = test::fixture("e2e/MRCONSO.RRF");
  c.mrsty = test::fixture("e2e/MRSTY.RRF");
  c.mrrel = test::fixture("e2e/MRREL.RRF");
  c.sentences = test::fixture("e2e/sentences.jsonl");
  c.out_dir = out_dir;
  c.seed = 13;
  c.threads = threads;
  return c;
}

Logger quiet() {
  return [](const std::string&) {};
}

std::map<std::string, std::string> output_digests(const std::vector<StageManifest>& ms) {
  std::map<std::string, std::string> out;
  for (const auto& m : ms)
    for (const auto& f : m.outputs) out[f.path] = f.sha256;
  return out;
}

TEST(Sha256, KnownVectors) {
  std::istringstream abc("abc"), empty("");
  EXPECT_EQ(sha256_hex(abc), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(empty), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(PipelineConfig, JsonRoundTripAndValidation) {
  auto c = e2e_config("/tmp/x");
  c.mode = SplitMode::kInductive;
  c.audit_evals = {"a.tsv", "b.tsv"};
  c.score_threshold = 0.25;
  const auto back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_THROW(PipelineConfig::from_json({{"sede", 1}}), UsageError);
  EXPECT_THROW(PipelineConfig::from_json({{"seed", "one"}}), UsageError);
  PipelineConfig no_seed;
  EXPECT_THROW(no_seed.validate(), UsageError);
  auto bad = c;
  bad.na_target = 1.5;
  EXPECT_THROW(bad.validate(), UsageError);
}

TEST(MergeConfig, FileWinsAndConflictsAreLogged) {
  std::vector<std::string> logged;
  const ojson flags{{"seed", 1}, {"prefix", "x"}};
  const ojson file{{"seed", 2}, {"na_target", 0.8}};
  const auto merged = merge_config(flags, file, [&](const std::string& m) { logged.push_back(m); });
  EXPECT_EQ(merged["seed"], 2);
  EXPECT_EQ(merged["prefix"], "x");
  EXPECT_EQ(merged["na_target"], 0.8);
  ASSERT_EQ(logged.size(), 1u);
  EXPECT_NE(logged[0].find("seed"), std::string::npos);
}

TEST(Pipeline, MissingInputNamesFile) {
  test::TempDir dir;
  Pipeline p(e2e_config(dir.str()), quiet());
  try {
    p.run_stage(Stage::kSplit);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("kg.tsv"), std::string::npos);
    EXPECT_EQ(e.code(), ExitCode::kData);
  }
  EXPECT_FALSE(fs::exists(dir / "split.manifest.json"));
}

TEST(Pipeline, EndToEndOutputsAndManifests) {
  test::TempDir dir;
  Pipeline p(e2e_config(dir.str()), quiet());
  const auto ms = p.run("all");
  ASSERT_EQ(ms.size(), 6u);
  for (auto s : kBuildStages) {
    const auto m = StageManifest::load(dir / (to_string(s) + ".manifest.json"));
    EXPECT_EQ(m.stage, s);
    EXPECT_EQ(m.seed, 13u);
    EXPECT_EQ(m.config, p.config().to_json());
    for (const auto& f : m.outputs) {
      EXPECT_FALSE(fs::path(f.path).is_absolute());
      EXPECT_EQ(sha256_file(dir / f.path), f.sha256) << f.path;
    }
    for (const auto& f : m.inputs) EXPECT_EQ(sha256_file(f.path), f.sha256);
  }
  EXPECT_EQ(StageManifest::load(dir / "split.manifest.json").derived_seed, derive_seed(13, "split"));
  EXPECT_FALSE(StageManifest::load(dir / "parse.manifest.json").derived_seed.has_value());

  // Emitted files parse, and every related instance carries a KG relation.
  const auto kg = read_triples_tsv(dir / "kg.tsv");
  std::set<CuiPair> related;
  for (const auto& t : kg) related.insert({t.head, t.tail});
  std::size_t total = 0;
  for (const auto* name : {"kgds_train.txt", "kgds_val.txt", "kgds_test.txt"}) {
    const auto inst = read_instances(dir / name);
    total += inst.size();
    for (const auto& i : inst) EXPECT_EQ(i.is_na(), related.count(i.pair()) == 0);
  }
  EXPECT_GT(total, 0u);
  const auto rel2id = ojson::parse(test::slurp(dir / "kgds_rel2id.json"));
  EXPECT_EQ(rel2id["NA"], 0);
  const auto split_report = ojson::parse(test::slurp(dir / "split.report.json"));
  EXPECT_EQ(split_report["passed"], true);
  EXPECT_FALSE(fs::exists(dir / "score.manifest.json"));
  ASSERT_TRUE(p.last_audit().has_value());
  for (const auto& e : p.last_audit()->evals) EXPECT_EQ(e.inverse_aware, 0u);
}

TEST(Pipeline, DeterministicAcrossRunsAndThreads) {
  test::TempDir a, b, c;
  const auto da = output_digests(Pipeline(e2e_config(a.str(), 1), quiet()).run("all"));
  const auto db = output_digests(Pipeline(e2e_config(b.str(), 1), quiet()).run("all"));
  const auto dc = output_digests(Pipeline(e2e_config(c.str(), 8), quiet()).run("all"));
  EXPECT_EQ(da, db);
  EXPECT_EQ(da, dc);
  auto other = e2e_config(c.str());
  other.seed = 14;
  const auto dd = output_digests(Pipeline(other, quiet()).run("all"));
  EXPECT_NE(da.at("train_kg.tsv"), dd.at("train_kg.tsv"));
}

TEST(Pipeline, ReplayReproducesAndDetectsChangedInputs) {
  test::TempDir dir, elsewhere;
  Pipeline(e2e_config(dir.str()), quiet()).run("all");
  for (auto s : kBuildStages) {
    const auto r = replay(dir / (to_string(s) + ".manifest.json"), std::nullopt, quiet());
    EXPECT_TRUE(r.reproduced()) << to_string(s);
  }
  const auto moved = replay(dir / "align.manifest.json", elsewhere.str(), quiet());
  EXPECT_TRUE(moved.reproduced());
  EXPECT_TRUE(fs::exists(elsewhere / "aligned_train.jsonl"));

  // Tamper with an intermediate input.
  test::spit(dir / "kg.tsv", test::slurp(dir / "kg.tsv") + "C0000001\tcause_of\tC0000002\n");
  EXPECT_THROW(replay(dir / "split.manifest.json", std::nullopt, quiet()), DataError);
}

TEST(Pipeline, ReplayFlagsChangedOutputs) {
  test::TempDir dir;
  Pipeline(e2e_config(dir.str()), quiet()).run("all");
  auto m = StageManifest::load(dir / "emit.manifest.json");
  m.outputs[0].sha256 = std::string(64, '0');
  test::spit(dir / "emit.manifest.json", m.to_json().dump(2));
  const auto r = replay(dir / "emit.manifest.json", std::nullopt, quiet());
  EXPECT_FALSE(r.reproduced());
  EXPECT_EQ(r.mismatched, (std::vector<std::string>{m.outputs[0].path}));
}

TEST(Pipeline, ScratchDirectoryOverride) {
  test::TempDir dir, scratch;
  ::setenv(kScratchEnv, scratch.str().c_str(), 1);
  Pipeline p(e2e_config(dir.str()), quiet());
  p.run_stage(Stage::kParse);
  ::unsetenv(kScratchEnv);
  EXPECT_TRUE(fs::exists(dir / "concepts.tsv"));
  EXPECT_FALSE(fs::exists(dir / ".scratch"));
  EXPECT_TRUE(fs::is_empty(scratch.str()));
}

TEST(Pipeline, FailedStageLeavesNoOutputs) {
  test::TempDir dir;
  auto c = e2e_config(dir.str());
  c.mode = SplitMode::kInductive;
  // Three triples sharing a hub cannot meet the ratios inductively.
  test::spit(dir / "kg.tsv",
             "C0000001\tcause_of\tC0000002\nC0000001\tcause_of\tC0000003\nC0000001\tcause_of\tC0000004\n");
  Pipeline p(c, quiet());
  try {
    p.run_stage(Stage::kSplit);
    FAIL() << "expected ConstraintError";
  } catch (const ConstraintError& e) {
    EXPECT_EQ(e.code(), ExitCode::kConstraint);
  }
  EXPECT_FALSE(fs::exists(dir / "train_kg.tsv"));
  EXPECT_FALSE(fs::exists(dir / "split.manifest.json"));
}

TEST(Pipeline, AuditAndScoreStages) {
  test::TempDir dir;
  auto c = e2e_config(dir.str());
  c.audit_train = test::fixture("audit/inverse_train.tsv");
  c.audit_evals = {test::fixture("audit/inverse_test.tsv")};
  Pipeline p(c, quiet());
  p.run_stage(Stage::kAudit);
  ASSERT_TRUE(p.last_audit());
  EXPECT_EQ(p.last_audit()->evals[0].inverse_aware_hundredths(), 10000);
  EXPECT_NE(test::slurp(dir / "audit.txt").find("100.00%"), std::string::npos);

  // Score the emitted test split against itself: a perfect ranking.
  Pipeline build(e2e_config(dir.str()), quiet());
  build.run("all");
  std::ostringstream preds;
  std::set<std::pair<CuiPair, std::string>> facts;
  for (const auto& i : read_instances(dir / "kgds_test.txt"))
    if (!i.is_na()) facts.insert({i.pair(), i.relation});
  ASSERT_FALSE(facts.empty());
  for (const auto& [pair, rel] : facts) preds << pair.first << '\t' << pair.second << '\t' << rel << "\t0.9\n";
  test::spit(dir / "preds.tsv", preds.str());
  auto sc = e2e_config(dir.str());
  sc.predictions = dir / "preds.tsv";
  Pipeline scorer(sc, quiet());
  scorer.run("score");
  ASSERT_TRUE(scorer.last_score());
  EXPECT_DOUBLE_EQ(scorer.last_score()->auc, 1.0);
  EXPECT_TRUE(fs::exists(dir / "score.manifest.json"));
}

TEST(Stages, NamesRoundTrip) {
  for (auto s : kAllStages) EXPECT_EQ(parse_stage(to_string(s)), s);
  EXPECT_THROW(parse_stage("bogus"), UsageError);
}

}  // namespace
}  // namespace kgds
