#pragma once

// Stage orchestration: parse -> kg -> split -> align -> emit, plus audit and
// score. Every stage reads and writes files under one output directory and
// leaves a `<stage>.manifest.json` with SHA-256 digests of its inputs and
// outputs, the seed it used and the full configuration, which is enough to
// replay it.
//
// Requires OpenSSL (libcrypto) for the digests.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kgds/aligner.hpp"
#include "kgds/common.hpp"
#include "kgds/corpus.hpp"
#include "kgds/dataset.hpp"
#include "kgds/kg_builder.hpp"
#include "kgds/kg_split.hpp"
#include "kgds/leakage.hpp"
#include "kgds/registry.hpp"
#include "kgds/rng.hpp"
#include "kgds/rrf.hpp"
#include "kgds/scorer.hpp"

namespace kgds {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kScratchEnv = "KGDS_SCRATCH_DIR";

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Digests

inline std::string sha256_hex(std::istream& in) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw DataError("SHA-256 init failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw DataError("read error while hashing");
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

inline std::string sha256_file(const std::string& path) {
  auto in = open_input(path);
  return sha256_hex(in);
}

// ---------------------------------------------------------------------------
// Stages

enum class Stage { kParse, kKg, kSplit, kAlign, kEmit, kAudit, kScore };

inline constexpr std::array<Stage, 7> kAllStages{Stage::kParse, Stage::kKg,    Stage::kSplit, Stage::kAlign,
                                                 Stage::kEmit,  Stage::kAudit, Stage::kScore};

// What `run --stage all` executes; score needs external predictions.
inline constexpr std::array<Stage, 6> kBuildStages{Stage::kParse, Stage::kKg,   Stage::kSplit,
                                                   Stage::kAlign, Stage::kEmit, Stage::kAudit};

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::kParse: return "parse";
    case Stage::kKg: return "kg";
    case Stage::kSplit: return "split";
    case Stage::kAlign: return "align";
    case Stage::kEmit: return "emit";
    case Stage::kAudit: return "audit";
    case Stage::kScore: return "score";
  }
  return "?";
}

inline Stage parse_stage(std::string_view s) {
  for (auto st : kAllStages)
    if (to_string(st) == s) return st;
  throw UsageError("unknown stage '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Configuration

struct PipelineConfig {
  std::string mrconso, mrsty, mrrel;
  std::string sentences;
  std::string out_dir = "kgds_out";
  std::optional<std::uint64_t> seed;

  SplitRatios ratios;
  SplitMode mode = SplitMode::kTransductive;
  double na_target = 0.90;
  std::size_t prune_threshold = 10000;
  std::string granularity = "sty";

  // Empty path: the built-in table.
  std::string stoplist, canon_map, whitelist, semantic_types;

  std::vector<std::string> source_vocabs{"SNOMEDCT_US"};
  std::string rel_direction = "umls";
  bool keep_suppressed = false;
  bool dedup = true;
  std::string prefix = "kgds";

  std::string audit_train;
  std::vector<std::string> audit_evals;
  std::string audit_norm;

  std::string predictions, gold;
  std::optional<double> score_threshold;

  unsigned threads = 1;

  ojson to_json() const {
    ojson j;
    j["mrconso"] = mrconso;
    j["mrsty"] = mrsty;
    j["mrrel"] = mrrel;
    j["sentences"] = sentences;
    j["out_dir"] = out_dir;
    j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
    j["ratios"] = {ratios.train, ratios.valid, ratios.test};
    j["mode"] = to_string(mode);
    j["na_target"] = na_target;
    j["prune_threshold"] = prune_threshold;
    j["granularity"] = granularity;
    j["stoplist"] = stoplist;
    j["canon_map"] = canon_map;
    j["whitelist"] = whitelist;
    j["semantic_types"] = semantic_types;
    j["source_vocabs"] = source_vocabs;
    j["rel_direction"] = rel_direction;
    j["keep_suppressed"] = keep_suppressed;
    j["dedup"] = dedup;
    j["prefix"] = prefix;
    j["audit_train"] = audit_train;
    j["audit_evals"] = audit_evals;
    j["audit_norm"] = audit_norm;
    j["predictions"] = predictions;
    j["gold"] = gold;
    j["score_threshold"] = score_threshold ? ojson(*score_threshold) : ojson(nullptr);
    j["threads"] = threads;
    return j;
  }

  static PipelineConfig from_json(const ojson& j) {
    if (!j.is_object()) throw UsageError("configuration must be a JSON object");
    PipelineConfig c;
    try {
      for (const auto& [key, v] : j.items()) {
        if (key == "mrconso") c.mrconso = v.get<std::string>();
        else if (key == "mrsty") c.mrsty = v.get<std::string>();
        else if (key == "mrrel") c.mrrel = v.get<std::string>();
        else if (key == "sentences") c.sentences = v.get<std::string>();
        else if (key == "out_dir") c.out_dir = v.get<std::string>();
        else if (key == "seed") c.seed = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
        else if (key == "ratios") {
          if (v.is_string()) {
            c.ratios = parse_ratios(v.get<std::string>());
          } else {
            if (!v.is_array() || v.size() != 3) throw UsageError("ratios must be three fractions");
            c.ratios = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
          }
        } else if (key == "mode") c.mode = parse_split_mode(v.get<std::string>());
        else if (key == "na_target") c.na_target = v.get<double>();
        else if (key == "prune_threshold") c.prune_threshold = v.get<std::size_t>();
        else if (key == "granularity") c.granularity = v.get<std::string>();
        else if (key == "stoplist") c.stoplist = v.get<std::string>();
        else if (key == "canon_map") c.canon_map = v.get<std::string>();
        else if (key == "whitelist") c.whitelist = v.get<std::string>();
        else if (key == "semantic_types") c.semantic_types = v.get<std::string>();
        else if (key == "source_vocabs") c.source_vocabs = v.get<std::vector<std::string>>();
        else if (key == "rel_direction") c.rel_direction = v.get<std::string>();
        else if (key == "keep_suppressed") c.keep_suppressed = v.get<bool>();
        else if (key == "dedup") c.dedup = v.get<bool>();
        else if (key == "prefix") c.prefix = v.get<std::string>();
        else if (key == "audit_train") c.audit_train = v.get<std::string>();
        else if (key == "audit_evals") c.audit_evals = v.get<std::vector<std::string>>();
        else if (key == "audit_norm") c.audit_norm = v.get<std::string>();
        else if (key == "predictions") c.predictions = v.get<std::string>();
        else if (key == "gold") c.gold = v.get<std::string>();
        else if (key == "score_threshold")
          c.score_threshold = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
        else if (key == "threads") c.threads = v.get<unsigned>();
        else throw UsageError("unknown configuration key '" + key + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(std::string("bad configuration value: ") + e.what());
    }
    return c;
  }

  void validate() const {
    if (!seed) throw UsageError("a seed is required");
    ratios.validate();
    if (!(na_target >= 0.0 && na_target < 1.0)) throw UsageError("na_target must lie in [0, 1)");
    if (prune_threshold == 0) throw UsageError("prune_threshold must be positive");
    parse_type_granularity(granularity);
    if (rel_direction != "umls" && rel_direction != "first-is-head")
      throw UsageError("rel_direction must be 'umls' or 'first-is-head'");
    if (out_dir.empty()) throw UsageError("out_dir is empty");
    if (prefix.empty()) throw UsageError("prefix is empty");
    if (threads == 0) throw UsageError("threads must be >= 1");
  }
};

// Flags and a config file, both as JSON objects keyed like
// PipelineConfig::to_json(). The file wins on conflict; each conflict is
// reported through `log`.
inline ojson merge_config(const ojson& flags, const ojson& file, const std::function<void(const std::string&)>& log) {
  ojson out = flags;
  for (const auto& [key, v] : file.items()) {
    if (flags.contains(key) && flags[key] != v)
      log("config file overrides --" + key + ": " + flags[key].dump() + " -> " + v.dump());
    out[key] = v;
  }
  return out;
}

// ---------------------------------------------------------------------------
// File layout under out_dir

struct Layout {
  fs::path dir;
  std::string prefix;

  fs::path concepts() const { return dir / "concepts.tsv"; }
  fs::path types() const { return dir / "types.tsv"; }
  fs::path rels() const { return dir / "rels.tsv"; }
  fs::path parse_rejects() const { return dir / "parse.rejects.tsv"; }
  fs::path parse_stats() const { return dir / "parse.stats.json"; }
  fs::path entities() const { return dir / "entities.tsv"; }
  fs::path kg() const { return dir / "kg.tsv"; }
  fs::path kg_stats() const { return dir / "kg.stats.json"; }
  fs::path split_kg(std::size_t s) const { return dir / (to_string(kSplits[s]) + "_kg.tsv"); }
  fs::path split_report() const { return dir / "split.report.json"; }
  fs::path sentence_rejects() const { return dir / "sentences.rejects.tsv"; }
  fs::path aligned(std::size_t s) const { return dir / ("aligned_" + to_string(kSplits[s]) + ".jsonl"); }
  fs::path align_stats() const { return dir / "align.stats.json"; }
  fs::path dataset(std::size_t s) const {
    static constexpr std::array<const char*, 3> kNames{"train", "val", "test"};
    return dir / (prefix + "_" + kNames[s] + ".txt");
  }
  fs::path rel2id() const { return dir / (prefix + "_rel2id.json"); }
  fs::path dataset_stats() const { return dir / (prefix + "_stats.json"); }
  fs::path audit_json() const { return dir / "audit.json"; }
  fs::path audit_text() const { return dir / "audit.txt"; }
  fs::path score_json() const { return dir / "score.json"; }
  fs::path manifest(Stage s) const { return dir / (to_string(s) + ".manifest.json"); }
};

// Staged output files: written under the scratch directory, moved into
// place by commit(). Nothing appears in out_dir for a stage that throws.
class OutputSet {
 public:
  explicit OutputSet(fs::path scratch) : scratch_(std::move(scratch)) { fs::create_directories(scratch_); }

  ~OutputSet() {
    std::error_code ec;
    for (const auto& [tmp, dst] : files_) fs::remove(tmp, ec);
  }

  std::ofstream open(const fs::path& dst) {
    fs::path tmp = scratch_ / (dst.filename().string() + ".tmp");
    files_.emplace_back(tmp, dst);
    return open_output(tmp.string());
  }

  void commit() {
    for (const auto& [tmp, dst] : files_) {
      std::error_code ec;
      fs::rename(tmp, dst, ec);
      if (ec) {  // scratch on another filesystem
        fs::copy_file(tmp, dst, fs::copy_options::overwrite_existing);
        fs::remove(tmp);
      }
    }
    files_.clear();
  }

 private:
  fs::path scratch_;
  std::vector<std::pair<fs::path, fs::path>> files_;
};

inline fs::path scratch_dir(const fs::path& out_dir) {
  if (const char* env = std::getenv(kScratchEnv); env && *env) return fs::path(env);
  return out_dir / ".scratch";
}

// ---------------------------------------------------------------------------
// Manifests

struct FileDigest {
  std::string path;
  std::string sha256;
  bool operator==(const FileDigest&) const = default;
};

struct StageManifest {
  Stage stage = Stage::kParse;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> derived_seed;
  ojson config;
  std::vector<FileDigest> inputs;   // paths as configured
  std::vector<FileDigest> outputs;  // paths relative to out_dir

  ojson to_json() const {
    ojson j;
    j["stage"] = to_string(stage);
    j["tool_version"] = kToolVersion;
    j["seed"] = seed;
    j["derived_seed"] = derived_seed ? ojson(*derived_seed) : ojson(nullptr);
    j["config"] = config;
    auto files = [](const std::vector<FileDigest>& v) {
      ojson a = ojson::array();
      for (const auto& f : v) a.push_back({{"path", f.path}, {"sha256", f.sha256}});
      return a;
    };
    j["inputs"] = files(inputs);
    j["outputs"] = files(outputs);
    return j;
  }

  static StageManifest from_json(const ojson& j) {
    StageManifest m;
    try {
      m.stage = parse_stage(j.at("stage").get<std::string>());
      m.seed = j.at("seed").get<std::uint64_t>();
      if (!j.at("derived_seed").is_null()) m.derived_seed = j.at("derived_seed").get<std::uint64_t>();
      m.config = j.at("config");
      for (const auto& f : j.at("inputs")) m.inputs.push_back({f.at("path"), f.at("sha256")});
      for (const auto& f : j.at("outputs")) m.outputs.push_back({f.at("path"), f.at("sha256")});
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed manifest: ") + e.what());
    }
    return m;
  }

  static StageManifest load(const std::string& path) {
    auto in = open_input(path);
    try {
      return from_json(ojson::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(path + ": " + e.what());
    }
  }
};

// ---------------------------------------------------------------------------
// Runner

using Logger = std::function<void(const std::string&)>;

inline Logger stderr_logger() {
  return [](const std::string& msg) { std::cerr << "kgds: " << msg << '\n'; };
}

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig cfg, Logger log = stderr_logger())
      : cfg_(std::move(cfg)), log_(std::move(log)), layout_{cfg_.out_dir, cfg_.prefix} {
    cfg_.validate();
  }

  const PipelineConfig& config() const { return cfg_; }
  const Layout& layout() const { return layout_; }

  // Seed label per stage; stages without randomness have none.
  std::optional<std::uint64_t> derived_seed(Stage s) const {
    if (s == Stage::kSplit) return kgds::derive_seed(*cfg_.seed, "split");
    if (s == Stage::kAlign) return kgds::derive_seed(*cfg_.seed, "align");
    return std::nullopt;
  }

  std::vector<std::string> inputs(Stage s) const {
    std::vector<std::string> in;
    auto opt = [&](const std::string& p) {
      if (!p.empty()) in.push_back(p);
    };
    switch (s) {
      case Stage::kParse:
        in = {cfg_.mrconso, cfg_.mrsty, cfg_.mrrel};
        opt(cfg_.semantic_types);
        break;
      case Stage::kKg:
        in = {str(layout_.concepts()), str(layout_.types()), str(layout_.rels())};
        opt(cfg_.semantic_types);
        opt(cfg_.whitelist);
        opt(cfg_.canon_map);
        break;
      case Stage::kSplit:
        in = {str(layout_.kg())};
        opt(cfg_.canon_map);
        break;
      case Stage::kAlign:
        in = {cfg_.sentences, str(layout_.entities())};
        for (std::size_t i = 0; i < 3; ++i) in.push_back(str(layout_.split_kg(i)));
        opt(cfg_.stoplist);
        break;
      case Stage::kEmit:
        for (std::size_t i = 0; i < 3; ++i) in.push_back(str(layout_.aligned(i)));
        in.push_back(str(layout_.entities()));
        break;
      case Stage::kAudit:
        in.push_back(audit_train_path());
        for (const auto& p : audit_eval_paths()) in.push_back(p);
        opt(cfg_.audit_norm);
        opt(cfg_.canon_map);
        break;
      case Stage::kScore:
        in = {cfg_.predictions, gold_path()};
        break;
    }
    return in;
  }

  std::vector<fs::path> outputs(Stage s) const {
    switch (s) {
      case Stage::kParse:
        return {layout_.concepts(), layout_.types(), layout_.rels(), layout_.parse_rejects(), layout_.parse_stats()};
      case Stage::kKg:
        return {layout_.entities(), layout_.kg(), layout_.kg_stats()};
      case Stage::kSplit:
        return {layout_.split_kg(0), layout_.split_kg(1), layout_.split_kg(2), layout_.split_report()};
      case Stage::kAlign:
        return {layout_.aligned(0), layout_.aligned(1), layout_.aligned(2), layout_.sentence_rejects(),
                layout_.align_stats()};
      case Stage::kEmit:
        return {layout_.dataset(0), layout_.dataset(1), layout_.dataset(2), layout_.rel2id(),
                layout_.dataset_stats()};
      case Stage::kAudit:
        return {layout_.audit_json(), layout_.audit_text()};
      case Stage::kScore:
        return {layout_.score_json()};
    }
    return {};
  }

  StageManifest run_stage(Stage s) {
    const std::string name = to_string(s);
    for (const auto& p : inputs(s)) {
      if (p.empty()) throw UsageError("stage '" + name + "': a required input path is not configured");
      if (!fs::is_regular_file(p)) throw DataError("stage '" + name + "': missing input file " + p);
    }
    fs::create_directories(layout_.dir);
    StageManifest m;
    m.stage = s;
    m.seed = *cfg_.seed;
    m.derived_seed = derived_seed(s);
    m.config = cfg_.to_json();
    for (const auto& p : inputs(s)) m.inputs.push_back({p, sha256_file(p)});

    log_("stage " + name + ": start");
    {
      OutputSet out(scratch_dir(layout_.dir));
      switch (s) {
        case Stage::kParse: parse(out); break;
        case Stage::kKg: build_kg(out); break;
        case Stage::kSplit: split(out); break;
        case Stage::kAlign: align(out); break;
        case Stage::kEmit: emit(out); break;
        case Stage::kAudit: audit(out); break;
        case Stage::kScore: score(out); break;
      }
      out.commit();
    }
    for (const auto& p : outputs(s))
      m.outputs.push_back({fs::relative(p, layout_.dir).generic_string(), sha256_file(str(p))});

    auto mf = open_output(str(layout_.manifest(s)));
    mf << m.to_json().dump(2) << '\n';
    log_("stage " + name + ": done");
    return m;
  }

  std::vector<StageManifest> run(std::string_view stage) {
    std::vector<StageManifest> out;
    if (stage == "all") {
      for (auto s : kBuildStages) out.push_back(run_stage(s));
    } else {
      out.push_back(run_stage(parse_stage(stage)));
    }
    return out;
  }

  // Last audit / score results, for callers that print them.
  const std::optional<OverlapReport>& last_audit() const { return last_audit_; }
  const std::optional<ScoreReport>& last_score() const { return last_score_; }

 private:
  static std::string str(const fs::path& p) { return p.string(); }

  std::string audit_train_path() const { return cfg_.audit_train.empty() ? str(layout_.split_kg(0)) : cfg_.audit_train; }
  std::vector<std::string> audit_eval_paths() const {
    if (!cfg_.audit_evals.empty()) return cfg_.audit_evals;
    return {str(layout_.split_kg(1)), str(layout_.split_kg(2))};
  }
  std::string gold_path() const { return cfg_.gold.empty() ? str(layout_.dataset(2)) : cfg_.gold; }

  SemanticTypeRegistry registry() const {
    return cfg_.semantic_types.empty() ? SemanticTypeRegistry::builtin() : SemanticTypeRegistry::load(cfg_.semantic_types);
  }
  RelationCanonMap canon() const {
    return cfg_.canon_map.empty() ? RelationCanonMap::builtin() : RelationCanonMap::load(cfg_.canon_map);
  }
  SuppressPolicy suppress() const {
    return cfg_.keep_suppressed ? SuppressPolicy::kKeepAll : SuppressPolicy::kDropSuppressed;
  }

  static void write_json(std::ostream& os, const ojson& j) { os << j.dump(2) << '\n'; }

  void parse(OutputSet& out) {
    RejectLog rejects;
    const std::set<std::string> sabs(cfg_.source_vocabs.begin(), cfg_.source_vocabs.end());
    RrfFilter cf;
    cf.source_vocabs = sabs;
    cf.suppress = suppress();
    RelFilter rf;
    rf.source_vocabs = sabs;
    rf.suppress = suppress();
    ParseStats cs, ts, rs;
    const auto concepts = parse_mrconso(cfg_.mrconso, cf, rejects, &cs);
    const auto types = parse_mrsty(cfg_.mrsty, registry(), rejects, &ts);
    const auto rels = parse_mrrel(cfg_.mrrel, rf, rejects, &rs);

    auto o1 = out.open(layout_.concepts());
    write_concepts_tsv(o1, concepts);
    auto o2 = out.open(layout_.types());
    write_types_tsv(o2, types);
    auto o3 = out.open(layout_.rels());
    write_rels_tsv(o3, rels);
    auto o4 = out.open(layout_.parse_rejects());
    rejects.write_tsv(o4);
    auto stats = [](const ParseStats& p) {
      return ojson{{"rows", p.rows}, {"yielded", p.yielded}, {"filtered", p.filtered}, {"rejected", p.rejected}};
    };
    auto o5 = out.open(layout_.parse_stats());
    write_json(o5, {{"mrconso", stats(cs)}, {"mrsty", stats(ts)}, {"mrrel", stats(rs)}});
    log_("parse: " + std::to_string(concepts.size()) + " concept rows, " + std::to_string(types.size()) +
         " type assignments, " + std::to_string(rels.size()) + " relation rows, " + std::to_string(rejects.size()) +
         " rejected");
  }

  void build_kg(OutputSet& out) {
    const auto reg = registry();
    const auto wl = cfg_.whitelist.empty() ? builtin_whitelist() : load_whitelist(cfg_.whitelist);
    KgDiagnostics d;
    const auto concepts = read_concepts_tsv(str(layout_.concepts()));
    const auto types = read_types_tsv(str(layout_.types()));
    const auto rels = read_rels_tsv(str(layout_.rels()));
    const auto all = build_entity_set(concepts, types, reg, wl, &d);
    const auto dir = cfg_.rel_direction == "umls" ? RelDirection::kUmls : RelDirection::kFirstIsHead;
    const auto triples = canonicalize_triples(rels, all, canon(), dir, &d);
    const auto entities = prune_inactive_entities(all, triples, &d);
    if (triples.empty()) throw DataError("stage 'kg': no triples survive filtering");

    auto o1 = out.open(layout_.entities());
    write_entities_tsv(o1, entities);
    auto o2 = out.open(layout_.kg());
    write_triples_tsv(o2, triples);
    std::set<std::string> relations;
    for (const auto& t : triples) relations.insert(t.relation);
    auto o3 = out.open(layout_.kg_stats());
    write_json(o3, {{"entities", entities.size()},
                    {"triples", triples.size()},
                    {"relations", relations.size()},
                    {"concepts_without_types", d.concepts_without_types},
                    {"concepts_not_whitelisted", d.concepts_not_whitelisted},
                    {"rels_missing_rela", d.rels_missing_rela},
                    {"rels_excluded", d.rels_excluded},
                    {"rels_unmapped", d.rels_unmapped},
                    {"rels_endpoint_not_entity", d.rels_endpoint_not_entity},
                    {"rels_self_loop", d.rels_self_loop},
                    {"rels_inverted", d.rels_inverted},
                    {"duplicates_merged", d.duplicates_merged},
                    {"inactive_entities_dropped", d.inactive_entities_dropped}});
    log_("kg: " + std::to_string(entities.size()) + " entities, " + std::to_string(triples.size()) + " triples");
  }

  void split(OutputSet& out) {
    const auto kg = read_triples_tsv(str(layout_.kg()));
    const auto s = split_kg(kg, cfg_.mode, cfg_.ratios, *derived_seed(Stage::kSplit));
    const auto report = verify_split(s, canon());
    if (!report.passed) throw ConstraintError("stage 'split': verification failed: " + report.to_json().dump());
    const std::array<const TripleSet*, 3> parts{&s.train, &s.valid, &s.test};
    for (std::size_t i = 0; i < 3; ++i) {
      auto o = out.open(layout_.split_kg(i));
      write_triples_tsv(o, *parts[i]);
    }
    auto o = out.open(layout_.split_report());
    write_json(o, report.to_json());
    log_("split: " + std::to_string(s.train.size()) + "/" + std::to_string(s.valid.size()) + "/" +
         std::to_string(s.test.size()) + " triples (" + to_string(cfg_.mode) + ")");
  }

  void align(OutputSet& out) {
    RejectLog rejects;
    auto sentences = read_linked_sentences(cfg_.sentences, rejects);
    const std::size_t read = sentences.size();
    if (cfg_.dedup) sentences = dedup_sentences(std::move(sentences));
    const auto entities = read_entities_tsv(str(layout_.entities()));

    SplitTriples s;
    s.train = read_triples_tsv(str(layout_.split_kg(0)));
    s.valid = read_triples_tsv(str(layout_.split_kg(1)));
    s.test = read_triples_tsv(str(layout_.split_kg(2)));
    s.mode = cfg_.mode;
    detail::fill_entity_sets(s);

    AlignConfig ac;
    ac.na_target = cfg_.na_target;
    ac.prune_threshold = cfg_.prune_threshold;
    if (!cfg_.stoplist.empty()) ac.stoplist = Stoplist::load(cfg_.stoplist);
    ac.granularity = parse_type_granularity(cfg_.granularity);
    ac.seed = *derived_seed(Stage::kAlign);
    ac.threads = cfg_.threads;
    const auto res = align_corpus(s, sentences, entities, ac);

    ojson stats;
    stats["sentences_read"] = read;
    stats["sentences_rejected"] = rejects.size();
    stats["sentences_after_dedup"] = sentences.size();
    for (std::size_t i = 0; i < 3; ++i) {
      auto o = out.open(layout_.aligned(i));
      write_instances(o, res.instances[i]);
      const auto& st = res.stats[i];
      stats["splits"][to_string(kSplits[i])] = {{"positive_pairs", st.positive_pairs},
                                                {"positive_pairs_reserved_elsewhere", st.positive_pairs_reserved_elsewhere},
                                                {"multi_relation_pairs", st.multi_relation_pairs},
                                                {"candidate_negative_pairs", st.candidate_negative_pairs},
                                                {"selected_negative_pairs", st.selected_negative_pairs},
                                                {"positive_instances", st.positive_instances},
                                                {"negative_instances", st.negative_instances},
                                                {"pruned_instances", st.pruned_instances},
                                                {"overlap_removed", st.overlap_removed},
                                                {"na_fraction", st.na_fraction}};
      log_("align: " + to_string(kSplits[i]) + " " + std::to_string(res.instances[i].size()) + " instances");
    }
    auto o1 = out.open(layout_.sentence_rejects());
    rejects.write_tsv(o1);
    auto o2 = out.open(layout_.align_stats());
    write_json(o2, stats);
  }

  void emit(OutputSet& out) {
    SplitInstances splits;
    std::set<std::string> relations;
    for (std::size_t i = 0; i < 3; ++i) {
      splits[i] = read_instances(str(layout_.aligned(i)));
      for (const auto& inst : splits[i]) relations.insert(inst.relation);
      auto o = out.open(layout_.dataset(i));
      write_instances(o, splits[i]);
    }
    auto o1 = out.open(layout_.rel2id());
    write_rel2id(o1, make_rel2id(relations));
    const auto entities = read_entities_tsv(str(layout_.entities()));
    auto m = summarize(splits, &entities);
    m.config = {{"seed", *cfg_.seed},
                {"mode", to_string(cfg_.mode)},
                {"ratios", {cfg_.ratios.train, cfg_.ratios.valid, cfg_.ratios.test}},
                {"na_target", cfg_.na_target},
                {"prune_threshold", cfg_.prune_threshold},
                {"granularity", cfg_.granularity}};
    auto o2 = out.open(layout_.dataset_stats());
    write_json(o2, m.to_json());
  }

  void audit(OutputSet& out) {
    const auto norm = cfg_.audit_norm.empty() ? NormalizationMap::identity() : NormalizationMap::load(cfg_.audit_norm);
    const auto cm = canon();
    InverseMap inverse;
    for (const auto& [inv, can] : cm.inverse_to_canonical()) inverse.add(can, inv);
    const auto train = read_labeled_triples(audit_train_path());
    std::vector<std::pair<std::string, std::vector<Triple>>> evals;
    for (const auto& p : audit_eval_paths()) evals.emplace_back(fs::path(p).stem().string(), read_labeled_triples(p));
    auto report = audit_overlap(train, evals, norm, inverse);
    auto o1 = out.open(layout_.audit_json());
    write_json(o1, report.to_json());
    auto o2 = out.open(layout_.audit_text());
    o2 << report.to_text();
    log_("audit:\n" + report.to_text());
    last_audit_ = std::move(report);
  }

  void score(OutputSet& out) {
    const auto preds = read_predictions(cfg_.predictions);
    GoldFacts gold;
    for (const auto& inst : read_instances(gold_path()))
      if (!inst.is_na()) gold.insert({inst.pair(), inst.relation});
    const auto policy = cfg_.score_threshold ? ThresholdPolicy::fixed(*cfg_.score_threshold) : ThresholdPolicy{};
    auto report = kgds::score(preds, gold, policy);
    auto o = out.open(layout_.score_json());
    write_json(o, report.to_json());
    last_score_ = std::move(report);
  }

  PipelineConfig cfg_;
  Logger log_;
  Layout layout_;
  std::optional<OverlapReport> last_audit_;
  std::optional<ScoreReport> last_score_;
};

// ---------------------------------------------------------------------------
// Replay

struct ReplayResult {
  Stage stage = Stage::kParse;
  std::vector<std::string> mismatched;  // outputs whose digest changed
  bool reproduced() const { return mismatched.empty(); }
};

// Re-runs the stage recorded in a manifest. Inputs must still hash to the
// recorded digests. `out_dir` overrides the recorded output directory; stage
// inputs that lived in the recorded directory are then read from there.
inline ReplayResult replay(const std::string& manifest_path, const std::optional<std::string>& out_dir = std::nullopt,
                           Logger log = stderr_logger()) {
  const auto m = StageManifest::load(manifest_path);
  for (const auto& f : m.inputs) {
    if (!fs::is_regular_file(f.path)) throw DataError("replay: missing input file " + f.path);
    if (sha256_file(f.path) != f.sha256) throw DataError("replay: input changed since the manifest: " + f.path);
  }
  auto cfg = PipelineConfig::from_json(m.config);
  const std::string recorded_dir = cfg.out_dir;
  if (out_dir && *out_dir != recorded_dir) {
    // Copy intermediate inputs over so the stage finds them in its layout.
    fs::create_directories(*out_dir);
    for (const auto& f : m.inputs) {
      const auto rel = fs::relative(f.path, recorded_dir);
      if (!rel.empty() && *rel.begin() != "..")
        fs::copy_file(f.path, fs::path(*out_dir) / rel, fs::copy_options::overwrite_existing);
    }
    cfg.out_dir = *out_dir;
  }
  Pipeline p(cfg, std::move(log));
  const auto fresh = p.run_stage(m.stage);
  ReplayResult r;
  r.stage = m.stage;
  for (const auto& want : m.outputs) {
    auto it = std::find_if(fresh.outputs.begin(), fresh.outputs.end(),
                           [&](const FileDigest& f) { return f.path == want.path; });
    if (it == fresh.outputs.end() || it->sha256 != want.sha256) r.mismatched.push_back(want.path);
  }
  return r;
}

}  // namespace kgds
