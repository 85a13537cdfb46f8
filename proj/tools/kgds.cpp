// kgds: command-line front end for the dataset build pipeline.
//
// Exit status: 0 success, 1 usage error, 2 data error, 3 constraint violation.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgds/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using kgds::ojson;

// Options shared by every pipeline subcommand. Only flags given on the
// command line enter the merged configuration.
struct PipelineFlags {
  std::string config_file;
  bool quiet = false;
  std::vector<std::function<void(ojson&)>> emitters;

  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    auto* opt = app->add_option(flag, *value, help);
    emitters.push_back([opt, value, key](ojson& j) {
      if (opt->count()) j[key] = *value;
    });
  }

  void add_flag(CLI::App* app, const std::string& flag, const std::string& key, bool value_when_set,
                const std::string& help) {
    auto* opt = app->add_flag(flag, help);
    emitters.push_back([opt, key, value_when_set](ojson& j) {
      if (opt->count()) j[key] = value_when_set;
    });
  }

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON configuration file (wins over flags)")->check(CLI::ExistingFile);
    add<std::string>(app, "--out-dir", "out_dir", "Output directory");
    add<std::uint64_t>(app, "--seed", "seed", "Top-level random seed");
    add<std::string>(app, "--mrconso", "mrconso", "MRCONSO.RRF");
    add<std::string>(app, "--mrsty", "mrsty", "MRSTY.RRF");
    add<std::string>(app, "--mrrel", "mrrel", "MRREL.RRF");
    add<std::string>(app, "--sentences", "sentences", "Entity-linked sentences (JSON lines)");
    add<std::string>(app, "--ratios", "ratios", "train,valid,test fractions");
    add<std::string>(app, "--mode", "mode", "transductive | inductive");
    add<double>(app, "--na-target", "na_target", "Target NA instance fraction per split");
    add<std::size_t>(app, "--prune-threshold", "prune_threshold", "Mention pool size above which it is pruned");
    add<std::string>(app, "--granularity", "granularity", "Negative type constraint: sty | sg");
    add<std::string>(app, "--stoplist", "stoplist", "Stoplist file (default: built-in)");
    add<std::string>(app, "--canon-map", "canon_map", "Relation canonicalization map (default: built-in)");
    add<std::string>(app, "--whitelist", "whitelist", "Semantic type whitelist (default: built-in)");
    add<std::string>(app, "--semantic-types", "semantic_types", "Semantic type registry (default: built-in)");
    add<std::vector<std::string>>(app, "--sab", "source_vocabs", "Source vocabularies to keep");
    add<std::string>(app, "--rel-direction", "rel_direction", "umls | first-is-head");
    add_flag(app, "--keep-suppressed", "keep_suppressed", true, "Keep suppressed RRF rows");
    add_flag(app, "--no-dedup", "dedup", false, "Keep duplicate sentences");
    add<std::string>(app, "--prefix", "prefix", "Dataset file prefix");
    add<std::string>(app, "--audit-train", "audit_train", "Audit: training triples (default: split output)");
    add<std::vector<std::string>>(app, "--audit-eval", "audit_evals", "Audit: evaluation triple files");
    add<std::string>(app, "--audit-norm", "audit_norm", "Audit: surface-to-CUI map");
    add<std::string>(app, "--predictions", "predictions", "Score: head, tail, relation, score TSV");
    add<std::string>(app, "--gold", "gold", "Score: gold instance file (default: emitted test split)");
    add<double>(app, "--threshold", "score_threshold", "Score: fixed decision threshold");
    add<unsigned>(app, "--threads", "threads", "Worker thread cap");
    app->add_flag("-q,--quiet", quiet, "Suppress progress messages");
  }

  kgds::PipelineConfig resolve(const kgds::Logger& log) const {
    ojson flags = ojson::object();
    for (const auto& e : emitters) e(flags);
    ojson file = ojson::object();
    if (!config_file.empty()) {
      std::ifstream in(config_file);
      try {
        file = ojson::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw kgds::UsageError(config_file + ": " + e.what());
      }
      if (!file.is_object()) throw kgds::UsageError(config_file + ": configuration must be a JSON object");
      // Relative paths in the file are relative to the file.
      const fs::path base = fs::path(config_file).parent_path();
      auto rebase = [&](ojson& v) {
        if (v.is_string() && !v.get<std::string>().empty() && fs::path(v.get<std::string>()).is_relative())
          v = (base / v.get<std::string>()).lexically_normal().string();
      };
      for (const char* key : {"mrconso", "mrsty", "mrrel", "sentences", "out_dir", "stoplist", "canon_map",
                              "whitelist", "semantic_types", "audit_train", "audit_norm", "predictions", "gold"})
        if (file.contains(key)) rebase(file[key]);
      if (file.contains("audit_evals") && file["audit_evals"].is_array())
        for (auto& v : file["audit_evals"]) rebase(v);
    }
    return kgds::PipelineConfig::from_json(kgds::merge_config(flags, file, log));
  }
};

kgds::Logger make_logger(const bool& quiet) {
  return [&quiet](const std::string& msg) {
    if (!quiet) std::cerr << "kgds: " << msg << '\n';
  };
}

int run_pipeline(const PipelineFlags& flags, const std::string& stage) {
  auto log = make_logger(flags.quiet);
  kgds::Pipeline p(flags.resolve(log), log);
  p.run(stage);
  if (stage == "audit" && p.last_audit()) std::cout << p.last_audit()->to_text();
  if (stage == "score" && p.last_score()) std::cout << p.last_score()->to_json().dump(2) << '\n';
  return 0;
}

int stats(const std::vector<std::string>& files, const std::string& entities_path) {
  if (files.empty() || files.size() > 3) throw kgds::UsageError("stats takes one to three instance files");
  kgds::SplitInstances splits;
  for (std::size_t i = 0; i < files.size(); ++i) splits[i] = kgds::read_instances(files[i]);
  kgds::EntityTable entities;
  if (!entities_path.empty()) entities = kgds::read_entities_tsv(entities_path);
  auto m = kgds::summarize(splits, entities_path.empty() ? nullptr : &entities);
  std::cout << m.to_json().dump(2) << '\n';
  return 0;
}

int link(const std::string& input, const std::string& output, const std::string& lexicon_path,
         const std::string& entities_path, const std::string& policy) {
  if (lexicon_path.empty() == entities_path.empty())
    throw kgds::UsageError("link needs exactly one of --lexicon or --entities");
  const auto lexicon = lexicon_path.empty() ? kgds::Lexicon::from_entities(kgds::read_entities_tsv(entities_path))
                                            : kgds::Lexicon::load(lexicon_path);
  const auto pol = kgds::parse_ambiguity_policy(policy);
  auto in = kgds::open_input(input);
  std::ofstream file;
  if (!output.empty()) file = kgds::open_output(output);
  std::ostream& out = output.empty() ? std::cout : file;
  std::string line;
  std::size_t n = 0;
  while (kgds::read_line(in, line)) {
    ++n;
    if (kgds::trim(line).empty()) continue;
    if (!kgds::utf8_valid(line)) throw kgds::DataError(input + ":" + std::to_string(n) + ": invalid UTF-8");
    kgds::LinkedSentence s{line, kgds::dictionary_link(line, lexicon, pol), input + ":" + std::to_string(n)};
    kgds::write_linked_sentence(out, s);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distantly supervised relation extraction dataset builder"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kgds::kToolVersion);

  std::vector<std::unique_ptr<PipelineFlags>> all_flags;
  std::function<int()> action;

  auto pipeline_cmd = [&](const std::string& name, const std::string& help, const std::string& stage) {
    auto* sub = app.add_subcommand(name, help);
    all_flags.push_back(std::make_unique<PipelineFlags>());
    auto* flags = all_flags.back().get();
    flags->attach(sub);
    sub->callback([&action, flags, stage] { action = [flags, stage] { return run_pipeline(*flags, stage); }; });
  };
  pipeline_cmd("parse", "Parse MRCONSO/MRSTY/MRREL into filtered tables", "parse");
  pipeline_cmd("build-kg", "Build the entity set and canonical knowledge graph", "kg");
  pipeline_cmd("split", "Split the knowledge graph into train/valid/test", "split");
  pipeline_cmd("align", "Align split triples with entity-linked sentences", "align");
  pipeline_cmd("emit", "Write the dataset in OpenNRE format with rel2id and statistics", "emit");
  pipeline_cmd("audit", "Report train/evaluation triple overlap", "audit");
  pipeline_cmd("score", "Score ranked predictions against gold facts", "score");

  auto* run = app.add_subcommand("run", "Run one stage, or all build stages in order");
  all_flags.push_back(std::make_unique<PipelineFlags>());
  auto* run_flags = all_flags.back().get();
  run_flags->attach(run);
  std::string stage = "all";
  run->add_option("--stage", stage, "all | parse | kg | split | align | emit | audit | score")
      ->check(CLI::IsMember({"all", "parse", "kg", "split", "align", "emit", "audit", "score"}));
  run->callback([&] { action = [&] { return run_pipeline(*run_flags, stage); }; });

  auto* st = app.add_subcommand("stats", "Summarize OpenNRE instance files (train, valid, test)");
  std::vector<std::string> stat_files;
  std::string stat_entities;
  st->add_option("files", stat_files, "Instance files in split order")->required()->check(CLI::ExistingFile);
  st->add_option("--entities", stat_entities, "entities.tsv for semantic type counts")->check(CLI::ExistingFile);
  st->callback([&] { action = [&] { return stats(stat_files, stat_entities); }; });

  auto* ln = app.add_subcommand("link", "Dictionary-link raw sentences (one per line) to JSON lines");
  std::string link_in, link_out, link_lexicon, link_entities, link_policy = "skip";
  ln->add_option("input", link_in, "Raw sentence file")->required()->check(CLI::ExistingFile);
  ln->add_option("-o,--output", link_out, "Output file (default: stdout)");
  ln->add_option("--lexicon", link_lexicon, "surface<TAB>CUI lexicon")->check(CLI::ExistingFile);
  ln->add_option("--entities", link_entities, "entities.tsv; its names become the lexicon")->check(CLI::ExistingFile);
  ln->add_option("--ambiguity", link_policy, "skip | first");
  ln->callback([&] { action = [&] { return link(link_in, link_out, link_lexicon, link_entities, link_policy); }; });

  auto* rp = app.add_subcommand("replay", "Re-run a stage from its manifest and compare output digests");
  std::string manifest, replay_dir;
  bool replay_quiet = false;
  rp->add_option("manifest", manifest, "<stage>.manifest.json")->required()->check(CLI::ExistingFile);
  rp->add_option("--out-dir", replay_dir, "Write into this directory instead of the recorded one");
  rp->add_flag("-q,--quiet", replay_quiet, "Suppress progress messages");
  rp->callback([&] {
    action = [&] {
      auto r = kgds::replay(manifest, replay_dir.empty() ? std::nullopt : std::optional<std::string>(replay_dir),
                            make_logger(replay_quiet));
      if (r.reproduced()) {
        std::cout << "replay " << kgds::to_string(r.stage) << ": outputs reproduced\n";
        return 0;
      }
      for (const auto& f : r.mismatched) std::cout << "replay " << kgds::to_string(r.stage) << ": differs: " << f << '\n';
      return static_cast<int>(kgds::ExitCode::kData);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : static_cast<int>(kgds::ExitCode::kUsage);
  }
  try {
    return action ? action() : 0;
  } catch (const kgds::Error& e) {
    std::cerr << "kgds: error: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "kgds: error: " << e.what() << '\n';
    return static_cast<int>(kgds::ExitCode::kData);
  } catch (const std::exception& e) {
    std::cerr << "kgds: error: " << e.what() << '\n';
    return static_cast<int>(kgds::ExitCode::kData);
  }
}
