#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "kgds/corpus.hpp"
#include "support.hpp"

namespace kgds {
namespace {

std::vector<LinkedSentence> read_text(const std::string& text, RejectLog& rejects) {
  std::istringstream in(text);
  std::vector<LinkedSentence> out;
  read_linked_sentences(in, "s.jsonl", rejects, [&](LinkedSentence&& s) { out.push_back(std::move(s)); });
  return out;
}

TEST(ReadLinkedSentences, ProlactinomaRecord) {
  RejectLog rejects;
  const auto s = read_linked_sentences(test::fixture("format/sentences.jsonl"), rejects);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_TRUE(rejects.empty());
  ASSERT_EQ(s[0].mentions.size(), 2u);
  EXPECT_EQ(s[0].mentions[0], (Mention{"C0032005", 130, 145, "pituitary gland"}));
  EXPECT_EQ(s[0].mentions[1], (Mention{"C0033375", 148, 160, "prolactinoma"}));
  EXPECT_EQ(s[1].mentions[1].surface, "cardiac cirrhosis");
}

TEST(ReadLinkedSentences, InvalidRecordsRejected) {
  RejectLog rejects;
  const std::string text =
      R"({"text": "abc def", "mentions": [{"cui": "C0000001", "start": 3, "end": 3}]})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "C0000001", "start": 0, "end": 3, "surface": "bc "}]})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "C0000001", "start": 0, "end": 5}, {"cui": "C0000002", "start": 4, "end": 7}]})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "C0000001", "start": 4, "end": 9}]})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "X1", "start": 0, "end": 3}]})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "C0000001", "start": -1, "end": 3}]})" "\n"
      R"({"text": "abc def" "mentions": []})" "\n"
      R"({"mentions": []})" "\n"
      R"({"text": "abc def", "mentions": [{"cui": "C0000002", "start": 4, "end": 7}, {"cui": "C0000001", "start": 0, "end": 3}]})" "\n";
  const auto s = read_text(text, rejects);
  EXPECT_EQ(rejects.size(), 8u);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].mentions[0].cui, "C0000001");  // sorted by start
  EXPECT_EQ(s[0].mentions[1].surface, "def");
  EXPECT_NE(rejects.entries()[1].reason.find("does not match"), std::string::npos);
  EXPECT_NE(rejects.entries()[2].reason.find("overlapping"), std::string::npos);
}

TEST(ReadLinkedSentences, OffsetsCountCodePoints) {
  RejectLog rejects;
  const auto s = read_text(R"({"text": "β-blocker and naïve café", "mentions": [{"cui": "C0000001", "start": 0, "end": 9}, {"cui": "C0000002", "start": 20, "end": 24}]})" "\n", rejects);
  ASSERT_EQ(s.size(), 1u) << (rejects.empty() ? "" : rejects.entries()[0].reason);
  EXPECT_EQ(s[0].mentions[0].surface, "β-blocker");
  EXPECT_EQ(s[0].mentions[1].surface, "café");
}

TEST(ReadLinkedSentences, WriteReadRoundTrip) {
  RejectLog rejects;
  const auto s = read_linked_sentences(test::fixture("format/sentences.jsonl"), rejects);
  std::ostringstream os;
  for (const auto& x : s) write_linked_sentence(os, x);
  EXPECT_EQ(read_text(os.str(), rejects), s);
  EXPECT_TRUE(rejects.empty());
}

LinkedSentence sentence(std::string text) { return LinkedSentence{std::move(text), {}, ""}; }

TEST(DedupSentences, IdenticalAndWhitespaceVariants) {
  auto out = dedup_sentences({sentence("a b"), sentence("a b"), sentence("a  b"), sentence(" a b\t"), sentence("a c")});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].text, "a b");
  EXPECT_EQ(out[1].text, "a c");
}

TEST(DedupSentences, FirstOccurrenceWinsAndIdempotent) {
  auto first = sentence("x  y");
  first.source_id = "first";
  auto second = sentence("x y");
  second.source_id = "second";
  const auto out = dedup_sentences({first, second});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].source_id, "first");
  EXPECT_EQ(dedup_sentences(out), out);
}

TEST(DedupSentences, ConcurrentInsertAdmitsExactlyOne) {
  SentenceDeduplicator d;
  std::atomic<int> wins{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&] {
      for (int i = 0; i < 500; ++i) wins += d.insert("sentence " + std::to_string(i));
    });
  for (auto& th : pool) th.join();
  EXPECT_EQ(wins.load(), 500);
  EXPECT_EQ(d.size(), 500u);
}

TEST(DictionaryLink, CardiacCirrhosis) {
  Lexicon lex;
  lex.add("cardiac cirrhosis", "C0085699");
  const std::string text = "Severe heart disease may result in cardiac cirrhosis in the elderly .";
  const auto m = dictionary_link(text, lex);
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0], (Mention{"C0085699", 35, 52, "cardiac cirrhosis"}));
}

TEST(DictionaryLink, EmptyLexicon) { EXPECT_TRUE(dictionary_link("heart disease", Lexicon{}).empty()); }

TEST(DictionaryLink, LongestMatchWins) {
  Lexicon lex;
  lex.add("heart", "C0018787");
  lex.add("heart disease", "C0018799");
  const auto m = dictionary_link("Severe Heart Disease and a weak heart.", lex);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0], (Mention{"C0018799", 7, 20, "Heart Disease"}));
  EXPECT_EQ(m[1], (Mention{"C0018787", 32, 37, "heart"}));
}

TEST(DictionaryLink, TokenBoundariesAndAmbiguity) {
  Lexicon lex;
  lex.add("cold", "C0000001");
  lex.add("cold", "C0000002");
  lex.add("art", "C0000003");
  EXPECT_TRUE(dictionary_link("a cold heart", lex).empty());
  EXPECT_TRUE(dictionary_link("the heart", lex).empty());
  const auto first = dictionary_link("a cold", lex, AmbiguityPolicy::kFirstCui);
  ASSERT_EQ(first.size(), 1u);
  EXPECT_EQ(first[0].cui, "C0000001");
  EXPECT_EQ(parse_ambiguity_policy("first"), AmbiguityPolicy::kFirstCui);
  EXPECT_THROW(parse_ambiguity_policy("all"), UsageError);
}

TEST(DictionaryLink, PropertyMentionsAreValid) {
  std::mt19937_64 gen(17);
  const std::vector<std::string> vocab{"heart", "heart disease", "liver", "naïve t cell", "κ-opioid", "t cell",
                                       "cell", "disease", "β", "liver disease"};
  for (int round = 0; round < 100; ++round) {
    Lexicon lex;
    for (std::size_t i = 0; i < vocab.size(); ++i)
      if (gen() % 2) lex.add(vocab[i], test::cui(static_cast<int>(i) + 1));
    std::string text;
    for (int w = 0; w < 20; ++w) {
      if (w) text += gen() % 4 ? " " : ", ";
      text += vocab[gen() % vocab.size()];
    }
    LinkedSentence s{text, dictionary_link(text, lex), ""};
    const auto before = s.mentions;
    EXPECT_FALSE(validate_sentence(s).has_value()) << text;
    EXPECT_EQ(s.mentions, before);
  }
}

}  // namespace
}  // namespace kgds
