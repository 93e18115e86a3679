#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ssm/conllu.hpp"
#include "ssm/dataset.hpp"
#include "ssm/embedding.hpp"
#include "ssm/subphrase.hpp"
#include "ssm/util.hpp"

using namespace ssm;
using namespace ssm::corpus;

namespace {

std::string row(int id, const std::string& form, const std::string& lemma, const std::string& upos, int head,
                const std::string& rel) {
  return std::to_string(id) + "\t" + form + "\t" + lemma + "\t" + upos + "\t_\t_\t" + std::to_string(head) + "\t" +
         rel + "\t_\t_\n";
}

ParsedSentence parse_one(const std::string& text) {
  auto s = parse_conllu(text);
  EXPECT_EQ(s.size(), 1u);
  return s.front();
}

const std::string kInspects = "# sent_id = s1\n# text = A man inspects the uniform.\n" +
                              row(1, "A", "a", "DET", 2, "det") + row(2, "man", "man", "NOUN", 3, "nsubj") +
                              row(3, "inspects", "inspect", "VERB", 0, "root") + row(4, "the", "the", "DET", 5, "det") +
                              row(5, "uniform", "uniform", "NOUN", 3, "obj") + row(6, ".", ".", "PUNCT", 3, "punct");

const std::string kSleeping = "# sent_id = s2\n" + row(1, "The", "the", "DET", 2, "det") +
                              row(2, "man", "man", "NOUN", 4, "nsubj") + row(3, "is", "be", "AUX", 4, "aux") +
                              row(4, "sleeping", "sleep", "VERB", 0, "root") + row(5, ".", ".", "PUNCT", 4, "punct");

const std::string kTwoSubjects = "# sent_id = s3\n" + row(1, "A", "a", "DET", 2, "det") +
                                 row(2, "man", "man", "NOUN", 7, "nsubj") + row(3, "and", "and", "CCONJ", 5, "cc") +
                                 row(4, "a", "a", "DET", 5, "det") + row(5, "woman", "woman", "NOUN", 2, "conj") +
                                 row(6, "are", "be", "AUX", 7, "aux") + row(7, "walking", "walk", "VERB", 0, "root");

const SubphraseSet& admissible(const Extraction& e) {
  EXPECT_TRUE(std::holds_alternative<SubphraseSet>(e));
  return std::get<SubphraseSet>(e);
}

EmbeddingTable small_table() {
  EmbeddingTable t(2);
  t.insert("a", Eigen::Vector2d(1, 0));
  t.insert("man", Eigen::Vector2d(0, 2));
  return t;
}

}  // namespace

TEST(Conllu, EmptyInputGivesNoSentences) { EXPECT_TRUE(parse_conllu("").empty()); }

TEST(Conllu, TwoTokenBlock) {
  const auto s = parse_one(row(1, "A", "a", "DET", 2, "det") + row(2, "man", "man", "NOUN", 0, "root"));
  ASSERT_EQ(s.tokens.size(), 2u);
  EXPECT_EQ(s.tokens[0].head, 2);
  EXPECT_EQ(s.tokens[1].head, 0);
  EXPECT_EQ(s.root(), 1u);
}

TEST(Conllu, NineColumnsIsAFormatErrorNamingTheLine) {
  const std::string text = "# c\n" + row(1, "A", "a", "DET", 0, "root") + "2\tman\tman\tNOUN\t_\t_\t1\tnsubj\t_\n";
  try {
    parse_conllu(text, "x.conllu");
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("x.conllu:3"), std::string::npos);
  }
}

TEST(Conllu, NonNumericHeadIsAFormatError) {
  EXPECT_THROW(parse_conllu("1\tA\ta\tDET\t_\t_\tx\tdet\t_\t_\n"), FormatError);
}

TEST(Conllu, TreeMustHaveOneRootAndNoCycle) {
  EXPECT_THROW(parse_conllu(row(1, "A", "a", "DET", 0, "root") + row(2, "b", "b", "X", 0, "root")), FormatError);
  EXPECT_THROW(parse_conllu(row(1, "A", "a", "DET", 2, "dep") + row(2, "b", "b", "X", 1, "dep")), FormatError);
  EXPECT_THROW(parse_conllu(row(1, "A", "a", "DET", 5, "root")), FormatError);
}

TEST(Conllu, MultiwordRangesAndEmptyNodesAreSkipped) {
  const std::string text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n" + row(1, "do", "do", "AUX", 2, "aux") +
                           row(2, "n't", "not", "PART", 0, "root") + "2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n";
  EXPECT_EQ(parse_one(text).tokens.size(), 2u);
}

TEST(Conllu, SerializeRoundTrip) {
  const auto sentences = parse_conllu(kInspects + "\n" + kSleeping + "\n" + kTwoSubjects);
  ASSERT_EQ(sentences.size(), 3u);
  EXPECT_EQ(sentences[0].id, "s1");
  EXPECT_EQ(sentences[0].text, "A man inspects the uniform.");
  EXPECT_EQ(parse_conllu(serialize_conllu(sentences)), sentences);
}

TEST(Conllu, SubtreeIsSortedByPosition) {
  const auto s = parse_one(kInspects);
  EXPECT_EQ(s.subtree(4), (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(s.children(2), (std::vector<std::size_t>{1, 4, 5}));
}

TEST(Extract, TransitiveSentence) {
  const auto lex = Lexicons::bundled();
  const auto& set = admissible(extract_subphrases(parse_one(kInspects), lex));
  EXPECT_EQ(set[Slot::subject]->text, "a man");
  EXPECT_EQ(set[Slot::verb]->text, "inspects");
  EXPECT_EQ(set[Slot::object]->text, "the uniform");
  EXPECT_FALSE(set[Slot::location]);
  EXPECT_FALSE(set[Slot::clothing]);
}

TEST(Extract, ContentVerbUnderAuxiliary) {
  const auto& set = admissible(extract_subphrases(parse_one(kSleeping), Lexicons::bundled()));
  EXPECT_EQ(set[Slot::subject]->text, "the man");
  EXPECT_EQ(set[Slot::verb]->text, "sleeping");
  EXPECT_EQ(set[Slot::verb]->tokens.front().lemma, "sleep");
  EXPECT_FALSE(set[Slot::object]);
}

TEST(Extract, CoordinatedSubjectsAreInadmissible) {
  const auto e = extract_subphrases(parse_one(kTwoSubjects), Lexicons::bundled());
  ASSERT_TRUE(std::holds_alternative<Inadmissible>(e));
  EXPECT_EQ(std::get<Inadmissible>(e).reason, "multiple subjects");
}

TEST(Extract, CoordinatedVerbsAreInadmissible) {
  const auto s = parse_one(row(1, "A", "a", "DET", 2, "det") + row(2, "boy", "boy", "NOUN", 4, "nsubj") +
                           row(3, "is", "be", "AUX", 4, "aux") + row(4, "sitting", "sit", "VERB", 0, "root") +
                           row(5, "and", "and", "CCONJ", 6, "cc") + row(6, "reading", "read", "VERB", 4, "conj"));
  const auto e = extract_subphrases(s, Lexicons::bundled());
  ASSERT_TRUE(std::holds_alternative<Inadmissible>(e));
  EXPECT_EQ(std::get<Inadmissible>(e).reason, "multiple verbs");
}

TEST(Extract, NoVerbIsInadmissible) {
  const auto s = parse_one(row(1, "A", "a", "DET", 2, "det") + row(2, "dog", "dog", "NOUN", 0, "root"));
  const auto e = extract_subphrases(s, Lexicons::bundled());
  ASSERT_TRUE(std::holds_alternative<Inadmissible>(e));
  EXPECT_EQ(std::get<Inadmissible>(e).reason, "no verb");
}

TEST(Extract, LocationAndClothing) {
  // A man in a red shirt is sleeping on the couch .
  const auto s = parse_one(
      row(1, "A", "a", "DET", 2, "det") + row(2, "man", "man", "NOUN", 8, "nsubj") +
      row(3, "in", "in", "ADP", 6, "case") + row(4, "a", "a", "DET", 6, "det") + row(5, "red", "red", "ADJ", 6, "amod") +
      row(6, "shirt", "shirt", "NOUN", 2, "nmod") + row(7, "is", "be", "AUX", 8, "aux") +
      row(8, "sleeping", "sleep", "VERB", 0, "root") + row(9, "on", "on", "ADP", 11, "case") +
      row(10, "the", "the", "DET", 11, "det") + row(11, "couch", "couch", "NOUN", 8, "obl"));
  const auto& set = admissible(extract_subphrases(s, Lexicons::bundled()));
  EXPECT_EQ(set[Slot::subject]->text, "a man");
  EXPECT_EQ(set[Slot::clothing]->text, "a red shirt");
  EXPECT_EQ(set[Slot::location]->text, "the couch");
}

TEST(Extract, SpacyStylePrepositionalObject) {
  // A dog runs through the forest .  (prep -> pobj)
  const auto s = parse_one(row(1, "A", "a", "DET", 2, "det") + row(2, "dog", "dog", "NOUN", 3, "nsubj") +
                           row(3, "runs", "run", "VERB", 0, "ROOT") + row(4, "through", "through", "ADP", 3, "prep") +
                           row(5, "the", "the", "DET", 6, "det") + row(6, "forest", "forest", "NOUN", 4, "pobj"));
  const auto& set = admissible(extract_subphrases(s, Lexicons::bundled()));
  EXPECT_EQ(set[Slot::location]->text, "the forest");
}

TEST(Embedding, SumOfTokenVectors) {
  const auto t = small_table();
  const std::vector<std::string> words{"a", "man"};
  const auto e = embed_subphrase(words, t);
  EXPECT_EQ(e.vector, Eigen::Vector2d(1, 2));
  EXPECT_FALSE(e.all_oov());
}

TEST(Embedding, SingleTokenIsItsOwnVector) {
  const auto t = small_table();
  const std::vector<std::string> words{"man"};
  EXPECT_EQ(embed_subphrase(words, t).vector, Eigen::Vector2d(0, 2));
}

TEST(Embedding, PartialOovIsNotFlagged) {
  const auto t = small_table();
  const std::vector<std::string> words{"a", "zzzunk"};
  const auto e = embed_subphrase(words, t);
  EXPECT_EQ(e.vector, Eigen::Vector2d(1, 0));
  EXPECT_EQ(e.hits, 1u);
  EXPECT_FALSE(e.all_oov());
}

TEST(Embedding, AllOovIsFlaggedZero) {
  const auto t = small_table();
  const std::vector<std::string> words{"qq", "zz"};
  const auto e = embed_subphrase(words, t);
  EXPECT_TRUE(e.all_oov());
  EXPECT_EQ(e.vector, Eigen::Vector2d(0, 0));
}

TEST(Embedding, FormThenLemmaLookup) {
  const auto t = small_table();
  const std::vector<WordToken> toks{{"men", "man"}, {"a", "zz"}};
  EXPECT_EQ(embed_subphrase(toks, t).vector, Eigen::Vector2d(1, 2));
}

TEST(Embedding, PermutationInvariant) {
  EmbeddingTable t(3);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n;
  std::vector<std::string> words;
  for (int i = 0; i < 12; ++i) {
    words.push_back("w" + std::to_string(i));
    t.insert(words.back(), Eigen::Vector3d(n(rng), n(rng), n(rng)));
  }
  const auto base = embed_subphrase(words, t).vector;
  for (int trial = 0; trial < 20; ++trial) {
    std::shuffle(words.begin(), words.end(), rng);
    EXPECT_LT((embed_subphrase(words, t).vector - base).norm(), 1e-12);
  }
}

TEST(EmbeddingTable, ThreeEntriesOfDimFour) {
  const auto t = parse_embedding_table("a 1 2 3 4\nb 0 0 0 1\nc 1 1 1 1\n");
  EXPECT_EQ(t.dim(), 4u);
  EXPECT_EQ(t.size(), 3u);
}

TEST(EmbeddingTable, HeaderLineAccepted) {
  const auto t = parse_embedding_table("2 3\na 1 2 3\nb 4 5 6\n");
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
}

TEST(EmbeddingTable, EmptyFileHasNoEntries) {
  try {
    parse_embedding_table("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("no entries"), std::string::npos);
  }
}

TEST(EmbeddingTable, InconsistentLengthNamesLine) {
  try {
    parse_embedding_table("a 1 2\nb 1 2 3\n");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(EmbeddingTable, DuplicateWordLastWins) {
  const auto t = parse_embedding_table("a 1 2\na 3 4\n");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(*t.find("a"), Eigen::Vector2d(3, 4));
}

namespace {

// Ten pairs, four of which have two admissible sentences.
struct TenPairs {
  std::vector<PairRecord> pairs;
  std::vector<ParsedSentence> parses;
  EmbeddingTable table{2};

  TenPairs() {
    table.insert("man", Eigen::Vector2d(1, 0));
    table.insert("sleeping", Eigen::Vector2d(0, 1));
    table.insert("inspects", Eigen::Vector2d(1, 1));
    table.insert("uniform", Eigen::Vector2d(2, 1));
    auto good = parse_conllu(kInspects + "\n" + kSleeping);
    auto bad = parse_conllu(kTwoSubjects).front();
    parses = good;
    bad.id = "bad";
    parses.push_back(bad);
    for (int i = 0; i < 10; ++i) {
      PairRecord r;
      r.id = "p" + std::to_string(i);
      r.premise = "x";
      r.hypothesis = "y";
      r.label = RelationState::neutral;
      r.premise_parse_id = "s1";
      r.hypothesis_parse_id = i < 4 ? "s2" : "bad";
      pairs.push_back(r);
    }
  }
};

}  // namespace

TEST(BuildDataset, RetainedFraction) {
  TenPairs f;
  const auto d = build_dataset(f.pairs, f.parses, f.table, Lexicons::bundled());
  EXPECT_EQ(d.stats.total, 10u);
  EXPECT_EQ(d.stats.retained, 4u);
  EXPECT_DOUBLE_EQ(d.stats.retained_fraction(), 0.4);
  EXPECT_EQ(d.stats.reasons.at("multiple subjects"), 6u);
  for (const auto& ex : d.examples) {
    for (const auto* side : {&ex.premise, &ex.hypothesis}) {
      EXPECT_TRUE(side->has(Slot::subject));
      EXPECT_TRUE(side->has(Slot::verb));
      for (const auto& slot : side->slots) {
        if (slot) EXPECT_EQ(static_cast<std::size_t>(slot->vector.size()), f.table.dim());
      }
    }
  }
}

TEST(BuildDataset, EmptyPairsGiveNaNFraction) {
  TenPairs f;
  const auto d = build_dataset({}, f.parses, f.table, Lexicons::bundled());
  EXPECT_TRUE(d.examples.empty());
  EXPECT_TRUE(std::isnan(d.stats.retained_fraction()));
  EXPECT_NE(d.stats.to_json().find("\"n/a\""), std::string::npos);
}

TEST(BuildDataset, DanglingParseIdsAreListed) {
  TenPairs f;
  f.pairs[2].hypothesis_parse_id = "missing-1";
  f.pairs[5].premise_parse_id = "missing-2";
  try {
    build_dataset(f.pairs, f.parses, f.table, Lexicons::bundled());
    FAIL();
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("missing-1"), std::string::npos);
    EXPECT_NE(msg.find("missing-2"), std::string::npos);
  }
}

TEST(BuildDataset, UnknownSubjectWordsDropThePair) {
  TenPairs f;
  EmbeddingTable only_verbs(2);
  only_verbs.insert("sleeping", Eigen::Vector2d(0, 1));
  only_verbs.insert("inspects", Eigen::Vector2d(1, 1));
  const auto d = build_dataset(f.pairs, f.parses, only_verbs, Lexicons::bundled());
  EXPECT_EQ(d.stats.retained, 0u);
  EXPECT_EQ(d.stats.oov_dropped, 4u);
}

TEST(BuildDataset, SerializeRoundTrip) {
  TenPairs f;
  f.pairs[0].gold_nle = "A man is a man.";
  const auto d = build_dataset(f.pairs, f.parses, f.table, Lexicons::bundled());
  const auto back = parse_dataset(serialize_dataset(d.examples));
  ASSERT_EQ(back.size(), d.examples.size());
  EXPECT_EQ(back[0].gold_nle, "A man is a man.");
  EXPECT_EQ(back[0].premise.at(Slot::object).text, "the uniform");
  EXPECT_EQ(back[0].premise.at(Slot::object).vector, d.examples[0].premise.at(Slot::object).vector);
  EXPECT_EQ(serialize_dataset(back), serialize_dataset(d.examples));
}

TEST(Pairs, MissingFieldNamesLine) {
  try {
    parse_pairs(R"({"id":"a","premise":"p","hypothesis":"h","label":"neutral"})", "pairs.jsonl");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}
