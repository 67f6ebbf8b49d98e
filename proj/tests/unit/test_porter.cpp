#include <mdsum/porter.hpp>

#include <gtest/gtest.h>
#include <test_support.hpp>

#include <sstream>

using mdsum::porter_stem;

TEST(Porter, PublishedExamples) {
  const std::vector<std::pair<std::string, std::string>> cases{
      {"caresses", "caress"}, {"ponies", "poni"},     {"ties", "ti"},         {"caress", "caress"},
      {"cats", "cat"},        {"feed", "feed"},       {"agreed", "agre"},     {"plastered", "plaster"},
      {"bled", "bled"},       {"motoring", "motor"},  {"sing", "sing"},       {"conflated", "conflat"},
      {"troubled", "troubl"}, {"sized", "size"},      {"hopping", "hop"},     {"tanned", "tan"},
      {"falling", "fall"},    {"hissing", "hiss"},    {"fizzed", "fizz"},     {"failing", "fail"},
      {"filing", "file"},     {"happy", "happi"},     {"sky", "sky"},         {"relational", "relat"},
      {"conditional", "condit"}, {"rational", "ration"}, {"valenci", "valenc"}, {"digitizer", "digit"},
      {"generalization", "gener"}, {"oscillators", "oscil"}, {"running", "run"}, {"dogs", "dog"}};
  for (const auto& [w, s] : cases) EXPECT_EQ(porter_stem(w), s) << w;
}

// Short words go through the rules too (no length-2 shortcut).
TEST(Porter, ShortWords) {
  EXPECT_EQ(porter_stem("a"), "a");
  EXPECT_EQ(porter_stem("is"), "i");
  EXPECT_EQ(porter_stem("at"), "at");
  EXPECT_EQ(porter_stem(""), "");
}

// Reference vocabulary generated once from an independent implementation
// of the original algorithm.
TEST(Porter, ReferenceVocabulary) {
  const auto text = testsupport::slurp(std::filesystem::path(MDSUM_TEST_DATA_DIR) / "porter_vocab.tsv");
  ASSERT_FALSE(text.empty());
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  std::size_t bad = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    const auto word = line.substr(0, tab);
    const auto stem = line.substr(tab + 1);
    ++n;
    if (porter_stem(word) != stem) {
      if (++bad < 10) ADD_FAILURE() << word << " -> " << porter_stem(word) << " expected " << stem;
    }
  }
  EXPECT_GT(n, 10000u);
  EXPECT_EQ(bad, 0u);
}

TEST(Porter, Idempotent) {
  for (const std::string w : {"run", "dog", "caress", "gener", "oscil", "motor"})
    EXPECT_EQ(porter_stem(porter_stem(w)), porter_stem(w));
}
