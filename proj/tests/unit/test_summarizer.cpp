#include <mdsum/summarizer.hpp>

#include <gtest/gtest.h>
#include <test_support.hpp>

#include <random>
#include <set>

using namespace mdsum;
using testsupport::random_positive;

namespace {

Sentence sent(std::vector<std::string> tokens, int pos = 0, int count = 0, std::string raw = "x") {
  Sentence s;
  s.tokens = std::move(tokens);
  s.position_in_doc = pos;
  s.doc_sentence_count = count;
  s.raw_text = std::move(raw);
  return s;
}

SfWeights budget(std::size_t l, double omega = 1.0) {
  SfWeights w;
  w.length_budget = l;
  w.omega = omega;
  return w;
}

}  // namespace

TEST(Features, Examples) {
  std::vector<Sentence> s{sent({"a", "b"}), sent({"a", "b"}, 1, 10), sent({"a", "c", "d"}, 10, 10)};
  Matrix emb(4, 3);
  emb << 1, 1, 1, 1, 1, 0, 0, 0, 1, 0, 0, 1;
  auto f = statistical_features(s, emb);
  EXPECT_DOUBLE_EQ(f[1].sim_ts, 1.0);
  EXPECT_DOUBLE_EQ(f[1].overlap_st, 1.0);
  EXPECT_DOUBLE_EQ(f[1].overlap_si, 1.0);
  EXPECT_DOUBLE_EQ(f[1].pos, 1.0);
  EXPECT_DOUBLE_EQ(f[2].pos, 0.1);
  EXPECT_DOUBLE_EQ(f[2].overlap_st, 0.5);
  EXPECT_DOUBLE_EQ(f[2].overlap_si, 1.0 / 3.0);
  // counts over non-topic sentences: a=2 b=1 c=1 d=1
  EXPECT_DOUBLE_EQ(f[1].tf, (1.0 + 0.5) / 2.0);
  EXPECT_DOUBLE_EQ(f[2].tf, (1.0 + 0.5 + 0.5) / 3.0);
  EXPECT_DOUBLE_EQ(f[0].pos, 0.0);
}

TEST(Features, Ranges) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    std::vector<Sentence> s;
    for (int i = 0; i < 8; ++i) s.push_back(sent(testsupport::random_tokens(rng, 1 + i % 4, 6), i + 1, 8));
    auto f = statistical_features(s, random_positive(5, 8, rng));
    for (const auto& x : f) {
      for (double v : {x.tf, x.sim_ts, x.overlap_st, x.overlap_si, x.pos}) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0 + 1e-12);
      }
    }
  }
}

TEST(CombinedScore, Examples) {
  std::vector<SentenceFeatures> feats{{0.5, 1.0, 1.0, 1.0, 0.0}, {0.2, 0.4, 0.5, 0.25, 1.0}, {0.1, 0.0, 0.0, 0.0, 0.5}};
  const Vector f = (Vector(3) << 0.6, 0.3, 0.1).finished();
  SfWeights zero;
  zero.mu = {0, 0, 0, 0, 0};
  EXPECT_EQ(combined_score(f, feats, zero), f);
  SfWeights sim;
  sim.mu = {0, 1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(combined_score(f, feats, sim)(0), 1.6);
  SfWeights mixw;
  mixw.mu = {0.1, 0.2, 0.3, 0.2, 0.2};
  auto c = combined_score(f, feats, mixw);
  EXPECT_NEAR(c(1), 0.3 + 0.02 + 0.08 + 0.15 + 0.05 + 0.2, 1e-15);
  EXPECT_NEAR(c(2), 0.1 + 0.01 + 0.1, 1e-15);
}

TEST(Mmr, NoPenaltyIsScoreOrder) {
  Matrix w = Matrix::Ones(5, 5);
  w.diagonal().setZero();
  const Vector scores = (Vector(5) << 9, 0.2, 0.9, 0.5, 0.7).finished();
  std::vector<std::size_t> len{1, 3, 3, 3, 3};
  auto s = mmr_select(w, scores, len, budget(9, 0.0));
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{2, 4, 3}));
  EXPECT_EQ(s.word_count, 9u);
}

TEST(Mmr, DuplicateIsDeferred) {
  // 1 and 2 are identical, 3 and 4 distinct
  Matrix w(5, 5);
  w << 0, .1, .1, .1, .1,
       .1, 0, 1, 0, 0,
       .1, 1, 0, 0, 0,
       .1, 0, 0, 0, .05,
       .1, 0, 0, .05, 0;
  const Vector scores = (Vector(5) << 1, 0.9, 0.9, 0.5, 0.4).finished();
  std::vector<std::size_t> len{1, 1, 1, 1, 1};
  auto s = mmr_select(w, scores, len, budget(100, 10.0));
  ASSERT_EQ(s.selected.size(), 4u);
  EXPECT_EQ(s.selected[0], 1u);
  EXPECT_EQ(s.selected.back(), 2u);
}

TEST(Mmr, TinyBudgetAndEmpty) {
  Matrix w = Matrix::Ones(3, 3);
  std::vector<std::size_t> len{2, 5, 6};
  EXPECT_TRUE(mmr_select(w, Vector::Ones(3), len, budget(4)).selected.empty());
  std::vector<std::size_t> one{1};
  EXPECT_TRUE(mmr_select(Matrix::Zero(1, 1), Vector::Ones(1), one, budget(4)).selected.empty());
}

TEST(Mmr, TiesGoToLowerIndex) {
  Matrix w = Matrix::Zero(4, 4);
  std::vector<std::size_t> len{1, 1, 1, 1};
  auto s = mmr_select(w, Vector::Constant(4, 0.5), len, budget(2));
  EXPECT_EQ(s.selected, (std::vector<std::size_t>{1, 2}));
}

namespace {

struct MmrInstance {
  Matrix w;
  Vector scores;
  std::vector<std::size_t> len;
  Matrix srow;  // row-normalized W
};

std::vector<MmrInstance> mmr_instances(int count) {
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> lenr(1, 30);
  std::vector<MmrInstance> out;
  for (int t = 0; t < count; ++t) {
    const int n = 12;
    MmrInstance m;
    m.w = testsupport::random_symmetric_nonneg(n, rng, 0.6);
    m.scores = random_positive(n, 1, rng).col(0);
    m.len.resize(n);
    for (auto& l : m.len) l = lenr(rng);
    m.srow = m.w;
    for (int i = 0; i < n; ++i)
      if (m.srow.row(i).sum() > 0) m.srow.row(i) /= m.srow.row(i).sum();
    out.push_back(std::move(m));
  }
  return out;
}

int similar_pairs(const MmrInstance& m, const Summary& s) {
  int c = 0;
  for (auto i : s.selected)
    for (auto j : s.selected)
      if (i != j && m.srow(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.5) ++c;
  return c;
}

}  // namespace

TEST(Mmr, Properties) {
  for (const auto& m : mmr_instances(50)) {
    for (double omega : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      auto s = mmr_select(m.w, m.scores, m.len, budget(60, omega));
      std::set<std::size_t> uniq(s.selected.begin(), s.selected.end());
      EXPECT_EQ(uniq.size(), s.selected.size());
      EXPECT_EQ(uniq.count(0), 0u);
      EXPECT_LE(s.word_count, 60u);
      std::size_t words = 0;
      for (auto i : s.selected) words += m.len[i];
      EXPECT_EQ(words, s.word_count);
      EXPECT_EQ(mmr_select(m.w, m.scores, m.len, budget(60, omega)).selected, s.selected);
    }
  }
}

// Raising omega must not add highly similar pairs to the summary.
TEST(Mmr, PenaltyMonotonicity) {
  int t = 0;
  for (const auto& m : mmr_instances(50)) {
    int prev = std::numeric_limits<int>::max();
    for (double omega : {0.0, 0.5, 1.0, 2.0, 5.0}) {
      const int pairs = similar_pairs(m, mmr_select(m.w, m.scores, m.len, budget(60, omega)));
      EXPECT_LE(pairs, prev) << "instance " << t << " omega " << omega;
      prev = pairs;
    }
    ++t;
  }
}

TEST(SentenceLengths, RawWords) {
  std::vector<Sentence> s{sent({"x"}, 0, 0, "Hello there, world."), sent({"y"}, 1, 1, "One")};
  EXPECT_EQ(sentence_lengths(s), (std::vector<std::size_t>{3, 1}));
}
