#include <gtest/gtest.h>

#include <random>

#include "gltlab/error.hpp"
#include "gltlab/multiindex.hpp"

using namespace gltlab;

namespace {

MultiIndex random_index(std::size_t d, std::int64_t lo, std::int64_t hi, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int64_t> u(lo, hi);
  MultiIndex m = MultiIndex::filled(d, 0);
  for (std::size_t j = 0; j < d; ++j) m[j] = u(rng);
  return m;
}

// Random interval with at most 10^4 members.
MultiIndexInterval random_interval(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  const std::size_t d = dim(rng);
  const std::int64_t span = d == 1 ? 60 : d == 2 ? 40 : d == 3 ? 12 : 6;
  MultiIndex lower = random_index(d, -5, 5, rng);
  MultiIndex upper = lower + random_index(d, 0, span, rng);
  return MultiIndexInterval(lower, upper);
}

}  // namespace

TEST(MultiIndex, NuIsProductOfEntries) {
  EXPECT_EQ(nu(MultiIndex{2, 3, 4}), 24);
  EXPECT_EQ(nu(MultiIndex{7}), 7);
  EXPECT_THROW(nu(MultiIndex{2, 0}), Error);
  EXPECT_THROW(nu(MultiIndex{}), Error);
}

TEST(MultiIndex, ParseAndPrint) {
  EXPECT_EQ(MultiIndex::parse("2,3,4"), (MultiIndex{2, 3, 4}));
  EXPECT_EQ(MultiIndex::parse(" ( 16 , 8 ) "), (MultiIndex{16, 8}));
  EXPECT_EQ(MultiIndex::parse("-1,2"), (MultiIndex{-1, 2}));
  EXPECT_EQ((MultiIndex{2, 3, 4}).to_string(), "2,3,4");
  EXPECT_THROW(MultiIndex::parse(""), Error);
  EXPECT_THROW(MultiIndex::parse("1,,2"), Error);
  EXPECT_THROW(MultiIndex::parse("1,a"), Error);
}

TEST(MultiIndex, ArithmeticIsComponentwise) {
  const MultiIndex a{1, -2, 3};
  const MultiIndex b{4, 5, -6};
  EXPECT_EQ(a + b, (MultiIndex{5, 3, -3}));
  EXPECT_EQ(a - b, (MultiIndex{-3, -7, 9}));
  EXPECT_EQ(-a, (MultiIndex{-1, 2, -3}));
  EXPECT_EQ(a + 1, (MultiIndex{2, -1, 4}));
  EXPECT_TRUE(componentwise_leq(MultiIndex{1, 1}, MultiIndex{1, 2}));
  EXPECT_FALSE(componentwise_leq(MultiIndex{2, 1}, MultiIndex{1, 2}));
}

TEST(MultiIndex, LexOrderLastCoordinateFastest) {
  const auto box = MultiIndexInterval::ones_to(MultiIndex{2, 3});
  EXPECT_EQ(box.cardinality(), 6);
  EXPECT_EQ(lex_unrank(0, box), (MultiIndex{1, 1}));
  EXPECT_EQ(lex_unrank(1, box), (MultiIndex{1, 2}));
  EXPECT_EQ(lex_unrank(3, box), (MultiIndex{2, 1}));
  EXPECT_EQ(lex_rank(MultiIndex{2, 3}, box), 5);
  EXPECT_THROW(lex_rank(MultiIndex{3, 1}, box), Error);
  EXPECT_THROW(lex_unrank(6, box), Error);
}

TEST(MultiIndex, RejectsInvertedInterval) {
  EXPECT_THROW(MultiIndexInterval(MultiIndex{1, 3}, MultiIndex{2, 2}), Error);
  EXPECT_THROW(MultiIndexInterval(MultiIndex{1}, MultiIndex{2, 2}), Error);
}

TEST(MultiIndexProperty, UnrankInvertsRankExhaustively) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const auto box = random_interval(rng);
    const std::int64_t count = box.cardinality();
    ASSERT_LE(count, 10000);
    std::int64_t enumerated = 0;
    MultiIndex previous;
    for (std::int64_t i = 0; i < count; ++i) {
      const MultiIndex j = lex_unrank(i, box);
      ASSERT_TRUE(box.contains(j));
      ASSERT_EQ(lex_rank(j, box), i);
      if (i > 0) {
        ASSERT_LT(previous, j);
      }
      previous = j;
      ++enumerated;
    }
    EXPECT_EQ(enumerated, nu(box.upper() - box.lower() + 1));
  }
}

TEST(MultiIndexProperty, RankOrderAgreesWithLexOrder) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto box = random_interval(rng);
    std::uniform_int_distribution<std::int64_t> pick(0, box.cardinality() - 1);
    const MultiIndex a = lex_unrank(pick(rng), box);
    const MultiIndex b = lex_unrank(pick(rng), box);
    EXPECT_EQ(a < b, lex_rank(a, box) < lex_rank(b, box));
  }
}
