#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "aubry/sft.hpp"
#include "oracles.hpp"

using namespace aubry;

namespace {

const double kLogPhi = std::log((1.0 + std::sqrt(5.0)) / 2.0);

TransitionMatrix matrix(int m, std::initializer_list<int> bits) {
  return TransitionMatrix(m, std::vector<std::uint8_t>(bits.begin(), bits.end()));
}

}  // namespace

TEST(TransitionMatrix, Basics) {
  const auto g = TransitionMatrix::golden_mean();
  EXPECT_EQ(g, matrix(2, {1, 1, 1, 0}));
  EXPECT_TRUE(g.legal({0, 1, 0, 0, 1}));
  EXPECT_FALSE(g.legal({0, 1, 1}));
  EXPECT_TRUE(g.legal_cycle({0, 1}));
  EXPECT_FALSE(g.legal_cycle({1}));
  EXPECT_THROW(matrix(2, {0, 0, 0, 0}), InvalidArgument);
}

TEST(TransitionMatrix, EssentialPart) {
  // 2 only feeds into the loop, 3 is a sink
  const auto a = matrix(4, {1, 1, 0, 0,  //
                            1, 0, 0, 1,  //
                            1, 0, 0, 0,  //
                            0, 0, 0, 0});
  EXPECT_EQ(a.essential_symbols(), (std::vector<int>{0, 1}));
  EXPECT_FALSE(a.is_essential());
  EXPECT_EQ(essential_part(a), TransitionMatrix::golden_mean());
  EXPECT_THROW(restrict_to(a, {2, 3}), ZeroShift);
}

TEST(TopEntropy, Examples) {
  EXPECT_NEAR(top_entropy(TransitionMatrix::golden_mean()), kLogPhi, 1e-12);
  EXPECT_NEAR(top_entropy(TransitionMatrix::full(4)), std::log(4.0), 1e-12);
  EXPECT_NEAR(top_entropy(TransitionMatrix::cycle(5)), 0.0, 1e-12);
}

TEST(TopEntropy, MatchesEigenSolver) {
  std::mt19937_64 rng(11);
  for (int n = 0; n < 200; ++n) {
    const int m = 1 + static_cast<int>(rng() % 10);
    const auto a = random_essential_matrix(m, 0.1 + 0.8 * (rng() % 1000) / 1000.0, rng);
    EXPECT_NEAR(top_entropy(a), oracle::entropy(a), 1e-9) << format_matrix(a);
  }
}

TEST(CountWords, Fibonacci) {
  const auto g = TransitionMatrix::golden_mean();
  const std::uint64_t fib[] = {2, 3, 5, 8, 13, 21};
  for (int n = 1; n <= 6; ++n) EXPECT_EQ(count_words(g, n).as_u64(), fib[n - 1]);
}

TEST(CountWords, FullAndCycle) {
  EXPECT_EQ(count_words(TransitionMatrix::full(3), 7).as_u64(), 2187u);
  EXPECT_EQ(count_words(TransitionMatrix::cycle(4), 9).as_u64(), 4u);
  const auto big = count_words(TransitionMatrix::full(4), 40);
  EXPECT_TRUE(big.exceeds_u64);
  EXPECT_EQ(big.value, BigInt(1) << 80);
}

TEST(CountWords, MatchesEnumeration) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 30; ++n) {
    const auto a = random_essential_matrix(2 + static_cast<int>(rng() % 3), 0.5, rng);
    for (int len = 1; len <= 6; ++len) {
      EXPECT_EQ(count_words(a, len).as_u64(), oracle::brute_words(a, len));
    }
  }
}

TEST(CylinderConstants, GoldenMeanIsBounded) {
  const auto k = cylinder_constants(TransitionMatrix::golden_mean(), 30);
  ASSERT_EQ(k.size(), 30u);
  // #words(n) = F_{n+2} = (phi^{n+2} - psi^{n+2}) / sqrt 5
  const double phi = std::exp(kLogPhi);
  EXPECT_NEAR(k.back(), phi * phi / std::sqrt(5.0), 1e-9);
}

TEST(ShortestCycle, Examples) {
  EXPECT_EQ(shortest_cycle(TransitionMatrix::golden_mean()).cycle, (Word{0}));
  EXPECT_EQ(shortest_cycle(TransitionMatrix::cycle(3)).period(), 3u);
  const auto a = matrix(3, {0, 1, 0, 0, 0, 1, 0, 1, 1});
  EXPECT_EQ(shortest_cycle(a).cycle, (Word{2}));
  EXPECT_THROW(shortest_cycle(matrix(2, {0, 1, 0, 0})), NoCycle);
}

TEST(ShortestCycle, MatchesBooleanPowers) {
  std::mt19937_64 rng(9);
  for (int n = 0; n < 300; ++n) {
    const auto a = random_essential_matrix(1 + static_cast<int>(rng() % 12), 0.1 + 0.2 * (n % 4), rng);
    const auto c = shortest_cycle(a);
    EXPECT_TRUE(a.legal_cycle(c.cycle));
    EXPECT_TRUE(c.minimal);
    EXPECT_EQ(static_cast<int>(c.period()), oracle::shortest_period(a));
  }
}

TEST(ShortestCycle, ThreadCountDoesNotMatter) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 20; ++n) {
    const auto a = random_essential_matrix(12, 0.15, rng);
    EXPECT_EQ(shortest_cycle(a, 1).cycle, shortest_cycle(a, 4).cycle);
  }
}

TEST(BqBound, Examples) {
  EXPECT_NEAR(bq_bound(TransitionMatrix::full(3)), 1.0 + std::exp(1.0), 1e-12);
  EXPECT_NEAR(bq_bound(TransitionMatrix::golden_mean()), 1.0 + 2.0 * std::exp(1.0 - kLogPhi), 1e-12);
  EXPECT_NEAR(bq_bound(TransitionMatrix::full(1)), 1.0 + std::exp(1.0), 1e-12);
}

TEST(BlockRecode, GoldenMeanPairs) {
  const auto r = block_recode(MatrixWordSource(TransitionMatrix::golden_mean()), 2);
  EXPECT_EQ(r.symbols, (std::vector<Word>{{0, 0}, {0, 1}, {1, 0}}));
  // uv must be a legal 4-word: only 01 -> 10 creates 11
  EXPECT_EQ(r.matrix, matrix(3, {1, 1, 1, 1, 1, 0, 1, 1, 1}));
  EXPECT_GE(top_entropy(r.matrix), 2 * kLogPhi - 1e-9);
}

TEST(BlockRecode, FullShift) {
  const auto r = block_recode(MatrixWordSource(TransitionMatrix::full(2)), 2);
  EXPECT_EQ(r.matrix, TransitionMatrix::full(4));
  EXPECT_NEAR(top_entropy(r.matrix), 2 * std::log(2.0), 1e-12);
}

TEST(BlockRecode, FixedPoint) {
  const auto r = block_recode(MatrixWordSource(TransitionMatrix::full(1)), 5);
  EXPECT_EQ(r.matrix, TransitionMatrix::full(1));
  EXPECT_EQ(project_cycle({{0}, true}, r).cycle, (Word{0}));
}

TEST(BlockRecode, FromWordList) {
  const ListWordSource y({{0, 1, 2, 0, 1, 2, 0}});
  const auto r = block_recode(y, 2);
  EXPECT_EQ(r.symbols, (std::vector<Word>{{0, 1}, {1, 2}, {2, 0}}));
  EXPECT_THROW(block_recode(ListWordSource({{0, 1}}), 3), EmptyRecode);
}

TEST(ProjectCycle, GoldenMean) {
  const auto r = block_recode(MatrixWordSource(TransitionMatrix::golden_mean()), 2);
  // (01)(00) -> 0100; every cyclic 2-window is legal
  const auto p = project_cycle({{1, 0}, false}, r);
  EXPECT_EQ(p.cycle, (Word{0, 1, 0, 0}));
  EXPECT_TRUE(TransitionMatrix::golden_mean().legal_cycle(p.cycle));
  // (01)(10) would contain 11
  EXPECT_THROW(project_cycle({{1, 2}, false}, r), IllegalConcatenation);
  // self-loop on 00 repeats 0
  EXPECT_EQ(project_cycle({{0}, false}, r).cycle, (Word{0}));
}

TEST(ProjectCycle, FullShiftKeepsPeriodTimesN) {
  const auto r = block_recode(MatrixWordSource(TransitionMatrix::full(2)), 3);
  // 001 100 011: primitive word of length 9
  const auto p = project_cycle({{1, 4, 3}, false}, r);
  EXPECT_EQ(p.period(), 9u);
}

TEST(DaDistance, Definition) {
  SymbolWindow u{{0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0}, 5};
  SymbolWindow w = u;
  EXPECT_EQ(d_a_distance(u, w), 0.0);
  w.symbols[5 + 4] = 1;  // agree on |i| <= 3
  EXPECT_DOUBLE_EQ(d_a_distance(u, w, 2.0), std::pow(2.0, -3));
  w = u;
  w.symbols[5 - 1] = 1;
  EXPECT_DOUBLE_EQ(d_a_distance(u, w, 3.0), 1.0);
  w = u;
  w.symbols[5] = 1;
  EXPECT_DOUBLE_EQ(d_a_distance(u, w, 2.0), 2.0);
  EXPECT_THROW(d_a_distance(u, SymbolWindow{{0, 0, 0}, 1}), WindowMismatch);
}

TEST(MatrixIo, GridRleAndFile) {
  const auto g = load_matrix(std::string(AUBRY_TEST_DATA) + "/golden.txt");
  EXPECT_EQ(g, TransitionMatrix::golden_mean());
  EXPECT_EQ(parse_matrix("1,1\n1,0\n"), g);
  EXPECT_EQ(parse_matrix(format_matrix_rle(g)), g);
  std::mt19937_64 rng(2);
  const auto a = random_essential_matrix(9, 0.3, rng);
  EXPECT_EQ(parse_matrix(format_matrix(a)), a);
  EXPECT_EQ(parse_matrix(format_matrix_rle(a)), a);
  EXPECT_THROW(parse_matrix("1 1\n1\n"), ParseError);
  EXPECT_THROW(parse_matrix("rle\n2\n3*1\n"), ParseError);
  EXPECT_THROW(parse_matrix("1 2\n1 0\n"), ParseError);
}

TEST(WordsIo, DigitAndSpacedForms) {
  const auto w = parse_words("# list\n0110\n0 1 10\n");
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], (Word{0, 1, 1, 0}));
  EXPECT_EQ(w[1], (Word{0, 1, 10}));
  EXPECT_THROW(parse_words("01x\n"), ParseError);
}
