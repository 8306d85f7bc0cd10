// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Parse.h"

#include "../support/RandomSets.h"

#include <gtest/gtest.h>

using namespace lrumodel::poly;

TEST(ParseTest, IntervalAndChains) {
  Set S = parseSet("{ S[i] : 0 <= i < 4 }");
  EXPECT_EQ(S.points(), (std::vector<std::vector<Int>>{{0}, {1}, {2}, {3}}));
  EXPECT_TRUE(parseSet("{ }").isEmpty());
  EXPECT_THROW(parseSet("{ [i, j] : 0 <= i, j <= 1 }"), ParseError);
}

TEST(ParseTest, MapsWithExpressions) {
  Map A = parseMap("{ S0[i] -> M[i] : 0 <= i < 4; S1[j] -> M[3 - j] : 0 <= j < 4 }");
  std::vector<std::vector<Int>> Pairs;
  A.enumerate([&](const Space &In, const Space &, const std::vector<Int> &P) {
    if (In.Name == "S1")
      Pairs.push_back(P);
  });
  EXPECT_EQ(Pairs, (std::vector<std::vector<Int>>{{0, 3}, {1, 2}, {2, 1}, {3, 0}}));
  Map Lines = parseMap("{ S[i] -> M[floor(i / 16)] : 0 <= i < 32 }");
  EXPECT_EQ(Lines.range().points(), (std::vector<std::vector<Int>>{{0}, {1}}));
  Set Odd = parseSet("{ S[i] : i % 2 = 1 and 0 <= i < 6 }");
  EXPECT_EQ(Odd.points(), (std::vector<std::vector<Int>>{{1}, {3}, {5}}));
}

TEST(ParseTest, Errors) {
  EXPECT_THROW(parseSet("{ S[i] : i * i >= 0 }"), ParseError);
  EXPECT_THROW(parseSet("{ S[i] : k >= 0 }"), ParseError);
  EXPECT_THROW(parseSet("{ S[i] : i >= 0 "), ParseError);
  EXPECT_THROW(parseSet("{ S[i] -> T[i] }"), ParseError);
  try {
    parseSet("{ S[i] :\n  i >= q }");
    FAIL();
  } catch (const ParseError &E) {
    EXPECT_EQ(E.Line, 2u);
    EXPECT_EQ(E.Column, 8u);
  }
}

TEST(ParseTest, RoundTripRandomSets) {
  std::mt19937 Rng(5);
  for (int Trial = 0; Trial < 100; ++Trial) {
    Set S = lrumodel::testing::randomBoundedSet(Rng, 3);
    Set Back = parseSet(S.str());
    EXPECT_TRUE(Back.isEqual(S)) << S.str();
  }
}

TEST(ParseTest, RoundTripMaps) {
  Map M = parseMap("{ S0[i, j] -> M[i, floor(j / 4)] : 0 <= i < 3 and 0 <= j < 8; S1[i] -> M[i, i] : 0 <= i < 2 }");
  Map Back = parseMap(M.str());
  EXPECT_TRUE(Back.isEqual(M)) << M.str();
  Map Inv = M.inverse();
  EXPECT_TRUE(parseMap(Inv.str()).isEqual(Inv)) << Inv.str();
}
