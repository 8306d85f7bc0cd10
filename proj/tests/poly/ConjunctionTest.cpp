// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Conjunction.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace lrumodel::poly;

namespace {

Row row(std::initializer_list<Int> V) { return Row(V); }

/// Random conjunction over `Dims` dimensions boxed in [-Box, Box].
Conjunction randomConjunction(std::mt19937 &Rng, unsigned Dims, int Box, int Extra, int Coef) {
  Conjunction C(Dims);
  for (unsigned D = 0; D < Dims; ++D) {
    Row Lo = C.zeroRow(), Hi = C.zeroRow();
    Lo[D + 1] = 1;
    Lo[0] = Box;
    Hi[D + 1] = -1;
    Hi[0] = Box;
    C.addInequality(Lo);
    C.addInequality(Hi);
  }
  std::uniform_int_distribution<int> CoefDist(-Coef, Coef), ConstDist(-Box, Box);
  for (int K = 0; K < Extra; ++K) {
    Row R = C.zeroRow();
    for (unsigned D = 0; D < Dims; ++D)
      R[D + 1] = CoefDist(Rng);
    R[0] = ConstDist(Rng) * 2;
    if (K == 0 && Rng() % 3 == 0)
      C.addEquality(R);
    else
      C.addInequality(R);
  }
  return C;
}

template <typename Fn> void forEachPoint(unsigned Dims, int Box, Fn F) {
  std::vector<Int> P(Dims, -Box);
  while (true) {
    F(P);
    unsigned D = 0;
    while (D < Dims && P[D] == Box)
      P[D++] = -Box;
    if (D == Dims)
      return;
    ++P[D];
  }
}

} // namespace

TEST(OmegaTest, SimpleFeasibility) {
  // 2x = 1 has no integer solution.
  EXPECT_FALSE(isIntegerFeasible({row({-1, 2})}, {}));
  // 1 <= 3x <= 2 has none either.
  EXPECT_FALSE(isIntegerFeasible({}, {row({-1, 3}), row({2, -3})}));
  // 0 <= x <= 5, x = 2y
  EXPECT_TRUE(isIntegerFeasible({row({0, 1, -2})}, {row({0, 1, 0}), row({5, -1, 0})}));
}

TEST(OmegaTest, MatchesEnumeration) {
  std::mt19937 Rng(7);
  for (int Trial = 0; Trial < 300; ++Trial) {
    unsigned Dims = 1 + Rng() % 3;
    int Box = 4;
    Conjunction C = randomConjunction(Rng, Dims, Box, 3, 5);
    bool Brute = false;
    forEachPoint(Dims, Box, [&](const std::vector<Int> &P) { Brute |= C.containsPoint(P); });
    EXPECT_EQ(!C.isEmpty(), Brute) << "trial " << Trial;
  }
}

TEST(ConjunctionTest, DivisionLocalsAndSimplify) {
  // { x : x = 4 * floor(x / 4), 0 <= x <= 15 }
  Conjunction C(1);
  unsigned Q = C.addDiv(Row{0, 1}, 4);
  Row E = C.zeroRow();
  E[1] = 1;
  E[Q + 1] = -4;
  C.addEquality(E);
  C.addInequality({0, 1, 0});
  C.addInequality({15, -1, 0});
  ASSERT_TRUE(C.simplify());
  int Count = 0;
  for (Int X = -3; X < 20; ++X)
    Count += C.containsPoint({X});
  EXPECT_EQ(Count, 4);
}

TEST(ConjunctionTest, ProjectionMatchesEnumeration) {
  std::mt19937 Rng(11);
  for (int Trial = 0; Trial < 200; ++Trial) {
    unsigned Dims = 2 + Rng() % 2;
    int Box = 4;
    Conjunction C = randomConjunction(Rng, Dims, Box, 2 + Rng() % 2, 4);
    unsigned Drop = Rng() % Dims;
    std::set<std::vector<Int>> Expected;
    forEachPoint(Dims, Box, [&](const std::vector<Int> &P) {
      if (C.containsPoint(P)) {
        auto Q = P;
        Q.erase(Q.begin() + Drop);
        Expected.insert(Q);
      }
    });
    auto Pieces = projectOutDims(C, {Drop});
    for (const auto &P : Pieces)
      EXPECT_TRUE(P.allLocalsDefined());
    forEachPoint(Dims - 1, Box + 1, [&](const std::vector<Int> &P) {
      bool In = false;
      for (const auto &Piece : Pieces)
        In |= Piece.containsPoint(P);
      EXPECT_EQ(In, Expected.count(P) > 0) << "trial " << Trial;
    });
  }
}

TEST(ConjunctionTest, ProjectionOfScaledVariable) {
  // { x : exists y : x = 3y, 0 <= y <= 4 } -> multiples of 3 in [0, 12].
  Conjunction C(2);
  C.addEquality({0, 1, -3});
  C.addInequality({0, 0, 1});
  C.addInequality({4, 0, -1});
  auto Pieces = projectOutDims(C, {1});
  ASSERT_EQ(Pieces.size(), 1u);
  for (Int X = -2; X < 16; ++X)
    EXPECT_EQ(Pieces[0].containsPoint({X}), X >= 0 && X <= 12 && X % 3 == 0);
}

TEST(ConjunctionTest, SubtractIsDisjointAndExact) {
  std::mt19937 Rng(5);
  for (int Trial = 0; Trial < 200; ++Trial) {
    unsigned Dims = 1 + Rng() % 2;
    int Box = 5;
    Conjunction A = randomConjunction(Rng, Dims, Box, 1, 3);
    Conjunction B = randomConjunction(Rng, Dims, 3, 1, 3);
    if (Rng() % 2) {
      Row Num = B.zeroRow();
      Num[1] = 1;
      unsigned Q = B.addDiv(Num, 2 + Rng() % 2);
      Row E = B.zeroRow();
      E[1] = 1;
      E[Q + 1] = -static_cast<Int>(B.definition(Q)->Denominator);
      B.addEquality(E);
    }
    auto Pieces = subtract(A, B);
    forEachPoint(Dims, Box + 1, [&](const std::vector<Int> &P) {
      int Hits = 0;
      for (const auto &Piece : Pieces)
        Hits += Piece.containsPoint(P);
      bool Expected = A.containsPoint(P) && !B.containsPoint(P);
      EXPECT_EQ(Hits, Expected ? 1 : 0) << "trial " << Trial;
    });
  }
}
