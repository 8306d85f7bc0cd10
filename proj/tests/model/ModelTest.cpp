// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Parser.h"
#include "lrumodel/model/Model.h"
#include "lrumodel/poly/Parse.h"

#include "../support/DistanceOracle.h"
#include "../support/RandomPieces.h"

#include <gtest/gtest.h>

using namespace lrumodel;
using namespace lrumodel::model;
using poly::AffineExpr;
using poly::parseSet;

namespace {

const char *RunningExample = R"(
array M[4] elem 4;
for i = 0 .. 3 {
  S0: M[i] = i;
}
for j = 0 .. 3 {
  S1: sum += M[3 - j];
}
)";

frontend::Program runningExample(Int LineSize) {
  return frontend::lower(frontend::parseProgram(RunningExample), LineSize);
}

QuasiPolynomial q(const AffineExpr &E) { return QuasiPolynomial::fromAffine(E); }
AffineExpr d(unsigned I) { return AffineExpr::dim(I); }

bool allAffine(const std::vector<Piece> &Pieces) {
  for (const Piece &P : Pieces)
    if (!P.Poly.isAffine())
      return false;
  return true;
}

} // namespace

TEST(Distances, RunningExample) {
  frontend::Program P = runningExample(4);
  DistanceSet D = computeStackDistances(P);
  ASSERT_EQ(D.numPieces(), 1u);
  const DistanceEntry &E = D.Entries.front();
  EXPECT_EQ(P.Statements[E.Statement].Label, "S1");
  EXPECT_EQ(E.Access, 0u);
  EXPECT_TRUE(E.Pieces[0].Domain.isEqual(parseSet("{ S1[j] : 0 <= j < 4 }")));
  EXPECT_EQ(E.Pieces[0].Poly, q(d(0) + AffineExpr(1)));
}

TEST(Distances, MatchSimulatorPointwise) {
  for (Int LineSize : {4, 8, 16})
    EXPECT_EQ(lrumodel::testing::compareDistances(runningExample(LineSize), computeStackDistances(runningExample(LineSize))),
              "")
        << "line size " << LineSize;
  frontend::Program Mm = frontend::lower(frontend::parseProgram(R"(
    param N = 6;
    array A[N][N]; array B[N][N]; array C[N][N];
    for i = 0 .. N - 1 { for j = 0 .. N - 1 { for k = 0 .. N - 1 { S: C[i][j] += A[i][k] * B[k][j]; } } }
  )"),
                                         32);
  EXPECT_EQ(lrumodel::testing::compareDistances(Mm, computeStackDistances(Mm)), "");
}

TEST(Compulsory, RunningExample) {
  EXPECT_EQ(countCompulsoryMisses(runningExample(4)), (std::vector<BigInt>{4, 0}));
  EXPECT_EQ(countCompulsoryMisses(runningExample(8)), (std::vector<BigInt>{2, 0}));
  EXPECT_EQ(countCompulsoryMisses(runningExample(64)), (std::vector<BigInt>{1, 0}));
}

TEST(Counting, AffinePiece) {
  Piece P{parseSet("{ S1[j] : 0 <= j < 4 }"), q(d(0) + AffineExpr(1))};
  EXPECT_EQ(countAffinePiece(P, 2), 2);
  EXPECT_EQ(countAffinePiece(P, 0), 4);
  EXPECT_EQ(countAffinePiece(P, 4), 0);
  Piece Half{parseSet("{ S[i, j] : 0 <= i < 10 and 0 <= j < 10 }"), q(d(0) + d(1)) * QuasiPolynomial(poly::Rational(1, 2))};
  // (i + j) / 2 > 3 holds for i + j >= 7: 100 - 28 points.
  EXPECT_EQ(countAffinePiece(Half, 3), 72);
  Piece Constant{parseSet("{ S[i] : 0 <= i < 7 }"), QuasiPolynomial(5)};
  EXPECT_EQ(countAffinePiece(Constant, 4), 7);
  EXPECT_EQ(countAffinePiece(Constant, 5), 0);
  Piece Square{parseSet("{ S[i] : 0 <= i < 7 }"), q(d(0)) * q(d(0))};
  EXPECT_THROW(countAffinePiece(Square, 1), std::logic_error);
}

TEST(Counting, PartialEnumerationOfQuadraticPiece) {
  Piece P{parseSet("{ S0[i, j] : 0 <= i < 3 and 0 <= j < 3 }"), q(d(0)) + q(d(1)) * q(d(1))};
  EnumerationDomain E = getNonAffineDomain(P);
  EXPECT_EQ(E.Dims, std::vector<unsigned>{1});
  EXPECT_EQ(E.Points.points(), (std::vector<std::vector<Int>>{{0}, {1}, {2}}));
  Piece Bound = bindDimensions(P, {1}, {2});
  EXPECT_TRUE(Bound.Domain.isEqual(parseSet("{ S0[i] : 0 <= i < 3 }")));
  EXPECT_EQ(Bound.Poly, q(d(0) + AffineExpr(4)));
  ModelStats Stats;
  EXPECT_EQ(countCapacityMisses({P}, {2}, {}, &Stats), std::vector<BigInt>{4});
  EXPECT_EQ(Stats.NonAffinePieces, 1u);
  EXPECT_EQ(Stats.EnumeratedPoints, 3u);
  EXPECT_EQ(countByEnumeration(P, 2), 4);
  EXPECT_EQ(countCapacityMisses({P}, {2}, {true, true, false}), std::vector<BigInt>{4});
}

TEST(Counting, EnumerationPrefersSharedDimension) {
  // i*j + i*k: binding i alone makes the polynomial affine.
  Piece P{parseSet("{ S[i, j, k] : 0 <= i < 3 and 0 <= j < 3 and 0 <= k < 3 }"),
          q(d(0)) * q(d(1)) + q(d(0)) * q(d(2))};
  EXPECT_EQ(getNonAffineDomain(P).Dims, std::vector<unsigned>{0});
  Piece Q{parseSet("{ S[i, j, k] : 0 <= i < 3 and 0 <= j < 3 and 0 <= k < 3 }"),
          q(d(1)) * q(d(1)) * q(d(2)) + q(d(0))};
  // Binding j alone leaves j^2 k affine in k.
  EXPECT_EQ(getNonAffineDomain(Q).Dims, std::vector<unsigned>{1});
  for (Int C : {0, 2, 5, 9})
    EXPECT_EQ(countCapacityMisses({P, Q}, {C})[0], lrumodel::testing::enumerateMisses(P, C) + lrumodel::testing::enumerateMisses(Q, C));
}

TEST(Counting, SeveralLevelsAtOnce) {
  Piece P{parseSet("{ S[i, j] : 0 <= i < 8 and 0 <= j < 8 }"), q(d(0)) * q(d(1)) + q(d(0))};
  std::vector<BigInt> Misses = countCapacityMisses({P}, {1, 4, 16, 100});
  std::vector<BigInt> Expected;
  for (Int C : {1, 4, 16, 100})
    Expected.push_back(lrumodel::testing::enumerateMisses(P, C));
  EXPECT_EQ(Misses, Expected);
}

TEST(Rewrites, EqualizationSplitsLastLineOffset) {
  Piece P{parseSet("{ S0[i, j] : 0 <= i < 3 and 0 <= j < 2 }"),
          (q(AffineExpr::floorOf(d(0) + AffineExpr(1), 3)) - q(AffineExpr::floorOf(d(0), 3))) * q(d(1))};
  std::optional<std::vector<Piece>> R = equalize(P);
  ASSERT_TRUE(R);
  EXPECT_EQ(lrumodel::testing::checkRewrite(P, *R), "");
  EXPECT_TRUE(allAffine(*R));
  Piece Wide{parseSet("{ S0[i, j] : 0 <= i < 12 and 0 <= j < 4 }"), P.Poly};
  R = equalize(Wide);
  ASSERT_TRUE(R);
  ASSERT_EQ(R->size(), 2u);
  EXPECT_EQ(lrumodel::testing::checkRewrite(Wide, *R), "");
  EXPECT_TRUE(allAffine(*R));
  for (const Piece &Q : *R) {
    bool LastOffset = Q.Domain.isSubset(parseSet("{ S0[i, j] : i % 3 = 2 }"));
    EXPECT_EQ(Q.Poly, LastOffset ? q(d(1)) : QuasiPolynomial(0));
  }
}

TEST(Rewrites, RasterizationSplitsEveryLineOffset) {
  Piece P{parseSet("{ S0[i, j] : 0 <= i < 3 and 0 <= j < 2 }"),
          (q(d(0)) - QuasiPolynomial(3) * q(AffineExpr::floorOf(d(0), 3))) * q(d(1))};
  EXPECT_FALSE(equalize(P));
  Piece Wide{parseSet("{ S0[i, j] : 0 <= i < 12 and 0 <= j < 4 }"), P.Poly};
  std::optional<std::vector<Piece>> R = rasterize(Wide);
  ASSERT_TRUE(R);
  ASSERT_EQ(R->size(), 3u);
  EXPECT_EQ(lrumodel::testing::checkRewrite(Wide, *R), "");
  for (const Piece &Q : *R)
    for (Int Offset = 0; Offset < 3; ++Offset)
      if (Q.Domain.isSubset(parseSet("{ S0[i, j] : i % 3 = " + std::to_string(Offset) + " }"))) {
        EXPECT_EQ(Q.Poly, q(d(1) * Offset));
      }
}

TEST(Rewrites, RejectedWithoutDegreeDrop) {
  Piece Affine{parseSet("{ S[i] : 0 <= i < 9 }"), q(AffineExpr::floorOf(d(0), 3) + d(0))};
  EXPECT_FALSE(equalize(Affine));
  EXPECT_FALSE(rasterize(Affine));
  Piece Square{parseSet("{ S[i, j] : 0 <= i < 9 and 0 <= j < 9 }"), q(d(0)) * q(d(1))};
  EXPECT_FALSE(equalize(Square));
  EXPECT_FALSE(rasterize(Square));
}

TEST(Rewrites, RandomFloorPolynomials) {
  std::mt19937 Rng(7);
  unsigned Equalized = 0, Rasterized = 0;
  for (int N = 0; N < 100; ++N) {
    Piece P = lrumodel::testing::randomFloorPiece(Rng);
    SCOPED_TRACE(P.Poly.str() + " on " + P.Domain.str());
    if (auto R = equalize(P)) {
      ++Equalized;
      EXPECT_EQ(lrumodel::testing::checkRewrite(P, *R), "");
    }
    if (auto R = rasterize(P)) {
      ++Rasterized;
      EXPECT_EQ(lrumodel::testing::checkRewrite(P, *R), "");
    }
    if (P.Poly.isAffine())
      continue;
    for (Int C : {0, 3, 8})
      EXPECT_EQ(countCapacityMisses({P}, {C})[0], lrumodel::testing::enumerateMisses(P, C));
  }
  EXPECT_GT(Equalized, 10u);
  EXPECT_GT(Rasterized, 10u);
}

TEST(Analysis, RunningExampleReport) {
  MissReport R = analyze(runningExample(4), {4, {8}});
  ASSERT_EQ(R.Statements.size(), 2u);
  EXPECT_EQ(R.Statements[0].Accesses, 4);
  EXPECT_EQ(R.Statements[0].Compulsory, 4);
  EXPECT_EQ(R.Statements[1].Compulsory, 0);
  EXPECT_EQ(R.Statements[1].Capacity, std::vector<BigInt>{2});
  EXPECT_EQ(R.totalCompulsory(), 4);
  EXPECT_EQ(R.totalCapacity(0), 2);
  EXPECT_EQ(R.Stats.Pieces, 1u);
  EXPECT_THROW(analyze(runningExample(4), {8, {16}}), std::invalid_argument);
}

TEST(Analysis, OptionsDoNotChangeResults) {
  frontend::Program P = frontend::lower(frontend::parseProgram(R"(
    param N = 12;
    array A[N][N];
    for i = 0 .. N - 1 { for j = 0 .. i - 1 { for k = 0 .. j - 1 { S0: A[i][j] -= A[i][k] * A[j][k]; }
      S1: A[i][j] = A[i][j] / A[j][j]; } }
  )"),
                                        32);
  CacheConfig Config{32, {64, 256}};
  DistanceSet Distances;
  MissReport Full = analyze(P, Config, {}, &Distances);
  EXPECT_TRUE(compare(Full, analyze(P, Config, Distances)).empty());
  for (ModelOptions O : {ModelOptions{false, false, true}, ModelOptions{true, false, true},
                         ModelOptions{false, true, true}, ModelOptions{true, true, false}})
    EXPECT_TRUE(compare(Full, analyze(P, Config, Distances, O)).empty());
}
