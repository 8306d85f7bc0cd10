// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Set.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace lrumodel::poly;

namespace {

AffineExpr d(unsigned I) { return AffineExpr::dim(I); }

using PointSet = std::set<std::vector<Int>>;

PointSet pointsOf(const Set &S) {
  PointSet P;
  S.enumerate([&](const Space &, const std::vector<Int> &X) { EXPECT_TRUE(P.insert(X).second); });
  return P;
}

/// True if no point lies in two pieces.
bool piecesDisjoint(const Set &S) {
  const auto &Ps = S.pieces();
  for (size_t I = 0; I < Ps.size(); ++I)
    for (size_t J = I + 1; J < Ps.size(); ++J)
      if (Ps[I].Sp.Name == Ps[J].Sp.Name && !intersect(Ps[I].C, Ps[J].C).isEmpty())
        return false;
  return true;
}

Set interval(Int Lo, Int Hi) {
  Space Sp("S", {"i"});
  return Set::fromConstraints(Sp, {}, {d(0) - AffineExpr(Lo), AffineExpr(Hi) - d(0)});
}

/// Random 2-d set in [-4, 4]^2 with a few extra constraints, sometimes with a
/// stride or a floor term.
Set randomSet(std::mt19937 &Rng) {
  std::uniform_int_distribution<int> Coef(-3, 3), Const(-4, 4);
  std::vector<AffineExpr> Ineqs{d(0) + AffineExpr(4), AffineExpr(4) - d(0), d(1) + AffineExpr(4), AffineExpr(4) - d(1)};
  std::vector<AffineExpr> Eqs;
  int Extra = Rng() % 3;
  for (int K = 0; K < Extra; ++K)
    Ineqs.push_back(d(0) * Coef(Rng) + d(1) * Coef(Rng) + AffineExpr(Const(Rng)));
  if (Rng() % 4 == 0) {
    Int Div = 2 + Rng() % 3;
    Ineqs.push_back(AffineExpr::floorOf(d(0) + d(1) * Coef(Rng), Div) * Coef(Rng) + AffineExpr(Const(Rng)));
  }
  if (Rng() % 5 == 0)
    Eqs.push_back(AffineExpr::modOf(d(0) + d(1), 2 + Rng() % 2));
  return Set::fromConstraints(Space("S", {"i", "j"}), Eqs, Ineqs);
}

} // namespace

TEST(SetTest, IntervalOperations) {
  EXPECT_EQ(pointsOf(interval(0, 3).intersect(interval(2, 10))), (PointSet{{2}, {3}}));
  EXPECT_TRUE(interval(0, 3).intersect(Set()).isEmpty());
  Set U = interval(0, 1).unite(interval(1, 3));
  EXPECT_EQ(pointsOf(U), (PointSet{{0}, {1}, {2}, {3}}));
  EXPECT_TRUE(piecesDisjoint(U));
  EXPECT_TRUE(interval(0, 3).subtract(interval(0, 3)).isEmpty());
  EXPECT_EQ(pointsOf(interval(0, 3).subtract(interval(2, 2))), (PointSet{{0}, {1}, {3}}));
}

TEST(SetTest, IncompatibleArity) {
  Set A = Set::universe(Space("S", {"i"}));
  Set B = Set::universe(Space("S", {"i", "j"}));
  EXPECT_THROW(A.intersect(B), IncompatibleSpaceError);
  // Different names are simply disjoint.
  Set C = Set::universe(Space("T", {"i", "j"}));
  EXPECT_TRUE(A.intersect(C).isEmpty());
}

TEST(SetTest, Projection) {
  Space Sp("S", {"i", "j"});
  Set Square = Set::fromConstraints(Sp, {}, {d(0), AffineExpr(2) - d(0), d(1), AffineExpr(2) - d(1)});
  EXPECT_EQ(pointsOf(Square.project({"j"})), (PointSet{{0}, {1}, {2}}));
  EXPECT_TRUE(Square.project({"i", "j"}).isEqual(Square));
  Set Line = Set::fromConstraints(Sp, {d(1) - d(0) * 2}, {d(0), AffineExpr(2) - d(0)});
  EXPECT_EQ(pointsOf(Line.project({"j"})), (PointSet{{0}, {2}, {4}}));
  EXPECT_THROW(Line.project({"k"}), std::invalid_argument);
}

TEST(SetTest, EnumerateInLexOrder) {
  Space Sp("S", {"i", "j"});
  Set Anti = Set::fromConstraints(Sp, {d(1) + d(0) - AffineExpr(3)}, {d(0), AffineExpr(3) - d(0)});
  std::vector<std::vector<Int>> Expected{{0, 3}, {1, 2}, {2, 1}, {3, 0}};
  EXPECT_EQ(Anti.points(), Expected);
  EXPECT_TRUE(Set().points().empty());
}

TEST(SetTest, RandomSetAxioms) {
  std::mt19937 Rng(3);
  for (int Trial = 0; Trial < 120; ++Trial) {
    Set A = randomSet(Rng), B = randomSet(Rng);
    PointSet PA = pointsOf(A), PB = pointsOf(B);
    PointSet PI, PU = PA, PD;
    for (const auto &X : PA) {
      if (PB.count(X))
        PI.insert(X);
      else
        PD.insert(X);
    }
    PU.insert(PB.begin(), PB.end());
    Set I = A.intersect(B), U = A.unite(B), D = A.subtract(B);
    EXPECT_EQ(pointsOf(I), PI) << "trial " << Trial;
    EXPECT_EQ(pointsOf(U), PU) << "trial " << Trial;
    EXPECT_EQ(pointsOf(D), PD) << "trial " << Trial;
    EXPECT_TRUE(piecesDisjoint(U));
    EXPECT_TRUE(piecesDisjoint(D));
    EXPECT_TRUE(U.subtract(B).isSubset(A));
    EXPECT_TRUE(I.isSubset(A));
  }
}

TEST(MapTest, LexminSimple) {
  Space In("X", {"x"}), Out("Y", {"y"});
  Map M = Map::fromConstraints(In, Out, {d(0)}, {d(1), AffineExpr(2) - d(1)});
  Map L = M.lexmin();
  std::vector<std::vector<Int>> Pairs;
  L.enumerate([&](const Space &, const Space &, const std::vector<Int> &P) { Pairs.push_back(P); });
  EXPECT_EQ(Pairs, (std::vector<std::vector<Int>>{{0, 0}}));
}

TEST(MapTest, RandomLexmin) {
  std::mt19937 Rng(9);
  std::uniform_int_distribution<int> Coef(-2, 2), Const(-3, 3);
  for (int Trial = 0; Trial < 60; ++Trial) {
    // x in [0, 4] -> (y0, y1) in [-3, 3]^2 with random coupling.
    std::vector<AffineExpr> Ineqs{d(0), AffineExpr(4) - d(0), d(1) + AffineExpr(3), AffineExpr(3) - d(1),
                                  d(2) + AffineExpr(3), AffineExpr(3) - d(2)};
    for (int K = 0; K < 2; ++K)
      Ineqs.push_back(d(0) * Coef(Rng) + d(1) * Coef(Rng) + d(2) * Coef(Rng) + AffineExpr(Const(Rng)));
    Map M = Map::fromConstraints(Space("X", {"x"}), Space("Y", {"a", "b"}), {}, Ineqs);
    if (Rng() % 2)
      M = M.unite(Map::fromConstraints(Space("X", {"x"}), Space("Y", {"a", "b"}), {d(1) - d(0), d(2) + d(0) - AffineExpr(1)},
                                       {d(0), AffineExpr(4) - d(0)}));
    std::map<Int, std::vector<Int>> Expected;
    M.enumerate([&](const Space &, const Space &, const std::vector<Int> &P) {
      std::vector<Int> Y{P[1], P[2]};
      auto It = Expected.find(P[0]);
      if (It == Expected.end() || Y < It->second)
        Expected[P[0]] = Y;
    });
    std::map<Int, std::vector<Int>> Got;
    M.lexmin().enumerate([&](const Space &, const Space &, const std::vector<Int> &P) {
      EXPECT_FALSE(Got.count(P[0])) << "trial " << Trial;
      Got[P[0]] = {P[1], P[2]};
    });
    EXPECT_EQ(Got, Expected) << "trial " << Trial;
  }
}

TEST(MapTest, ComposeAndInverse) {
  // f: S[i] -> M[3 - i], g: M[m] -> T[2m]
  Map F = Map::fromFunction(Space("S", {"i"}), Space("M", {"m"}), {AffineExpr(3) - d(0)})
              .intersectDomain(interval(0, 3));
  Map G = Map::fromFunction(Space("M", {"m"}), Space("T", {"t"}), {d(0) * 2});
  Map H = G.compose(F);
  std::vector<std::vector<Int>> Pairs;
  H.enumerate([&](const Space &, const Space &, const std::vector<Int> &P) { Pairs.push_back(P); });
  EXPECT_EQ(Pairs, (std::vector<std::vector<Int>>{{0, 6}, {1, 4}, {2, 2}, {3, 0}}));
  Map Inv = F.inverse();
  EXPECT_EQ(Inv.pieces().front().In.Name, "M");
  EXPECT_TRUE(Inv.inverse().isEqual(F));
  EXPECT_EQ(pointsOf(F.range()), (PointSet{{0}, {1}, {2}, {3}}));
  EXPECT_THROW(G.compose(Map::fromFunction(Space("S", {"i"}), Space("M", {"a", "b"}), {d(0), d(0)})),
               IncompatibleSpaceError);
}

TEST(MapTest, LexOrder) {
  Space Sp("", {"a", "b"});
  Map Lt = lexOrderMap(Sp, true);
  Set Box = Set::fromConstraints(Sp, {}, {d(0), AffineExpr(1) - d(0), d(1), AffineExpr(1) - d(1)});
  int Count = 0;
  Lt.intersectDomain(Box).intersectRange(Box).enumerate([&](const Space &, const Space &, const std::vector<Int> &P) {
    EXPECT_TRUE(std::vector<Int>(P.begin(), P.begin() + 2) < std::vector<Int>(P.begin() + 2, P.end()));
    ++Count;
  });
  EXPECT_EQ(Count, 6); // 4 choose 2
}
