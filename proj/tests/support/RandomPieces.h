// SPDX-License-Identifier: Apache-2.0
//
// Random non-affine pieces with floor terms over small boxes, and checks for
// the floor rewrites and the partial enumeration.

#pragma once

#include "lrumodel/model/Model.h"

#include <map>
#include <random>
#include <sstream>
#include <string>

namespace lrumodel::testing {

using poly::BigInt;
using poly::Int;

using poly::AffineExpr;
using poly::QuasiPolynomial;

/// A piece over [i, j, k] in a box with a polynomial of degree two. Most
/// pieces use the shapes the floor rewrites target: differences of floors
/// with shifted arguments, and an index minus a multiple of its floor.
inline poly::Piece randomFloorPiece(std::mt19937 &Rng) {
  std::uniform_int_distribution<int> Small(-3, 3), Div(2, 4), Shift(0, 3), Hi(2, 11);
  auto I = AffineExpr::dim(0), J = AffineExpr::dim(1), K = AffineExpr::dim(2);
  auto Q = [](const AffineExpr &E) { return QuasiPolynomial::fromAffine(E); };
  Int D = Div(Rng);
  AffineExpr Inner = I * (1 + Rng() % 2) + AffineExpr(Small(Rng));
  if (Rng() % 3 == 0)
    Inner += K;
  QuasiPolynomial Floor = Q(AffineExpr::floorOf(Inner, D));
  QuasiPolynomial Shifted = Q(AffineExpr::floorOf(Inner + AffineExpr(Shift(Rng)), D));
  QuasiPolynomial Factor = Q(J * Small(Rng) + K * Small(Rng) + AffineExpr(Small(Rng)));
  QuasiPolynomial Base = Q(I * Small(Rng) + J * Small(Rng) + AffineExpr(3 + Shift(Rng)));
  QuasiPolynomial Poly;
  switch (Rng() % 4) {
  case 0:
    Poly = (Shifted - Floor) * Factor;
    break;
  case 1:
    Poly = (Q(Inner) - QuasiPolynomial(D) * Floor) * Factor;
    break;
  case 2:
    Poly = Floor * Factor;
    break;
  default:
    Poly = Floor * Shifted + Q(J) * Q(K);
    break;
  }
  Poly += Base;
  std::vector<AffineExpr> Ineqs{I, AffineExpr(Hi(Rng)) - I, J, AffineExpr(Hi(Rng) / 2) - J, K,
                                AffineExpr(Shift(Rng)) - K};
  if (Rng() % 2)
    Ineqs.push_back(I - J);
  return {poly::Set::fromConstraints(poly::Space::anonymous("P", 3), {}, Ineqs), Poly};
}

/// Empty when Pieces partition the domain of Original and agree with it
/// pointwise; otherwise the first mismatch.
inline std::string checkRewrite(const poly::Piece &Original, const std::vector<poly::Piece> &Pieces) {
  std::map<std::vector<Int>, BigInt> Expected;
  Original.Domain.enumerate(
      [&](const poly::Space &, const std::vector<Int> &X) { Expected[X] = Original.Poly.evaluateInteger(X); });
  std::map<std::vector<Int>, int> Seen;
  std::ostringstream Err;
  for (const poly::Piece &Pc : Pieces)
    Pc.Domain.enumerate([&](const poly::Space &, const std::vector<Int> &X) {
      if (Err.tellp() > 0)
        return;
      auto It = Expected.find(X);
      if (It == Expected.end())
        Err << "point outside the original domain";
      else if (++Seen[X] > 1)
        Err << "overlapping pieces";
      else if (Pc.Poly.evaluateInteger(X) != It->second)
        Err << "value " << Pc.Poly.evaluateInteger(X) << " differs from " << It->second;
    });
  if (Err.tellp() == 0 && Seen.size() != Expected.size())
    Err << "pieces cover " << Seen.size() << " of " << Expected.size() << " points";
  return Err.str();
}

/// Misses of a piece by evaluating every point.
inline BigInt enumerateMisses(const poly::Piece &P, Int CapacityLines) {
  BigInt Count = 0;
  P.Domain.enumerate([&](const poly::Space &, const std::vector<Int> &X) {
    if (P.Poly.evaluate(X) > CapacityLines)
      ++Count;
  });
  return Count;
}

} // namespace lrumodel::testing
