// SPDX-License-Identifier: Apache-2.0
//
// Symbolic counting of integer points: dimension-recursive summation with
// Faulhaber closed forms, chamber splitting on active bounds, and residue
// splitting for floor terms. Any shape outside this class falls back to
// explicit enumeration, so results are always exact.

#pragma once

#include "lrumodel/poly/QuasiPolynomial.h"
#include "lrumodel/poly/Set.h"

namespace lrumodel::poly {

/// A quasi-polynomial valid on a subdomain.
struct Piece {
  Set Domain;
  QuasiPolynomial Poly;
};

/// A quasi-polynomial valid on a conjunction (same dimension numbering).
struct CountTerm {
  Conjunction Domain;
  QuasiPolynomial Poly;
};

struct CountingStats {
  size_t SymbolicSteps = 0;
  size_t ResidueSplits = 0;
  size_t Fallbacks = 0;
};

/// Sums `Poly` over the dimensions [NumParams, numDims) of `C`. The result
/// terms have NumParams dimensions and pairwise disjoint domains; parameter
/// values outside every domain have an empty fibre.
std::vector<CountTerm> sumOverTrailingDims(const Conjunction &C, const QuasiPolynomial &Poly, unsigned NumParams,
                                           CountingStats *Stats = nullptr);

/// Exact number of points of a conjunction.
BigInt countPoints(const Conjunction &C, CountingStats *Stats = nullptr);

/// Exact number of points of a set (throws UnboundedError if unbounded).
BigInt cardinality(const Set &S, CountingStats *Stats = nullptr);

/// Pieces whose domains partition the map's domain, with the number of
/// related range points per domain point.
std::vector<Piece> cardinalityPerDomainPoint(const Map &M, CountingStats *Stats = nullptr);

/// Adds a term to a list of disjoint terms, refining domains so the result
/// stays disjoint (values add on overlaps).
void addPiecewise(std::vector<CountTerm> &Terms, CountTerm T);

/// Merges terms with equal polynomials whose domains differ in one
/// complementary inequality.
std::vector<CountTerm> coalesceTerms(std::vector<CountTerm> Terms);

} // namespace lrumodel::poly
