// SPDX-License-Identifier: Apache-2.0
//
// Analytical LRU cache model: backward stack distances as piecewise
// quasi-polynomials over the iteration domain, floor rewrites that lower
// their degree, and exact counting of compulsory and capacity misses.

#pragma once

#include "lrumodel/frontend/Program.h"
#include "lrumodel/model/Report.h"
#include "lrumodel/poly/Counting.h"

#include <optional>

namespace lrumodel::model {

using poly::Map;
using poly::Piece;
using poly::QuasiPolynomial;
using poly::Set;

/// Lexicographic order on the schedule range: Strict relates each schedule
/// value to all later ones, Reflexive also to itself.
struct OrderMaps {
  Map Strict;
  Map Reflexive;
};

OrderMaps buildOrderMaps(const frontend::Program &P);

/// Stack distances (in cache lines, including the reused line) of one
/// access. Piece domains live in the statement space without the access
/// dimension and cover the instances that reuse a line.
struct DistanceEntry {
  size_t Statement = 0;
  unsigned Access = 0;
  std::vector<Piece> Pieces;
};

struct DistanceSet {
  std::vector<DistanceEntry> Entries;
  size_t numPieces() const;
};

DistanceSet computeStackDistances(const frontend::Program &P, poly::CountingStats *Stats = nullptr);

/// First touches of a cache line, per statement.
std::vector<BigInt> countCompulsoryMisses(const frontend::Program &P);

/// Number of points of an affine piece whose distance exceeds the capacity.
BigInt countAffinePiece(const Piece &P, Int CapacityLines, poly::CountingStats *Stats = nullptr);

/// Dimensions to enumerate so the remaining polynomial becomes affine, and
/// the projection of the piece domain onto them.
struct EnumerationDomain {
  std::vector<unsigned> Dims;
  Set Points;
};

EnumerationDomain getNonAffineDomain(const Piece &P);

/// Fixes the given dimensions to values; the result drops those dimensions.
Piece bindDimensions(const Piece &P, const std::vector<unsigned> &Dims, const std::vector<Int> &Values);

/// Splits the domain by residue so that differences of floor terms with
/// equal arguments up to a constant become constants. Returns nullopt unless
/// some resulting polynomial has a lower degree.
std::optional<std::vector<Piece>> equalize(const Piece &P);

/// Splits the domain by the residue of a floor term's argument, replacing
/// the floor term by an affine expression per residue. Returns nullopt unless
/// some resulting polynomial has a lower degree.
std::optional<std::vector<Piece>> rasterize(const Piece &P);

/// Counts by evaluating the polynomial at every domain point.
BigInt countByEnumeration(const Piece &P, Int CapacityLines);

struct ModelOptions {
  bool Equalization = true;
  bool Rasterization = true;
  bool PartialEnumeration = true;
};

/// Per-level capacity misses of a list of pieces: affine pieces are counted
/// symbolically, the others by enumerating their non-affine dimensions.
std::vector<BigInt> countCapacityMisses(const std::vector<Piece> &Pieces, const std::vector<Int> &CapacityLines,
                                        const ModelOptions &Options = {}, ModelStats *Stats = nullptr);

/// Full analysis. Distances, rewrites and enumeration domains are computed
/// once; only threshold counting repeats per level.
MissReport analyze(const frontend::Program &P, const CacheConfig &Config, const ModelOptions &Options = {},
                   DistanceSet *Distances = nullptr);

/// Analysis from distances computed by computeStackDistances for the same
/// program; Distances time is reported as zero.
MissReport analyze(const frontend::Program &P, const CacheConfig &Config, const DistanceSet &Distances,
                   const ModelOptions &Options = {});

} // namespace lrumodel::model
