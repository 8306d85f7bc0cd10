// SPDX-License-Identifier: Apache-2.0
//
// Named integer sets and maps as unions of basic pieces. Pieces with
// different tuple names are disjoint by construction; pieces sharing a name
// are kept pairwise disjoint.

#pragma once

#include "lrumodel/poly/Conjunction.h"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lrumodel::poly {

/// A tuple name plus dimension identifiers.
struct Space {
  std::string Name;
  std::vector<std::string> Dims;

  Space() = default;
  Space(std::string Name, std::vector<std::string> Dims);
  /// Space with default dimension names i0, i1, ...
  static Space anonymous(std::string Name, unsigned Arity);

  unsigned arity() const { return static_cast<unsigned>(Dims.size()); }
  bool compatible(const Space &O) const { return Name == O.Name && arity() == O.arity(); }
  /// Index of a dimension identifier; throws if unknown.
  unsigned indexOf(const std::string &Dim) const;
  std::string str() const;
};

struct BasicSet {
  Space Sp;
  Conjunction C;
};

struct BasicMap {
  Space In;
  Space Out;
  Conjunction C; // input dimensions first, then output dimensions
};

/// Orders tuple names for lexicographic comparisons across spaces.
using NameOrder = std::function<bool(const std::string &, const std::string &)>;

class Set {
public:
  Set() = default;
  explicit Set(BasicSet B);
  /// Disjoint union of arbitrary (possibly overlapping) pieces.
  static Set fromPieces(std::vector<BasicSet> Pieces);
  static Set universe(const Space &Sp);
  /// { Sp : Eqs = 0 and Ineqs >= 0 }, expressions over the space's dimensions.
  static Set fromConstraints(const Space &Sp, const std::vector<AffineExpr> &Eqs,
                             const std::vector<AffineExpr> &Ineqs);

  const std::vector<BasicSet> &pieces() const { return Pieces; }
  size_t numPieces() const { return Pieces.size(); }
  bool isEmpty() const;

  Set intersect(const Set &O) const;
  Set unite(const Set &O) const;
  Set subtract(const Set &O) const;
  /// Pieces whose tuple name is `Name`.
  Set restrictTo(const std::string &Name) const;

  /// Keeps the listed dimensions (by identifier, in the given order).
  Set project(const std::vector<std::string> &Keep) const;
  /// Keeps the listed dimensions (by index); all pieces must share a space.
  Set projectIndices(const std::vector<unsigned> &Keep) const;

  /// Visits every point once, in lexicographic order per space (spaces in
  /// order of first appearance).
  void enumerate(const std::function<void(const Space &, const std::vector<Int> &)> &Fn) const;
  std::vector<std::vector<Int>> points() const;

  bool isSubset(const Set &O) const;
  bool isEqual(const Set &O) const;

  /// Merges pieces that together form a single basic set (best effort).
  Set coalesce() const;

  std::string str() const;

private:
  friend class Map;
  std::vector<BasicSet> Pieces;
};

class Map {
public:
  Map() = default;
  explicit Map(BasicMap B);
  static Map fromPieces(std::vector<BasicMap> Pieces);
  /// { In -> Out : Eqs = 0 and Ineqs >= 0 }, expressions over the input
  /// dimensions followed by the output dimensions.
  static Map fromConstraints(const Space &In, const Space &Out, const std::vector<AffineExpr> &Eqs,
                             const std::vector<AffineExpr> &Ineqs);
  /// { In -> Out : out_k = Exprs[k] } with expressions over the input dims.
  static Map fromFunction(const Space &In, const Space &Out, const std::vector<AffineExpr> &Exprs);
  static Map identity(const Set &Domain);

  const std::vector<BasicMap> &pieces() const { return Pieces; }
  size_t numPieces() const { return Pieces.size(); }
  bool isEmpty() const;

  Map intersect(const Map &O) const;
  Map intersectDomain(const Set &S) const;
  Map intersectRange(const Set &S) const;
  Map unite(const Map &O) const;
  Map subtract(const Map &O) const;

  /// this ∘ F: pairs (x, z) with (x, y) in F and (y, z) in this.
  Map compose(const Map &F) const;
  Map inverse() const;
  Set domain() const;
  Set range() const;
  /// Per input tuple, the lexicographically smallest output tuple. Output
  /// tuple names compare as a leading dimension (string order by default).
  Map lexmin(const NameOrder &Order = {}) const;

  /// The relation as a set over the concatenated dimensions, tuple name
  /// "In->Out".
  Set wrap() const;
  void enumerate(const std::function<void(const Space &, const Space &, const std::vector<Int> &)> &Fn) const;

  bool isEqual(const Map &O) const;

  std::string str() const;

private:
  std::vector<BasicMap> Pieces;
};

/// Lexicographic order relation over a space: strict (Out > In) or reflexive.
Map lexOrderMap(const Space &Sp, bool Strict);

} // namespace lrumodel::poly
