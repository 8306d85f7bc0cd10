// SPDX-License-Identifier: Apache-2.0
//
// A conjunction of affine equalities and inequalities over integer columns.
// Columns are the visible dimensions followed by local (existentially
// quantified) variables. A local may carry a floor-division definition
// `q = floor(numerator / denominator)`, in which case its value is a function
// of the other columns and its two defining inequalities are implicit.

#pragma once

#include "lrumodel/poly/AffineExpr.h"
#include "lrumodel/poly/Int.h"
#include "lrumodel/poly/Omega.h"

#include <functional>
#include <optional>
#include <vector>

namespace lrumodel::poly {

struct DivDef {
  Row Numerator; // same layout as constraint rows
  Int Denominator = 1;

  bool operator==(const DivDef &) const = default;
};

class Conjunction {
public:
  explicit Conjunction(unsigned NumDims = 0);

  static Conjunction universe(unsigned NumDims) { return Conjunction(NumDims); }
  static Conjunction emptySet(unsigned NumDims);

  unsigned numDims() const { return NumDims; }
  unsigned numLocals() const { return static_cast<unsigned>(Locals.size()); }
  unsigned numCols() const { return NumDims + numLocals(); }
  unsigned rowWidth() const { return numCols() + 1; }
  bool isLocal(unsigned Col) const { return Col >= NumDims; }

  const std::vector<Row> &equalities() const { return Eqs; }
  const std::vector<Row> &inequalities() const { return Ineqs; }
  const std::optional<DivDef> &definition(unsigned Col) const { return Locals[Col - NumDims]; }
  bool isDefined(unsigned Col) const { return Col < NumDims || Locals[Col - NumDims].has_value(); }

  /// True when a previous operation proved the conjunction empty. A false
  /// result does not imply non-emptiness; use isEmpty().
  bool isMarkedEmpty() const { return MarkedEmpty; }
  void markEmpty();

  Row zeroRow() const { return Row(rowWidth(), 0); }

  void addEquality(Row R);
  void addInequality(Row R);

  /// Appends an undefined local; returns its column.
  unsigned addLocal();
  /// Appends (or reuses an identical) floor-division local; returns its column.
  unsigned addDiv(Row Numerator, Int Denominator);
  /// Turns a defined local into a plain existential, materializing its two
  /// defining inequalities.
  void undefine(unsigned Col);

  /// Inserts `Count` new unconstrained dimension columns before dimension `Pos`.
  void insertDims(unsigned Pos, unsigned Count);
  /// Reorders dimensions: new dimension I is old dimension Order[I].
  void permuteDims(const std::vector<unsigned> &Order);
  /// Turns the given dimensions into undefined locals (removing them from the
  /// visible tuple).
  void dimsToLocals(const std::vector<unsigned> &DimIdx);

  /// Replaces column `Col` by `Expr / Denom` everywhere (Expr[Col + 1] == 0,
  /// Denom > 0). The caller guarantees divisibility where needed. The column
  /// remains with all-zero coefficients.
  void substitute(unsigned Col, const Row &Expr, Int Denom = 1);
  /// Rewrites column `Col` as Mult * x + Offset in terms of a new variable x
  /// occupying the same column.
  void scaleColumn(unsigned Col, Int Mult, Int Offset);
  /// Removes a column whose coefficients are all zero.
  void removeColumn(unsigned Col);

  /// Appends the locals of `Other` (same dimensions) with their definitions
  /// and returns, for each column of `Other`, its column here.
  std::vector<unsigned> embedLocalsOf(const Conjunction &Other);
  /// Rewrites a row of another conjunction through a column map.
  Row remapRow(const Row &R, const std::vector<unsigned> &ColMap) const;

  /// Normalizes rows, eliminates locals through unit equalities, merges
  /// duplicate divisions and drops unused locals. Returns false if the
  /// conjunction was found empty.
  bool simplify();

  /// Exact integer emptiness test.
  bool isEmpty() const;

  /// All inequality and equality rows including the implicit division rows.
  std::vector<Row> allInequalities() const;

  /// True if every local is defined and no definition depends on an
  /// undefined local.
  bool allLocalsDefined() const;

  /// Evaluates the defined locals for the given dimension values; returns
  /// nullopt if some local is undefined.
  std::optional<std::vector<Int>> completePoint(const std::vector<Int> &DimValues) const;
  /// Checks whether a point (dimension values only) satisfies the constraints.
  bool containsPoint(const std::vector<Int> &DimValues) const;

  /// Removes inequalities implied by the remaining constraints.
  void removeRedundant();

  /// Columns (other than Col) that the definition of `Col` depends on,
  /// transitively.
  bool dependsOn(unsigned Col, unsigned Other) const;

  bool operator==(const Conjunction &) const = default;

private:
  friend class Eliminator;

  void addColumnAtEnd();
  void normalizeDefinition(unsigned Col);
  bool substituteLocalEqualities();
  void mergeDuplicateDivs();
  void removeUnusedLocals();
  bool reduceDivs();

  unsigned NumDims;
  std::vector<std::optional<DivDef>> Locals;
  std::vector<Row> Eqs;
  std::vector<Row> Ineqs;
  bool MarkedEmpty = false;
};

/// Eliminates every undefined local, returning an equivalent union of
/// conjunctions whose locals are all floor divisions of the dimensions.
std::vector<Conjunction> eliminateUndefinedLocals(Conjunction C);

/// Integer projection: removes the given dimensions (existentially).
std::vector<Conjunction> projectOutDims(Conjunction C, const std::vector<unsigned> &DimIdx);

/// Intersection of two conjunctions over the same dimensions.
Conjunction intersect(const Conjunction &A, const Conjunction &B);

/// A \ B as a list of pairwise disjoint conjunctions. B's locals must be
/// defined (see eliminateUndefinedLocals).
std::vector<Conjunction> subtract(const Conjunction &A, const Conjunction &B);

/// Adds the division locals needed by `E` (dimension indices are columns)
/// and returns E as a constraint row over the conjunction's columns.
Row toRow(Conjunction &C, const AffineExpr &E);
/// A column as an expression over the dimensions (divisions expanded).
AffineExpr columnExpr(const Conjunction &C, unsigned Col);
/// A row as an expression over the dimensions (divisions expanded).
AffineExpr rowExpr(const Conjunction &C, const Row &R);

/// Complement of a constraint row as a disjunction (used by subtract).
std::vector<Row> negateInequality(const Row &R);

} // namespace lrumodel::poly
