// SPDX-License-Identifier: Apache-2.0
//
// Affine expressions over dimension indices with (possibly nested) floor
// division terms: constant + sum(c_i * x_i) + sum(c_k * floor(inner_k / d_k)).

#pragma once

#include "lrumodel/poly/Int.h"

#include <map>
#include <string>
#include <vector>

namespace lrumodel::poly {

struct DivTerm;

class AffineExpr {
public:
  Int Constant = 0;
  std::map<unsigned, Int> Coeffs;
  /// Sorted by (Inner, Divisor) with no duplicates and no zero coefficients.
  std::vector<DivTerm> Divs;

  AffineExpr() = default;
  AffineExpr(Int C) : Constant(C) {}

  static AffineExpr dim(unsigned D, Int Coeff = 1);
  /// floor(Inner / Divisor) in canonical form (integer parts pulled out).
  static AffineExpr floorOf(const AffineExpr &Inner, Int Divisor);
  /// Inner mod Divisor, i.e. Inner - Divisor * floor(Inner / Divisor).
  static AffineExpr modOf(const AffineExpr &Inner, Int Divisor);

  bool isConstant() const { return Coeffs.empty() && Divs.empty(); }
  bool hasDivs() const { return !Divs.empty(); }
  Int coeff(unsigned D) const;
  /// True if the dimension occurs anywhere, including inside divisions.
  bool dependsOn(unsigned D) const;
  /// True if the dimension occurs inside a division term.
  bool dependsInsideDiv(unsigned D) const;
  /// One past the largest dimension index referenced (0 if none).
  unsigned dimBound() const;

  Int evaluate(const std::vector<Int> &Point) const;
  AffineExpr substitute(unsigned D, const AffineExpr &Value) const;
  /// Renumbers dimensions: D -> Map[D].
  AffineExpr remapDims(const std::vector<unsigned> &Map) const;

  AffineExpr &operator+=(const AffineExpr &O);
  AffineExpr &operator-=(const AffineExpr &O);
  AffineExpr &operator*=(Int K);
  friend AffineExpr operator+(AffineExpr A, const AffineExpr &B) { return A += B; }
  friend AffineExpr operator-(AffineExpr A, const AffineExpr &B) { return A -= B; }
  friend AffineExpr operator*(AffineExpr A, Int K) { return A *= K; }
  friend AffineExpr operator*(Int K, AffineExpr A) { return A *= K; }
  AffineExpr operator-() const { return *this * -1; }

  std::string str(const std::vector<std::string> &Names) const;
  std::string str() const;

  int compare(const AffineExpr &O) const;
  bool operator==(const AffineExpr &O) const { return compare(O) == 0; }
  bool operator<(const AffineExpr &O) const { return compare(O) < 0; }

private:
  void addDiv(Int Coeff, const AffineExpr &Inner, Int Divisor);
};

struct DivTerm {
  Int Coeff = 0;
  AffineExpr Inner;
  Int Divisor = 1;
};

/// Default names for anonymous dimensions: i0, i1, ...
std::vector<std::string> defaultDimNames(unsigned Count);

} // namespace lrumodel::poly
