// SPDX-License-Identifier: Apache-2.0
//
// Quasi-polynomials: polynomials with rational coefficients over dimensions
// and floor atoms floor(inner / divisor) of affine expressions.

#pragma once

#include "lrumodel/poly/AffineExpr.h"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lrumodel::poly {

/// A dimension (Dim >= 0) or a floor atom floor(Inner / Divisor).
struct Atom {
  int Dim = -1;
  AffineExpr Inner;
  Int Divisor = 1;

  static Atom dimension(unsigned D) { return Atom{static_cast<int>(D), {}, 1}; }
  bool isDim() const { return Dim >= 0; }
  bool dependsOn(unsigned D) const { return isDim() ? Dim == static_cast<int>(D) : Inner.dependsOn(D); }
  Int evaluate(const std::vector<Int> &Point) const;
  /// The atom as an affine expression.
  AffineExpr expr() const;

  int compare(const Atom &O) const;
  bool operator<(const Atom &O) const { return compare(O) < 0; }
  bool operator==(const Atom &O) const { return compare(O) == 0; }
};

/// Sorted atoms with positive exponents.
using Monomial = std::vector<std::pair<Atom, unsigned>>;

class QuasiPolynomial {
public:
  QuasiPolynomial() = default;
  QuasiPolynomial(const Rational &C);
  QuasiPolynomial(long C) : QuasiPolynomial(Rational(C)) {}
  static QuasiPolynomial fromAffine(const AffineExpr &E);
  static QuasiPolynomial dim(unsigned D) { return fromAffine(AffineExpr::dim(D)); }
  /// C * M for a sorted monomial M.
  static QuasiPolynomial monomial(Monomial M, const Rational &C);

  const std::map<Monomial, Rational> &terms() const { return Terms; }
  bool isZero() const { return Terms.empty(); }
  bool isConstant() const;
  Rational constantTerm() const;

  /// Total degree; floor atoms count as degree one.
  unsigned degree() const;
  bool isAffine() const { return degree() <= 1; }
  /// Affine form of a degree <= 1 polynomial with integral coefficients.
  std::optional<AffineExpr> asAffine() const;

  bool dependsOn(unsigned D) const;
  /// True if `D` occurs inside some floor atom.
  bool dependsInsideFloor(unsigned D) const;
  /// Degree of the polynomial in dimension `D` (dimension atom only).
  unsigned degreeIn(unsigned D) const;
  /// Coefficients C_k with P = sum C_k * x_D^k; D must not occur in floors.
  std::vector<QuasiPolynomial> coefficientsIn(unsigned D) const;
  /// Distinct floor atoms that occur.
  std::vector<Atom> floorAtoms() const;
  unsigned dimBound() const;

  Rational evaluate(const std::vector<Int> &Point) const;
  /// Evaluates and checks that the value is an integer.
  BigInt evaluateInteger(const std::vector<Int> &Point) const;

  QuasiPolynomial substitute(unsigned D, const AffineExpr &Value) const;
  QuasiPolynomial substitute(unsigned D, const QuasiPolynomial &Value) const;
  QuasiPolynomial remapDims(const std::vector<unsigned> &Map) const;
  /// Replaces every floor atom A for which Fn returns a value by that value.
  template <typename FnT> QuasiPolynomial mapAtoms(FnT Fn) const;

  QuasiPolynomial &operator+=(const QuasiPolynomial &O);
  QuasiPolynomial &operator-=(const QuasiPolynomial &O);
  QuasiPolynomial &operator*=(const QuasiPolynomial &O);
  QuasiPolynomial &operator*=(const Rational &K);
  friend QuasiPolynomial operator+(QuasiPolynomial A, const QuasiPolynomial &B) { return A += B; }
  friend QuasiPolynomial operator-(QuasiPolynomial A, const QuasiPolynomial &B) { return A -= B; }
  friend QuasiPolynomial operator*(QuasiPolynomial A, const QuasiPolynomial &B) { return A *= B; }
  QuasiPolynomial pow(unsigned E) const;

  bool operator==(const QuasiPolynomial &O) const { return Terms == O.Terms; }

  std::string str(const std::vector<std::string> &Names) const;
  std::string str() const;

private:
  void addTerm(Monomial M, const Rational &C);
  std::map<Monomial, Rational> Terms;
};

/// Substitutes atoms through a callback returning an optional replacement.
QuasiPolynomial mapAtomsImpl(const QuasiPolynomial &P,
                             const std::function<std::optional<QuasiPolynomial>(const Atom &)> &Fn);

template <typename FnT> QuasiPolynomial QuasiPolynomial::mapAtoms(FnT Fn) const { return mapAtomsImpl(*this, Fn); }

/// Closed form of sum_{t=1}^{n} t^K as a polynomial in n (Faulhaber).
const std::vector<Rational> &faulhaberCoefficients(unsigned K);

/// sum_{x = Lo}^{Hi} P where x is dimension D; Lo and Hi must not depend on D.
/// The result is valid whenever Lo <= Hi + 1.
QuasiPolynomial sumOver(const QuasiPolynomial &P, unsigned D, const AffineExpr &Lo, const AffineExpr &Hi);

} // namespace lrumodel::poly
