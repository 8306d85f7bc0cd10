// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/QuasiPolynomial.h"

#include <algorithm>
#include <cassert>
#include <set>
#include <sstream>

namespace lrumodel::poly {

namespace {

Monomial multiply(const Monomial &A, const Monomial &B) {
  Monomial R;
  size_t I = 0, J = 0;
  while (I < A.size() || J < B.size()) {
    if (J == B.size() || (I < A.size() && A[I].first < B[J].first)) {
      R.push_back(A[I++]);
    } else if (I == A.size() || B[J].first < A[I].first) {
      R.push_back(B[J++]);
    } else {
      R.emplace_back(A[I].first, A[I].second + B[J].second);
      ++I;
      ++J;
    }
  }
  return R;
}

BigInt powBig(Int Base, unsigned E) {
  BigInt R = 1;
  mpz_pow_ui(R.get_mpz_t(), toBig(Base).get_mpz_t(), E);
  return R;
}

} // namespace

//===----------------------------------------------------------------------===//
// Atom
//===----------------------------------------------------------------------===//

Int Atom::evaluate(const std::vector<Int> &Point) const {
  if (isDim()) {
    if (static_cast<size_t>(Dim) >= Point.size())
      throw std::out_of_range("point has too few dimensions");
    return Point[Dim];
  }
  return floorDiv(Inner.evaluate(Point), Divisor);
}

AffineExpr Atom::expr() const {
  if (isDim())
    return AffineExpr::dim(static_cast<unsigned>(Dim));
  return AffineExpr::floorOf(Inner, Divisor);
}

int Atom::compare(const Atom &O) const {
  if (Dim != O.Dim)
    return Dim < O.Dim ? 1 : -1; // floor atoms (Dim = -1) sort last
  if (Divisor != O.Divisor)
    return Divisor < O.Divisor ? -1 : 1;
  return Inner.compare(O.Inner);
}

//===----------------------------------------------------------------------===//
// QuasiPolynomial
//===----------------------------------------------------------------------===//

QuasiPolynomial::QuasiPolynomial(const Rational &C) {
  if (C != 0)
    Terms.emplace(Monomial{}, C);
}

void QuasiPolynomial::addTerm(Monomial M, const Rational &C) {
  if (C == 0)
    return;
  auto [It, Inserted] = Terms.try_emplace(std::move(M), C);
  if (!Inserted) {
    It->second += C;
    if (It->second == 0)
      Terms.erase(It);
  }
}

QuasiPolynomial QuasiPolynomial::monomial(Monomial M, const Rational &C) {
  QuasiPolynomial P;
  P.addTerm(std::move(M), C);
  return P;
}

QuasiPolynomial QuasiPolynomial::fromAffine(const AffineExpr &E) {
  QuasiPolynomial P(Rational(toBig(E.Constant)));
  for (auto &[D, C] : E.Coeffs)
    P.addTerm({{Atom::dimension(D), 1}}, Rational(toBig(C)));
  for (const DivTerm &T : E.Divs)
    P.addTerm({{Atom{-1, T.Inner, T.Divisor}, 1}}, Rational(toBig(T.Coeff)));
  return P;
}

bool QuasiPolynomial::isConstant() const {
  return Terms.empty() || (Terms.size() == 1 && Terms.begin()->first.empty());
}

Rational QuasiPolynomial::constantTerm() const {
  auto It = Terms.find(Monomial{});
  return It == Terms.end() ? Rational(0) : It->second;
}

unsigned QuasiPolynomial::degree() const {
  unsigned Deg = 0;
  for (auto &[M, C] : Terms) {
    unsigned D = 0;
    for (auto &[A, E] : M)
      D += E;
    Deg = std::max(Deg, D);
  }
  return Deg;
}

std::optional<AffineExpr> QuasiPolynomial::asAffine() const {
  if (degree() > 1)
    return std::nullopt;
  AffineExpr R;
  for (auto &[M, C] : Terms) {
    if (C.get_den() != 1)
      return std::nullopt;
    Int K = toInt(C.get_num());
    if (M.empty())
      R += AffineExpr(K);
    else
      R += M[0].first.expr() * K;
  }
  return R;
}

bool QuasiPolynomial::dependsOn(unsigned D) const {
  for (auto &[M, C] : Terms)
    for (auto &[A, E] : M)
      if (A.dependsOn(D))
        return true;
  return false;
}

bool QuasiPolynomial::dependsInsideFloor(unsigned D) const {
  for (auto &[M, C] : Terms)
    for (auto &[A, E] : M)
      if (!A.isDim() && A.dependsOn(D))
        return true;
  return false;
}

unsigned QuasiPolynomial::degreeIn(unsigned D) const {
  unsigned Deg = 0;
  for (auto &[M, C] : Terms)
    for (auto &[A, E] : M)
      if (A.isDim() && A.Dim == static_cast<int>(D))
        Deg = std::max(Deg, E);
  return Deg;
}

std::vector<QuasiPolynomial> QuasiPolynomial::coefficientsIn(unsigned D) const {
  assert(!dependsInsideFloor(D));
  std::vector<QuasiPolynomial> Out(degreeIn(D) + 1);
  for (auto &[M, C] : Terms) {
    unsigned K = 0;
    Monomial Rest;
    for (auto &[A, E] : M) {
      if (A.isDim() && A.Dim == static_cast<int>(D))
        K = E;
      else
        Rest.emplace_back(A, E);
    }
    Out[K].addTerm(std::move(Rest), C);
  }
  return Out;
}

std::vector<Atom> QuasiPolynomial::floorAtoms() const {
  std::set<Atom> Seen;
  for (auto &[M, C] : Terms)
    for (auto &[A, E] : M)
      if (!A.isDim())
        Seen.insert(A);
  return {Seen.begin(), Seen.end()};
}

unsigned QuasiPolynomial::dimBound() const {
  unsigned B = 0;
  for (auto &[M, C] : Terms)
    for (auto &[A, E] : M)
      B = std::max(B, A.isDim() ? static_cast<unsigned>(A.Dim) + 1 : A.Inner.dimBound());
  return B;
}

Rational QuasiPolynomial::evaluate(const std::vector<Int> &Point) const {
  Rational Sum = 0;
  for (auto &[M, C] : Terms) {
    BigInt Prod = 1;
    for (auto &[A, E] : M)
      Prod *= powBig(A.evaluate(Point), E);
    Sum += C * Rational(Prod);
  }
  return Sum;
}

BigInt QuasiPolynomial::evaluateInteger(const std::vector<Int> &Point) const {
  Rational V = evaluate(Point);
  if (V.get_den() != 1)
    throw std::domain_error("quasi-polynomial value " + V.get_str() + " is not an integer");
  return V.get_num();
}

QuasiPolynomial mapAtomsImpl(const QuasiPolynomial &P,
                             const std::function<std::optional<QuasiPolynomial>(const Atom &)> &Fn) {
  QuasiPolynomial Out;
  for (auto &[M, C] : P.terms()) {
    QuasiPolynomial Term(C);
    Monomial Kept;
    for (auto &[A, E] : M) {
      if (auto Repl = Fn(A))
        Term *= Repl->pow(E);
      else
        Kept.emplace_back(A, E);
    }
    if (!Kept.empty())
      Term *= QuasiPolynomial::monomial(std::move(Kept), 1);
    Out += Term;
  }
  return Out;
}

QuasiPolynomial QuasiPolynomial::substitute(unsigned D, const AffineExpr &Value) const {
  if (!dependsOn(D))
    return *this;
  return mapAtoms([&](const Atom &A) -> std::optional<QuasiPolynomial> {
    if (!A.dependsOn(D))
      return std::nullopt;
    if (A.isDim())
      return fromAffine(Value);
    return fromAffine(AffineExpr::floorOf(A.Inner.substitute(D, Value), A.Divisor));
  });
}

QuasiPolynomial QuasiPolynomial::substitute(unsigned D, const QuasiPolynomial &Value) const {
  if (auto Aff = Value.asAffine())
    return substitute(D, *Aff);
  assert(!dependsInsideFloor(D) && "non-affine value substituted into a floor");
  return mapAtoms([&](const Atom &A) -> std::optional<QuasiPolynomial> {
    if (A.isDim() && A.Dim == static_cast<int>(D))
      return Value;
    return std::nullopt;
  });
}

QuasiPolynomial QuasiPolynomial::remapDims(const std::vector<unsigned> &Map) const {
  return mapAtoms([&](const Atom &A) -> std::optional<QuasiPolynomial> {
    if (A.isDim())
      return dim(Map.at(A.Dim));
    return fromAffine(AffineExpr::floorOf(A.Inner.remapDims(Map), A.Divisor));
  });
}

QuasiPolynomial &QuasiPolynomial::operator+=(const QuasiPolynomial &O) {
  for (auto &[M, C] : O.Terms)
    addTerm(M, C);
  return *this;
}

QuasiPolynomial &QuasiPolynomial::operator-=(const QuasiPolynomial &O) {
  for (auto &[M, C] : O.Terms)
    addTerm(M, -C);
  return *this;
}

QuasiPolynomial &QuasiPolynomial::operator*=(const QuasiPolynomial &O) {
  QuasiPolynomial R;
  for (auto &[MA, CA] : Terms)
    for (auto &[MB, CB] : O.Terms)
      R.addTerm(multiply(MA, MB), CA * CB);
  *this = std::move(R);
  return *this;
}

QuasiPolynomial &QuasiPolynomial::operator*=(const Rational &K) {
  if (K == 0) {
    Terms.clear();
    return *this;
  }
  for (auto &[M, C] : Terms)
    C *= K;
  return *this;
}

QuasiPolynomial QuasiPolynomial::pow(unsigned E) const {
  QuasiPolynomial R(1);
  for (unsigned I = 0; I < E; ++I)
    R *= *this;
  return R;
}

std::string QuasiPolynomial::str(const std::vector<std::string> &Names) const {
  if (Terms.empty())
    return "0";
  std::ostringstream OS;
  bool First = true;
  // Highest degree first reads more naturally.
  std::vector<std::pair<const Monomial *, const Rational *>> Order;
  for (auto &[M, C] : Terms)
    Order.emplace_back(&M, &C);
  std::stable_sort(Order.begin(), Order.end(), [](auto &A, auto &B) {
    unsigned DA = 0, DB = 0;
    for (auto &[X, E] : *A.first)
      DA += E;
    for (auto &[X, E] : *B.first)
      DB += E;
    return DA > DB;
  });
  auto Name = [&](unsigned D) { return D < Names.size() ? Names[D] : "i" + std::to_string(D); };
  for (auto [M, C] : Order) {
    Rational Mag = abs(*C);
    if (First)
      OS << (sgn(*C) < 0 ? "-" : "");
    else
      OS << (sgn(*C) < 0 ? " - " : " + ");
    First = false;
    bool NeedCoeff = Mag != 1 || M->empty();
    if (NeedCoeff)
      OS << Mag.get_str();
    bool FirstAtom = !NeedCoeff;
    for (auto &[A, E] : *M) {
      if (!FirstAtom)
        OS << "*";
      FirstAtom = false;
      if (A.isDim())
        OS << Name(static_cast<unsigned>(A.Dim));
      else
        OS << "floor((" << A.Inner.str(Names) << ")/" << A.Divisor << ")";
      if (E > 1)
        OS << "^" << E;
    }
  }
  return OS.str();
}

std::string QuasiPolynomial::str() const { return str(defaultDimNames(dimBound())); }

//===----------------------------------------------------------------------===//
// Summation
//===----------------------------------------------------------------------===//

const std::vector<Rational> &faulhaberCoefficients(unsigned K) {
  static const std::vector<std::vector<Rational>> Table = [] {
    constexpr unsigned MaxDegree = 40;
    std::vector<std::vector<Rational>> T;
    // Binomial coefficients.
    std::vector<std::vector<BigInt>> Binom(MaxDegree + 2);
    for (unsigned N = 0; N <= MaxDegree + 1; ++N) {
      Binom[N].assign(N + 1, 1);
      for (unsigned J = 1; J < N; ++J)
        Binom[N][J] = Binom[N - 1][J - 1] + Binom[N - 1][J];
    }
    // (n+1)^{k+1} - 1 = sum_{j=0}^{k} C(k+1, j) S_j(n)
    for (unsigned Deg = 0; Deg <= MaxDegree; ++Deg) {
      std::vector<Rational> S(Deg + 2, 0);
      for (unsigned J = 1; J <= Deg + 1; ++J)
        S[J] = Rational(Binom[Deg + 1][J]);
      for (unsigned J = 0; J < Deg; ++J)
        for (size_t C = 0; C < T[J].size(); ++C)
          S[C] -= Rational(Binom[Deg + 1][J]) * T[J][C];
      for (Rational &V : S)
        V /= Deg + 1;
      T.push_back(std::move(S));
    }
    return T;
  }();
  if (K >= Table.size())
    throw std::out_of_range("summation degree too large");
  return Table[K];
}

namespace {

QuasiPolynomial evalPoly(const std::vector<Rational> &Coeffs, const QuasiPolynomial &X) {
  QuasiPolynomial R;
  for (size_t I = Coeffs.size(); I-- > 0;) {
    R *= X;
    R += QuasiPolynomial(Coeffs[I]);
  }
  return R;
}

} // namespace

QuasiPolynomial sumOver(const QuasiPolynomial &P, unsigned D, const AffineExpr &Lo, const AffineExpr &Hi) {
  assert(!Lo.dependsOn(D) && !Hi.dependsOn(D));
  std::vector<QuasiPolynomial> Coeffs = P.coefficientsIn(D);
  QuasiPolynomial HiP = QuasiPolynomial::fromAffine(Hi);
  QuasiPolynomial LoP = QuasiPolynomial::fromAffine(Lo - AffineExpr(1));
  QuasiPolynomial Out;
  for (unsigned K = 0; K < Coeffs.size(); ++K) {
    if (Coeffs[K].isZero())
      continue;
    const auto &F = faulhaberCoefficients(K);
    Out += Coeffs[K] * (evalPoly(F, HiP) - evalPoly(F, LoP));
  }
  return Out;
}

} // namespace lrumodel::poly
