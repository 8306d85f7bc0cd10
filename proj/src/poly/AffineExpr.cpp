// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/AffineExpr.h"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace lrumodel::poly {

namespace {

int cmpInt(Int A, Int B) { return A < B ? -1 : (A > B ? 1 : 0); }

void appendTerm(std::ostringstream &OS, bool &First, Int Coeff, const std::string &Atom) {
  if (Coeff == 0)
    return;
  Int Mag = Coeff < 0 ? -Coeff : Coeff;
  if (First)
    OS << (Coeff < 0 ? "-" : "");
  else
    OS << (Coeff < 0 ? " - " : " + ");
  if (Mag != 1)
    OS << Mag << "*";
  OS << Atom;
  First = false;
}

} // namespace

AffineExpr AffineExpr::dim(unsigned D, Int Coeff) {
  AffineExpr E;
  if (Coeff != 0)
    E.Coeffs[D] = Coeff;
  return E;
}

Int AffineExpr::coeff(unsigned D) const {
  auto It = Coeffs.find(D);
  return It == Coeffs.end() ? 0 : It->second;
}

bool AffineExpr::dependsInsideDiv(unsigned D) const {
  for (const DivTerm &T : Divs)
    if (T.Inner.dependsOn(D))
      return true;
  return false;
}

bool AffineExpr::dependsOn(unsigned D) const { return Coeffs.count(D) || dependsInsideDiv(D); }

unsigned AffineExpr::dimBound() const {
  unsigned B = Coeffs.empty() ? 0 : Coeffs.rbegin()->first + 1;
  for (const DivTerm &T : Divs)
    B = std::max(B, T.Inner.dimBound());
  return B;
}

void AffineExpr::addDiv(Int Coeff, const AffineExpr &Inner, Int Divisor) {
  if (Coeff == 0)
    return;
  auto Less = [](const DivTerm &T, const std::pair<const AffineExpr *, Int> &K) {
    int C = T.Inner.compare(*K.first);
    return C < 0 || (C == 0 && T.Divisor < K.second);
  };
  auto It = std::lower_bound(Divs.begin(), Divs.end(), std::make_pair(&Inner, Divisor), Less);
  if (It != Divs.end() && It->Divisor == Divisor && It->Inner == Inner) {
    It->Coeff = checkedAdd(It->Coeff, Coeff);
    if (It->Coeff == 0)
      Divs.erase(It);
    return;
  }
  Divs.insert(It, DivTerm{Coeff, Inner, Divisor});
}

AffineExpr AffineExpr::floorOf(const AffineExpr &Inner, Int Divisor) {
  assert(Divisor > 0);
  AffineExpr In = Inner;
  Int D = Divisor;
  if (D == 1)
    return In;
  Int G = D;
  for (auto &[Dim, C] : In.Coeffs)
    G = std::gcd(G, C < 0 ? -C : C);
  for (const DivTerm &T : In.Divs)
    G = std::gcd(G, T.Coeff < 0 ? -T.Coeff : T.Coeff);
  if (G > 1) {
    for (auto &[Dim, C] : In.Coeffs)
      C /= G;
    for (DivTerm &T : In.Divs)
      T.Coeff /= G;
    In.Constant = poly::floorDiv(In.Constant, G);
    D /= G;
    if (D == 1)
      return In;
  }
  AffineExpr Whole;
  for (auto It = In.Coeffs.begin(); It != In.Coeffs.end();) {
    Int M = poly::floorDiv(It->second, D), R = floorMod(It->second, D);
    if (M != 0)
      Whole.Coeffs[It->first] = M;
    if (R == 0) {
      It = In.Coeffs.erase(It);
    } else {
      It->second = R;
      ++It;
    }
  }
  std::vector<DivTerm> Kept;
  for (DivTerm &T : In.Divs) {
    Int M = poly::floorDiv(T.Coeff, D), R = floorMod(T.Coeff, D);
    Whole.addDiv(M, T.Inner, T.Divisor);
    if (R != 0)
      Kept.push_back(DivTerm{R, std::move(T.Inner), T.Divisor});
  }
  In.Divs = std::move(Kept);
  Whole.Constant = poly::floorDiv(In.Constant, D);
  In.Constant = floorMod(In.Constant, D);
  if (In.isConstant())
    return Whole;
  Whole.addDiv(1, In, D);
  return Whole;
}

AffineExpr AffineExpr::modOf(const AffineExpr &Inner, Int Divisor) {
  return Inner - floorOf(Inner, Divisor) * Divisor;
}

Int AffineExpr::evaluate(const std::vector<Int> &Point) const {
  Int V = Constant;
  for (auto &[D, C] : Coeffs) {
    if (D >= Point.size())
      throw std::out_of_range("point has too few dimensions");
    V = checkedMulAdd(C, Point[D], V);
  }
  for (const DivTerm &T : Divs)
    V = checkedMulAdd(T.Coeff, poly::floorDiv(T.Inner.evaluate(Point), T.Divisor), V);
  return V;
}

AffineExpr AffineExpr::substitute(unsigned D, const AffineExpr &Value) const {
  if (!dependsOn(D))
    return *this;
  AffineExpr R(Constant);
  for (auto &[Dim, C] : Coeffs) {
    if (Dim == D)
      R += Value * C;
    else
      R += AffineExpr::dim(Dim, C);
  }
  for (const DivTerm &T : Divs)
    R += floorOf(T.Inner.substitute(D, Value), T.Divisor) * T.Coeff;
  return R;
}

AffineExpr AffineExpr::remapDims(const std::vector<unsigned> &Map) const {
  AffineExpr R(Constant);
  for (auto &[Dim, C] : Coeffs)
    R += AffineExpr::dim(Map.at(Dim), C);
  for (const DivTerm &T : Divs)
    R += floorOf(T.Inner.remapDims(Map), T.Divisor) * T.Coeff;
  return R;
}

AffineExpr &AffineExpr::operator+=(const AffineExpr &O) {
  Constant = checkedAdd(Constant, O.Constant);
  for (auto &[D, C] : O.Coeffs) {
    Int &Mine = Coeffs[D];
    Mine = checkedAdd(Mine, C);
    if (Mine == 0)
      Coeffs.erase(D);
  }
  for (const DivTerm &T : O.Divs)
    addDiv(T.Coeff, T.Inner, T.Divisor);
  return *this;
}

AffineExpr &AffineExpr::operator-=(const AffineExpr &O) { return *this += O * -1; }

AffineExpr &AffineExpr::operator*=(Int K) {
  if (K == 0) {
    *this = AffineExpr();
    return *this;
  }
  Constant = checkedMul(Constant, K);
  for (auto &[D, C] : Coeffs)
    C = checkedMul(C, K);
  for (DivTerm &T : Divs)
    T.Coeff = checkedMul(T.Coeff, K);
  return *this;
}

std::string AffineExpr::str(const std::vector<std::string> &Names) const {
  std::ostringstream OS;
  bool First = true;
  auto Name = [&](unsigned D) { return D < Names.size() ? Names[D] : "i" + std::to_string(D); };
  for (auto &[D, C] : Coeffs)
    appendTerm(OS, First, C, Name(D));
  for (const DivTerm &T : Divs)
    appendTerm(OS, First, T.Coeff, "floor((" + T.Inner.str(Names) + ")/" + std::to_string(T.Divisor) + ")");
  if (Constant != 0 || First) {
    if (First)
      OS << Constant;
    else
      OS << (Constant < 0 ? " - " : " + ") << (Constant < 0 ? -Constant : Constant);
  }
  return OS.str();
}

std::string AffineExpr::str() const { return str(defaultDimNames(dimBound())); }

int AffineExpr::compare(const AffineExpr &O) const {
  if (int C = cmpInt(Constant, O.Constant))
    return C;
  if (Coeffs != O.Coeffs)
    return Coeffs < O.Coeffs ? -1 : 1;
  if (Divs.size() != O.Divs.size())
    return Divs.size() < O.Divs.size() ? -1 : 1;
  for (size_t I = 0; I < Divs.size(); ++I) {
    if (int C = cmpInt(Divs[I].Coeff, O.Divs[I].Coeff))
      return C;
    if (int C = cmpInt(Divs[I].Divisor, O.Divs[I].Divisor))
      return C;
    if (int C = Divs[I].Inner.compare(O.Divs[I].Inner))
      return C;
  }
  return 0;
}

std::vector<std::string> defaultDimNames(unsigned Count) {
  std::vector<std::string> Names;
  for (unsigned I = 0; I < Count; ++I)
    Names.push_back("i" + std::to_string(I));
  return Names;
}

} // namespace lrumodel::poly
