// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Conjunction.h"

#include <algorithm>
#include <cassert>
#include <map>
#include <stdexcept>

namespace lrumodel::poly {

namespace {

Int absInt(Int V) { return V < 0 ? checkedNeg(V) : V; }

Row negated(const Row &R) {
  Row N(R.size());
  for (size_t I = 0; I < R.size(); ++I)
    N[I] = checkedNeg(R[I]);
  return N;
}

/// Defining inequalities of q = floor(num / den) for the local in `Col`.
std::pair<Row, Row> divRows(const DivDef &D, unsigned Col) {
  Row Lo = D.Numerator; // num - den*q >= 0
  Lo[Col + 1] = checkedSub(Lo[Col + 1], D.Denominator);
  Row Hi = negated(D.Numerator); // -num + den*q + den - 1 >= 0
  Hi[Col + 1] = checkedAdd(Hi[Col + 1], D.Denominator);
  Hi[0] = checkedAdd(Hi[0], D.Denominator - 1);
  return {Lo, Hi};
}

Int modHat(Int A, Int M) { return A - M * floorDiv(2 * A + M, 2 * M); }

} // namespace

Conjunction::Conjunction(unsigned NumDims) : NumDims(NumDims) {}

Conjunction Conjunction::emptySet(unsigned NumDims) {
  Conjunction C(NumDims);
  C.markEmpty();
  return C;
}

void Conjunction::markEmpty() {
  MarkedEmpty = true;
  Eqs.clear();
  Ineqs.clear();
  Locals.clear();
}

void Conjunction::addEquality(Row R) {
  assert(R.size() == rowWidth() && "row width mismatch");
  Eqs.push_back(std::move(R));
}

void Conjunction::addInequality(Row R) {
  assert(R.size() == rowWidth() && "row width mismatch");
  Ineqs.push_back(std::move(R));
}

void Conjunction::addColumnAtEnd() {
  for (Row &R : Eqs)
    R.push_back(0);
  for (Row &R : Ineqs)
    R.push_back(0);
  for (auto &L : Locals)
    if (L)
      L->Numerator.push_back(0);
  Locals.emplace_back();
}

unsigned Conjunction::addLocal() {
  addColumnAtEnd();
  return numCols() - 1;
}

unsigned Conjunction::addDiv(Row Numerator, Int Denominator) {
  assert(Numerator.size() == rowWidth() && Denominator > 0);
  DivDef D{std::move(Numerator), Denominator};
  for (unsigned L = 0; L < numLocals(); ++L)
    if (Locals[L] && *Locals[L] == D)
      return NumDims + L;
  addColumnAtEnd();
  D.Numerator.push_back(0);
  Locals.back() = std::move(D);
  unsigned Col = numCols() - 1;
  normalizeDefinition(Col);
  // Normalization may reveal a duplicate.
  for (unsigned L = 0; L + 1 < numLocals(); ++L)
    if (Locals[L] && *Locals[L] == *Locals.back()) {
      Locals.pop_back();
      for (Row &R : Eqs)
        R.pop_back();
      for (Row &R : Ineqs)
        R.pop_back();
      for (auto &Other : Locals)
        if (Other)
          Other->Numerator.pop_back();
      return NumDims + L;
    }
  return Col;
}

void Conjunction::undefine(unsigned Col) {
  auto &L = Locals[Col - NumDims];
  if (!L)
    return;
  auto [Lo, Hi] = divRows(*L, Col);
  L.reset();
  Ineqs.push_back(std::move(Lo));
  Ineqs.push_back(std::move(Hi));
}

void Conjunction::normalizeDefinition(unsigned Col) {
  auto &L = Locals[Col - NumDims];
  if (!L)
    return;
  Row &N = L->Numerator;
  Int G = L->Denominator;
  for (size_t I = 1; I < N.size() && G > 1; ++I)
    G = std::gcd(G, absInt(N[I]));
  if (G > 1) {
    for (size_t I = 1; I < N.size(); ++I)
      N[I] /= G;
    N[0] = floorDiv(N[0], G);
    L->Denominator /= G;
  }
}

void Conjunction::insertDims(unsigned Pos, unsigned Count) {
  assert(Pos <= NumDims);
  auto Insert = [&](Row &R) { R.insert(R.begin() + 1 + Pos, Count, 0); };
  for (Row &R : Eqs)
    Insert(R);
  for (Row &R : Ineqs)
    Insert(R);
  for (auto &L : Locals)
    if (L)
      Insert(L->Numerator);
  NumDims += Count;
}

void Conjunction::permuteDims(const std::vector<unsigned> &Order) {
  assert(Order.size() == NumDims);
  auto Permute = [&](Row &R) {
    Row Old = R;
    for (unsigned I = 0; I < NumDims; ++I)
      R[1 + I] = Old[1 + Order[I]];
  };
  for (Row &R : Eqs)
    Permute(R);
  for (Row &R : Ineqs)
    Permute(R);
  for (auto &L : Locals)
    if (L)
      Permute(L->Numerator);
}

void Conjunction::dimsToLocals(const std::vector<unsigned> &DimIdx) {
  std::vector<bool> Moved(NumDims, false);
  for (unsigned D : DimIdx)
    Moved[D] = true;
  // New column order: kept dims, moved dims, old locals.
  std::vector<unsigned> Order;
  for (unsigned D = 0; D < NumDims; ++D)
    if (!Moved[D])
      Order.push_back(D);
  unsigned NewDims = static_cast<unsigned>(Order.size());
  for (unsigned D = 0; D < NumDims; ++D)
    if (Moved[D])
      Order.push_back(D);
  for (unsigned C = NumDims; C < numCols(); ++C)
    Order.push_back(C);
  auto Reorder = [&](Row &R) {
    Row Old = R;
    for (size_t I = 0; I < Order.size(); ++I)
      R[1 + I] = Old[1 + Order[I]];
  };
  for (Row &R : Eqs)
    Reorder(R);
  for (Row &R : Ineqs)
    Reorder(R);
  for (auto &L : Locals)
    if (L)
      Reorder(L->Numerator);
  std::vector<std::optional<DivDef>> NewLocals(NumDims - NewDims);
  NewLocals.insert(NewLocals.end(), Locals.begin(), Locals.end());
  Locals = std::move(NewLocals);
  NumDims = NewDims;
}

bool Conjunction::dependsOn(unsigned Col, unsigned Other) const {
  if (Col < NumDims)
    return false;
  const auto &L = Locals[Col - NumDims];
  if (!L)
    return false;
  for (unsigned C = 0; C < numCols(); ++C) {
    if (L->Numerator[C + 1] == 0)
      continue;
    if (C == Other || dependsOn(C, Other))
      return true;
  }
  return false;
}

void Conjunction::substitute(unsigned Col, const Row &Expr, Int Denom) {
  assert(Expr.size() == rowWidth() && Expr[Col + 1] == 0 && Denom > 0);
  // Definitions that would become cyclic lose their definition first.
  for (unsigned L = 0; L < numLocals(); ++L) {
    unsigned LC = NumDims + L;
    if (!Locals[L] || Locals[L]->Numerator[Col + 1] == 0)
      continue;
    for (unsigned C = 0; C < numCols(); ++C)
      if (Expr[C + 1] != 0 && (C == LC || dependsOn(C, LC))) {
        undefine(LC);
        break;
      }
  }
  auto Apply = [&](Row &R) {
    Int A = R[Col + 1];
    if (A == 0)
      return false;
    R[Col + 1] = 0;
    if (Denom != 1)
      for (Int &V : R)
        V = checkedMul(V, Denom);
    for (size_t I = 0; I < R.size(); ++I)
      if (Expr[I] != 0)
        R[I] = checkedMulAdd(A, Expr[I], R[I]);
    return true;
  };
  for (Row &R : Eqs)
    Apply(R);
  for (Row &R : Ineqs)
    Apply(R);
  for (unsigned L = 0; L < numLocals(); ++L)
    if (Locals[L] && Apply(Locals[L]->Numerator)) {
      Locals[L]->Denominator = checkedMul(Locals[L]->Denominator, Denom);
      normalizeDefinition(NumDims + L);
    }
}

void Conjunction::scaleColumn(unsigned Col, Int Mult, Int Offset) {
  auto Apply = [&](Row &R) {
    if (R[Col + 1] == 0)
      return false;
    R[0] = checkedMulAdd(R[Col + 1], Offset, R[0]);
    R[Col + 1] = checkedMul(R[Col + 1], Mult);
    return true;
  };
  for (Row &R : Eqs)
    Apply(R);
  for (Row &R : Ineqs)
    Apply(R);
  for (unsigned L = 0; L < numLocals(); ++L)
    if (Locals[L] && Apply(Locals[L]->Numerator))
      normalizeDefinition(NumDims + L);
}

void Conjunction::removeColumn(unsigned Col) {
  auto Erase = [&](Row &R) {
    assert(R[Col + 1] == 0 && "removing a referenced column");
    R.erase(R.begin() + 1 + Col);
  };
  for (Row &R : Eqs)
    Erase(R);
  for (Row &R : Ineqs)
    Erase(R);
  if (Col >= NumDims)
    Locals.erase(Locals.begin() + (Col - NumDims));
  else
    --NumDims;
  for (auto &L : Locals)
    if (L)
      Erase(L->Numerator);
}

std::vector<unsigned> Conjunction::embedLocalsOf(const Conjunction &Other) {
  assert(Other.NumDims == NumDims);
  unsigned Base = numCols();
  std::vector<unsigned> Map(Other.numCols());
  for (unsigned C = 0; C < Other.numCols(); ++C)
    Map[C] = C < NumDims ? C : Base + (C - NumDims);
  for (unsigned L = 0; L < Other.numLocals(); ++L)
    addColumnAtEnd();
  for (unsigned L = 0; L < Other.numLocals(); ++L)
    if (const auto &D = Other.Locals[L])
      Locals[Base - NumDims + L] = DivDef{remapRow(D->Numerator, Map), D->Denominator};
  return Map;
}

Row Conjunction::remapRow(const Row &R, const std::vector<unsigned> &ColMap) const {
  Row New = zeroRow();
  New[0] = R[0];
  for (size_t C = 0; C < ColMap.size(); ++C)
    New[ColMap[C] + 1] = R[C + 1];
  return New;
}

bool Conjunction::substituteLocalEqualities() {
  bool Changed = false;
  for (size_t E = 0; E < Eqs.size(); ++E) {
    // Prefer eliminating undefined locals.
    unsigned Pick = ~0u;
    for (unsigned C = NumDims; C < numCols(); ++C) {
      Int A = Eqs[E][C + 1];
      if (A != 1 && A != -1)
        continue;
      if (Pick == ~0u || (!Locals[C - NumDims] && Locals[Pick - NumDims]))
        Pick = C;
    }
    if (Pick == ~0u)
      continue;
    undefine(Pick);
    Row Expr = Eqs[E];
    Int A = Expr[Pick + 1];
    Expr[Pick + 1] = 0;
    if (A == 1)
      Expr = negated(Expr);
    Eqs.erase(Eqs.begin() + E);
    substitute(Pick, Expr);
    removeColumn(Pick);
    Changed = true;
    --E;
    if (Eqs.empty())
      break;
  }
  return Changed;
}

void Conjunction::mergeDuplicateDivs() {
  for (unsigned A = NumDims; A < numCols(); ++A) {
    if (!Locals[A - NumDims])
      continue;
    for (unsigned B = A + 1; B < numCols(); ++B) {
      if (!Locals[B - NumDims] || !(*Locals[B - NumDims] == *Locals[A - NumDims]))
        continue;
      Row Expr = zeroRow();
      Expr[A + 1] = 1;
      Locals[B - NumDims].reset();
      substitute(B, Expr);
      removeColumn(B);
      --B;
    }
  }
}

bool Conjunction::reduceDivs() {
  bool Changed = false;
  for (unsigned C = NumDims; C < numCols(); ++C) {
    auto &L = Locals[C - NumDims];
    if (!L)
      continue;
    Int D = L->Denominator;
    const Row &N = L->Numerator;
    bool NeedsReduce = false;
    bool HasLinear = false;
    for (size_t I = 0; I < N.size(); ++I) {
      if (N[I] < 0 || N[I] >= D)
        NeedsReduce = true;
      if (I > 0 && floorMod(N[I], D) != 0)
        HasLinear = true;
    }
    if (D == 1)
      NeedsReduce = true;
    if (!NeedsReduce)
      continue;
    // q = sum(m_i x_i) + m_0 + floor((sum(r_i x_i) + r_0) / D)
    Row Whole = zeroRow(), Rest = zeroRow();
    for (size_t I = 0; I < N.size(); ++I) {
      Whole[I] = floorDiv(N[I], D);
      Rest[I] = floorMod(N[I], D);
    }
    if (HasLinear) {
      unsigned Q = addDiv(Rest, D);
      Whole.resize(rowWidth(), 0);
      Whole[Q + 1] = checkedAdd(Whole[Q + 1], 1);
    }
    Locals[C - NumDims].reset();
    substitute(C, Whole);
    Changed = true;
  }
  return Changed;
}

void Conjunction::removeUnusedLocals() {
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (unsigned C = numCols(); C-- > NumDims;) {
      bool InDefs = false;
      for (auto &L : Locals)
        if (L && L->Numerator[C + 1] != 0)
          InDefs = true;
      if (InDefs)
        continue;
      int Pos = 0, Neg = 0;
      bool InEq = false;
      for (const Row &R : Eqs)
        InEq |= R[C + 1] != 0;
      for (const Row &R : Ineqs) {
        Pos += R[C + 1] > 0;
        Neg += R[C + 1] < 0;
      }
      if (InEq)
        continue;
      bool Defined = Locals[C - NumDims].has_value();
      if (Pos + Neg == 0 || (!Defined && (Pos == 0 || Neg == 0))) {
        std::erase_if(Ineqs, [&](const Row &R) { return R[C + 1] != 0; });
        Locals[C - NumDims].reset();
        removeColumn(C);
        Changed = true;
      }
    }
  }
}

bool Conjunction::simplify() {
  if (MarkedEmpty)
    return false;
  for (int Iter = 0; Iter < 64; ++Iter) {
    bool Changed = false;
    for (unsigned C = NumDims; C < numCols(); ++C)
      normalizeDefinition(C);
    Changed |= reduceDivs();
    mergeDuplicateDivs();

    for (Row &R : Eqs)
      if (!normalizeEquality(R)) {
        markEmpty();
        return false;
      }
    std::erase_if(Eqs, [](const Row &R) { return isZeroLinear(R); });
    std::sort(Eqs.begin(), Eqs.end());
    Eqs.erase(std::unique(Eqs.begin(), Eqs.end()), Eqs.end());

    // Tightest constant per linear part; opposite parts that meet become
    // equalities.
    auto LinearLess = [](const Row &X, const Row &Y) {
      return std::lexicographical_compare(X.begin() + 1, X.end(), Y.begin() + 1, Y.end());
    };
    auto SameLinear = [](const Row &X, const Row &Y) { return std::equal(X.begin() + 1, X.end(), Y.begin() + 1); };
    for (Row &R : Ineqs)
      if (!normalizeInequality(R)) {
        markEmpty();
        return false;
      }
    std::erase_if(Ineqs, [](const Row &R) { return isZeroLinear(R); });
    std::sort(Ineqs.begin(), Ineqs.end(), [&](const Row &X, const Row &Y) {
      return LinearLess(X, Y) || (SameLinear(X, Y) && X[0] < Y[0]);
    });
    Ineqs.erase(std::unique(Ineqs.begin(), Ineqs.end(), SameLinear), Ineqs.end());
    std::vector<Row> NewIneqs;
    Row Neg;
    for (const Row &R : Ineqs) {
      Neg.assign(R.size(), 0);
      for (size_t I = 1; I < R.size(); ++I)
        Neg[I] = -R[I];
      auto It = std::lower_bound(Ineqs.begin(), Ineqs.end(), Neg, LinearLess);
      if (It != Ineqs.end() && SameLinear(*It, Neg)) {
        Int Sum = checkedAdd(R[0], (*It)[0]);
        if (Sum < 0) {
          markEmpty();
          return false;
        }
        if (Sum == 0) {
          if (LinearLess(Neg, R)) {
            Row E = R;
            normalizeEquality(E);
            Eqs.push_back(std::move(E));
            Changed = true;
          }
          continue;
        }
      }
      NewIneqs.push_back(R);
    }
    Ineqs = std::move(NewIneqs);

    // Inequalities implied by an equality with the same linear part.
    for (const Row &E : Eqs) {
      std::erase_if(Ineqs, [&](const Row &R) {
        bool Same = true, Opp = true;
        for (size_t I = 1; I < R.size(); ++I) {
          Same &= R[I] == E[I];
          Opp &= R[I] == -E[I];
        }
        if (Same && R[0] >= E[0])
          return true;
        if (Opp && R[0] >= -E[0])
          return true;
        return false;
      });
    }
    for (const Row &E : Eqs) {
      for (const Row &R : Ineqs) {
        bool Same = true, Opp = true;
        for (size_t I = 1; I < R.size(); ++I) {
          Same &= R[I] == E[I];
          Opp &= R[I] == -E[I];
        }
        if ((Same && R[0] < E[0]) || (Opp && R[0] < -E[0])) {
          markEmpty();
          return false;
        }
      }
    }

    Changed |= substituteLocalEqualities();
    if (!Changed)
      break;
  }
  removeUnusedLocals();
  return true;
}

std::vector<Row> Conjunction::allInequalities() const {
  std::vector<Row> All = Ineqs;
  for (unsigned L = 0; L < numLocals(); ++L)
    if (Locals[L]) {
      auto [Lo, Hi] = divRows(*Locals[L], NumDims + L);
      All.push_back(std::move(Lo));
      All.push_back(std::move(Hi));
    }
  return All;
}

bool Conjunction::isEmpty() const {
  if (MarkedEmpty)
    return true;
  return !isIntegerFeasible(Eqs, allInequalities());
}

bool Conjunction::allLocalsDefined() const {
  for (unsigned C = NumDims; C < numCols(); ++C)
    if (!Locals[C - NumDims])
      return false;
  return true;
}

std::optional<std::vector<Int>> Conjunction::completePoint(const std::vector<Int> &DimValues) const {
  assert(DimValues.size() == NumDims);
  std::vector<Int> Values(DimValues);
  Values.resize(numCols(), 0);
  std::vector<bool> Known(numCols(), false);
  std::fill(Known.begin(), Known.begin() + NumDims, true);
  bool Progress = true;
  unsigned Remaining = numLocals();
  while (Remaining > 0 && Progress) {
    Progress = false;
    for (unsigned C = NumDims; C < numCols(); ++C) {
      if (Known[C])
        continue;
      const auto &L = Locals[C - NumDims];
      if (!L)
        return std::nullopt;
      bool Ready = true;
      Int Num = L->Numerator[0];
      for (unsigned O = 0; O < numCols() && Ready; ++O) {
        if (L->Numerator[O + 1] == 0)
          continue;
        if (!Known[O])
          Ready = false;
        else
          Num = checkedMulAdd(L->Numerator[O + 1], Values[O], Num);
      }
      if (!Ready)
        continue;
      Values[C] = floorDiv(Num, L->Denominator);
      Known[C] = true;
      --Remaining;
      Progress = true;
    }
  }
  if (Remaining > 0)
    return std::nullopt;
  return Values;
}

bool Conjunction::containsPoint(const std::vector<Int> &DimValues) const {
  if (MarkedEmpty)
    return false;
  auto Eval = [](const Row &R, const std::vector<Int> &V) {
    Int S = R[0];
    for (size_t I = 0; I < V.size(); ++I)
      if (R[I + 1] != 0)
        S = checkedMulAdd(R[I + 1], V[I], S);
    return S;
  };
  if (auto Full = completePoint(DimValues)) {
    for (const Row &R : Eqs)
      if (Eval(R, *Full) != 0)
        return false;
    for (const Row &R : Ineqs)
      if (Eval(R, *Full) < 0)
        return false;
    return true;
  }
  // Existential locals: decide feasibility with the dimensions fixed.
  auto Fix = [&](Row R) {
    for (unsigned D = 0; D < NumDims; ++D) {
      R[0] = checkedMulAdd(R[D + 1], DimValues[D], R[0]);
      R[D + 1] = 0;
    }
    return R;
  };
  std::vector<Row> E, I;
  for (const Row &R : Eqs)
    E.push_back(Fix(R));
  for (const Row &R : allInequalities())
    I.push_back(Fix(R));
  return isIntegerFeasible(E, I);
}

void Conjunction::removeRedundant() {
  if (MarkedEmpty)
    return;
  for (size_t K = 0; K < Ineqs.size();) {
    std::vector<Row> Others;
    for (size_t J = 0; J < Ineqs.size(); ++J)
      if (J != K)
        Others.push_back(Ineqs[J]);
    for (unsigned L = 0; L < numLocals(); ++L)
      if (Locals[L]) {
        auto [Lo, Hi] = divRows(*Locals[L], NumDims + L);
        Others.push_back(std::move(Lo));
        Others.push_back(std::move(Hi));
      }
    Others.push_back(negateInequality(Ineqs[K]).front());
    if (!isIntegerFeasible(Eqs, Others))
      Ineqs.erase(Ineqs.begin() + K);
    else
      ++K;
  }
}

Row toRow(Conjunction &C, const AffineExpr &E) {
  // Materialize divisions first; each addDiv may widen the rows.
  std::vector<std::pair<Int, unsigned>> DivCols;
  for (const DivTerm &T : E.Divs) {
    Row Inner = toRow(C, T.Inner);
    Inner.resize(C.rowWidth(), 0);
    DivCols.emplace_back(T.Coeff, C.addDiv(Inner, T.Divisor));
  }
  Row R = C.zeroRow();
  R[0] = E.Constant;
  for (auto &[D, K] : E.Coeffs) {
    if (D >= C.numDims())
      throw std::out_of_range("expression references an unknown dimension");
    R[D + 1] = checkedAdd(R[D + 1], K);
  }
  for (auto &[K, Col] : DivCols)
    R[Col + 1] = checkedAdd(R[Col + 1], K);
  return R;
}

AffineExpr columnExpr(const Conjunction &C, unsigned Col) {
  if (Col < C.numDims())
    return AffineExpr::dim(Col);
  const auto &D = C.definition(Col);
  if (!D)
    throw std::logic_error("column has no division definition");
  return AffineExpr::floorOf(rowExpr(C, D->Numerator), D->Denominator);
}

AffineExpr rowExpr(const Conjunction &C, const Row &R) {
  AffineExpr E(R[0]);
  for (unsigned Col = 0; Col < C.numCols(); ++Col)
    if (R[Col + 1] != 0)
      E += columnExpr(C, Col) * R[Col + 1];
  return E;
}

std::vector<Row> negateInequality(const Row &R) {
  Row N = negated(R);
  N[0] = checkedSub(N[0], 1);
  return {N};
}

//===----------------------------------------------------------------------===//
// Elimination of undefined locals
//===----------------------------------------------------------------------===//

class Eliminator {
public:
  static std::vector<Conjunction> run(Conjunction C);

private:
  enum class Action { None, Drop, EqDiv, Pugh, FourierMotzkin, DivBounds };
  struct Choice {
    Action Kind = Action::None;
    unsigned Col = 0;
    size_t RowIdx = 0;
    long Cost = 0;
    bool LowerSide = true;
  };

  static bool propagateUndefined(Conjunction &C);
  static Choice choose(const Conjunction &C);
  static bool pairIsExact(const Row &L, const Row &U, unsigned Col);
  static void eqDiv(Conjunction &C, unsigned Col, size_t RowIdx);
  static void pugh(Conjunction &C, unsigned Col, size_t RowIdx);
  static void fourierMotzkin(Conjunction &C, unsigned Col, bool UseDivs, bool LowerSide);
  static std::vector<Conjunction> splinter(const Conjunction &C);
};

bool Eliminator::propagateUndefined(Conjunction &C) {
  bool Any = false;
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (unsigned L = C.NumDims; L < C.numCols(); ++L) {
      const auto &D = C.Locals[L - C.NumDims];
      if (!D)
        continue;
      for (unsigned O = C.NumDims; O < C.numCols(); ++O)
        if (D->Numerator[O + 1] != 0 && !C.Locals[O - C.NumDims]) {
          C.undefine(L);
          Changed = Any = true;
          break;
        }
    }
  }
  return Any;
}

bool Eliminator::pairIsExact(const Row &L, const Row &U, unsigned Col) {
  Int A = L[Col + 1], B = -U[Col + 1];
  if (A == 1 || B == 1)
    return true;
  Row Comb(L.size());
  for (size_t I = 0; I < L.size(); ++I)
    Comb[I] = checkedAdd(checkedMul(B, L[I]), checkedMul(A, U[I]));
  Comb[Col + 1] = 0;
  if (!isZeroLinear(Comb))
    return false;
  return Comb[0] < 0 || Comb[0] >= checkedMul(A - 1, B - 1);
}

Eliminator::Choice Eliminator::choose(const Conjunction &C) {
  Choice Best;
  auto Consider = [&](Choice Ch) {
    if (Best.Kind == Action::None || Ch.Cost < Best.Cost)
      Best = Ch;
  };
  auto OtherUndefined = [&](const Row &R, unsigned Col) {
    for (unsigned O = C.NumDims; O < C.numCols(); ++O)
      if (O != Col && R[O + 1] != 0 && !C.Locals[O - C.NumDims])
        return true;
    return false;
  };
  for (unsigned Col = C.NumDims; Col < C.numCols(); ++Col) {
    if (C.Locals[Col - C.NumDims])
      continue;
    bool InEq = false;
    for (size_t E = 0; E < C.Eqs.size(); ++E) {
      if (C.Eqs[E][Col + 1] == 0)
        continue;
      InEq = true;
      if (!OtherUndefined(C.Eqs[E], Col))
        Consider({Action::EqDiv, Col, E, 1});
      else
        Consider({Action::Pugh, Col, E, 100000});
    }
    if (InEq)
      continue;
    std::vector<const Row *> Lo, Up;
    for (const Row &R : C.Ineqs) {
      if (R[Col + 1] > 0)
        Lo.push_back(&R);
      else if (R[Col + 1] < 0)
        Up.push_back(&R);
    }
    if (Lo.empty() || Up.empty()) {
      Consider({Action::Drop, Col, 0, 0});
      continue;
    }
    long Pairs = static_cast<long>(Lo.size()) * static_cast<long>(Up.size());
    bool AllExact = true, LowerClean = true, UpperClean = true;
    for (const Row *L : Lo)
      for (const Row *U : Up)
        if (!pairIsExact(*L, *U, Col)) {
          AllExact = false;
          LowerClean &= !OtherUndefined(*L, Col);
          UpperClean &= !OtherUndefined(*U, Col);
        }
    if (AllExact)
      Consider({Action::FourierMotzkin, Col, 0, 10 + Pairs});
    else if (LowerClean || UpperClean)
      Consider({Action::DivBounds, Col, 0, 1000 + Pairs, LowerClean});
  }
  return Best;
}

void Eliminator::eqDiv(Conjunction &C, unsigned Col, size_t RowIdx) {
  Row E = C.Eqs[RowIdx];
  if (E[Col + 1] < 0)
    E = negated(E);
  Int A = E[Col + 1];
  Row Num = negated(E);
  Num[Col + 1] = 0;
  unsigned Q = C.addDiv(Num, A);
  Row Expr = C.zeroRow();
  Expr[Q + 1] = 1;
  C.substitute(Col, Expr);
  C.removeColumn(Col);
}

void Eliminator::pugh(Conjunction &C, unsigned Col, size_t RowIdx) {
  // Pick the undefined local with the smallest coefficient in the row.
  const Row &E0 = C.Eqs[RowIdx];
  unsigned K = Col;
  for (unsigned O = C.NumDims; O < C.numCols(); ++O)
    if (E0[O + 1] != 0 && !C.Locals[O - C.NumDims] && absInt(E0[O + 1]) < absInt(E0[K + 1]))
      K = O;
  unsigned Sigma = C.addLocal();
  const Row &E = C.Eqs[RowIdx];
  Int M = checkedAdd(absInt(E[K + 1]), 1);
  Int Sign = E[K + 1] > 0 ? 1 : -1;
  Row Expr = C.zeroRow();
  for (size_t I = 0; I < E.size(); ++I)
    if (I != K + 1 && I != Sigma + 1)
      Expr[I] = Sign * modHat(E[I], M);
  Expr[Sigma + 1] = checkedMul(-Sign, M);
  C.substitute(K, Expr);
  C.removeColumn(K);
}

void Eliminator::fourierMotzkin(Conjunction &C, unsigned Col, bool UseDivs, bool LowerSide) {
  std::vector<Row> Lo, Up, Rest;
  for (Row &R : C.Ineqs) {
    if (R[Col + 1] > 0)
      Lo.push_back(R);
    else if (R[Col + 1] < 0)
      Up.push_back(R);
    else
      Rest.push_back(R);
  }
  // Division locals for the non-exact pairs, keyed by the bound row index.
  std::vector<std::pair<size_t, size_t>> Inexact;
  for (size_t I = 0; I < Lo.size(); ++I)
    for (size_t J = 0; J < Up.size(); ++J)
      if (UseDivs && !pairIsExact(Lo[I], Up[J], Col))
        Inexact.emplace_back(I, J);
  std::map<size_t, unsigned> DivOf;
  for (auto [I, J] : Inexact) {
    size_t Key = LowerSide ? I : J;
    if (DivOf.count(Key))
      continue;
    const Row &B = LowerSide ? Lo[I] : Up[J];
    Row Num(C.rowWidth(), 0);
    std::copy(B.begin(), B.end(), Num.begin());
    Int A;
    if (LowerSide) {
      // a*x + r >= 0  ->  x >= ceil(-r / a) = floor((-r + a - 1) / a)
      A = B[Col + 1];
      Num = negated(Num);
      Num[Col + 1] = 0;
      Num[0] = checkedAdd(Num[0], A - 1);
    } else {
      // -b*x + s >= 0  ->  x <= floor(s / b)
      A = -B[Col + 1];
      Num[Col + 1] = 0;
    }
    unsigned Before = C.numCols();
    unsigned Q = C.addDiv(Num, A);
    if (C.numCols() != Before) {
      for (Row &R : Lo)
        R.push_back(0);
      for (Row &R : Up)
        R.push_back(0);
      for (Row &R : Rest)
        R.push_back(0);
    }
    DivOf[Key] = Q;
  }
  std::vector<Row> Out = Rest;
  for (size_t I = 0; I < Lo.size(); ++I)
    for (size_t J = 0; J < Up.size(); ++J) {
      const Row &L = Lo[I];
      const Row &U = Up[J];
      bool Exact = !UseDivs || std::find(Inexact.begin(), Inexact.end(), std::make_pair(I, J)) == Inexact.end();
      if (Exact) {
        Int A = L[Col + 1], B = -U[Col + 1];
        Row Comb(L.size());
        for (size_t K = 0; K < L.size(); ++K)
          Comb[K] = checkedAdd(checkedMul(B, L[K]), checkedMul(A, U[K]));
        Comb[Col + 1] = 0;
        Out.push_back(std::move(Comb));
        continue;
      }
      if (LowerSide) {
        Row R = U;
        Int Coef = R[Col + 1];
        R[Col + 1] = 0;
        unsigned Q = DivOf[I];
        R[Q + 1] = checkedAdd(R[Q + 1], Coef);
        Out.push_back(std::move(R));
      } else {
        Row R = L;
        Int Coef = R[Col + 1];
        R[Col + 1] = 0;
        unsigned Q = DivOf[J];
        R[Q + 1] = checkedAdd(R[Q + 1], Coef);
        Out.push_back(std::move(R));
      }
    }
  C.Ineqs = std::move(Out);
  C.removeColumn(Col);
}

std::vector<Conjunction> Eliminator::splinter(const Conjunction &C) {
  // Pick the undefined local with the smallest rational range and expand it
  // into one conjunction per value.
  unsigned Pick = ~0u;
  Int PickLo = 0, PickHi = -1;
  Int PickSize = 0;
  for (unsigned Col = C.NumDims; Col < C.numCols(); ++Col) {
    if (C.Locals[Col - C.NumDims])
      continue;
    std::vector<bool> Keep(C.numCols(), false);
    Keep[Col] = true;
    auto Shadow = realShadow(C.Eqs, C.allInequalities(), Keep);
    bool HasLo = false, HasHi = false;
    Int Lo = 0, Hi = 0;
    bool Contradiction = false;
    for (const Row &R : Shadow) {
      Int A = R[Col + 1];
      if (A == 0) {
        Contradiction |= R[0] < 0;
        continue;
      }
      if (A > 0) {
        Int V = ceilDiv(-R[0], A);
        Lo = HasLo ? std::max(Lo, V) : V;
        HasLo = true;
      } else {
        Int V = floorDiv(R[0], -A);
        Hi = HasHi ? std::min(Hi, V) : V;
        HasHi = true;
      }
    }
    if (Contradiction)
      return {};
    if (!HasLo || !HasHi)
      continue;
    Int Size = Hi - Lo + 1;
    if (Pick == ~0u || Size < PickSize) {
      Pick = Col;
      PickLo = Lo;
      PickHi = Hi;
      PickSize = Size;
    }
  }
  if (Pick == ~0u)
    throw std::runtime_error("cannot eliminate an unbounded existential variable");
  std::vector<Conjunction> Out;
  for (Int V = PickLo; V <= PickHi; ++V) {
    Conjunction P = C;
    Row Expr = P.zeroRow();
    Expr[0] = V;
    P.substitute(Pick, Expr);
    P.removeColumn(Pick);
    Out.push_back(std::move(P));
  }
  return Out;
}

std::vector<Conjunction> Eliminator::run(Conjunction C) {
  constexpr int StepLimit = 48;
  std::vector<Conjunction> Out;
  std::vector<std::pair<Conjunction, int>> Work;
  Work.emplace_back(std::move(C), 0);
  while (!Work.empty()) {
    auto [Cur, Steps] = std::move(Work.back());
    Work.pop_back();
    if (!Cur.simplify())
      continue;
    if (propagateUndefined(Cur) && !Cur.simplify())
      continue;
    if (Cur.allLocalsDefined()) {
      Out.push_back(std::move(Cur));
      continue;
    }
    Choice Ch = Steps < StepLimit ? choose(Cur) : Choice{};
    switch (Ch.Kind) {
    case Action::Drop:
      std::erase_if(Cur.Ineqs, [&](const Row &R) { return R[Ch.Col + 1] != 0; });
      Cur.removeColumn(Ch.Col);
      break;
    case Action::EqDiv:
      eqDiv(Cur, Ch.Col, Ch.RowIdx);
      break;
    case Action::Pugh:
      pugh(Cur, Ch.Col, Ch.RowIdx);
      break;
    case Action::FourierMotzkin:
      fourierMotzkin(Cur, Ch.Col, false, true);
      break;
    case Action::DivBounds:
      fourierMotzkin(Cur, Ch.Col, true, Ch.LowerSide);
      break;
    case Action::None:
      for (Conjunction &P : splinter(Cur))
        Work.emplace_back(std::move(P), Steps + 1);
      continue;
    }
    Work.emplace_back(std::move(Cur), Steps + 1);
  }
  return Out;
}

std::vector<Conjunction> eliminateUndefinedLocals(Conjunction C) { return Eliminator::run(std::move(C)); }

std::vector<Conjunction> projectOutDims(Conjunction C, const std::vector<unsigned> &DimIdx) {
  if (C.isMarkedEmpty()) {
    return {};
  }
  C.dimsToLocals(DimIdx);
  return eliminateUndefinedLocals(std::move(C));
}

Conjunction intersect(const Conjunction &A, const Conjunction &B) {
  assert(A.numDims() == B.numDims());
  if (A.isMarkedEmpty() || B.isMarkedEmpty())
    return Conjunction::emptySet(A.numDims());
  Conjunction R = A;
  std::vector<unsigned> Map = R.embedLocalsOf(B);
  for (const Row &E : B.equalities())
    R.addEquality(R.remapRow(E, Map));
  for (const Row &I : B.inequalities())
    R.addInequality(R.remapRow(I, Map));
  return R;
}

std::vector<Conjunction> subtract(const Conjunction &A, const Conjunction &B) {
  assert(A.numDims() == B.numDims());
  if (A.isMarkedEmpty())
    return {};
  if (B.isMarkedEmpty())
    return {A};
  if (!B.allLocalsDefined())
    throw std::logic_error("subtract requires a subtrahend without existential locals");
  Conjunction Cur = A;
  std::vector<unsigned> Map = Cur.embedLocalsOf(B);
  std::vector<Row> Cuts;
  for (const Row &E : B.equalities()) {
    Row R = Cur.remapRow(E, Map);
    Cuts.push_back(R);
    Cuts.push_back(negated(R));
  }
  for (const Row &I : B.inequalities())
    Cuts.push_back(Cur.remapRow(I, Map));

  {
    Conjunction Both = Cur;
    for (const Row &R : Cuts)
      Both.addInequality(R);
    if (!Both.simplify() || Both.isEmpty())
      return {A};
  }

  // Cur keeps the unsimplified column layout so the cut rows stay valid.
  std::vector<Conjunction> Out;
  for (const Row &R : Cuts) {
    Conjunction Piece = Cur;
    Piece.addInequality(negateInequality(R).front());
    if (Piece.simplify() && !Piece.isEmpty())
      Out.push_back(std::move(Piece));
    Cur.addInequality(R);
    Conjunction Rest = Cur;
    if (!Rest.simplify() || Rest.isEmpty())
      break;
  }
  return Out;
}

} // namespace lrumodel::poly
