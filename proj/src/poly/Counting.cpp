// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Counting.h"

#include "lrumodel/poly/Scan.h"

#include <algorithm>
#include <map>

namespace lrumodel::poly {

namespace {

/// Raised when symbolic summation gives up; the caller enumerates instead.
struct GiveUp {};

constexpr size_t WorkBudget = 4000;
/// Largest residue split attempted before giving up.
constexpr Int MaxResidues = 64;

struct Work {
  Conjunction C;
  QuasiPolynomial P;
  unsigned Quotients = 0; // changes of variables applied so far
};

/// Bound on quotient substitutions along one branch; each may reintroduce
/// floors in the remaining variables, so the process is cut off and residue
/// splitting (which always removes a dimension) takes over.
constexpr unsigned MaxQuotients = 4;

/// Collects the floor terms whose inner expression mentions `V` at top level.
void collectFloors(const AffineExpr &E, unsigned V, std::vector<AffineExpr> &Out) {
  for (const DivTerm &T : E.Divs) {
    if (T.Inner.coeff(V) != 0)
      Out.push_back(AffineExpr::floorOf(T.Inner, T.Divisor));
    collectFloors(T.Inner, V, Out);
  }
}

/// Replaces every occurrence of the floor term `Target` inside `E` by `With`.
AffineExpr replaceFloor(const AffineExpr &E, const DivTerm &Target, const AffineExpr &With) {
  AffineExpr Out(E.Constant);
  for (auto [D, K] : E.Coeffs)
    Out += AffineExpr::dim(D, K);
  for (const DivTerm &T : E.Divs) {
    if (T.Divisor == Target.Divisor && T.Inner == Target.Inner)
      Out += With * T.Coeff;
    else
      Out += AffineExpr::floorOf(replaceFloor(T.Inner, Target, With), T.Divisor) * T.Coeff;
  }
  return Out;
}

Row without(Row R, unsigned Col) {
  R[Col + 1] = 0;
  return R;
}

class Summation {
public:
  Summation(unsigned NumParams, CountingStats *Stats) : NumParams(NumParams), Stats(Stats) {}

  std::vector<CountTerm> run(Work Start) {
    std::vector<Work> Stack{std::move(Start)};
    size_t Steps = 0;
    while (!Stack.empty()) {
      Work W = std::move(Stack.back());
      Stack.pop_back();
      if (++Steps > WorkBudget)
        throw GiveUp{};
      if (!W.C.simplify())
        continue;
      if (!W.C.allLocalsDefined())
        throw GiveUp{};
      if (W.C.numDims() == NumParams) {
        if (!W.C.isEmpty() && !W.P.isZero())
          Out.push_back({std::move(W.C), std::move(W.P)});
        continue;
      }
      if (Stats)
        ++Stats->SymbolicSteps;
      step(std::move(W), Stack);
    }
    return std::move(Out);
  }

private:
  void step(Work W, std::vector<Work> &Stack) {
    unsigned V = W.C.numDims() - 1;
    if (eliminateByEquality(W, V)) {
      Stack.push_back(std::move(W));
      return;
    }
    bool InDefs = false;
    for (unsigned Col = W.C.numDims(); Col < W.C.numCols(); ++Col)
      InDefs |= W.C.definition(Col)->Numerator[V + 1] != 0;
    if (InDefs || W.P.dependsInsideFloor(V)) {
      splitFloors(std::move(W), V, Stack);
      return;
    }
    sumBetweenBounds(std::move(W), V, Stack);
  }

  /// Solves an equality for V and substitutes it away.
  bool eliminateByEquality(Work &W, unsigned V) {
    Conjunction &C = W.C;
    int Best = -1;
    for (size_t K = 0; K < C.equalities().size(); ++K) {
      const Row &R = C.equalities()[K];
      if (R[V + 1] == 0)
        continue;
      bool Acyclic = true;
      for (unsigned Col = C.numDims(); Col < C.numCols(); ++Col)
        if (R[Col + 1] != 0 && C.dependsOn(Col, V))
          Acyclic = false;
      if (!Acyclic)
        continue;
      if (Best < 0 || std::abs(R[V + 1]) < std::abs(C.equalities()[Best][V + 1]))
        Best = static_cast<int>(K);
    }
    if (Best < 0)
      return false;
    Row R = C.equalities()[Best];
    Int A = R[V + 1];
    if (A < 0) {
      for (Int &X : R)
        X = checkedNeg(X);
      A = -A;
    }
    Row Rest = without(R, V);
    for (Int &X : Rest)
      X = checkedNeg(X);
    Row Expr;
    if (A == 1) {
      Expr = Rest;
    } else {
      unsigned Q = C.addDiv(Rest, A);
      Expr = C.zeroRow();
      Expr[Q + 1] = 1;
    }
    W.P = W.P.substitute(V, rowExpr(C, Expr));
    C.substitute(V, Expr);
    C.removeColumn(V);
    return true;
  }

  /// Removes V from floor terms, either by a change of variables
  /// V = d*w + t - e (when a single floor((V + e) / d) occurs) or by splitting
  /// V into residue classes.
  void splitFloors(Work W, unsigned V, std::vector<Work> &Stack) {
    std::vector<AffineExpr> Floors;
    std::vector<unsigned> DefCols;
    for (unsigned Col = W.C.numDims(); Col < W.C.numCols(); ++Col) {
      const DivDef &D = *W.C.definition(Col);
      if (D.Numerator[V + 1] != 0) {
        Floors.push_back(AffineExpr::floorOf(rowExpr(W.C, D.Numerator), D.Denominator));
        DefCols.push_back(Col);
      }
    }
    for (const Atom &A : W.P.floorAtoms()) {
      if (A.Inner.coeff(V) != 0)
        Floors.push_back(AffineExpr::floorOf(A.Inner, A.Divisor));
      collectFloors(A.Inner, V, Floors);
    }
    bool Single = DefCols.size() <= 1 && !Floors.empty();
    for (const AffineExpr &F : Floors)
      Single &= F == Floors.front();
    const AffineExpr &F0 = Floors.front();
    bool UnitRows = true;
    for (const auto *Rows : {&W.C.equalities(), &W.C.inequalities()})
      for (const Row &R : *Rows)
        UnitRows &= std::abs(R[V + 1]) <= 1;
    if (Single && UnitRows && W.Quotients < MaxQuotients && F0.Constant == 0 && F0.Coeffs.empty() && F0.Divs.size() == 1 && F0.Divs[0].Coeff == 1 &&
        F0.Divs[0].Inner.coeff(V) == 1 && !(F0.Divs[0].Inner - AffineExpr::dim(V)).dependsOn(V)) {
      substituteQuotient(std::move(W), V, F0.Divs[0], DefCols.empty() ? -1 : static_cast<int>(DefCols[0]), Stack);
      return;
    }
    Int M = 1;
    for (const AffineExpr &F : Floors)
      for (const DivTerm &T : F.Divs)
        if (Int K = T.Inner.coeff(V))
          M = lcm(M, T.Divisor / gcd(std::abs(K), T.Divisor));
    if (M == 1 || M > MaxResidues)
      throw GiveUp{};
    if (Stats)
      ++Stats->ResidueSplits;
    for (Int R = 0; R < M; ++R) {
      Work Branch = W;
      Branch.C.scaleColumn(V, M, R);
      Branch.P = Branch.P.substitute(V, AffineExpr::dim(V, M) + AffineExpr(R));
      Stack.push_back(std::move(Branch));
    }
  }

  void substituteQuotient(Work W, unsigned V, const DivTerm &T, int DefCol, std::vector<Work> &Stack) {
    Conjunction &C = W.C;
    unsigned N = C.numDims();
    unsigned Wd = N, Td = N + 1; // intermediate positions of the new variables
    Int D = T.Divisor;
    AffineExpr E = T.Inner - AffineExpr::dim(V);
    C.insertDims(N, 2);
    if (DefCol >= 0) {
      unsigned Q = static_cast<unsigned>(DefCol) + 2;
      Row ToW = C.zeroRow();
      ToW[Wd + 1] = 1;
      C.substitute(Q, ToW);
      C.removeColumn(Q);
    }
    Row VExpr = toRow(C, E);
    for (Int &X : VExpr)
      X = checkedNeg(X);
    VExpr[Wd + 1] = checkedAdd(VExpr[Wd + 1], D);
    VExpr[Td + 1] = checkedAdd(VExpr[Td + 1], 1);
    C.substitute(V, VExpr);
    C.removeColumn(V);
    // Now w is dimension N - 1 and t is dimension N.
    Row TLo = C.zeroRow(), THi = C.zeroRow();
    TLo[N + 1] = 1;
    THi[N + 1] = -1;
    THi[0] = D - 1;
    C.addInequality(TLo);
    C.addInequality(THi);

    AffineExpr WExpr = AffineExpr::dim(Wd);
    QuasiPolynomial P = W.P.mapAtoms([&](const Atom &A) -> std::optional<QuasiPolynomial> {
      if (A.isDim() || !A.Inner.dependsOn(V))
        return std::nullopt;
      if (A.Divisor == T.Divisor && A.Inner == T.Inner)
        return QuasiPolynomial::dim(Wd);
      return QuasiPolynomial::fromAffine(AffineExpr::floorOf(replaceFloor(A.Inner, T, WExpr), A.Divisor));
    });
    P = P.substitute(V, AffineExpr::dim(Wd, D) + AffineExpr::dim(Td) - E);
    std::vector<unsigned> Map(N + 2);
    for (unsigned I = 0; I < N + 2; ++I)
      Map[I] = I < V ? I : (I == V ? 0 : I - 1);
    W.P = P.remapDims(Map);
    ++W.Quotients;
    Stack.push_back(std::move(W));
  }

  /// Sums over V between its lower and upper bounds, splitting the remaining
  /// space into chambers where one lower and one upper bound are active.
  void sumBetweenBounds(Work W, unsigned V, std::vector<Work> &Stack) {
    auto Collect = [&](std::vector<Row> &Lower, std::vector<Row> &Upper) {
      Lower.clear();
      Upper.clear();
      for (const Row &R : W.C.inequalities())
        if (R[V + 1] > 0)
          Lower.push_back(R);
        else if (R[V + 1] < 0)
          Upper.push_back(R);
    };
    std::vector<Row> Lower, Upper;
    Collect(Lower, Upper);
    if (Lower.size() > 1 || Upper.size() > 1) {
      // An empty conjunction makes every row redundant.
      if (W.C.isEmpty())
        return;
      W.C.removeRedundant();
      Collect(Lower, Upper);
    }
    if (Lower.empty() || Upper.empty())
      throw UnboundedError("cannot count an unbounded set");

    std::vector<AffineExpr> Lo, Hi;
    for (const Row &R : Lower) {
      Int A = R[V + 1];
      AffineExpr Rest = rowExpr(W.C, without(R, V));
      Lo.push_back(A == 1 ? -Rest : AffineExpr::floorOf(-Rest + AffineExpr(A - 1), A));
    }
    for (const Row &R : Upper) {
      Int B = -R[V + 1];
      AffineExpr Rest = rowExpr(W.C, without(R, V));
      Hi.push_back(B == 1 ? Rest : AffineExpr::floorOf(Rest, B));
    }
    // The remaining space: every row except the bounds on V.
    Conjunction Base(W.C.numDims());
    std::vector<unsigned> ColMap = Base.embedLocalsOf(W.C);
    for (const Row &R : W.C.equalities())
      Base.addEquality(Base.remapRow(R, ColMap));
    for (const Row &R : W.C.inequalities())
      if (R[V + 1] == 0)
        Base.addInequality(Base.remapRow(R, ColMap));
    Base.removeColumn(V);

    for (size_t I = 0; I < Lo.size(); ++I)
      for (size_t J = 0; J < Hi.size(); ++J) {
        Conjunction C = Base;
        auto Require = [&](const AffineExpr &E) { C.addInequality(toRow(C, E)); };
        for (size_t K = 0; K < Lo.size(); ++K)
          if (K != I)
            Require(Lo[I] - Lo[K] - AffineExpr(K < I ? 1 : 0));
        for (size_t K = 0; K < Hi.size(); ++K)
          if (K != J)
            Require(Hi[K] - Hi[J] - AffineExpr(K < J ? 1 : 0));
        Require(Hi[J] - Lo[I]);
        if (!C.simplify() || C.isEmpty())
          continue;
        Stack.push_back({std::move(C), sumOver(W.P, V, Lo[I], Hi[J]), W.Quotients});
      }
  }

  unsigned NumParams;
  CountingStats *Stats;
  std::vector<CountTerm> Out;
};

/// Exact fallback: one term per parameter value.
std::vector<CountTerm> enumerateSum(const Conjunction &C, const QuasiPolynomial &Poly, unsigned NumParams) {
  std::map<std::vector<Int>, Rational> Sums;
  scanPoints(C, [&](const std::vector<Int> &X) {
    Sums[std::vector<Int>(X.begin(), X.begin() + NumParams)] += Poly.evaluate(X);
  });
  std::vector<CountTerm> Out;
  for (auto &[Params, Value] : Sums) {
    if (Value == 0)
      continue;
    Conjunction D(NumParams);
    for (unsigned K = 0; K < NumParams; ++K) {
      Row R = D.zeroRow();
      R[K + 1] = 1;
      R[0] = -Params[K];
      D.addEquality(std::move(R));
    }
    Out.push_back({std::move(D), QuasiPolynomial(Value)});
  }
  return Out;
}

/// Sorted rows for structural comparison.
std::vector<Row> sortedRows(std::vector<Row> Rows) {
  std::sort(Rows.begin(), Rows.end());
  return Rows;
}

/// If A and B differ in exactly one inequality that is complementary between
/// them, returns A without that inequality.
std::optional<Conjunction> mergeComplementary(const Conjunction &A, const Conjunction &B) {
  if (A.numLocals() != B.numLocals() || A.inequalities().size() != B.inequalities().size())
    return std::nullopt;
  for (unsigned Col = A.numDims(); Col < A.numCols(); ++Col)
    if (A.definition(Col) != B.definition(Col))
      return std::nullopt;
  if (sortedRows(A.equalities()) != sortedRows(B.equalities()))
    return std::nullopt;
  std::vector<Row> IA = sortedRows(A.inequalities()), IB = sortedRows(B.inequalities());
  std::vector<Row> OnlyA, OnlyB;
  std::set_difference(IA.begin(), IA.end(), IB.begin(), IB.end(), std::back_inserter(OnlyA));
  std::set_difference(IB.begin(), IB.end(), IA.begin(), IA.end(), std::back_inserter(OnlyB));
  if (OnlyA.size() != 1 || OnlyB.size() != 1 || negateInequality(OnlyA[0]).front() != OnlyB[0])
    return std::nullopt;
  Conjunction M(A.numDims());
  std::vector<unsigned> ColMap = M.embedLocalsOf(A);
  for (const Row &R : A.equalities())
    M.addEquality(M.remapRow(R, ColMap));
  for (const Row &R : A.inequalities())
    if (R != OnlyA[0])
      M.addInequality(M.remapRow(R, ColMap));
  M.simplify();
  return M;
}

} // namespace

std::vector<CountTerm> sumOverTrailingDims(const Conjunction &C, const QuasiPolynomial &Poly, unsigned NumParams,
                                           CountingStats *Stats) {
  std::vector<CountTerm> Raw;
  try {
    Raw = Summation(NumParams, Stats).run({C, Poly});
  } catch (const GiveUp &) {
    if (Stats)
      ++Stats->Fallbacks;
    return enumerateSum(C, Poly, NumParams);
  } catch (const OverflowError &) {
    if (Stats)
      ++Stats->Fallbacks;
    return enumerateSum(C, Poly, NumParams);
  }
  if (NumParams == 0) {
    Rational Total = 0;
    for (const CountTerm &T : Raw)
      Total += T.Poly.constantTerm();
    std::vector<CountTerm> Out;
    if (Total != 0)
      Out.push_back({Conjunction(0), QuasiPolynomial(Total)});
    return Out;
  }
  std::vector<CountTerm> Out;
  for (CountTerm &T : Raw)
    addPiecewise(Out, std::move(T));
  return coalesceTerms(std::move(Out));
}

BigInt countPoints(const Conjunction &C, CountingStats *Stats) {
  BigInt N = 0;
  for (const CountTerm &T : sumOverTrailingDims(C, QuasiPolynomial(1), 0, Stats)) {
    Rational V = T.Poly.constantTerm();
    if (V.get_den() != 1)
      throw std::logic_error("non-integral point count");
    N += V.get_num();
  }
  return N;
}

BigInt cardinality(const Set &S, CountingStats *Stats) {
  BigInt N = 0;
  for (const BasicSet &B : S.pieces())
    N += countPoints(B.C, Stats);
  return N;
}

void addPiecewise(std::vector<CountTerm> &Terms, CountTerm T) {
  std::vector<CountTerm> Next;
  std::vector<Conjunction> Rest{T.Domain};
  for (CountTerm &Old : Terms) {
    Conjunction Both = intersect(Old.Domain, T.Domain);
    if (!Both.simplify() || Both.isEmpty()) {
      Next.push_back(std::move(Old));
      continue;
    }
    Next.push_back({std::move(Both), Old.Poly + T.Poly});
    for (Conjunction &Part : subtract(Old.Domain, T.Domain))
      Next.push_back({std::move(Part), Old.Poly});
    std::vector<Conjunction> Remaining;
    for (const Conjunction &R : Rest)
      for (Conjunction &Part : subtract(R, Old.Domain))
        Remaining.push_back(std::move(Part));
    Rest = std::move(Remaining);
  }
  for (Conjunction &R : Rest)
    Next.push_back({std::move(R), T.Poly});
  Terms = std::move(Next);
}

std::vector<CountTerm> coalesceTerms(std::vector<CountTerm> Terms) {
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (size_t I = 0; I < Terms.size() && !Changed; ++I)
      for (size_t J = I + 1; J < Terms.size() && !Changed; ++J) {
        if (!(Terms[I].Poly == Terms[J].Poly))
          continue;
        if (auto M = mergeComplementary(Terms[I].Domain, Terms[J].Domain)) {
          Terms[I].Domain = std::move(*M);
          Terms.erase(Terms.begin() + J);
          Changed = true;
        }
      }
  }
  return Terms;
}

std::vector<Piece> cardinalityPerDomainPoint(const Map &M, CountingStats *Stats) {
  std::vector<std::pair<Space, std::vector<CountTerm>>> Groups;
  for (const BasicMap &B : M.pieces()) {
    auto It = std::find_if(Groups.begin(), Groups.end(), [&](const auto &G) { return G.first.Name == B.In.Name; });
    if (It == Groups.end()) {
      Groups.push_back({B.In, {}});
      It = std::prev(Groups.end());
    } else if (It->first.arity() != B.In.arity()) {
      throw IncompatibleSpaceError("input tuple '" + B.In.Name + "' used with different arities");
    }
    for (CountTerm &T : sumOverTrailingDims(B.C, QuasiPolynomial(1), B.In.arity(), Stats))
      addPiecewise(It->second, std::move(T));
  }
  std::vector<Piece> Out;
  for (auto &[Sp, Terms] : Groups)
    for (CountTerm &T : coalesceTerms(std::move(Terms)))
      Out.push_back({Set(BasicSet{Sp, std::move(T.Domain)}), std::move(T.Poly)});
  return Out;
}

} // namespace lrumodel::poly
