// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Set.h"
#include "lrumodel/poly/Scan.h"

#include <algorithm>
#include <optional>
#include <map>
#include <set>
#include <sstream>

namespace lrumodel::poly {

//===----------------------------------------------------------------------===//
// Space
//===----------------------------------------------------------------------===//

Space::Space(std::string Name, std::vector<std::string> Dims) : Name(std::move(Name)), Dims(std::move(Dims)) {
  std::set<std::string> Seen;
  for (const auto &D : this->Dims)
    if (!Seen.insert(D).second)
      throw std::invalid_argument("duplicate dimension identifier '" + D + "'");
}

Space Space::anonymous(std::string Name, unsigned Arity) { return Space(std::move(Name), defaultDimNames(Arity)); }

unsigned Space::indexOf(const std::string &Dim) const {
  for (unsigned I = 0; I < Dims.size(); ++I)
    if (Dims[I] == Dim)
      return I;
  throw std::invalid_argument("unknown dimension '" + Dim + "' in space " + str());
}

std::string Space::str() const {
  std::string S = Name + "[";
  for (size_t I = 0; I < Dims.size(); ++I)
    S += (I ? ", " : "") + Dims[I];
  return S + "]";
}

namespace {

void checkSameArity(const Space &A, const Space &B) {
  if (A.Name == B.Name && A.arity() != B.arity())
    throw IncompatibleSpaceError("tuple " + A.Name + " used with arities " + std::to_string(A.arity()) + " and " +
                                 std::to_string(B.arity()));
}

/// Simplifies and eliminates existentials; drops empty results.
std::vector<Conjunction> finalize(Conjunction C) {
  if (!C.simplify())
    return {};
  std::vector<Conjunction> Parts;
  if (C.allLocalsDefined())
    Parts.push_back(std::move(C));
  else
    Parts = eliminateUndefinedLocals(std::move(C));
  std::vector<Conjunction> Out;
  for (Conjunction &P : Parts)
    if (!P.isEmpty())
      Out.push_back(std::move(P));
  return Out;
}

std::vector<Conjunction> subtractFrom(std::vector<Conjunction> Rem, const Conjunction &B) {
  std::vector<Conjunction> Next;
  for (const Conjunction &R : Rem)
    for (Conjunction &P : subtract(R, B))
      Next.push_back(std::move(P));
  return Next;
}

/// Pieces carrying a tuple key; shared by sets and maps.
template <typename PieceT> struct PieceOps;

template <> struct PieceOps<BasicSet> {
  static bool sameKey(const BasicSet &A, const BasicSet &B) {
    checkSameArity(A.Sp, B.Sp);
    return A.Sp.Name == B.Sp.Name;
  }
  static BasicSet with(const BasicSet &P, Conjunction C) { return BasicSet{P.Sp, std::move(C)}; }
};

template <> struct PieceOps<BasicMap> {
  static bool sameKey(const BasicMap &A, const BasicMap &B) {
    checkSameArity(A.In, B.In);
    checkSameArity(A.Out, B.Out);
    return A.In.Name == B.In.Name && A.Out.Name == B.Out.Name;
  }
  static BasicMap with(const BasicMap &P, Conjunction C) { return BasicMap{P.In, P.Out, std::move(C)}; }
};

/// Appends `Pieces` to `Result`, subtracting what is already covered.
template <typename PieceT> void addDisjoint(std::vector<PieceT> &Result, std::vector<PieceT> Pieces) {
  using Ops = PieceOps<PieceT>;
  for (PieceT &P : Pieces) {
    std::vector<Conjunction> Rem = finalize(std::move(P.C));
    size_t End = Result.size();
    for (size_t I = 0; I < End && !Rem.empty(); ++I)
      if (Ops::sameKey(Result[I], P))
        Rem = subtractFrom(std::move(Rem), Result[I].C);
    for (Conjunction &R : Rem)
      Result.push_back(Ops::with(P, std::move(R)));
  }
}

template <typename PieceT> std::vector<PieceT> intersectPieces(const std::vector<PieceT> &A, const std::vector<PieceT> &B) {
  using Ops = PieceOps<PieceT>;
  std::vector<PieceT> Out;
  for (const PieceT &P : A)
    for (const PieceT &Q : B) {
      if (!Ops::sameKey(P, Q))
        continue;
      for (Conjunction &C : finalize(intersect(P.C, Q.C)))
        Out.push_back(Ops::with(P, std::move(C)));
    }
  return Out;
}

template <typename PieceT> std::vector<PieceT> subtractPieces(const std::vector<PieceT> &A, const std::vector<PieceT> &B) {
  using Ops = PieceOps<PieceT>;
  std::vector<PieceT> Out;
  for (const PieceT &P : A) {
    std::vector<Conjunction> Rem{P.C};
    for (const PieceT &Q : B)
      if (!Rem.empty() && Ops::sameKey(P, Q))
        Rem = subtractFrom(std::move(Rem), Q.C);
    for (Conjunction &C : Rem)
      Out.push_back(Ops::with(P, std::move(C)));
  }
  return Out;
}

/// Rows of a conjunction in readable form: positive terms on the left.
std::string constraintStr(const Conjunction &C, const Row &R, bool IsEq, const std::vector<std::string> &Names) {
  AffineExpr Lhs, Rhs(-R[0]);
  for (unsigned Col = 0; Col < C.numCols(); ++Col) {
    if (R[Col + 1] == 0)
      continue;
    AffineExpr Term = columnExpr(C, Col);
    if (R[Col + 1] > 0)
      Lhs += Term * R[Col + 1];
    else
      Rhs += Term * -R[Col + 1];
  }
  if (Lhs.isConstant() && Lhs.Constant == 0 && !IsEq)
    return Rhs.str(Names) + " <= 0";
  return Lhs.str(Names) + (IsEq ? " = " : " >= ") + Rhs.str(Names);
}

std::string conjunctionStr(const Conjunction &C, const std::vector<std::string> &Names) {
  std::vector<std::string> Parts;
  for (const Row &R : C.equalities())
    Parts.push_back(constraintStr(C, R, true, Names));
  for (const Row &R : C.inequalities())
    Parts.push_back(constraintStr(C, R, false, Names));
  std::string S;
  for (size_t I = 0; I < Parts.size(); ++I)
    S += (I ? " and " : "") + Parts[I];
  return S;
}

std::string tupleStr(const std::string &Name, const std::vector<std::string> &Dims) {
  std::string S = Name + "[";
  for (size_t I = 0; I < Dims.size(); ++I)
    S += (I ? ", " : "") + Dims[I];
  return S + "]";
}

/// Output dimension names that do not clash with the input ones.
std::vector<std::string> distinctOutNames(const Space &In, const Space &Out) {
  std::set<std::string> Used(In.Dims.begin(), In.Dims.end());
  std::vector<std::string> Names;
  for (const std::string &D : Out.Dims) {
    std::string N = D;
    while (Used.count(N))
      N += "'";
    Used.insert(N);
    Names.push_back(N);
  }
  return Names;
}

Conjunction constraintsOver(unsigned NumDims, const std::vector<AffineExpr> &Eqs,
                            const std::vector<AffineExpr> &Ineqs) {
  Conjunction C(NumDims);
  std::vector<Row> EqRows, IneqRows;
  for (const AffineExpr &E : Eqs)
    EqRows.push_back(toRow(C, E));
  for (const AffineExpr &E : Ineqs)
    IneqRows.push_back(toRow(C, E));
  for (Row &R : EqRows) {
    R.resize(C.rowWidth(), 0);
    C.addEquality(std::move(R));
  }
  for (Row &R : IneqRows) {
    R.resize(C.rowWidth(), 0);
    C.addInequality(std::move(R));
  }
  return C;
}

/// Union of two conjunctions that differ only in one complementary
/// inequality.
std::optional<Conjunction> mergeComplementary(const Conjunction &A, const Conjunction &B) {
  if (A.numLocals() != B.numLocals() || A.equalities() != B.equalities() ||
      A.inequalities().size() != B.inequalities().size())
    return std::nullopt;
  for (unsigned Col = A.numDims(); Col < A.numCols(); ++Col)
    if (A.definition(Col) != B.definition(Col))
      return std::nullopt;
  std::multiset<Row> RA(A.inequalities().begin(), A.inequalities().end());
  std::multiset<Row> RB(B.inequalities().begin(), B.inequalities().end());
  std::vector<Row> OnlyA, OnlyB;
  std::set_difference(RA.begin(), RA.end(), RB.begin(), RB.end(), std::back_inserter(OnlyA));
  std::set_difference(RB.begin(), RB.end(), RA.begin(), RA.end(), std::back_inserter(OnlyB));
  if (OnlyA.size() != 1 || OnlyB.size() != 1 || negateInequality(OnlyA[0]).front() != OnlyB[0])
    return std::nullopt;
  Conjunction Out = Conjunction::universe(A.numDims());
  std::vector<unsigned> Map = Out.embedLocalsOf(A);
  for (const Row &R : A.equalities())
    Out.addEquality(Out.remapRow(R, Map));
  for (const Row &R : A.inequalities())
    if (R != OnlyA[0])
      Out.addInequality(Out.remapRow(R, Map));
  Out.simplify();
  return Out;
}

/// One inequality of `From` as a conjunction carrying From's locals.
Conjunction singleConstraint(const Conjunction &From, const Row &R) {
  Conjunction C = Conjunction::universe(From.numDims());
  std::vector<unsigned> Map = C.embedLocalsOf(From);
  C.addInequality(C.remapRow(R, Map));
  return C;
}

/// Union of two conjunctions when the constraints of each that hold on the
/// other describe exactly the union.
std::optional<Conjunction> mergeByHull(const Conjunction &A, const Conjunction &B) {
  if (!A.allLocalsDefined() || !B.allLocalsDefined())
    return std::nullopt;
  Conjunction Hull = Conjunction::universe(A.numDims());
  for (const auto &[Own, Other] : {std::pair{&A, &B}, std::pair{&B, &A}}) {
    std::vector<Row> Rows = Own->inequalities();
    for (const Row &E : Own->equalities()) {
      Rows.push_back(E);
      Rows.push_back(E);
      for (Int &V : Rows.back())
        V = checkedNeg(V);
    }
    for (const Row &R : Rows) {
      Conjunction Violated = singleConstraint(*Own, negateInequality(R).front());
      if (poly::intersect(*Other, Violated).isEmpty())
        Hull = poly::intersect(Hull, singleConstraint(*Own, R));
    }
  }
  if (!Hull.simplify() || Hull.isEmpty())
    return std::nullopt;
  std::vector<Conjunction> Extra = subtractFrom(subtractFrom({Hull}, A), B);
  if (!std::all_of(Extra.begin(), Extra.end(), [](const Conjunction &C) { return C.isEmpty(); }))
    return std::nullopt;
  return Hull;
}

/// Merges pairs of pieces whose union is a single conjunction.
template <typename PieceT> std::vector<PieceT> coalescePieces(std::vector<PieceT> Pieces) {
  using Ops = PieceOps<PieceT>;
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (size_t I = 0; I < Pieces.size() && !Changed; ++I)
      for (size_t J = I + 1; J < Pieces.size() && !Changed; ++J) {
        if (!Ops::sameKey(Pieces[I], Pieces[J]))
          continue;
        std::optional<Conjunction> Merged = mergeComplementary(Pieces[I].C, Pieces[J].C);
        if (!Merged)
          Merged = mergeByHull(Pieces[I].C, Pieces[J].C);
        if (!Merged)
          continue;
        Pieces[I] = Ops::with(Pieces[I], std::move(*Merged));
        Pieces.erase(Pieces.begin() + J);
        Changed = true;
      }
  }
  return Pieces;
}

} // namespace

//===----------------------------------------------------------------------===//
// Set
//===----------------------------------------------------------------------===//

Set::Set(BasicSet B) { addDisjoint(Pieces, {std::move(B)}); }

Set Set::fromPieces(std::vector<BasicSet> In) {
  Set S;
  addDisjoint(S.Pieces, std::move(In));
  return S;
}

Set Set::universe(const Space &Sp) { return Set(BasicSet{Sp, Conjunction(Sp.arity())}); }

Set Set::fromConstraints(const Space &Sp, const std::vector<AffineExpr> &Eqs, const std::vector<AffineExpr> &Ineqs) {
  return Set(BasicSet{Sp, constraintsOver(Sp.arity(), Eqs, Ineqs)});
}

bool Set::isEmpty() const {
  for (const BasicSet &P : Pieces)
    if (!P.C.isEmpty())
      return false;
  return true;
}

Set Set::intersect(const Set &O) const {
  Set R;
  R.Pieces = intersectPieces(Pieces, O.Pieces);
  return R;
}

Set Set::subtract(const Set &O) const {
  Set R;
  R.Pieces = subtractPieces(Pieces, O.Pieces);
  return R;
}

Set Set::unite(const Set &O) const {
  Set R = *this;
  for (BasicSet &P : O.subtract(*this).Pieces)
    R.Pieces.push_back(std::move(P));
  return R;
}

Set Set::restrictTo(const std::string &Name) const {
  Set R;
  for (const BasicSet &P : Pieces)
    if (P.Sp.Name == Name)
      R.Pieces.push_back(P);
  return R;
}

Set Set::project(const std::vector<std::string> &Keep) const {
  std::vector<BasicSet> Out;
  for (const BasicSet &P : Pieces) {
    std::vector<unsigned> KeepIdx;
    for (const std::string &D : Keep)
      KeepIdx.push_back(P.Sp.indexOf(D));
    std::vector<unsigned> Drop;
    for (unsigned D = 0; D < P.Sp.arity(); ++D)
      if (std::find(KeepIdx.begin(), KeepIdx.end(), D) == KeepIdx.end())
        Drop.push_back(D);
    // Remaining dimensions keep their relative order; reorder to `Keep`.
    std::vector<unsigned> Remaining;
    for (unsigned D = 0; D < P.Sp.arity(); ++D)
      if (std::find(Drop.begin(), Drop.end(), D) == Drop.end())
        Remaining.push_back(D);
    std::vector<unsigned> Order;
    for (unsigned K : KeepIdx)
      Order.push_back(static_cast<unsigned>(std::find(Remaining.begin(), Remaining.end(), K) - Remaining.begin()));
    for (Conjunction &C : projectOutDims(P.C, Drop)) {
      C.permuteDims(Order);
      Out.push_back(BasicSet{Space(P.Sp.Name, Keep), std::move(C)});
    }
  }
  return fromPieces(std::move(Out));
}

Set Set::projectIndices(const std::vector<unsigned> &Keep) const {
  std::vector<BasicSet> Out;
  for (const BasicSet &P : Pieces) {
    std::vector<std::string> Names;
    for (unsigned K : Keep)
      Names.push_back(P.Sp.Dims.at(K));
    Set Single;
    Single.Pieces.push_back(P);
    for (BasicSet &Q : Single.project(Names).Pieces)
      Out.push_back(std::move(Q));
  }
  return fromPieces(std::move(Out));
}

void Set::enumerate(const std::function<void(const Space &, const std::vector<Int> &)> &Fn) const {
  std::vector<std::string> Order;
  for (const BasicSet &P : Pieces)
    if (std::find(Order.begin(), Order.end(), P.Sp.Name) == Order.end())
      Order.push_back(P.Sp.Name);
  for (const std::string &Name : Order) {
    std::vector<std::vector<Int>> Points;
    const Space *Sp = nullptr;
    for (const BasicSet &P : Pieces) {
      if (P.Sp.Name != Name)
        continue;
      Sp = &P.Sp;
      scanPoints(P.C, [&](const std::vector<Int> &X) { Points.push_back(X); });
    }
    std::sort(Points.begin(), Points.end());
    Points.erase(std::unique(Points.begin(), Points.end()), Points.end());
    for (const auto &X : Points)
      Fn(*Sp, X);
  }
}

std::vector<std::vector<Int>> Set::points() const {
  std::vector<std::vector<Int>> Out;
  enumerate([&](const Space &, const std::vector<Int> &X) { Out.push_back(X); });
  return Out;
}

bool Set::isSubset(const Set &O) const { return subtract(O).isEmpty(); }
bool Set::isEqual(const Set &O) const { return isSubset(O) && O.isSubset(*this); }

Set Set::coalesce() const {
  Set R;
  R.Pieces = coalescePieces(Pieces);
  return R;
}

std::string Set::str() const {
  std::string S = "{ ";
  for (size_t I = 0; I < Pieces.size(); ++I) {
    const BasicSet &P = Pieces[I];
    S += (I ? "; " : "") + tupleStr(P.Sp.Name, P.Sp.Dims);
    std::string Cons = conjunctionStr(P.C, P.Sp.Dims);
    if (!Cons.empty())
      S += " : " + Cons;
  }
  return S + (Pieces.empty() ? "}" : " }");
}

//===----------------------------------------------------------------------===//
// Map
//===----------------------------------------------------------------------===//

Map::Map(BasicMap B) { addDisjoint(Pieces, {std::move(B)}); }

Map Map::fromPieces(std::vector<BasicMap> In) {
  Map M;
  addDisjoint(M.Pieces, std::move(In));
  return M;
}

Map Map::fromConstraints(const Space &In, const Space &Out, const std::vector<AffineExpr> &Eqs,
                         const std::vector<AffineExpr> &Ineqs) {
  return Map(BasicMap{In, Out, constraintsOver(In.arity() + Out.arity(), Eqs, Ineqs)});
}

Map Map::fromFunction(const Space &In, const Space &Out, const std::vector<AffineExpr> &Exprs) {
  if (Exprs.size() != Out.arity())
    throw IncompatibleSpaceError("function arity does not match output space " + Out.str());
  std::vector<AffineExpr> Eqs;
  for (unsigned K = 0; K < Exprs.size(); ++K)
    Eqs.push_back(AffineExpr::dim(In.arity() + K) - Exprs[K]);
  return fromConstraints(In, Out, Eqs, {});
}

Map Map::identity(const Set &Domain) {
  Map M;
  for (const BasicSet &P : Domain.pieces()) {
    unsigned N = P.Sp.arity();
    Conjunction C = P.C;
    C.insertDims(N, N);
    for (unsigned K = 0; K < N; ++K) {
      Row R = C.zeroRow();
      R[K + 1] = 1;
      R[N + K + 1] = -1;
      C.addEquality(R);
    }
    C.simplify();
    M.Pieces.push_back(BasicMap{P.Sp, P.Sp, std::move(C)});
  }
  return M;
}

bool Map::isEmpty() const {
  for (const BasicMap &P : Pieces)
    if (!P.C.isEmpty())
      return false;
  return true;
}

Map Map::intersect(const Map &O) const {
  Map R;
  R.Pieces = intersectPieces(Pieces, O.Pieces);
  return R;
}

Map Map::subtract(const Map &O) const {
  Map R;
  R.Pieces = subtractPieces(Pieces, O.Pieces);
  return R;
}

Map Map::unite(const Map &O) const {
  Map R = *this;
  for (BasicMap &P : O.subtract(*this).Pieces)
    R.Pieces.push_back(std::move(P));
  return R;
}

Map Map::intersectDomain(const Set &S) const {
  Map R;
  for (const BasicMap &P : Pieces)
    for (const BasicSet &Q : S.pieces()) {
      checkSameArity(P.In, Q.Sp);
      if (P.In.Name != Q.Sp.Name)
        continue;
      Conjunction C = Q.C;
      C.insertDims(P.In.arity(), P.Out.arity());
      for (Conjunction &X : finalize(poly::intersect(P.C, C)))
        R.Pieces.push_back(BasicMap{P.In, P.Out, std::move(X)});
    }
  return R;
}

Map Map::intersectRange(const Set &S) const {
  Map R;
  for (const BasicMap &P : Pieces)
    for (const BasicSet &Q : S.pieces()) {
      checkSameArity(P.Out, Q.Sp);
      if (P.Out.Name != Q.Sp.Name)
        continue;
      Conjunction C = Q.C;
      C.insertDims(0, P.In.arity());
      for (Conjunction &X : finalize(poly::intersect(P.C, C)))
        R.Pieces.push_back(BasicMap{P.In, P.Out, std::move(X)});
    }
  return R;
}

Map Map::compose(const Map &F) const {
  std::vector<BasicMap> Out;
  for (const BasicMap &FP : F.Pieces)
    for (const BasicMap &GP : Pieces) {
      if (FP.Out.Name != GP.In.Name)
        continue;
      if (FP.Out.arity() != GP.In.arity())
        throw IncompatibleSpaceError("cannot compose through " + FP.Out.str() + " and " + GP.In.str());
      unsigned NX = FP.In.arity(), NY = FP.Out.arity(), NZ = GP.Out.arity();
      Conjunction CF = FP.C;
      CF.insertDims(NX + NY, NZ);
      Conjunction CG = GP.C;
      CG.insertDims(0, NX);
      Conjunction C = poly::intersect(CF, CG);
      if (!C.simplify() || C.isEmpty())
        continue;
      std::vector<unsigned> Mid;
      for (unsigned K = 0; K < NY; ++K)
        Mid.push_back(NX + K);
      for (Conjunction &X : projectOutDims(std::move(C), Mid))
        Out.push_back(BasicMap{FP.In, GP.Out, std::move(X)});
    }
  return fromPieces(std::move(Out));
}

Map Map::inverse() const {
  Map R;
  for (const BasicMap &P : Pieces) {
    unsigned NX = P.In.arity(), NY = P.Out.arity();
    std::vector<unsigned> Order;
    for (unsigned K = 0; K < NY; ++K)
      Order.push_back(NX + K);
    for (unsigned K = 0; K < NX; ++K)
      Order.push_back(K);
    Conjunction C = P.C;
    C.permuteDims(Order);
    R.Pieces.push_back(BasicMap{P.Out, P.In, std::move(C)});
  }
  return R;
}

Set Map::domain() const {
  std::vector<BasicSet> Out;
  for (const BasicMap &P : Pieces) {
    std::vector<unsigned> Drop;
    for (unsigned K = 0; K < P.Out.arity(); ++K)
      Drop.push_back(P.In.arity() + K);
    for (Conjunction &C : projectOutDims(P.C, Drop))
      Out.push_back(BasicSet{P.In, std::move(C)});
  }
  return Set::fromPieces(std::move(Out));
}

Set Map::range() const { return inverse().domain(); }

Map Map::lexmin(const NameOrder &Order) const {
  NameOrder Less = Order ? Order : NameOrder([](const std::string &A, const std::string &B) { return A < B; });
  std::vector<BasicMap> Cur = Pieces;

  // Tuple names act as a leading output dimension.
  {
    std::vector<BasicMap> Next;
    for (const BasicMap &P : Cur) {
      std::vector<Conjunction> Rem{P.C};
      for (const BasicMap &Q : Cur) {
        if (Q.In.Name != P.In.Name || !Less(Q.Out.Name, P.Out.Name) || Rem.empty())
          continue;
        std::vector<unsigned> Drop;
        for (unsigned K = 0; K < Q.Out.arity(); ++K)
          Drop.push_back(Q.In.arity() + K);
        for (Conjunction &D : projectOutDims(Q.C, Drop)) {
          D.insertDims(P.In.arity(), P.Out.arity());
          Rem = subtractFrom(std::move(Rem), D);
        }
      }
      for (Conjunction &C : Rem)
        Next.push_back(BasicMap{P.In, P.Out, std::move(C)});
    }
    Cur = std::move(Next);
  }

  unsigned MaxOut = 0;
  for (const BasicMap &P : Cur)
    MaxOut = std::max(MaxOut, P.Out.arity());
  for (unsigned Level = 0; Level < MaxOut; ++Level) {
    // Partners only matter through their outputs up to `Level`.
    std::vector<std::vector<Conjunction>> Prefixes(Cur.size());
    for (size_t I = 0; I < Cur.size(); ++I) {
      const BasicMap &Q = Cur[I];
      if (Level >= Q.Out.arity())
        continue;
      std::vector<unsigned> Tail;
      for (unsigned K = Level + 1; K < Q.Out.arity(); ++K)
        Tail.push_back(Q.In.arity() + K);
      Prefixes[I] = Tail.empty() ? std::vector<Conjunction>{Q.C} : projectOutDims(Q.C, Tail);
    }
    std::vector<BasicMap> Next;
    for (const BasicMap &P : Cur) {
      unsigned NX = P.In.arity(), NY = P.Out.arity();
      if (Level >= NY) {
        Next.push_back(P);
        continue;
      }
      std::vector<Conjunction> Rem{P.C};
      for (size_t I = 0; I < Cur.size() && !Rem.empty(); ++I) {
        const BasicMap &Q = Cur[I];
        if (Q.In.Name != P.In.Name || Q.Out.Name != P.Out.Name)
          continue;
        // Pairs (x, y) of P with a partner y2 in Q(x) that agrees with y
        // before `Level` and is smaller at `Level`.
        for (const Conjunction &Prefix : Prefixes[I]) {
          Conjunction CP = P.C;
          CP.insertDims(NX + NY, Level + 1);
          Conjunction CQ = Prefix;
          CQ.insertDims(NX, NY);
          Conjunction C = poly::intersect(CP, CQ);
          for (unsigned K = 0; K < Level; ++K) {
            Row E = C.zeroRow();
            E[NX + K + 1] = 1;
            E[NX + NY + K + 1] = -1;
            C.addEquality(E);
          }
          Row Lt = C.zeroRow();
          Lt[0] = -1;
          Lt[NX + Level + 1] = 1;
          Lt[NX + NY + Level + 1] = -1;
          C.addInequality(Lt);
          if (!C.simplify() || C.isEmpty())
            continue;
          std::vector<unsigned> Partner;
          for (unsigned K = 0; K <= Level; ++K)
            Partner.push_back(NX + NY + K);
          for (Conjunction &D : projectOutDims(std::move(C), Partner))
            if (!Rem.empty())
              Rem = subtractFrom(std::move(Rem), D);
        }
      }
      for (Conjunction &C : Rem)
        Next.push_back(BasicMap{P.In, P.Out, std::move(C)});
    }
    Cur = std::move(Next);
  }
  Map R;
  R.Pieces = std::move(Cur);
  return R;
}

Set Map::wrap() const {
  std::vector<BasicSet> Out;
  for (const BasicMap &P : Pieces) {
    std::vector<std::string> Dims = P.In.Dims;
    for (const std::string &D : distinctOutNames(P.In, P.Out))
      Dims.push_back(D);
    Out.push_back(BasicSet{Space(P.In.Name + "->" + P.Out.Name, Dims), P.C});
  }
  // Map pieces are already disjoint.
  Set S;
  S.Pieces = std::move(Out);
  return S;
}

void Map::enumerate(const std::function<void(const Space &, const Space &, const std::vector<Int> &)> &Fn) const {
  std::vector<std::pair<std::string, std::string>> Order;
  for (const BasicMap &P : Pieces) {
    auto Key = std::make_pair(P.In.Name, P.Out.Name);
    if (std::find(Order.begin(), Order.end(), Key) == Order.end())
      Order.push_back(Key);
  }
  for (const auto &Key : Order) {
    std::vector<std::vector<Int>> Points;
    const BasicMap *Rep = nullptr;
    for (const BasicMap &P : Pieces) {
      if (std::make_pair(P.In.Name, P.Out.Name) != Key)
        continue;
      Rep = &P;
      scanPoints(P.C, [&](const std::vector<Int> &X) { Points.push_back(X); });
    }
    std::sort(Points.begin(), Points.end());
    Points.erase(std::unique(Points.begin(), Points.end()), Points.end());
    for (const auto &X : Points)
      Fn(Rep->In, Rep->Out, X);
  }
}

bool Map::isEqual(const Map &O) const { return subtract(O).isEmpty() && O.subtract(*this).isEmpty(); }

std::string Map::str() const {
  std::string S = "{ ";
  for (size_t I = 0; I < Pieces.size(); ++I) {
    const BasicMap &P = Pieces[I];
    std::vector<std::string> OutNames = distinctOutNames(P.In, P.Out);
    std::vector<std::string> All = P.In.Dims;
    All.insert(All.end(), OutNames.begin(), OutNames.end());
    S += (I ? "; " : "") + tupleStr(P.In.Name, P.In.Dims) + " -> " + tupleStr(P.Out.Name, OutNames);
    std::string Cons = conjunctionStr(P.C, All);
    if (!Cons.empty())
      S += " : " + Cons;
  }
  return S + (Pieces.empty() ? "}" : " }");
}

Map lexOrderMap(const Space &Sp, bool Strict) {
  unsigned N = Sp.arity();
  Map M;
  std::vector<BasicMap> Pieces;
  for (unsigned Level = 0; Level <= N; ++Level) {
    if (Level == N && Strict)
      break;
    Conjunction C(2 * N);
    for (unsigned K = 0; K < std::min(Level, N); ++K) {
      Row E = C.zeroRow();
      E[K + 1] = 1;
      E[N + K + 1] = -1;
      C.addEquality(E);
    }
    if (Level < N) {
      Row Gt = C.zeroRow();
      Gt[0] = -1;
      Gt[N + Level + 1] = 1;
      Gt[Level + 1] = -1;
      C.addInequality(Gt);
    }
    Pieces.push_back(BasicMap{Sp, Sp, std::move(C)});
  }
  return Map::fromPieces(std::move(Pieces));
}

} // namespace lrumodel::poly
