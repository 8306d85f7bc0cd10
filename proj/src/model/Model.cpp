// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/model/Model.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <stdexcept>

namespace lrumodel::model {

using poly::AffineExpr;
using poly::Atom;
using poly::BasicSet;
using poly::Conjunction;
using poly::Monomial;
using poly::Rational;
using poly::Row;
using poly::Space;

namespace {

class Stopwatch {
public:
  explicit Stopwatch(double &Sink) : Sink(Sink), Start(std::chrono::steady_clock::now()) {}
  ~Stopwatch() { Sink += std::chrono::duration<double>(std::chrono::steady_clock::now() - Start).count(); }

private:
  double &Sink;
  std::chrono::steady_clock::time_point Start;
};

const Space &domainSpace(const Set &S) {
  if (S.pieces().empty())
    throw std::logic_error("piece domain is empty");
  return S.pieces().front().Sp;
}

/// Fixes dimensions (ascending indices) of every basic set and drops them.
Set bindSet(const Set &S, const std::vector<unsigned> &Dims, const std::vector<Int> &Values) {
  std::vector<BasicSet> Out;
  for (const BasicSet &B : S.pieces()) {
    Conjunction C = B.C;
    std::vector<std::string> Names = B.Sp.Dims;
    for (size_t K = Dims.size(); K-- > 0;) {
      Row Value = C.zeroRow();
      Value[0] = Values[K];
      C.substitute(Dims[K], Value);
      C.removeColumn(Dims[K]);
      Names.erase(Names.begin() + Dims[K]);
    }
    if (C.simplify() && !C.isEmpty())
      Out.push_back({Space(B.Sp.Name, Names), std::move(C)});
  }
  return Set::fromPieces(std::move(Out));
}

/// Dimensions an atom depends on.
std::set<unsigned> atomDims(const Atom &A, unsigned NumDims) {
  std::set<unsigned> Dims;
  for (unsigned D = 0; D < NumDims; ++D)
    if (A.dependsOn(D))
      Dims.insert(D);
  return Dims;
}

unsigned degreeOf(const Monomial &M) {
  unsigned Deg = 0;
  for (const auto &[A, E] : M)
    Deg += E;
  return Deg;
}

QuasiPolynomial atomPoly(const Atom &A) { return QuasiPolynomial::monomial({{A, 1}}, Rational(1)); }

/// Restricts a set to Lo <= (E mod D) <= Hi.
Set withResidue(const Set &S, const AffineExpr &E, Int D, Int Lo, Int Hi) {
  AffineExpr Mod = AffineExpr::modOf(E, D);
  return S.intersect(Set::fromConstraints(domainSpace(S), {}, {Mod - AffineExpr(Lo), AffineExpr(Hi) - Mod}));
}

bool lowersDegree(const std::vector<Piece> &Pieces, unsigned Degree) {
  return std::any_of(Pieces.begin(), Pieces.end(), [&](const Piece &P) { return P.Poly.degree() < Degree; });
}

Rational evaluate(const QuasiPolynomial &P, const std::vector<Int> &Point) { return P.evaluate(Point); }

/// Integral affine form of a degree <= 1 polynomial, scaled by the lcm of
/// its coefficient denominators (returned as the second element).
std::optional<std::pair<AffineExpr, Int>> scaledAffine(const QuasiPolynomial &P) {
  if (!P.isAffine())
    return std::nullopt;
  BigInt Den = 1;
  for (const auto &[M, C] : P.terms())
    mpz_lcm(Den.get_mpz_t(), Den.get_mpz_t(), C.get_den_mpz_t());
  QuasiPolynomial Scaled = P;
  Scaled *= Rational(Den);
  std::optional<AffineExpr> E = Scaled.asAffine();
  if (!E)
    return std::nullopt;
  return std::make_pair(*E, poly::toInt(Den));
}

/// True if A and B provably take equal values on every point of D.
bool agreesOn(const QuasiPolynomial &A, const QuasiPolynomial &B, const Set &D) {
  QuasiPolynomial Diff = A - B;
  if (Diff.isZero())
    return true;
  auto Affine = scaledAffine(Diff);
  if (!Affine)
    return false;
  const Space &Sp = domainSpace(D);
  const AffineExpr &E = Affine->first;
  return D.intersect(Set::fromConstraints(Sp, {}, {E - AffineExpr(1)})).isEmpty() &&
         D.intersect(Set::fromConstraints(Sp, {}, {-E - AffineExpr(1)})).isEmpty();
}

/// Merges pieces whose polynomial also holds on another piece's domain.
void mergeAgreeingPieces(std::vector<Piece> &Pieces) {
  bool Changed = true;
  while (Changed) {
    Changed = false;
    for (size_t I = 0; I < Pieces.size() && !Changed; ++I)
      for (size_t J = I + 1; J < Pieces.size() && !Changed; ++J) {
        size_t Keep = I, Drop = J;
        if (!agreesOn(Pieces[I].Poly, Pieces[J].Poly, Pieces[J].Domain)) {
          if (!agreesOn(Pieces[J].Poly, Pieces[I].Poly, Pieces[I].Domain))
            continue;
          std::swap(Keep, Drop);
        }
        Pieces[Keep].Domain = Pieces[Keep].Domain.unite(Pieces[Drop].Domain).coalesce();
        Pieces.erase(Pieces.begin() + static_cast<std::ptrdiff_t>(Drop));
        Changed = true;
      }
  }
}

} // namespace

size_t DistanceSet::numPieces() const {
  size_t N = 0;
  for (const DistanceEntry &E : Entries)
    N += E.Pieces.size();
  return N;
}

OrderMaps buildOrderMaps(const frontend::Program &P) {
  Set Times = P.Schedule.range();
  Space TimeSpace = Times.pieces().empty() ? Space::anonymous("", 0) : Times.pieces().front().Sp;
  OrderMaps O;
  O.Strict = poly::lexOrderMap(TimeSpace, true).intersectDomain(Times).intersectRange(Times);
  O.Reflexive = poly::lexOrderMap(TimeSpace, false).intersectDomain(Times).intersectRange(Times);
  return O;
}

DistanceSet computeStackDistances(const frontend::Program &P, poly::CountingStats *Stats) {
  DistanceSet Result;
  if (P.Domain.isEmpty())
    return Result;
  const Map &S = P.Schedule;
  const Map &A = P.Access;
  OrderMaps Order = buildOrderMaps(P);
  Map Unschedule = S.inverse();

  // Schedule values touching the same line, and the next such value.
  Map LinesAt = A.compose(Unschedule);
  Map SameLine = LinesAt.inverse().compose(LinesAt);
  Map Next = Unschedule.compose(Order.Strict.intersect(SameLine).lexmin().compose(S));

  // Instances between the previous access of the same line and now.
  Map Backward = Unschedule.compose(Order.Reflexive.inverse().compose(S));
  Map Forward = Unschedule.compose(Order.Reflexive.compose(S)).compose(Next.inverse());
  Map Window = A.compose(Forward.intersect(Backward));

  for (const Piece &Raw : poly::cardinalityPerDomainPoint(Window, Stats)) {
    const Space &Sp = domainSpace(Raw.Domain);
    size_t Stmt = P.statementIndex(Sp.Name);
    unsigned AccessDim = Sp.arity() - 1;
    for (unsigned K = 0; K < P.Statements[Stmt].Accesses.size(); ++K) {
      Piece Bound = bindDimensions(Raw, {AccessDim}, {static_cast<Int>(K)});
      if (Bound.Domain.isEmpty())
        continue;
      auto It = std::find_if(Result.Entries.begin(), Result.Entries.end(),
                             [&](const DistanceEntry &E) { return E.Statement == Stmt && E.Access == K; });
      if (It == Result.Entries.end()) {
        Result.Entries.push_back({Stmt, K, {}});
        It = std::prev(Result.Entries.end());
      }
      It->Pieces.push_back(std::move(Bound));
    }
  }
  for (DistanceEntry &E : Result.Entries)
    mergeAgreeingPieces(E.Pieces);
  std::sort(Result.Entries.begin(), Result.Entries.end(), [](const DistanceEntry &X, const DistanceEntry &Y) {
    return std::tie(X.Statement, X.Access) < std::tie(Y.Statement, Y.Access);
  });
  return Result;
}

std::vector<BigInt> countCompulsoryMisses(const frontend::Program &P) {
  std::vector<BigInt> Counts(P.Statements.size(), 0);
  if (P.Domain.isEmpty())
    return Counts;
  Map FirstTime = P.Schedule.compose(P.Access.inverse()).lexmin();
  Set FirstTouches = P.Schedule.inverse().compose(FirstTime).range();
  for (size_t I = 0; I < P.Statements.size(); ++I)
    Counts[I] = poly::cardinality(FirstTouches.restrictTo(P.Statements[I].Label));
  return Counts;
}

BigInt countAffinePiece(const Piece &P, Int CapacityLines, poly::CountingStats *Stats) {
  if (!P.Poly.isAffine())
    throw std::logic_error("countAffinePiece needs an affine polynomial");
  if (P.Domain.isEmpty())
    return 0;
  if (P.Poly.isConstant())
    return P.Poly.constantTerm() > CapacityLines ? poly::cardinality(P.Domain, Stats) : BigInt(0);
  // den * P >= den * C + 1 with integral coefficients.
  auto Affine = scaledAffine(P.Poly);
  if (!Affine)
    throw std::logic_error("affine polynomial without an affine form");
  const auto &[E, Den] = *Affine;
  AffineExpr Excess = E - AffineExpr(poly::checkedAdd(poly::checkedMul(Den, CapacityLines), 1));
  Set Misses = P.Domain.intersect(Set::fromConstraints(domainSpace(P.Domain), {}, {Excess}));
  return poly::cardinality(Misses, Stats);
}

EnumerationDomain getNonAffineDomain(const Piece &P) {
  unsigned NumDims = domainSpace(P.Domain).arity();
  // Each non-affine monomial as the dimension sets of its factors.
  std::vector<std::vector<std::set<unsigned>>> Products;
  for (const auto &[M, C] : P.Poly.terms()) {
    if (degreeOf(M) < 2)
      continue;
    std::vector<std::set<unsigned>> Factors;
    for (const auto &[A, E] : M)
      for (unsigned K = 0; K < E; ++K)
        Factors.push_back(atomDims(A, NumDims));
    Products.push_back(std::move(Factors));
  }
  std::set<unsigned> Selected;
  auto Unbound = [&](const std::set<unsigned> &F) {
    return std::any_of(F.begin(), F.end(), [&](unsigned D) { return !Selected.count(D); });
  };
  auto Offending = [&](const std::vector<std::set<unsigned>> &Factors) {
    return std::count_if(Factors.begin(), Factors.end(), Unbound) >= 2;
  };
  // Dimensions occurring in two factors of one product are always enumerated.
  for (const auto &Factors : Products)
    for (unsigned D = 0; D < NumDims; ++D)
      if (std::count_if(Factors.begin(), Factors.end(), [&](const auto &F) { return F.count(D) > 0; }) >= 2)
        Selected.insert(D);
  // Then the dimension in the most remaining non-affine products, earliest
  // dimension on ties.
  while (true) {
    std::vector<size_t> Conflicts(NumDims, 0);
    bool Any = false;
    for (const auto &Factors : Products) {
      if (!Offending(Factors))
        continue;
      Any = true;
      std::set<unsigned> Dims;
      for (const auto &F : Factors)
        for (unsigned D : F)
          if (!Selected.count(D))
            Dims.insert(D);
      for (unsigned D : Dims)
        ++Conflicts[D];
    }
    if (!Any)
      break;
    unsigned Best = static_cast<unsigned>(std::max_element(Conflicts.begin(), Conflicts.end()) - Conflicts.begin());
    Selected.insert(Best);
  }
  EnumerationDomain Result;
  Result.Dims.assign(Selected.begin(), Selected.end());
  Result.Points = P.Domain.projectIndices(Result.Dims);
  return Result;
}

Piece bindDimensions(const Piece &P, const std::vector<unsigned> &Dims, const std::vector<Int> &Values) {
  if (Dims.size() != Values.size() || !std::is_sorted(Dims.begin(), Dims.end()))
    throw std::invalid_argument("bindDimensions needs sorted dimensions and one value each");
  unsigned NumDims = domainSpace(P.Domain).arity();
  QuasiPolynomial Poly = P.Poly;
  for (size_t K = 0; K < Dims.size(); ++K)
    Poly = Poly.substitute(Dims[K], AffineExpr(Values[K]));
  std::vector<unsigned> Renumber(NumDims, 0);
  unsigned Next = 0;
  for (unsigned D = 0; D < NumDims; ++D)
    if (!std::binary_search(Dims.begin(), Dims.end(), D))
      Renumber[D] = Next++;
  return {bindSet(P.Domain, Dims, Values), Poly.remapDims(Renumber)};
}

std::optional<std::vector<Piece>> equalize(const Piece &P) {
  unsigned Degree = P.Poly.degree();
  if (Degree < 2)
    return std::nullopt;
  // Floor atoms grouped by argument up to the constant.
  std::map<std::pair<AffineExpr, Int>, std::vector<Atom>> Groups;
  for (const Atom &A : P.Poly.floorAtoms()) {
    AffineExpr Linear = A.Inner;
    Linear.Constant = 0;
    Groups[{Linear, A.Divisor}].push_back(A);
  }
  std::vector<Piece> Current{P};
  bool Changed = false;
  for (auto &[Key, Atoms] : Groups) {
    if (Atoms.size() < 2)
      continue;
    const auto &[Linear, D] = Key;
    auto Base = std::min_element(Atoms.begin(), Atoms.end(), [](const Atom &X, const Atom &Y) {
      return X.Inner.Constant < Y.Inner.Constant;
    });
    AffineExpr BaseArg = Base->Inner;
    Atom BaseAtom = *Base;
    // With r = BaseArg mod D, floor((BaseArg + k) / D) = base + floor((r + k) / D).
    auto Offsets = [&](Int R) {
      std::vector<Int> V;
      for (const Atom &A : Atoms)
        V.push_back(poly::floorDiv(R + A.Inner.Constant - BaseArg.Constant, D));
      return V;
    };
    std::vector<std::pair<Int, Int>> Regions;
    for (Int R = 0; R < D; ++R) {
      if (!Regions.empty() && Offsets(Regions.back().first) == Offsets(R))
        Regions.back().second = R;
      else
        Regions.push_back({R, R});
    }
    if (Regions.size() == 1 && Offsets(0) == std::vector<Int>(Atoms.size(), 0))
      continue;
    std::vector<Piece> Next;
    for (const Piece &Q : Current) {
      for (const auto &[Lo, Hi] : Regions) {
        Set Domain = withResidue(Q.Domain, BaseArg, D, Lo, Hi);
        if (Domain.isEmpty())
          continue;
        std::vector<Int> Off = Offsets(Lo);
        QuasiPolynomial Poly = Q.Poly.mapAtoms([&](const Atom &A) -> std::optional<QuasiPolynomial> {
          for (size_t I = 0; I < Atoms.size(); ++I)
            if (A == Atoms[I])
              return atomPoly(BaseAtom) + QuasiPolynomial(Rational(static_cast<long>(Off[I])));
          return std::nullopt;
        });
        Next.push_back({std::move(Domain), std::move(Poly)});
      }
    }
    Current = std::move(Next);
    Changed = true;
  }
  if (!Changed || !lowersDegree(Current, Degree))
    return std::nullopt;
  return Current;
}

std::optional<std::vector<Piece>> rasterize(const Piece &P) {
  constexpr size_t MaxPieces = 256;
  unsigned Degree = P.Poly.degree();
  if (Degree < 2)
    return std::nullopt;
  // Floor atoms that multiply other non-constant factors.
  std::set<Atom> Candidates;
  for (const auto &[M, C] : P.Poly.terms())
    if (degreeOf(M) >= 2)
      for (const auto &[A, E] : M)
        if (!A.isDim())
          Candidates.insert(A);
  std::vector<Piece> Current{P};
  bool Changed = false;
  for (const Atom &A : Candidates) {
    std::vector<Piece> Next;
    for (const Piece &Q : Current) {
      std::vector<Piece> Split;
      bool Occurs = false;
      for (const auto &[M, C] : Q.Poly.terms())
        Occurs |= degreeOf(M) >= 2 && std::any_of(M.begin(), M.end(), [&](const auto &F) { return F.first == A; });
      if (Occurs && Current.size() * A.Divisor <= MaxPieces) {
        // floor(e / d) = (e - r) / d where e mod d = r.
        for (Int R = 0; R < A.Divisor; ++R) {
          Set Domain = withResidue(Q.Domain, A.Inner, A.Divisor, R, R);
          if (Domain.isEmpty())
            continue;
          QuasiPolynomial Value = QuasiPolynomial::fromAffine(A.Inner - AffineExpr(R));
          Value *= Rational(1, static_cast<unsigned long>(A.Divisor));
          QuasiPolynomial Poly =
              Q.Poly.mapAtoms([&](const Atom &X) -> std::optional<QuasiPolynomial> {
                if (X == A)
                  return Value;
                return std::nullopt;
              });
          Split.push_back({std::move(Domain), std::move(Poly)});
        }
      }
      if (!Split.empty() && lowersDegree(Split, Q.Poly.degree())) {
        Next.insert(Next.end(), std::make_move_iterator(Split.begin()), std::make_move_iterator(Split.end()));
        Changed = true;
      } else {
        Next.push_back(Q);
      }
    }
    Current = std::move(Next);
  }
  if (!Changed || !lowersDegree(Current, Degree))
    return std::nullopt;
  return Current;
}

BigInt countByEnumeration(const Piece &P, Int CapacityLines) {
  BigInt Count = 0;
  P.Domain.enumerate([&](const Space &, const std::vector<Int> &Point) {
    if (evaluate(P.Poly, Point) > CapacityLines)
      ++Count;
  });
  return Count;
}

namespace {

/// A piece prepared for repeated threshold counting.
struct CountingUnit {
  Piece Affine;
  /// Point count when the polynomial is constant.
  std::optional<BigInt> Points;
  /// Sorted values when the piece was fully enumerated.
  std::optional<std::vector<Rational>> Values;
};

void prepare(const Piece &P, const ModelOptions &Options, std::vector<CountingUnit> &Units, ModelStats *Stats,
             poly::CountingStats *Counting) {
  auto AddAffine = [&](Piece Q) {
    CountingUnit U{std::move(Q), std::nullopt, std::nullopt};
    if (U.Affine.Poly.isConstant())
      U.Points = poly::cardinality(U.Affine.Domain, Counting);
    Units.push_back(std::move(U));
  };
  if (P.Poly.isAffine()) {
    AddAffine(P);
    return;
  }
  if (Stats)
    ++Stats->NonAffinePieces;
  if (!Options.PartialEnumeration) {
    std::vector<Rational> Values;
    P.Domain.enumerate([&](const Space &, const std::vector<Int> &Point) { Values.push_back(evaluate(P.Poly, Point)); });
    std::sort(Values.begin(), Values.end());
    if (Stats)
      Stats->EnumeratedPoints += Values.size();
    Units.push_back({P, std::nullopt, std::move(Values)});
    return;
  }
  EnumerationDomain E = getNonAffineDomain(P);
  E.Points.enumerate([&](const Space &, const std::vector<Int> &Point) {
    if (Stats)
      ++Stats->EnumeratedPoints;
    Piece Bound = bindDimensions(P, E.Dims, Point);
    if (!Bound.Poly.isAffine())
      throw std::logic_error("binding the enumeration dimensions left a non-affine polynomial");
    if (!Bound.Domain.isEmpty())
      AddAffine(std::move(Bound));
  });
}

BigInt countUnit(const CountingUnit &U, Int CapacityLines, poly::CountingStats *Counting) {
  if (U.Values) {
    auto It = std::upper_bound(U.Values->begin(), U.Values->end(), Rational(static_cast<long>(CapacityLines)));
    return BigInt(static_cast<unsigned long>(U.Values->end() - It));
  }
  if (U.Points)
    return U.Affine.Poly.constantTerm() > CapacityLines ? *U.Points : BigInt(0);
  return countAffinePiece(U.Affine, CapacityLines, Counting);
}

std::vector<BigInt> countPrepared(const std::vector<CountingUnit> &Units, const std::vector<Int> &CapacityLines,
                                  poly::CountingStats *Counting) {
  std::vector<BigInt> Misses(CapacityLines.size(), 0);
  for (size_t L = 0; L < CapacityLines.size(); ++L)
    for (const CountingUnit &U : Units)
      Misses[L] += countUnit(U, CapacityLines[L], Counting);
  return Misses;
}

} // namespace

std::vector<BigInt> countCapacityMisses(const std::vector<Piece> &Pieces, const std::vector<Int> &CapacityLines,
                                        const ModelOptions &Options, ModelStats *Stats) {
  ModelStats Local;
  ModelStats &St = Stats ? *Stats : Local;
  poly::CountingStats Counting;
  std::vector<CountingUnit> Units;
  {
    Stopwatch W(St.Times.Enumeration);
    for (const Piece &P : Pieces)
      prepare(P, Options, Units, &St, &Counting);
  }
  std::vector<BigInt> Misses;
  {
    Stopwatch W(St.Times.Counting);
    Misses = countPrepared(Units, CapacityLines, &Counting);
  }
  St.CountingFallbacks += Counting.Fallbacks;
  return Misses;
}

namespace {

MissReport analyzeWith(const frontend::Program &P, const CacheConfig &Config, const ModelOptions &Options,
                       const DistanceSet *Precomputed, DistanceSet *DistancesOut) {
  Config.validate();
  if (Config.LineSize != P.LineSize)
    throw std::invalid_argument("program was lowered for a different line size");
  MissReport Report;
  Report.Config = Config;
  ModelStats &St = Report.Stats;
  poly::CountingStats Counting;

  std::vector<BigInt> Compulsory;
  {
    Stopwatch W(St.Times.Compulsory);
    Compulsory = countCompulsoryMisses(P);
    for (size_t I = 0; I < P.Statements.size(); ++I) {
      StatementMisses M;
      M.Label = P.Statements[I].Label;
      M.Accesses = poly::cardinality(P.Domain.restrictTo(M.Label), &Counting);
      M.Compulsory = Compulsory[I];
      M.Capacity.assign(Config.numLevels(), 0);
      Report.Statements.push_back(std::move(M));
    }
  }

  DistanceSet Distances;
  if (Precomputed) {
    Distances = *Precomputed;
  } else {
    Stopwatch W(St.Times.Distances);
    Distances = computeStackDistances(P, &Counting);
  }

  {
    Stopwatch W(St.Times.Rewrites);
    for (DistanceEntry &E : Distances.Entries) {
      auto Rewrite = [&](auto &&Fn) {
        std::vector<Piece> Out;
        for (Piece &Q : E.Pieces) {
          std::optional<std::vector<Piece>> R = Q.Poly.isAffine() ? std::nullopt : Fn(Q);
          if (R)
            Out.insert(Out.end(), std::make_move_iterator(R->begin()), std::make_move_iterator(R->end()));
          else
            Out.push_back(std::move(Q));
        }
        E.Pieces = std::move(Out);
      };
      if (Options.Equalization)
        Rewrite(equalize);
      if (Options.Rasterization)
        Rewrite(rasterize);
      mergeAgreeingPieces(E.Pieces);
    }
  }
  St.Pieces = Distances.numPieces();

  std::vector<Int> CapacityLines;
  for (size_t L = 0; L < Config.numLevels(); ++L)
    CapacityLines.push_back(Config.capacityLines(L));
  for (size_t I = 0; I < P.Statements.size(); ++I) {
    std::vector<Piece> Pieces;
    for (const DistanceEntry &E : Distances.Entries)
      if (E.Statement == I)
        Pieces.insert(Pieces.end(), E.Pieces.begin(), E.Pieces.end());
    Report.Statements[I].Capacity = countCapacityMisses(Pieces, CapacityLines, Options, &St);
  }
  St.CountingFallbacks += Counting.Fallbacks;
  if (DistancesOut)
    *DistancesOut = std::move(Distances);
  return Report;
}

} // namespace

MissReport analyze(const frontend::Program &P, const CacheConfig &Config, const ModelOptions &Options,
                   DistanceSet *Distances) {
  return analyzeWith(P, Config, Options, nullptr, Distances);
}

MissReport analyze(const frontend::Program &P, const CacheConfig &Config, const DistanceSet &Distances,
                   const ModelOptions &Options) {
  return analyzeWith(P, Config, Options, &Distances, nullptr);
}

} // namespace lrumodel::model
