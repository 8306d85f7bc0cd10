// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Omega.h"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>

namespace lrumodel::poly {

namespace {

Int absInt(Int V) { return V < 0 ? checkedNeg(V) : V; }

Int linearGcd(const Row &R) {
  Int G = 0;
  for (size_t I = 1; I < R.size(); ++I)
    G = std::gcd(G, absInt(R[I]));
  return G;
}

/// R += Factor * Other
void addMultiple(Row &R, Int Factor, const Row &Other) {
  if (Factor == 0)
    return;
  for (size_t I = 0; I < R.size(); ++I)
    if (Other[I] != 0)
      R[I] = checkedMulAdd(Factor, Other[I], R[I]);
}

/// Replaces variable column `Col` by `Expr` (Expr[Col] == 0) in every row.
void substitute(std::vector<Row> &Rows, size_t Col, const Row &Expr) {
  for (Row &R : Rows) {
    Int A = R[Col];
    if (A == 0)
      continue;
    R[Col] = 0;
    addMultiple(R, A, Expr);
  }
}

/// Symmetric modulo used by the equality reduction: result in (-M/2, M/2].
Int modHat(Int A, Int M) { return A - M * floorDiv(2 * A + M, 2 * M); }

/// Linear part (without the constant) used as the grouping key.
std::vector<Int> linearKey(const Row &R) { return std::vector<Int>(R.begin() + 1, R.end()); }

/// Normalizes, deduplicates and pairs opposite inequalities. Equalities
/// detected from tight opposite pairs are appended to `Eqs`. Returns false on
/// a contradiction.
bool cleanup(std::vector<Row> &Ineqs, std::vector<Row> &Eqs) {
  std::map<std::vector<Int>, Int> Best;
  for (Row &R : Ineqs) {
    if (!normalizeInequality(R))
      return false;
    if (isZeroLinear(R))
      continue;
    auto Key = linearKey(R);
    auto It = Best.find(Key);
    if (It == Best.end())
      Best.emplace(std::move(Key), R[0]);
    else
      It->second = std::min(It->second, R[0]);
  }
  std::vector<Row> Out;
  Out.reserve(Best.size());
  for (auto &[Key, Const] : Best) {
    std::vector<Int> Neg(Key.size());
    for (size_t I = 0; I < Key.size(); ++I)
      Neg[I] = -Key[I];
    auto It = Best.find(Neg);
    if (It != Best.end()) {
      Int Sum = checkedAdd(Const, It->second);
      if (Sum < 0)
        return false;
      if (Sum == 0) {
        // Emit the equality once, from the lexicographically larger key.
        if (Key > Neg) {
          Row E(Key.size() + 1);
          E[0] = Const;
          std::copy(Key.begin(), Key.end(), E.begin() + 1);
          Eqs.push_back(std::move(E));
        }
        continue;
      }
    }
    Row R(Key.size() + 1);
    R[0] = Const;
    std::copy(Key.begin(), Key.end(), R.begin() + 1);
    Out.push_back(std::move(R));
  }
  Ineqs = std::move(Out);
  return true;
}

/// Eliminates all equalities by substitution. Returns false if infeasible.
bool eliminateEqualities(std::vector<Row> &Eqs, std::vector<Row> &Ineqs) {
  while (!Eqs.empty()) {
    Row E = std::move(Eqs.back());
    Eqs.pop_back();
    if (!normalizeEquality(E))
      return false;
    if (isZeroLinear(E))
      continue;
    size_t Unit = 0;
    for (size_t I = 1; I < E.size() && Unit == 0; ++I)
      if (E[I] == 1 || E[I] == -1)
        Unit = I;
    if (Unit != 0) {
      Row Expr = E;
      Int S = Expr[Unit];
      Expr[Unit] = 0;
      if (S == 1)
        for (Int &V : Expr)
          V = checkedNeg(V);
      substitute(Eqs, Unit, Expr);
      substitute(Ineqs, Unit, Expr);
      continue;
    }
    // No unit coefficient: introduce sigma to shrink the coefficients.
    size_t K = 0;
    for (size_t I = 1; I < E.size(); ++I)
      if (E[I] != 0 && (K == 0 || absInt(E[I]) < absInt(E[K])))
        K = I;
    Int M = checkedAdd(absInt(E[K]), 1);
    Int Sign = E[K] > 0 ? 1 : -1;
    E.push_back(0);
    for (Row &R : Eqs)
      R.push_back(0);
    for (Row &R : Ineqs)
      R.push_back(0);
    Row Expr(E.size(), 0);
    for (size_t I = 0; I + 1 < E.size(); ++I)
      if (I != K)
        Expr[I] = Sign * modHat(E[I], M);
    Expr.back() = checkedMul(-Sign, M);
    Eqs.push_back(std::move(E));
    substitute(Eqs, K, Expr);
    substitute(Ineqs, K, Expr);
  }
  return true;
}

struct VarStats {
  int Lower = 0, Upper = 0;
  bool LowerUnit = true, UpperUnit = true;
  Int MaxUpper = 0, MaxLower = 0;
};

std::vector<VarStats> collectStats(const std::vector<Row> &Ineqs, size_t Width) {
  std::vector<VarStats> S(Width);
  for (const Row &R : Ineqs)
    for (size_t I = 1; I < Width; ++I) {
      Int C = R[I];
      if (C > 0) {
        ++S[I].Lower;
        S[I].LowerUnit &= C == 1;
        S[I].MaxLower = std::max(S[I].MaxLower, C);
      } else if (C < 0) {
        ++S[I].Upper;
        S[I].UpperUnit &= C == -1;
        S[I].MaxUpper = std::max(S[I].MaxUpper, -C);
      }
    }
  return S;
}

/// Fourier-Motzkin elimination of column `Col`; `Dark` requests the dark
/// shadow instead of the real shadow.
std::vector<Row> fourierMotzkin(const std::vector<Row> &Ineqs, size_t Col, bool Dark) {
  std::vector<Row> Out, Lo, Up;
  for (const Row &R : Ineqs) {
    if (R[Col] > 0)
      Lo.push_back(R);
    else if (R[Col] < 0)
      Up.push_back(R);
    else
      Out.push_back(R);
  }
  for (const Row &L : Lo)
    for (const Row &U : Up) {
      Int A = L[Col], B = -U[Col];
      Row C(L.size());
      for (size_t I = 0; I < L.size(); ++I)
        C[I] = checkedAdd(checkedMul(B, L[I]), checkedMul(A, U[I]));
      C[Col] = 0;
      if (Dark)
        C[0] = checkedSub(C[0], checkedMul(A - 1, B - 1));
      Out.push_back(std::move(C));
    }
  return Out;
}

/// Interval reasoning over the rows: tightens per-variable bounds, drops rows
/// implied by the bounds and detects rows violated everywhere. Returns false
/// on a contradiction.
bool pruneByBounds(std::vector<Row> &Ineqs) {
  if (Ineqs.empty())
    return true;
  size_t Width = Ineqs.front().size();
  constexpr Int None = std::numeric_limits<Int>::min();
  std::vector<Int> Lo(Width, None), Hi(Width, None); // None marks unbounded
  auto RowRange = [&](const Row &R, size_t Skip, Int &Min, Int &Max, bool &MinOk, bool &MaxOk) {
    Min = Max = R[0];
    MinOk = MaxOk = true;
    for (size_t I = 1; I < Width; ++I) {
      Int A = R[I];
      if (A == 0 || I == Skip)
        continue;
      Int ForMin = A > 0 ? Lo[I] : Hi[I], ForMax = A > 0 ? Hi[I] : Lo[I];
      if (ForMin == None)
        MinOk = false;
      else if (MinOk)
        Min = checkedMulAdd(A, ForMin, Min);
      if (ForMax == None)
        MaxOk = false;
      else if (MaxOk)
        Max = checkedMulAdd(A, ForMax, Max);
    }
  };
  for (int Round = 0; Round < 3; ++Round) {
    bool Changed = false;
    for (const Row &R : Ineqs)
      for (size_t I = 1; I < Width; ++I) {
        Int A = R[I];
        if (A == 0)
          continue;
        Int Min, Max;
        bool MinOk, MaxOk;
        // a x + rest >= 0 with rest <= Max: x >= -Max / a (a > 0) or x <= Max / -a.
        RowRange(R, I, Min, Max, MinOk, MaxOk);
        if (!MaxOk)
          continue;
        if (A > 0) {
          Int B = ceilDiv(checkedNeg(Max), A);
          if (Lo[I] == None || B > Lo[I]) {
            Lo[I] = B;
            Changed = true;
          }
        } else {
          Int B = floorDiv(Max, checkedNeg(A));
          if (Hi[I] == None || B < Hi[I]) {
            Hi[I] = B;
            Changed = true;
          }
        }
        if (Lo[I] != None && Hi[I] != None && Lo[I] > Hi[I])
          return false;
      }
    if (!Changed)
      break;
  }
  std::vector<Row> Out;
  for (Row &R : Ineqs) {
    Int Min, Max;
    bool MinOk, MaxOk;
    RowRange(R, 0, Min, Max, MinOk, MaxOk);
    if (MaxOk && Max < 0)
      return false;
    if (MinOk && Min >= 0)
      continue;
    Out.push_back(std::move(R));
  }
  for (size_t I = 1; I < Width; ++I) {
    if (Lo[I] != None) {
      Row R(Width, 0);
      R[I] = 1;
      R[0] = checkedNeg(Lo[I]);
      Out.push_back(std::move(R));
    }
    if (Hi[I] != None) {
      Row R(Width, 0);
      R[I] = -1;
      R[0] = Hi[I];
      Out.push_back(std::move(R));
    }
  }
  Ineqs = std::move(Out);
  return true;
}

/// Bounds of column `Col` from the rows that mention it alone.
std::optional<std::pair<Int, Int>> columnRange(const std::vector<Row> &Ineqs, size_t Col) {
  std::optional<Int> Lo, Hi;
  for (const Row &R : Ineqs) {
    bool Alone = R[Col] != 0;
    for (size_t I = 1; I < R.size() && Alone; ++I)
      Alone = I == Col || R[I] == 0;
    if (!Alone)
      continue;
    if (R[Col] > 0) {
      Int B = ceilDiv(checkedNeg(R[0]), R[Col]);
      Lo = Lo ? std::max(*Lo, B) : B;
    } else {
      Int B = floorDiv(R[0], checkedNeg(R[Col]));
      Hi = Hi ? std::min(*Hi, B) : B;
    }
  }
  if (!Lo || !Hi)
    return std::nullopt;
  return std::pair{*Lo, *Hi};
}

/// Eliminations producing more rows than this prefer branching on a
/// variable with at most MaxBranchValues values.
constexpr long MaxEliminationRows = 48;
constexpr Int MaxBranchValues = 12;

bool feasible(std::vector<Row> Eqs, std::vector<Row> Ineqs) {
  while (true) {
    if (!eliminateEqualities(Eqs, Ineqs))
      return false;
    if (!cleanup(Ineqs, Eqs))
      return false;
    if (!Eqs.empty())
      continue;
    if (!pruneByBounds(Ineqs))
      return false;
    if (!cleanup(Ineqs, Eqs))
      return false;
    if (!Eqs.empty())
      continue;
    if (Ineqs.empty())
      return true;
    size_t Width = Ineqs.front().size();
    auto Stats = collectStats(Ineqs, Width);

    // Variables bounded on one side only can always be satisfied.
    size_t Free = 0;
    for (size_t I = 1; I < Width && Free == 0; ++I)
      if ((Stats[I].Lower == 0) != (Stats[I].Upper == 0))
        Free = I;
    if (Free != 0) {
      std::erase_if(Ineqs, [&](const Row &R) { return R[Free] != 0; });
      continue;
    }

    size_t BestExact = 0, BestAny = 0;
    long ExactCost = 0, AnyCost = 0;
    for (size_t I = 1; I < Width; ++I) {
      if (Stats[I].Lower == 0)
        continue;
      long Cost = static_cast<long>(Stats[I].Lower) * Stats[I].Upper - Stats[I].Lower - Stats[I].Upper;
      bool Exact = Stats[I].LowerUnit || Stats[I].UpperUnit;
      if (Exact && (BestExact == 0 || Cost < ExactCost)) {
        BestExact = I;
        ExactCost = Cost;
      }
      long Weighted = Cost * (Stats[I].MaxLower + Stats[I].MaxUpper);
      if (BestAny == 0 || Weighted < AnyCost) {
        BestAny = I;
        AnyCost = Weighted;
      }
    }
    if (std::min(BestExact ? ExactCost : AnyCost, AnyCost) > MaxEliminationRows) {
      size_t Branch = 0;
      std::pair<Int, Int> BranchRange;
      for (size_t I = 1; I < Width; ++I) {
        if (Stats[I].Lower == 0)
          continue;
        auto Range = columnRange(Ineqs, I);
        if (Range && Range->second - Range->first < MaxBranchValues &&
            (Branch == 0 || Range->second - Range->first < BranchRange.second - BranchRange.first)) {
          Branch = I;
          BranchRange = *Range;
        }
      }
      if (Branch != 0) {
        for (Int V = BranchRange.first; V <= BranchRange.second; ++V) {
          Row E(Width, 0);
          E[Branch] = 1;
          E[0] = checkedNeg(V);
          if (feasible({E}, Ineqs))
            return true;
        }
        return false;
      }
    }
    if (BestExact != 0) {
      Ineqs = fourierMotzkin(Ineqs, BestExact, false);
      continue;
    }

    size_t Col = BestAny;
    if (!feasible({}, fourierMotzkin(Ineqs, Col, false)))
      return false;
    if (feasible({}, fourierMotzkin(Ineqs, Col, true)))
      return true;
    // Splinters: the solution lies close to some lower bound.
    Int MaxUp = Stats[Col].MaxUpper;
    for (const Row &L : Ineqs) {
      Int A = L[Col];
      if (A <= 0)
        continue;
      Int Last = floorDiv(checkedSub(checkedSub(checkedMul(MaxUp, A), MaxUp), A), MaxUp);
      for (Int S = 0; S <= Last; ++S) {
        Row E = L;
        E[0] = checkedSub(E[0], S);
        if (feasible({E}, Ineqs))
          return true;
      }
    }
    return false;
  }
}

} // namespace

bool isZeroLinear(const Row &R) {
  for (size_t I = 1; I < R.size(); ++I)
    if (R[I] != 0)
      return false;
  return true;
}

bool normalizeInequality(Row &R) {
  Int G = linearGcd(R);
  if (G == 0)
    return R[0] >= 0;
  if (G > 1) {
    for (size_t I = 1; I < R.size(); ++I)
      R[I] /= G;
    R[0] = floorDiv(R[0], G);
  }
  return true;
}

bool normalizeEquality(Row &R) {
  Int G = linearGcd(R);
  if (G == 0)
    return R[0] == 0;
  if (R[0] % G != 0)
    return false;
  Int Sign = 1;
  for (size_t I = 1; I < R.size(); ++I)
    if (R[I] != 0) {
      Sign = R[I] < 0 ? -1 : 1;
      break;
    }
  Int F = G * Sign;
  if (F != 1)
    for (Int &V : R)
      V /= F;
  return true;
}

bool isIntegerFeasible(std::vector<Row> Equalities, std::vector<Row> Inequalities) {
  return feasible(std::move(Equalities), std::move(Inequalities));
}

std::vector<Row> realShadow(std::vector<Row> Eqs, std::vector<Row> Ineqs,
                            const std::vector<bool> &Keep) {
  // Equalities eliminate a non-kept column each (scaled, exact over Q).
  while (!Eqs.empty()) {
    Row E = std::move(Eqs.back());
    Eqs.pop_back();
    if (!normalizeEquality(E)) {
      Row Bad(E.size(), 0);
      Bad[0] = -1;
      return {Bad};
    }
    size_t Col = 0;
    for (size_t I = 1; I < E.size(); ++I)
      if (E[I] != 0 && !Keep[I - 1] && (Col == 0 || absInt(E[I]) < absInt(E[Col])))
        Col = I;
    if (Col == 0) {
      if (!isZeroLinear(E)) {
        Row N = E;
        for (Int &V : N)
          V = checkedNeg(V);
        Ineqs.push_back(E);
        Ineqs.push_back(std::move(N));
      }
      continue;
    }
    Int A = E[Col];
    auto Eliminate = [&](Row &R) {
      Int C = R[Col];
      if (C == 0)
        return;
      Int AbsA = absInt(A);
      Int Factor = A > 0 ? -C : C;
      for (size_t I = 0; I < R.size(); ++I)
        R[I] = checkedAdd(checkedMul(AbsA, R[I]), checkedMul(Factor, E[I]));
    };
    for (Row &R : Eqs)
      Eliminate(R);
    for (Row &R : Ineqs)
      Eliminate(R);
  }
  auto Clean = [&](std::vector<Row> &Rows) {
    std::map<std::vector<Int>, Int> Best;
    for (Row &R : Rows) {
      if (!normalizeInequality(R)) {
        Row Bad(R.size(), 0);
        Bad[0] = -1;
        Rows = {Bad};
        return false;
      }
      if (isZeroLinear(R))
        continue;
      auto Key = linearKey(R);
      auto It = Best.find(Key);
      if (It == Best.end())
        Best.emplace(std::move(Key), R[0]);
      else
        It->second = std::min(It->second, R[0]);
    }
    std::vector<Row> Out;
    for (auto &[Key, Const] : Best) {
      Row R(Key.size() + 1);
      R[0] = Const;
      std::copy(Key.begin(), Key.end(), R.begin() + 1);
      Out.push_back(std::move(R));
    }
    Rows = std::move(Out);
    return true;
  };
  if (!Clean(Ineqs))
    return Ineqs;
  while (true) {
    if (Ineqs.empty())
      return Ineqs;
    size_t Width = Ineqs.front().size();
    auto Stats = collectStats(Ineqs, Width);
    size_t Col = 0;
    long Cost = 0;
    for (size_t I = 1; I < Width; ++I) {
      if (Keep[I - 1] || (Stats[I].Lower == 0 && Stats[I].Upper == 0))
        continue;
      long C = static_cast<long>(Stats[I].Lower) * Stats[I].Upper;
      if (Col == 0 || C < Cost) {
        Col = I;
        Cost = C;
      }
    }
    if (Col == 0)
      return Ineqs;
    Ineqs = fourierMotzkin(Ineqs, Col, false);
    if (!Clean(Ineqs))
      return Ineqs;
  }
}

} // namespace lrumodel::poly
