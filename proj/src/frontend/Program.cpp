// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Program.h"

#include <algorithm>
#include <stdexcept>

namespace lrumodel::frontend {

using poly::Map;
using poly::Set;
using poly::Space;

size_t Program::statementIndex(const std::string &Label) const {
  for (size_t I = 0; I < Statements.size(); ++I)
    if (Statements[I].Label == Label)
      return I;
  throw std::out_of_range("unknown statement '" + Label + "'");
}

bool Program::namePrecedes(const std::string &A, const std::string &B) const {
  auto Rank = [&](const std::string &Name) {
    for (size_t I = 0; I < Statements.size(); ++I)
      if (Statements[I].Label == Name)
        return I;
    return Statements.size();
  };
  size_t RA = Rank(A), RB = Rank(B);
  return RA != RB ? RA < RB : A < B;
}

namespace {

/// Line coordinates of an access, as expressions over the loop variables.
std::vector<AffineExpr> lineExprs(const AccessAst &A, const ArrayDecl &Decl, Int LineSize) {
  std::vector<AffineExpr> Line = A.Subscripts;
  Int G = poly::gcd(Decl.ElemSize, LineSize);
  Line.back() = AffineExpr::floorOf(Line.back() * (Decl.ElemSize / G), LineSize / G);
  return Line;
}

struct Lowering {
  const LoopNestAst &Ast;
  Int LineSize;
  unsigned MaxDepth = 0;

  struct Pending {
    const StatementAst *Stmt;
    std::vector<std::string> Iterators;
    std::vector<AffineExpr> Bounds; // each >= 0
    std::vector<Int> Positions;     // textual position per depth, size depth + 1
  };
  std::vector<Pending> Stmts;

  void collect(const std::vector<Node> &Body, std::vector<std::string> &Iters, std::vector<AffineExpr> &Bounds,
               std::vector<Int> &Positions) {
    for (size_t P = 0; P < Body.size(); ++P) {
      Positions.push_back(static_cast<Int>(P));
      if (const auto *S = std::get_if<StatementAst>(&Body[P].Value)) {
        Stmts.push_back({S, Iters, Bounds, Positions});
        MaxDepth = std::max(MaxDepth, static_cast<unsigned>(Iters.size()));
      } else {
        const LoopAst &L = std::get<LoopAst>(Body[P].Value);
        unsigned Var = static_cast<unsigned>(Iters.size());
        size_t NumBounds = Bounds.size();
        for (const AffineExpr &Lo : L.Lower)
          Bounds.push_back(AffineExpr::dim(Var) - Lo);
        for (const AffineExpr &Hi : L.Upper)
          Bounds.push_back(Hi - AffineExpr::dim(Var));
        Iters.push_back(L.Var);
        collect(L.Body, Iters, Bounds, Positions);
        Iters.pop_back();
        Bounds.resize(NumBounds);
      }
      Positions.pop_back();
    }
  }

  Program run() {
    std::vector<std::string> Iters;
    std::vector<AffineExpr> Bounds;
    std::vector<Int> Positions;
    collect(Ast.Body, Iters, Bounds, Positions);

    Program Prog;
    Prog.LineSize = LineSize;
    Prog.Arrays = Ast.Arrays;
    Space TimeSpace = Space::anonymous("", 2 * MaxDepth + 2);
    std::vector<poly::BasicSet> DomainPieces;
    std::vector<poly::BasicMap> SchedulePieces, AccessPieces;

    for (const Pending &P : Stmts) {
      StatementInfo Info;
      Info.Label = P.Stmt->Label;
      Info.Iterators = P.Iterators;
      unsigned Depth = static_cast<unsigned>(P.Iterators.size());
      Info.Domain = Set::fromConstraints(Space(Info.Label, P.Iterators), {}, P.Bounds);

      std::vector<std::string> InstanceDims = P.Iterators;
      std::string AccessName = AccessDimName;
      while (std::find(InstanceDims.begin(), InstanceDims.end(), AccessName) != InstanceDims.end())
        AccessName += "'";
      InstanceDims.push_back(AccessName);
      Space Instance(Info.Label, InstanceDims);
      AffineExpr AccessDim = AffineExpr::dim(Depth);
      std::vector<AffineExpr> InstanceBounds = P.Bounds;
      InstanceBounds.push_back(AccessDim);
      InstanceBounds.push_back(AffineExpr(static_cast<Int>(P.Stmt->Accesses.size()) - 1) - AccessDim);
      Set Domain = Set::fromConstraints(Instance, {}, InstanceBounds);

      std::vector<AffineExpr> Time;
      for (unsigned K = 0; K <= Depth; ++K) {
        Time.push_back(AffineExpr(P.Positions[K]));
        if (K < Depth)
          Time.push_back(AffineExpr::dim(K));
      }
      while (Time.size() < TimeSpace.arity() - 1)
        Time.push_back(AffineExpr(0));
      Time.push_back(AccessDim);
      Map Sched = Map::fromFunction(Instance, TimeSpace, Time).intersectDomain(Domain);

      for (size_t K = 0; K < P.Stmt->Accesses.size(); ++K) {
        const AccessAst &A = P.Stmt->Accesses[K];
        const ArrayDecl &Decl = *Ast.findArray(A.Array);
        AccessInfo AI{A.Array, A.IsWrite, lineExprs(A, Decl, LineSize)};
        std::vector<std::string> LineDims;
        for (size_t D = 0; D < AI.Line.size(); ++D)
          LineDims.push_back("x" + std::to_string(D));
        unsigned In = Depth + 1;
        std::vector<AffineExpr> Eqs{AccessDim - AffineExpr(static_cast<Int>(K))};
        for (size_t D = 0; D < AI.Line.size(); ++D)
          Eqs.push_back(AffineExpr::dim(In + static_cast<unsigned>(D)) - AI.Line[D]);
        Map Acc = Map::fromConstraints(Instance, Space(A.Array, LineDims), Eqs, {}).intersectDomain(Domain);
        AccessPieces.insert(AccessPieces.end(), Acc.pieces().begin(), Acc.pieces().end());
        Info.Accesses.push_back(std::move(AI));
      }
      DomainPieces.insert(DomainPieces.end(), Domain.pieces().begin(), Domain.pieces().end());
      SchedulePieces.insert(SchedulePieces.end(), Sched.pieces().begin(), Sched.pieces().end());
      Prog.Statements.push_back(std::move(Info));
    }
    Prog.Domain = Set::fromPieces(std::move(DomainPieces));
    Prog.Schedule = Map::fromPieces(std::move(SchedulePieces));
    Prog.Access = Map::fromPieces(std::move(AccessPieces));
    return Prog;
  }
};

} // namespace

Program lower(const LoopNestAst &Ast, Int LineSize) {
  if (LineSize <= 0)
    throw std::invalid_argument("line size must be positive");
  return Lowering{Ast, LineSize, 0, {}}.run();
}

} // namespace lrumodel::frontend
