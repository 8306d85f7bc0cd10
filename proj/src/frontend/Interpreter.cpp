// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Interpreter.h"

#include <algorithm>

namespace lrumodel::frontend {

std::vector<Int> elementLine(std::vector<Int> Element, Int ElemSize, Int LineSize) {
  if (!Element.empty())
    Element.back() = poly::floorDiv(poly::checkedMul(Element.back(), ElemSize), LineSize);
  return Element;
}

namespace {

struct Interpreter {
  const std::function<void(const ExecutedAccess &)> &Visit;
  std::vector<Int> Values;
  size_t NextStatement = 0;

  void run(const std::vector<Node> &Body) {
    for (const Node &N : Body) {
      if (const auto *S = std::get_if<StatementAst>(&N.Value)) {
        size_t Index = NextStatement++;
        execute(*S, Index);
        continue;
      }
      const LoopAst &L = std::get<LoopAst>(N.Value);
      size_t First = NextStatement;
      size_t Nested = countNested(L.Body);
      Int Lo = L.Lower[0].evaluate(Values), Hi = L.Upper[0].evaluate(Values);
      for (const AffineExpr &E : L.Lower)
        Lo = std::max(Lo, E.evaluate(Values));
      for (const AffineExpr &E : L.Upper)
        Hi = std::min(Hi, E.evaluate(Values));
      Values.push_back(0);
      for (Int V = Lo; V <= Hi; ++V) {
        Values.back() = V;
        NextStatement = First;
        run(L.Body);
      }
      Values.pop_back();
      NextStatement = First + Nested;
    }
  }

  static size_t countNested(const std::vector<Node> &Body) {
    size_t N = 0;
    for (const Node &C : Body)
      N += std::holds_alternative<StatementAst>(C.Value) ? 1 : countNested(std::get<LoopAst>(C.Value).Body);
    return N;
  }

  void execute(const StatementAst &S, size_t Index) {
    for (size_t K = 0; K < S.Accesses.size(); ++K) {
      const AccessAst &A = S.Accesses[K];
      ExecutedAccess E;
      E.Statement = Index;
      E.Instance = &Values;
      E.AccessIndex = static_cast<unsigned>(K);
      E.Array = &A.Array;
      for (const AffineExpr &Sub : A.Subscripts)
        E.Element.push_back(Sub.evaluate(Values));
      Visit(E);
    }
  }
};

} // namespace

void interpret(const LoopNestAst &Ast, const std::function<void(const ExecutedAccess &)> &Visit) {
  Interpreter{Visit, {}, 0}.run(Ast.Body);
}

} // namespace lrumodel::frontend
