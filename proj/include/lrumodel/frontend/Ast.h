// SPDX-License-Identifier: Apache-2.0
//
// Syntax tree of the loop-nest language. Affine expressions are stored over
// the enclosing loop variables: dimension k is the loop variable at depth k.
// Parameters are substituted by their values while parsing.

#pragma once

#include "lrumodel/poly/AffineExpr.h"

#include <string>
#include <variant>
#include <vector>

namespace lrumodel::frontend {

using poly::AffineExpr;
using poly::Int;

struct SourceLoc {
  unsigned Line = 1;
  unsigned Column = 1;
};

struct ArrayDecl {
  std::string Name;
  std::vector<Int> Extents;
  Int ElemSize = 8;
  SourceLoc Loc;
};

struct AccessAst {
  std::string Array;
  std::vector<AffineExpr> Subscripts;
  bool IsWrite = false;
  SourceLoc Loc;
};

/// Accesses are listed in execution order: right-hand side reads left to
/// right, then the write (a compound assignment reads its target first).
struct StatementAst {
  std::string Label;
  std::vector<AccessAst> Accesses;
  SourceLoc Loc;
};

struct Node;

/// Executes Var from max(Lower) to min(Upper), both inclusive.
struct LoopAst {
  std::string Var;
  std::vector<AffineExpr> Lower;
  std::vector<AffineExpr> Upper;
  std::vector<Node> Body;
  SourceLoc Loc;
};

struct Node {
  std::variant<LoopAst, StatementAst> Value;
};

struct LoopNestAst {
  std::vector<ArrayDecl> Arrays;
  std::vector<Node> Body;

  const ArrayDecl *findArray(const std::string &Name) const;
  size_t numStatements() const;
};

} // namespace lrumodel::frontend
