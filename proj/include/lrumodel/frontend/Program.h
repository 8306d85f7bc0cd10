// SPDX-License-Identifier: Apache-2.0
//
// Lowered static control program. Every statement instance space is
// Label[loop vars..., a] where `a` numbers the statement's accesses. The
// schedule maps instances into one anonymous space of interleaved textual
// positions and loop variables, zero padded, followed by `a`. Accesses map to
// cache lines: the innermost array index x becomes floor(x * E / L).

#pragma once

#include "lrumodel/frontend/Ast.h"
#include "lrumodel/poly/Set.h"

#include <string>
#include <vector>

namespace lrumodel::frontend {

struct AccessInfo {
  std::string Array;
  bool IsWrite = false;
  /// Line coordinates over the statement's loop variables.
  std::vector<AffineExpr> Line;
};

struct StatementInfo {
  std::string Label;
  std::vector<std::string> Iterators;
  std::vector<AccessInfo> Accesses;
  /// Iteration domain without the access dimension.
  poly::Set Domain;
};

struct Program {
  poly::Set Domain;
  poly::Map Schedule;
  poly::Map Access;
  std::vector<StatementInfo> Statements;
  std::vector<ArrayDecl> Arrays;
  Int LineSize = 64;

  /// Index of a statement label; throws std::out_of_range if unknown.
  size_t statementIndex(const std::string &Label) const;
  /// Orders tuple names by statement declaration order.
  bool namePrecedes(const std::string &A, const std::string &B) const;
};

/// Builds domain, schedule and cache-line access map for a line size in bytes.
Program lower(const LoopNestAst &Ast, Int LineSize);

/// Name of the access dimension appended to every instance tuple (primed
/// when a loop variable already uses it).
inline constexpr const char *AccessDimName = "a";

} // namespace lrumodel::frontend
