// SPDX-License-Identifier: Apache-2.0
//
// Recursive descent parser for `.scop.dsl` files:
//
//   param N = 16;
//   array A[N][N] elem 8;
//   for i = 0 .. N - 1 {
//     for j = max(0, i - 2) .. i {
//       S0: A[i][j] += A[j][i] * 2;
//     }
//   }

#pragma once

#include "lrumodel/frontend/Ast.h"

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lrumodel::frontend {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &Msg, SourceLoc Loc)
      : std::runtime_error(std::to_string(Loc.Line) + ":" + std::to_string(Loc.Column) + ": " + Msg), Loc(Loc) {}
  SourceLoc Loc;
};

/// Parses a program. `Overrides` replaces the values of declared parameters.
LoopNestAst parseProgram(std::string_view Source, const std::map<std::string, Int> &Overrides = {});

} // namespace lrumodel::frontend
