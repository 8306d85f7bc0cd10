// SPDX-License-Identifier: Apache-2.0
//
// Direct execution of the loop nest, producing accesses in program order.
// Serves as an oracle for the lowered schedule and access map.

#pragma once

#include "lrumodel/frontend/Ast.h"

#include <functional>

namespace lrumodel::frontend {

struct ExecutedAccess {
  size_t Statement = 0; // declaration order
  const std::vector<Int> *Instance = nullptr;
  unsigned AccessIndex = 0;
  const std::string *Array = nullptr;
  /// Array element indices (not cache lines).
  std::vector<Int> Element;
};

void interpret(const LoopNestAst &Ast, const std::function<void(const ExecutedAccess &)> &Visit);

/// Cache line of an element: the innermost index x becomes floor(x * E / L).
std::vector<Int> elementLine(std::vector<Int> Element, Int ElemSize, Int LineSize);

} // namespace lrumodel::frontend
