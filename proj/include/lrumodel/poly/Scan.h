// SPDX-License-Identifier: Apache-2.0
//
// Enumeration of the integer points of a bounded conjunction.

#pragma once

#include "lrumodel/poly/Conjunction.h"

#include <functional>

namespace lrumodel::poly {

/// Visits every point of `C` (dimension values only) in lexicographic order.
/// Throws UnboundedError if some dimension has no finite bound.
void scanPoints(const Conjunction &C, const std::function<void(const std::vector<Int> &)> &Fn);

/// Number of points by enumeration.
BigInt countByScan(const Conjunction &C);

} // namespace lrumodel::poly
