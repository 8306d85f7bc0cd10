// SPDX-License-Identifier: Apache-2.0
//
// Reader for the textual set and map notation printed by Set::str and
// Map::str, e.g. `{ S0[i] -> M[3 - i] : 0 <= i < 4 }`.

#pragma once

#include "lrumodel/poly/Set.h"

#include <stdexcept>
#include <string>
#include <string_view>

namespace lrumodel::poly {

class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &Msg, unsigned Line, unsigned Column)
      : std::runtime_error(std::to_string(Line) + ":" + std::to_string(Column) + ": " + Msg), Line(Line),
        Column(Column) {}
  unsigned Line, Column;
};

Set parseSet(std::string_view Text);
Map parseMap(std::string_view Text);

} // namespace lrumodel::poly
