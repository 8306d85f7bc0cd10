// SPDX-License-Identifier: Apache-2.0
//
// Pointwise comparison of modeled stack distances with the simulator.

#pragma once

#include "lrumodel/model/Model.h"
#include "lrumodel/sim/Simulator.h"

#include <map>
#include <sstream>
#include <string>
#include <tuple>

namespace lrumodel::testing {

using poly::BigInt;
using poly::Int;

/// Returns an empty string when every piece point evaluates to the simulated
/// distance of its access, every reuse is covered exactly once, and no first
/// touch is covered; otherwise a description of the first mismatch.
inline std::string compareDistances(const frontend::Program &P, const model::DistanceSet &D) {
  sim::MemoryTrace Trace = sim::generateTrace(P);
  sim::SimulationResult R = sim::simulate(Trace, {P.LineSize, {P.LineSize}});
  using Key = std::tuple<uint32_t, uint32_t, std::vector<Int>>;
  std::map<Key, sim::Distance> Expected;
  for (size_t T = 0; T < Trace.Records.size(); ++T) {
    const sim::TraceRecord &Rec = Trace.Records[T];
    Expected[{Rec.Statement, Rec.Access, Trace.instance(Rec)}] = R.Distances[T];
  }
  std::map<Key, int> Covered;
  std::ostringstream Err;
  for (const model::DistanceEntry &E : D.Entries)
    for (const poly::Piece &Pc : E.Pieces)
      Pc.Domain.enumerate([&](const poly::Space &, const std::vector<Int> &X) {
        Key K{static_cast<uint32_t>(E.Statement), E.Access, X};
        auto It = Expected.find(K);
        BigInt Value = Pc.Poly.evaluateInteger(X);
        if (Err.tellp() > 0)
          return;
        if (It == Expected.end())
          Err << P.Statements[E.Statement].Label << "/" << E.Access << ": point outside the domain";
        else if (It->second == 0)
          Err << P.Statements[E.Statement].Label << "/" << E.Access << ": first touch has a distance";
        else if (Value != BigInt(static_cast<unsigned long>(It->second)))
          Err << P.Statements[E.Statement].Label << "/" << E.Access << ": modeled " << Value << ", simulated "
              << It->second;
        ++Covered[K];
      });
  if (Err.tellp() > 0)
    return Err.str();
  for (const auto &[K, Dist] : Expected) {
    auto It = Covered.find(K);
    int Count = It == Covered.end() ? 0 : It->second;
    if (Dist != 0 && Count != 1) {
      Err << P.Statements[std::get<0>(K)].Label << "/" << std::get<1>(K) << ": reuse covered " << Count
          << " times";
      return Err.str();
    }
  }
  return {};
}

} // namespace lrumodel::testing
