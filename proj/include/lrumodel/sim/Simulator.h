// SPDX-License-Identifier: Apache-2.0
//
// Trace-driven simulation of inclusive fully associative LRU levels. Stack
// distances come from one recency order (Fenwick tree over access times);
// each level misses when the distance exceeds its capacity in lines.

#pragma once

#include "lrumodel/frontend/Program.h"
#include "lrumodel/model/Report.h"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace lrumodel::sim {

using poly::Int;

struct LineId {
  std::string Array;
  std::vector<Int> Coords;
};

struct TraceRecord {
  uint32_t Statement = 0;
  uint32_t Access = 0;
  /// Index into MemoryTrace::Lines.
  uint32_t Line = 0;
  /// Offset of the loop variable values in MemoryTrace::Instances.
  uint64_t InstanceOffset = 0;
};

struct MemoryTrace {
  std::vector<TraceRecord> Records;
  std::vector<LineId> Lines;
  std::vector<Int> Instances;
  /// Loop depth per statement.
  std::vector<unsigned> Depths;
  std::vector<std::string> Labels;

  std::vector<Int> instance(const TraceRecord &R) const;
};

/// Enumerates instances in schedule order and applies the access map.
MemoryTrace generateTrace(const frontend::Program &P);

/// Stack distance in lines; 0 marks a first touch.
using Distance = uint64_t;

struct SimulationResult {
  std::vector<Distance> Distances;
  model::MissReport Report;
};

struct SimulationOptions {
  /// Maintains explicit per-level LRU lists and checks inclusion and the
  /// distance classification after every record.
  bool CheckInclusion = false;
};

SimulationResult simulate(const MemoryTrace &Trace, const model::CacheConfig &Config,
                          const SimulationOptions &Options = {});

/// CSV with columns seq,stmt,instance,access,array,line,distance,class@L1...
void writeTraceCsv(std::ostream &OS, const MemoryTrace &Trace, const SimulationResult &Result);

} // namespace lrumodel::sim
