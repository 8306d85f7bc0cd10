// SPDX-License-Identifier: Apache-2.0
//
// Cache configuration and miss reports shared by the analytical model and
// the simulator.

#pragma once

#include "lrumodel/poly/Int.h"

#include <string>
#include <vector>

namespace lrumodel::model {

using poly::BigInt;
using poly::Int;

/// Fully associative LRU levels sharing one line size.
struct CacheConfig {
  Int LineSize = 64;
  /// Capacity in bytes per level, non-decreasing.
  std::vector<Int> Capacities;

  size_t numLevels() const { return Capacities.size(); }
  Int capacityLines(size_t Level) const { return Capacities.at(Level) / LineSize; }
  /// Throws std::invalid_argument if the configuration is malformed.
  void validate() const;
  bool operator==(const CacheConfig &) const = default;
};

struct StatementMisses {
  std::string Label;
  BigInt Accesses = 0;
  BigInt Compulsory = 0;
  /// Capacity misses per level.
  std::vector<BigInt> Capacity;
};

/// Wall-clock seconds spent in each analysis phase.
struct PhaseTimes {
  double Distances = 0;
  double Compulsory = 0;
  double Rewrites = 0;
  double Enumeration = 0;
  double Counting = 0;
  double total() const { return Distances + Compulsory + Rewrites + Enumeration + Counting; }
};

struct ModelStats {
  size_t Pieces = 0;
  size_t NonAffinePieces = 0;
  size_t EnumeratedPoints = 0;
  size_t CountingFallbacks = 0;
  PhaseTimes Times;
};

struct MissReport {
  CacheConfig Config;
  std::vector<StatementMisses> Statements;
  ModelStats Stats;

  BigInt totalAccesses() const;
  BigInt totalCompulsory() const;
  BigInt totalCapacity(size_t Level) const;
  BigInt hits(size_t Level) const { return totalAccesses() - totalCompulsory() - totalCapacity(Level); }
};

/// One disagreement between two reports.
struct Difference {
  std::string Statement;
  std::string Quantity; // "accesses", "compulsory" or "capacity@L<k>"
  BigInt Expected;
  BigInt Actual;
};

/// Per-statement, per-level differences of `Actual` against `Expected`.
/// Throws std::invalid_argument if the reports describe different
/// configurations or statements.
std::vector<Difference> compare(const MissReport &Expected, const MissReport &Actual);

} // namespace lrumodel::model
