// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/model/Report.h"

#include <stdexcept>

namespace lrumodel::model {

void CacheConfig::validate() const {
  if (LineSize <= 0)
    throw std::invalid_argument("line size must be positive");
  if (Capacities.empty())
    throw std::invalid_argument("at least one cache level is required");
  for (size_t L = 0; L < Capacities.size(); ++L) {
    if (Capacities[L] <= 0 || Capacities[L] % LineSize != 0)
      throw std::invalid_argument("cache capacity " + std::to_string(Capacities[L]) +
                                  " is not a positive multiple of the line size");
    if (L > 0 && Capacities[L] < Capacities[L - 1])
      throw std::invalid_argument("cache capacities must be non-decreasing");
  }
}

BigInt MissReport::totalAccesses() const {
  BigInt Sum = 0;
  for (const StatementMisses &S : Statements)
    Sum += S.Accesses;
  return Sum;
}

BigInt MissReport::totalCompulsory() const {
  BigInt Sum = 0;
  for (const StatementMisses &S : Statements)
    Sum += S.Compulsory;
  return Sum;
}

BigInt MissReport::totalCapacity(size_t Level) const {
  BigInt Sum = 0;
  for (const StatementMisses &S : Statements)
    Sum += S.Capacity.at(Level);
  return Sum;
}

std::vector<Difference> compare(const MissReport &Expected, const MissReport &Actual) {
  if (!(Expected.Config == Actual.Config))
    throw std::invalid_argument("reports use different cache configurations");
  if (Expected.Statements.size() != Actual.Statements.size())
    throw std::invalid_argument("reports cover different statements");
  std::vector<Difference> Diffs;
  for (size_t I = 0; I < Expected.Statements.size(); ++I) {
    const StatementMisses &E = Expected.Statements[I], &A = Actual.Statements[I];
    if (E.Label != A.Label)
      throw std::invalid_argument("reports cover different statements");
    if (E.Accesses != A.Accesses)
      Diffs.push_back({E.Label, "accesses", E.Accesses, A.Accesses});
    if (E.Compulsory != A.Compulsory)
      Diffs.push_back({E.Label, "compulsory", E.Compulsory, A.Compulsory});
    for (size_t L = 0; L < Expected.Config.numLevels(); ++L)
      if (E.Capacity.at(L) != A.Capacity.at(L))
        Diffs.push_back({E.Label, "capacity@L" + std::to_string(L + 1), E.Capacity[L], A.Capacity[L]});
  }
  return Diffs;
}

} // namespace lrumodel::model
