// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/sim/Simulator.h"

#include <algorithm>
#include <list>
#include <numeric>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace lrumodel::sim {

namespace {

struct VectorHash {
  size_t operator()(const std::vector<Int> &V) const {
    size_t H = V.size();
    for (Int X : V)
      H ^= std::hash<Int>()(X) + 0x9e3779b97f4a7c15ULL + (H << 6) + (H >> 2);
    return H;
  }
};

class Fenwick {
public:
  explicit Fenwick(size_t N) : Tree(N + 1, 0) {}
  void add(size_t I, int64_t Delta) {
    for (++I; I < Tree.size(); I += I & -I)
      Tree[I] += Delta;
  }
  /// Sum over [0, I).
  int64_t prefix(size_t I) const {
    int64_t S = 0;
    for (; I > 0; I -= I & -I)
      S += Tree[I];
    return S;
  }

private:
  std::vector<int64_t> Tree;
};

/// Explicit LRU list of one level, used to cross-check the distance
/// classification.
class LruLevel {
public:
  LruLevel(size_t NumLines, Int Capacity) : Where(NumLines), Present(NumLines, false), Capacity(Capacity) {}

  /// Touches a line; returns true on a hit and the evicted line, if any.
  bool touch(uint32_t Line, std::optional<uint32_t> &Evicted) {
    Evicted.reset();
    if (Present[Line]) {
      Order.splice(Order.begin(), Order, Where[Line]);
      return true;
    }
    Order.push_front(Line);
    Where[Line] = Order.begin();
    Present[Line] = true;
    if (static_cast<Int>(Order.size()) > Capacity) {
      Evicted = Order.back();
      Present[Order.back()] = false;
      Order.pop_back();
    }
    return false;
  }
  bool contains(uint32_t Line) const { return Present[Line]; }

private:
  std::list<uint32_t> Order;
  std::vector<std::list<uint32_t>::iterator> Where;
  std::vector<bool> Present;
  Int Capacity;
};

} // namespace

std::vector<Int> MemoryTrace::instance(const TraceRecord &R) const {
  auto Begin = Instances.begin() + static_cast<std::ptrdiff_t>(R.InstanceOffset);
  return std::vector<Int>(Begin, Begin + Depths[R.Statement]);
}

MemoryTrace generateTrace(const frontend::Program &P) {
  MemoryTrace Trace;
  std::unordered_map<std::string, uint32_t> StatementIds;
  for (const frontend::StatementInfo &S : P.Statements) {
    StatementIds[S.Label] = static_cast<uint32_t>(Trace.Labels.size());
    Trace.Labels.push_back(S.Label);
    Trace.Depths.push_back(static_cast<unsigned>(S.Iterators.size()));
  }

  // Cache line of every (statement, instance, access).
  std::unordered_map<std::vector<Int>, uint32_t, VectorHash> LineOf;
  std::unordered_map<std::vector<Int>, uint32_t, VectorHash> LineIds;
  std::unordered_map<std::string, Int> ArrayIds;
  P.Access.enumerate([&](const poly::Space &In, const poly::Space &Out, const std::vector<Int> &Point) {
    std::vector<Int> Key{static_cast<Int>(StatementIds.at(In.Name))};
    Key.insert(Key.end(), Point.begin(), Point.begin() + In.arity());
    auto [ArrayIt, NewArray] = ArrayIds.try_emplace(Out.Name, static_cast<Int>(ArrayIds.size()));
    std::vector<Int> Line{ArrayIt->second};
    Line.insert(Line.end(), Point.begin() + In.arity(), Point.end());
    auto [LineIt, NewLine] = LineIds.try_emplace(Line, static_cast<uint32_t>(Trace.Lines.size()));
    if (NewLine)
      Trace.Lines.push_back({Out.Name, std::vector<Int>(Line.begin() + 1, Line.end())});
    if (!LineOf.emplace(std::move(Key), LineIt->second).second)
      throw std::logic_error("access map is not single-valued");
  });

  // Instances with their schedule values, then sorted by time.
  struct Entry {
    uint32_t Statement;
    uint32_t Access;
    uint64_t InstanceOffset;
  };
  std::vector<Entry> Entries;
  std::vector<Int> Times;
  size_t TimeArity = 0;
  P.Schedule.enumerate([&](const poly::Space &In, const poly::Space &Out, const std::vector<Int> &Point) {
    TimeArity = Out.arity();
    unsigned Depth = In.arity() - 1;
    Entries.push_back({StatementIds.at(In.Name), static_cast<uint32_t>(Point[Depth]), Trace.Instances.size()});
    Trace.Instances.insert(Trace.Instances.end(), Point.begin(), Point.begin() + Depth);
    Times.insert(Times.end(), Point.begin() + In.arity(), Point.end());
  });
  std::vector<size_t> Order(Entries.size());
  std::iota(Order.begin(), Order.end(), 0);
  std::sort(Order.begin(), Order.end(), [&](size_t A, size_t B) {
    return std::lexicographical_compare(Times.begin() + A * TimeArity, Times.begin() + (A + 1) * TimeArity,
                                        Times.begin() + B * TimeArity, Times.begin() + (B + 1) * TimeArity);
  });

  Trace.Records.reserve(Entries.size());
  std::vector<Int> Key;
  for (size_t I : Order) {
    const Entry &E = Entries[I];
    unsigned Depth = Trace.Depths[E.Statement];
    Key.assign(1, E.Statement);
    Key.insert(Key.end(), Trace.Instances.begin() + static_cast<std::ptrdiff_t>(E.InstanceOffset),
               Trace.Instances.begin() + static_cast<std::ptrdiff_t>(E.InstanceOffset + Depth));
    Key.push_back(E.Access);
    auto It = LineOf.find(Key);
    if (It == LineOf.end())
      throw std::logic_error("scheduled instance of " + Trace.Labels[E.Statement] + " has no access");
    Trace.Records.push_back({E.Statement, E.Access, It->second, E.InstanceOffset});
  }
  if (Trace.Records.size() != LineOf.size())
    throw std::logic_error("access map covers unscheduled instances");
  return Trace;
}

SimulationResult simulate(const MemoryTrace &Trace, const model::CacheConfig &Config,
                          const SimulationOptions &Options) {
  Config.validate();
  size_t NumLevels = Config.numLevels();
  std::vector<Int> CapacityLines;
  for (size_t L = 0; L < NumLevels; ++L)
    CapacityLines.push_back(Config.capacityLines(L));

  SimulationResult Result;
  Result.Distances.resize(Trace.Records.size());
  std::vector<uint64_t> Accesses(Trace.Labels.size(), 0), Compulsory(Trace.Labels.size(), 0);
  std::vector<std::vector<uint64_t>> Capacity(Trace.Labels.size(), std::vector<uint64_t>(NumLevels, 0));

  Fenwick Marks(Trace.Records.size());
  std::vector<int64_t> LastTouch(Trace.Lines.size(), -1);
  std::vector<LruLevel> Levels;
  if (Options.CheckInclusion)
    for (Int Lines : CapacityLines)
      Levels.emplace_back(Trace.Lines.size(), Lines);

  for (size_t T = 0; T < Trace.Records.size(); ++T) {
    const TraceRecord &R = Trace.Records[T];
    int64_t Last = LastTouch[R.Line];
    Distance D = 0;
    if (Last >= 0) {
      D = static_cast<Distance>(Marks.prefix(T) - Marks.prefix(static_cast<size_t>(Last) + 1)) + 1;
      Marks.add(static_cast<size_t>(Last), -1);
    }
    Marks.add(T, 1);
    LastTouch[R.Line] = static_cast<int64_t>(T);
    Result.Distances[T] = D;

    ++Accesses[R.Statement];
    if (D == 0)
      ++Compulsory[R.Statement];
    else
      for (size_t L = 0; L < NumLevels; ++L)
        if (D > static_cast<Distance>(CapacityLines[L]))
          ++Capacity[R.Statement][L];

    if (Options.CheckInclusion) {
      std::vector<std::optional<uint32_t>> Evicted(NumLevels);
      for (size_t L = 0; L < NumLevels; ++L) {
        bool Hit = Levels[L].touch(R.Line, Evicted[L]);
        bool Expected = D != 0 && D <= static_cast<Distance>(CapacityLines[L]);
        if (Hit != Expected)
          throw std::logic_error("LRU list disagrees with the stack distance at record " + std::to_string(T));
      }
      for (size_t L = 1; L < NumLevels; ++L)
        if (Evicted[L] && Levels[L - 1].contains(*Evicted[L]))
          throw std::logic_error("inclusion violated at record " + std::to_string(T));
    }
  }

  Result.Report.Config = Config;
  for (size_t S = 0; S < Trace.Labels.size(); ++S) {
    model::StatementMisses M;
    M.Label = Trace.Labels[S];
    M.Accesses = poly::BigInt(static_cast<unsigned long>(Accesses[S]));
    M.Compulsory = poly::BigInt(static_cast<unsigned long>(Compulsory[S]));
    for (uint64_t C : Capacity[S])
      M.Capacity.push_back(poly::BigInt(static_cast<unsigned long>(C)));
    Result.Report.Statements.push_back(std::move(M));
  }
  return Result;
}

void writeTraceCsv(std::ostream &OS, const MemoryTrace &Trace, const SimulationResult &Result) {
  const model::CacheConfig &Config = Result.Report.Config;
  OS << "seq,stmt,instance,access,array,line,distance";
  for (size_t L = 0; L < Config.numLevels(); ++L)
    OS << ",class@L" << L + 1;
  OS << '\n';
  auto Join = [](const std::vector<Int> &V) {
    std::string S;
    for (size_t I = 0; I < V.size(); ++I)
      S += (I ? " " : "") + std::to_string(V[I]);
    return S;
  };
  for (size_t T = 0; T < Trace.Records.size(); ++T) {
    const TraceRecord &R = Trace.Records[T];
    const LineId &Line = Trace.Lines[R.Line];
    Distance D = Result.Distances[T];
    OS << T << ',' << Trace.Labels[R.Statement] << ',' << Join(Trace.instance(R)) << ',' << R.Access << ','
       << Line.Array << ',' << Join(Line.Coords) << ',' << (D == 0 ? std::string("inf") : std::to_string(D));
    for (size_t L = 0; L < Config.numLevels(); ++L)
      OS << ',' << (D == 0 ? "compulsory" : D > static_cast<Distance>(Config.capacityLines(L)) ? "capacity" : "hit");
    OS << '\n';
  }
}

} // namespace lrumodel::sim
