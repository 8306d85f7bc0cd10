// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Scan.h"

namespace lrumodel::poly {

namespace {

struct Level {
  std::vector<Row> Lower, Upper; // rows whose last nonzero dimension is this one
};

class Scanner {
public:
  Scanner(const Conjunction &C, const std::function<void(const std::vector<Int> &)> &Fn) : C(C), Fn(Fn) {}

  void run() {
    unsigned N = C.numDims();
    if (C.isMarkedEmpty())
      return;
    if (N == 0) {
      if (!C.isEmpty())
        Fn({});
      return;
    }
    std::vector<Row> Ineqs = C.allInequalities();
    Levels.resize(N);
    for (unsigned L = 0; L < N; ++L) {
      std::vector<bool> Keep(C.numCols(), false);
      for (unsigned K = 0; K <= L; ++K)
        Keep[K] = true;
      for (const Row &R : realShadow(C.equalities(), Ineqs, Keep)) {
        int Last = -1;
        for (unsigned K = 0; K < C.numCols(); ++K)
          if (R[K + 1] != 0)
            Last = static_cast<int>(K);
        if (Last < 0) {
          if (R[0] < 0)
            return; // rationally empty
          continue;
        }
        if (Last != static_cast<int>(L))
          continue;
        (R[L + 1] > 0 ? Levels[L].Lower : Levels[L].Upper).push_back(R);
      }
      if (Levels[L].Lower.empty() || Levels[L].Upper.empty())
        throw UnboundedError("cannot enumerate an unbounded set");
    }
    Exact = C.numLocals() == 0;
    Point.assign(N, 0);
    scan(0);
  }

private:
  void scan(unsigned L) {
    const Level &Lv = Levels[L];
    Int Lo = 0, Hi = 0;
    bool First = true;
    for (const Row &R : Lv.Lower) {
      Int S = R[0];
      for (unsigned K = 0; K < L; ++K)
        S = checkedMulAdd(R[K + 1], Point[K], S);
      Int V = ceilDiv(checkedNeg(S), R[L + 1]);
      Lo = First ? V : std::max(Lo, V);
      First = false;
    }
    First = true;
    for (const Row &R : Lv.Upper) {
      Int S = R[0];
      for (unsigned K = 0; K < L; ++K)
        S = checkedMulAdd(R[K + 1], Point[K], S);
      Int V = floorDiv(S, checkedNeg(R[L + 1]));
      Hi = First ? V : std::min(Hi, V);
      First = false;
    }
    bool Last = L + 1 == Levels.size();
    for (Int V = Lo; V <= Hi; ++V) {
      Point[L] = V;
      if (!Last)
        scan(L + 1);
      else if (Exact || C.containsPoint(Point))
        Fn(Point);
    }
  }

  const Conjunction &C;
  const std::function<void(const std::vector<Int> &)> &Fn;
  std::vector<Level> Levels;
  std::vector<Int> Point;
  bool Exact = false;
};

} // namespace

void scanPoints(const Conjunction &C, const std::function<void(const std::vector<Int> &)> &Fn) {
  Scanner(C, Fn).run();
}

BigInt countByScan(const Conjunction &C) {
  BigInt N = 0;
  scanPoints(C, [&](const std::vector<Int> &) { ++N; });
  return N;
}

} // namespace lrumodel::poly
