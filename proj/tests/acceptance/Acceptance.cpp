// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "lrumodel/frontend/Parser.h"
#include "lrumodel/model/Model.h"
#include "lrumodel/poly/Counting.h"
#include "lrumodel/poly/Parse.h"
#include "lrumodel/sim/Simulator.h"

#include "../support/DistanceOracle.h"
#include "../support/RandomPieces.h"
#include "../support/RandomSets.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace lrumodel;
using model::CacheConfig;
using model::DistanceSet;
using model::MissReport;
using poly::BigInt;
using poly::Int;
using poly::Piece;

namespace {

constexpr Int LineSize = 64;
constexpr double RunningExampleSeconds = 1.0;
constexpr size_t MinKernels = 10;
constexpr Int MaxExtent = 64;
constexpr Int PointwiseExtent = 16;
constexpr double EquivalenceSeconds = 300.0;
constexpr double MaxModelGrowth = 3.0;
constexpr double MinSimulatorGrowth = 20.0;
constexpr double MaxTwoLevelRatio = 1.8;
constexpr int RandomPieces = 100;
constexpr int RandomSets = 500;
constexpr double RandomSetSeconds = 60.0;

int Failures = 0;

void report(int Id, bool Pass, const std::string &What, const std::string &Detail) {
  std::cout << (Pass ? "PASS" : "FAIL") << " [" << Id << "] " << What << ": " << Detail << std::endl;
  if (!Pass)
    ++Failures;
}

double secondsSince(std::chrono::steady_clock::time_point Start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - Start).count();
}

std::string readFile(const std::filesystem::path &Path) {
  std::ifstream In(Path);
  std::stringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

struct Kernel {
  std::string Name;
  std::string Text;
};

std::vector<Kernel> loadCorpus() {
  std::vector<Kernel> Corpus;
  for (const auto &E : std::filesystem::directory_iterator(LRUMODEL_KERNEL_DIR))
    if (E.path().extension() == ".dsl")
      Corpus.push_back({E.path().stem().stem().string(), readFile(E.path())});
  std::sort(Corpus.begin(), Corpus.end(), [](const Kernel &A, const Kernel &B) { return A.Name < B.Name; });
  return Corpus;
}

Int maxExtent(const frontend::LoopNestAst &Ast) {
  Int Max = 0;
  for (const frontend::ArrayDecl &A : Ast.Arrays)
    for (Int E : A.Extents)
      Max = std::max(Max, E);
  return Max;
}

/// Parses a kernel with N lowered until every array extent is at most Limit.
frontend::LoopNestAst parseWithin(const Kernel &K, Int Limit) {
  frontend::LoopNestAst Ast = frontend::parseProgram(K.Text);
  for (Int N = Limit; N >= 1 && maxExtent(Ast) > Limit; N /= 2)
    Ast = frontend::parseProgram(K.Text, {{"N", N}});
  return Ast;
}

std::string describe(const std::vector<model::Difference> &Diffs) {
  std::ostringstream OS;
  for (const model::Difference &D : Diffs)
    OS << " " << D.Statement << "." << D.Quantity << " model " << D.Actual << " sim " << D.Expected;
  return OS.str();
}

const char *RunningExample = R"(
array M[4] elem 4;
for i = 0 .. 3 {
  S0: M[i] = i;
}
for j = 0 .. 3 {
  S1: sum += M[3 - j];
}
)";

void checkRunningExample() {
  auto Start = std::chrono::steady_clock::now();
  frontend::Program P = frontend::lower(frontend::parseProgram(RunningExample), 4);
  DistanceSet D;
  MissReport R = model::analyze(P, {4, {8}}, {}, &D);
  double Seconds = secondsSince(Start);
  bool DistancesOk = D.numPieces() == 1 && P.Statements[D.Entries[0].Statement].Label == "S1" &&
                     D.Entries[0].Access == 0 &&
                     D.Entries[0].Pieces[0].Domain.isEqual(poly::parseSet("{ S1[j] : 0 <= j < 4 }")) &&
                     D.Entries[0].Pieces[0].Poly ==
                         poly::QuasiPolynomial::fromAffine(poly::AffineExpr::dim(0) + poly::AffineExpr(1));
  std::ostringstream OS;
  OS << "compulsory " << R.totalCompulsory() << ", capacity " << R.totalCapacity(0) << ", distance pieces "
     << D.numPieces();
  if (D.numPieces() == 1)
    OS << " (" << D.Entries[0].Pieces[0].Poly.str({"j"}) << ")";
  OS << ", " << Seconds << " s";
  report(1, R.totalCompulsory() == 4 && R.totalCapacity(0) == 2 && DistancesOk && Seconds < RunningExampleSeconds,
         "running example", OS.str());
}

/// Full two-level analysis times per kernel, reused by the level-cost check.
std::vector<std::pair<std::string, double>> TwoLevelTimes;

void checkOracleEquivalence(const std::vector<Kernel> &Corpus) {
  std::vector<CacheConfig> Configs{{LineSize, {32 * 1024, 1024 * 1024}}, {LineSize, {2 * LineSize}},
                                   {LineSize, {16 * LineSize}}};
  auto Start = std::chrono::steady_clock::now();
  size_t Checked = 0, Mismatched = 0;
  std::string Detail;
  for (const Kernel &K : Corpus) {
    frontend::LoopNestAst Ast = parseWithin(K, MaxExtent);
    frontend::Program P = frontend::lower(Ast, LineSize);
    sim::MemoryTrace Trace = sim::generateTrace(P);
    DistanceSet Distances;
    bool Ok = true;
    for (size_t C = 0; C < Configs.size(); ++C) {
      // Distances depend on the line size only; the first analysis computes them.
      MissReport Model = C == 0 ? model::analyze(P, Configs[C], {}, &Distances)
                                : model::analyze(P, Configs[C], Distances);
      if (C == 0)
        TwoLevelTimes.emplace_back(K.Name, Model.Stats.Times.total());
      std::vector<model::Difference> Diffs = model::compare(sim::simulate(Trace, Configs[C]).Report, Model);
      if (!Diffs.empty()) {
        Ok = false;
        Detail += " " + K.Name + ":" + describe(Diffs);
      }
    }
    ++Checked;
    Mismatched += !Ok;
  }
  double Seconds = secondsSince(Start);
  std::ostringstream OS;
  OS << Checked << " kernels x " << Configs.size() << " configs, " << Mismatched << " with differences, " << Seconds
     << " s" << Detail;
  report(2, Checked >= MinKernels && Mismatched == 0 && Seconds < EquivalenceSeconds, "oracle equivalence",
         OS.str());
}

/// Non-affine distance pieces of the corpus at small extents.
std::vector<Piece> CorpusNonAffinePieces;

void checkPointwiseDistances(const std::vector<Kernel> &Corpus) {
  size_t Kernels = 0, Pieces = 0;
  std::string Failed;
  for (const Kernel &K : Corpus) {
    frontend::Program P = frontend::lower(parseWithin(K, PointwiseExtent), LineSize);
    DistanceSet D = model::computeStackDistances(P);
    std::string Err = testing::compareDistances(P, D);
    if (!Err.empty())
      Failed += " " + K.Name + ": " + Err + ";";
    ++Kernels;
    Pieces += D.numPieces();
    for (const model::DistanceEntry &E : D.Entries)
      for (const Piece &Pc : E.Pieces)
        if (!Pc.Poly.isAffine())
          CorpusNonAffinePieces.push_back(Pc);
  }
  std::ostringstream OS;
  OS << Kernels << " kernels, " << Pieces << " pieces evaluated at every point";
  if (!Failed.empty())
    OS << ";" << Failed;
  report(3, Failed.empty(), "pointwise stack distances", OS.str());
}

void checkRewrites() {
  using poly::AffineExpr;
  using poly::QuasiPolynomial;
  auto Q = [](const AffineExpr &E) { return QuasiPolynomial::fromAffine(E); };
  AffineExpr I = AffineExpr::dim(0), J = AffineExpr::dim(1);
  std::string Failed;
  size_t Equalized = 0, Rasterized = 0, Enumerated = 0;
  auto CheckPiece = [&](const Piece &P, const std::string &Name) {
    if (auto R = model::equalize(P)) {
      ++Equalized;
      if (std::string Err = testing::checkRewrite(P, *R); !Err.empty())
        Failed += " equalize " + Name + ": " + Err + ";";
    }
    if (auto R = model::rasterize(P)) {
      ++Rasterized;
      if (std::string Err = testing::checkRewrite(P, *R); !Err.empty())
        Failed += " rasterize " + Name + ": " + Err + ";";
    }
    if (P.Poly.isAffine())
      return;
    ++Enumerated;
    std::vector<Int> Capacities{0, 2, 8, 16, 512};
    std::vector<BigInt> Partial = model::countCapacityMisses({P}, Capacities);
    for (size_t C = 0; C < Capacities.size(); ++C)
      if (Partial[C] != testing::enumerateMisses(P, Capacities[C])) {
        Failed += " partial enumeration " + Name + " at " + std::to_string(Capacities[C]) + ";";
        break;
      }
  };

  poly::Set Box = poly::parseSet("{ S0[i, j] : 0 <= i < 3 and 0 <= j < 2 }");
  poly::Set Wide = poly::parseSet("{ S0[i, j] : 0 <= i < 24 and 0 <= j < 4 }");
  QuasiPolynomial Shifted = (Q(AffineExpr::floorOf(I + AffineExpr(1), 3)) - Q(AffineExpr::floorOf(I, 3))) * Q(J);
  QuasiPolynomial Offset = (Q(I) - QuasiPolynomial(3) * Q(AffineExpr::floorOf(I, 3))) * Q(J);
  bool FiguresOk = true;
  for (const poly::Set &Dom : {Box, Wide}) {
    auto E = model::equalize({Dom, Shifted});
    auto R = model::rasterize({Dom, Offset});
    FiguresOk &= E && R && std::all_of(E->begin(), E->end(), [](const Piece &P) { return P.Poly.isAffine(); }) &&
                 std::all_of(R->begin(), R->end(), [](const Piece &P) { return P.Poly.isAffine(); });
    CheckPiece({Dom, Shifted}, "shifted floors");
    CheckPiece({Dom, Offset}, "line offset");
  }
  if (!FiguresOk)
    Failed += " worked examples not rewritten to affine pieces;";

  std::mt19937 Rng(2024);
  for (int N = 0; N < RandomPieces; ++N)
    CheckPiece(testing::randomFloorPiece(Rng), "random #" + std::to_string(N));
  for (size_t N = 0; N < CorpusNonAffinePieces.size(); ++N)
    CheckPiece(CorpusNonAffinePieces[N], "corpus #" + std::to_string(N));

  std::ostringstream OS;
  OS << "2 worked examples + " << RandomPieces << " random + " << CorpusNonAffinePieces.size()
     << " corpus pieces; " << Equalized << " equalized, " << Rasterized << " rasterized, " << Enumerated
     << " non-affine pieces counted by partial enumeration";
  if (!Failed.empty())
    OS << ";" << Failed;
  report(4, Failed.empty(), "rewrite soundness", OS.str());
}

void checkMatmulScaling(const std::vector<Kernel> &Corpus) {
  auto It = std::find_if(Corpus.begin(), Corpus.end(), [](const Kernel &K) { return K.Name == "matmul"; });
  if (It == Corpus.end()) {
    report(5, false, "matmul scaling", "matmul kernel missing");
    return;
  }
  CacheConfig Config{LineSize, {32 * 1024, 1024 * 1024}};
  struct Run {
    double Model, Simulator;
    size_t Pieces;
    bool Equal;
  };
  auto Measure = [&](Int N) {
    frontend::Program P = frontend::lower(frontend::parseProgram(It->Text, {{"N", N}}), LineSize);
    auto Start = std::chrono::steady_clock::now();
    MissReport M = model::analyze(P, Config);
    double ModelSeconds = secondsSince(Start);
    Start = std::chrono::steady_clock::now();
    MissReport S = sim::simulate(sim::generateTrace(P), Config).Report;
    double SimSeconds = secondsSince(Start);
    return Run{ModelSeconds, SimSeconds, M.Stats.Pieces, model::compare(S, M).empty()};
  };
  Run Small = Measure(16), Large = Measure(64);
  double ModelGrowth = Large.Model / Small.Model, SimGrowth = Large.Simulator / Small.Simulator;
  std::ostringstream OS;
  OS << "model " << Small.Model << " s -> " << Large.Model << " s (x" << ModelGrowth << "), simulator "
     << Small.Simulator << " s -> " << Large.Simulator << " s (x" << SimGrowth << "), pieces " << Small.Pieces
     << " / " << Large.Pieces;
  report(5,
         ModelGrowth <= MaxModelGrowth && SimGrowth >= MinSimulatorGrowth && Small.Pieces == Large.Pieces &&
             Small.Equal && Large.Equal,
         "matmul N=16 vs N=64", OS.str());
}

void checkLevelCost(const std::vector<Kernel> &Corpus) {
  std::vector<double> Ratios;
  for (const Kernel &K : Corpus) {
    auto Two = std::find_if(TwoLevelTimes.begin(), TwoLevelTimes.end(),
                            [&](const auto &T) { return T.first == K.Name; });
    if (Two == TwoLevelTimes.end())
      continue;
    frontend::Program P = frontend::lower(parseWithin(K, MaxExtent), LineSize);
    MissReport One = model::analyze(P, {LineSize, {32 * 1024}});
    Ratios.push_back(Two->second / One.Stats.Times.total());
  }
  std::sort(Ratios.begin(), Ratios.end());
  double Median = Ratios.empty() ? 0
                  : Ratios.size() % 2 ? Ratios[Ratios.size() / 2]
                                      : (Ratios[Ratios.size() / 2 - 1] + Ratios[Ratios.size() / 2]) / 2;
  std::ostringstream OS;
  OS << "median two-level/one-level model time " << Median << " over " << Ratios.size() << " kernels (range "
     << (Ratios.empty() ? 0 : Ratios.front()) << " .. " << (Ratios.empty() ? 0 : Ratios.back()) << ")";
  report(6, !Ratios.empty() && Median < MaxTwoLevelRatio, "two cache levels", OS.str());
}

void checkRandomCardinalities() {
  std::mt19937 Rng(500);
  poly::CountingStats Stats;
  size_t Wrong = 0;
  auto Start = std::chrono::steady_clock::now();
  for (int N = 0; N < RandomSets; ++N) {
    poly::Set S = testing::randomBoundedSet(Rng);
    BigInt Symbolic = poly::cardinality(S, &Stats);
    BigInt Enumerated = 0;
    S.enumerate([&](const poly::Space &, const std::vector<Int> &) { ++Enumerated; });
    Wrong += Symbolic != Enumerated;
  }
  double Seconds = secondsSince(Start);
  std::ostringstream OS;
  OS << RandomSets << " sets, " << Wrong << " mismatches, " << Stats.SymbolicSteps << " symbolic steps, "
     << Stats.ResidueSplits << " residue splits, " << Stats.Fallbacks << " enumeration fallbacks, " << Seconds
     << " s";
  report(7, Wrong == 0 && Seconds < RandomSetSeconds, "random set cardinalities", OS.str());
}

} // namespace

int main() {
  std::vector<Kernel> Corpus = loadCorpus();
  checkRunningExample();
  checkOracleEquivalence(Corpus);
  checkPointwiseDistances(Corpus);
  checkRewrites();
  checkMatmulScaling(Corpus);
  checkLevelCost(Corpus);
  checkRandomCardinalities();
  std::cout << (Failures == 0 ? "all criteria pass" : std::to_string(Failures) + " criteria fail") << std::endl;
  return Failures == 0 ? 0 : 1;
}
