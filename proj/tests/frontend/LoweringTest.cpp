// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Interpreter.h"
#include "lrumodel/frontend/Parser.h"
#include "lrumodel/frontend/Program.h"
#include "lrumodel/poly/Parse.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

using namespace lrumodel;
using namespace lrumodel::frontend;
using poly::parseMap;
using poly::parseSet;

namespace {

const char *RunningExample = R"(
array M[4] elem 4;
for i = 0 .. 3 {
  S0: M[i] = i;
}
for j = 0 .. 3 {
  S1: sum += M[3 - j];
}
)";

} // namespace

TEST(Lowering, RunningExampleSets) {
  Program P = lower(parseProgram(RunningExample), 4);
  EXPECT_TRUE(P.Domain.isEqual(parseSet("{ S0[i, a] : 0 <= i <= 3 and a = 0; S1[j, a] : 0 <= j <= 3 and a = 0 }")));
  EXPECT_TRUE(P.Access.isEqual(parseMap("{ S0[i, a] -> M[i] : 0 <= i <= 3 and a = 0; "
                                        "S1[j, a] -> M[3 - j] : 0 <= j <= 3 and a = 0 }")));
  ASSERT_EQ(P.Statements.size(), 2u);
  EXPECT_EQ(P.Statements[1].Iterators, std::vector<std::string>{"j"});
  EXPECT_TRUE(P.Statements[1].Domain.isEqual(parseSet("{ S1[j] : 0 <= j <= 3 }")));
  EXPECT_EQ(P.statementIndex("S1"), 1u);
  EXPECT_THROW(P.statementIndex("S2"), std::out_of_range);
}

TEST(Lowering, LineGranularity) {
  // Two 4-byte elements per 8-byte line, four per 16-byte line.
  Program Half = lower(parseProgram(RunningExample), 8);
  EXPECT_TRUE(Half.Access.range().isEqual(parseSet("{ M[c] : 0 <= c <= 1 }")));
  Program Whole = lower(parseProgram(RunningExample), 16);
  EXPECT_TRUE(Whole.Access.range().isEqual(parseSet("{ M[c] : c = 0 }")));
  EXPECT_EQ(elementLine({3, 13}, 8, 64), (std::vector<Int>{3, 1}));
  EXPECT_EQ(elementLine({5}, 4, 8), (std::vector<Int>{2}));
  EXPECT_EQ(elementLine({5}, 128, 64), (std::vector<Int>{10}));
}

TEST(Lowering, ScheduleFollowsTextualOrder) {
  LoopNestAst Ast = parseProgram(R"(
    param N = 3;
    array A[N][N];
    for i = 0 .. N - 1 {
      for j = 0 .. i { S0: A[i][j] = A[j][i]; }
      S1: A[i][i] += 1;
    }
  )");
  Program P = lower(Ast, 64);
  // Program order of (statement, instance, access) from direct execution.
  std::vector<std::vector<Int>> Executed;
  interpret(Ast, [&](const ExecutedAccess &E) {
    std::vector<Int> Key{static_cast<Int>(E.Statement)};
    Key.insert(Key.end(), E.Instance->begin(), E.Instance->end());
    Key.push_back(E.AccessIndex);
    Executed.push_back(Key);
  });
  std::vector<std::pair<std::vector<Int>, std::vector<Int>>> ByTime;
  P.Schedule.enumerate([&](const poly::Space &In, const poly::Space &, const std::vector<Int> &Pt) {
    std::vector<Int> Key{static_cast<Int>(P.statementIndex(In.Name))};
    Key.insert(Key.end(), Pt.begin(), Pt.begin() + In.arity());
    ByTime.emplace_back(std::vector<Int>(Pt.begin() + In.arity(), Pt.end()), Key);
  });
  std::sort(ByTime.begin(), ByTime.end());
  ASSERT_EQ(ByTime.size(), Executed.size());
  for (size_t T = 0; T < Executed.size(); ++T)
    EXPECT_EQ(ByTime[T].second, Executed[T]) << "at time " << T;
  for (size_t T = 1; T < ByTime.size(); ++T)
    EXPECT_NE(ByTime[T - 1].first, ByTime[T].first) << "schedule is not injective";
}

TEST(Lowering, AccessMapIsSingleValued) {
  Program P = lower(parseProgram(R"(
    param N = 6;
    array A[N][N] elem 4;
    for i = 0 .. N - 1 { for j = 0 .. N - 1 { S: A[i][j] += A[j][(i + j) % N]; } }
  )"),
                    8);
  std::map<std::vector<Int>, int> Images;
  P.Access.enumerate([&](const poly::Space &In, const poly::Space &, const std::vector<Int> &Pt) {
    ++Images[std::vector<Int>(Pt.begin(), Pt.begin() + In.arity())];
  });
  EXPECT_EQ(Images.size(), 6u * 6u * 3u);
  for (const auto &[Instance, Count] : Images)
    EXPECT_EQ(Count, 1);
}

TEST(Lowering, SetsRoundTripThroughText) {
  Program P = lower(parseProgram(RunningExample), 8);
  EXPECT_TRUE(parseSet(P.Domain.str()).isEqual(P.Domain));
  EXPECT_TRUE(parseMap(P.Access.str()).isEqual(P.Access));
  EXPECT_TRUE(parseMap(P.Schedule.str()).isEqual(P.Schedule));
}
