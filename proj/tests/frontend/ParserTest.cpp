// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Parser.h"

#include <gtest/gtest.h>

using namespace lrumodel;
using namespace lrumodel::frontend;

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

SourceLoc errorLoc(std::string_view Text) {
  try {
    parseProgram(Text);
  } catch (const ParseError &E) {
    return E.Loc;
  }
  ADD_FAILURE() << "no parse error for: " << Text;
  return {};
}

} // namespace

TEST(Parser, RunningExample) {
  LoopNestAst Ast = parseProgram(RunningExample);
  ASSERT_EQ(Ast.Arrays.size(), 1u);
  EXPECT_EQ(Ast.Arrays[0].Name, "M");
  EXPECT_EQ(Ast.Arrays[0].ElemSize, 4);
  EXPECT_EQ(Ast.Arrays[0].Extents, std::vector<Int>{4});
  EXPECT_EQ(Ast.numStatements(), 2u);
  ASSERT_EQ(Ast.Body.size(), 2u);
  const auto &Second = std::get<LoopAst>(Ast.Body[1].Value);
  const auto &S1 = std::get<StatementAst>(Second.Body[0].Value);
  EXPECT_EQ(S1.Label, "S1");
  // The scalar target performs no memory access.
  ASSERT_EQ(S1.Accesses.size(), 1u);
  EXPECT_FALSE(S1.Accesses[0].IsWrite);
}

TEST(Parser, CompoundAssignmentOrder) {
  LoopNestAst Ast = parseProgram(R"(
    param N = 4;
    array A[N][N];
    for i = 0 .. N - 1 { for k = 0 .. i - 1 { S: A[i][i] -= A[i][k] * A[k][i]; } }
  )");
  const auto &Outer = std::get<LoopAst>(Ast.Body[0].Value);
  const auto &Inner = std::get<LoopAst>(Outer.Body[0].Value);
  const auto &S = std::get<StatementAst>(Inner.Body[0].Value);
  ASSERT_EQ(S.Accesses.size(), 4u);
  EXPECT_FALSE(S.Accesses[0].IsWrite);
  EXPECT_FALSE(S.Accesses[1].IsWrite);
  EXPECT_FALSE(S.Accesses[2].IsWrite);
  EXPECT_TRUE(S.Accesses[3].IsWrite);
  EXPECT_EQ(S.Accesses[1].Subscripts[1], AffineExpr::dim(1));
}

TEST(Parser, ParameterOverride) {
  const char *Text = "param N = 8; array A[N]; for i = 0 .. N - 1 { S: A[i] = 0; }";
  EXPECT_EQ(parseProgram(Text).Arrays[0].Extents, std::vector<Int>{8});
  EXPECT_EQ(parseProgram(Text, {{"N", 3}}).Arrays[0].Extents, std::vector<Int>{3});
  EXPECT_THROW(parseProgram(Text, {{"M", 3}}), ParseError);
}

TEST(Parser, MinMaxBoundsAndFloorDivision) {
  LoopNestAst Ast = parseProgram(R"(
    array A[16];
    for t = 0 .. 3 { for i = max(4 * t, 1) .. min(4 * t + 3, 14) { S: A[i / 2 + i % 2] = 1; } }
  )");
  const auto &Outer = std::get<LoopAst>(Ast.Body[0].Value);
  const auto &Inner = std::get<LoopAst>(Outer.Body[0].Value);
  EXPECT_EQ(Inner.Lower.size(), 2u);
  EXPECT_EQ(Inner.Upper.size(), 2u);
}

TEST(Parser, ErrorsCarryLocations) {
  SourceLoc L = errorLoc("array A[4];\nfor i = 0 .. 3 { S: A[i * i] = 0; }");
  EXPECT_EQ(L.Line, 2u);
  L = errorLoc("array A[4];\nfor i = 0 .. 3 {\n  S: B[i] = 0; }");
  EXPECT_EQ(L.Line, 3u);
  EXPECT_EQ(L.Column, 6u);
}

TEST(Parser, RejectsInvalidPrograms) {
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { S: A[i][i] = 0; }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. i { S: A[i] = 0; }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { for j = 0 .. i * i { S: A[j] = 0; } }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { S: A[i] = 0; S: A[i] = 1; }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { for i = 0 .. 3 { S: A[i] = 0; } }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { S: A[k] = 0; }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { S: x = 0; }"), ParseError);
  EXPECT_THROW(parseProgram("array A[4]; for i = 0 .. 3 { S: A[i] = 0 }"), ParseError);
}
