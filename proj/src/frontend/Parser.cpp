// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/frontend/Parser.h"

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

namespace lrumodel::frontend {

const ArrayDecl *LoopNestAst::findArray(const std::string &Name) const {
  for (const ArrayDecl &A : Arrays)
    if (A.Name == Name)
      return &A;
  return nullptr;
}

static size_t countStatements(const std::vector<Node> &Nodes) {
  size_t N = 0;
  for (const Node &Child : Nodes) {
    if (const auto *L = std::get_if<LoopAst>(&Child.Value))
      N += countStatements(L->Body);
    else
      ++N;
  }
  return N;
}

size_t LoopNestAst::numStatements() const { return countStatements(Body); }

namespace {

struct Token {
  enum Kind { Ident, Integer, Real, Punct, End } K = End;
  std::string Text;
  Int Value = 0;
  SourceLoc Loc;
};

std::vector<Token> tokenize(std::string_view Src) {
  std::vector<Token> Out;
  size_t Pos = 0;
  SourceLoc Loc;
  auto Advance = [&] {
    if (Src[Pos] == '\n') {
      ++Loc.Line;
      Loc.Column = 1;
    } else {
      ++Loc.Column;
    }
    ++Pos;
  };
  auto IsDigit = [&](size_t P) { return P < Src.size() && std::isdigit(static_cast<unsigned char>(Src[P])); };
  while (true) {
    while (Pos < Src.size()) {
      if (std::isspace(static_cast<unsigned char>(Src[Pos])))
        Advance();
      else if (Src[Pos] == '#')
        while (Pos < Src.size() && Src[Pos] != '\n')
          Advance();
      else
        break;
    }
    Token T;
    T.Loc = Loc;
    if (Pos >= Src.size()) {
      Out.push_back(T);
      return Out;
    }
    char C = Src[Pos];
    if (IsDigit(Pos)) {
      T.K = Token::Integer;
      while (IsDigit(Pos)) {
        if (T.K == Token::Integer) {
          try {
            T.Value = poly::checkedAdd(poly::checkedMul(T.Value, 10), Src[Pos] - '0');
          } catch (const poly::OverflowError &) {
            throw ParseError("integer literal too large", T.Loc);
          }
        }
        T.Text += Src[Pos];
        Advance();
        // A fractional part makes a real literal; ".." stays a range token.
        if (T.K == Token::Integer && Pos + 1 < Src.size() && Src[Pos] == '.' && IsDigit(Pos + 1)) {
          T.K = Token::Real;
          T.Text += '.';
          Advance();
        }
      }
    } else if (std::isalpha(static_cast<unsigned char>(C)) || C == '_') {
      T.K = Token::Ident;
      while (Pos < Src.size() && (std::isalnum(static_cast<unsigned char>(Src[Pos])) || Src[Pos] == '_')) {
        T.Text += Src[Pos];
        Advance();
      }
    } else {
      T.K = Token::Punct;
      static const char *Two[] = {"..", "+=", "-=", "*=", "/="};
      for (const char *P : Two)
        if (Src.substr(Pos, 2) == P)
          T.Text = P;
      if (T.Text.empty()) {
        if (std::string_view("{}[]()=;:,+-*/%").find(C) == std::string_view::npos)
          throw ParseError(std::string("unexpected character '") + C + "'", Loc);
        T.Text = std::string(1, C);
      }
      for (size_t I = 0; I < T.Text.size(); ++I)
        Advance();
    }
    Out.push_back(std::move(T));
  }
}

class Parser {
public:
  Parser(std::string_view Source, const std::map<std::string, Int> &Overrides)
      : Toks(tokenize(Source)), Overrides(Overrides) {}

  LoopNestAst run() {
    while (peek().K != Token::End) {
      if (word("param"))
        param();
      else if (word("array"))
        array();
      else
        Ast.Body.push_back(item());
    }
    for (const auto &[Name, Value] : Overrides)
      if (!Params.count(Name))
        throw ParseError("unknown parameter '" + Name + "'", SourceLoc{});
    return std::move(Ast);
  }

private:
  const Token &peek(size_t Ahead = 0) const { return Toks[std::min(Idx + Ahead, Toks.size() - 1)]; }
  bool isPunct(const char *P, size_t Ahead = 0) const {
    return peek(Ahead).K == Token::Punct && peek(Ahead).Text == P;
  }
  bool isWord(const char *W) const { return peek().K == Token::Ident && peek().Text == W; }
  bool accept(const char *P) {
    if (!isPunct(P))
      return false;
    ++Idx;
    return true;
  }
  bool word(const char *W) {
    if (!isWord(W))
      return false;
    ++Idx;
    return true;
  }
  void expect(const char *P) {
    if (!accept(P))
      fail(std::string("expected '") + P + "'");
  }
  [[noreturn]] void fail(const std::string &Msg) const { throw ParseError(Msg, peek().Loc); }

  std::string ident(const char *What) {
    if (peek().K != Token::Ident || Keywords.count(peek().Text))
      fail(std::string("expected ") + What);
    return Toks[Idx++].Text;
  }
  Int integer() {
    if (peek().K != Token::Integer)
      fail("expected an integer");
    return Toks[Idx++].Value;
  }
  Int constant() {
    SourceLoc Loc = peek().Loc;
    AffineExpr E = affine();
    if (!E.isConstant())
      throw ParseError("expected a constant expression", Loc);
    return E.Constant;
  }

  void param() {
    SourceLoc Loc = peek().Loc;
    std::string Name = ident("a parameter name");
    if (Params.count(Name) || isLoopVar(Name) || Ast.findArray(Name))
      throw ParseError("redefinition of '" + Name + "'", Loc);
    expect("=");
    Int Value = constant();
    expect(";");
    auto It = Overrides.find(Name);
    Params[Name] = It == Overrides.end() ? Value : It->second;
  }

  void array() {
    ArrayDecl A;
    A.Loc = peek().Loc;
    A.Name = ident("an array name");
    if (Params.count(A.Name) || Ast.findArray(A.Name))
      throw ParseError("redefinition of '" + A.Name + "'", A.Loc);
    expect("[");
    while (true) {
      SourceLoc Loc = peek().Loc;
      Int Extent = constant();
      if (Extent <= 0)
        throw ParseError("array extent must be positive", Loc);
      A.Extents.push_back(Extent);
      if (accept(","))
        continue;
      expect("]");
      if (!accept("["))
        break;
    }
    if (word("elem")) {
      SourceLoc Loc = peek().Loc;
      A.ElemSize = integer();
      if (A.ElemSize <= 0)
        throw ParseError("element size must be positive", Loc);
    }
    expect(";");
    Ast.Arrays.push_back(std::move(A));
  }

  Node item() {
    if (isWord("for"))
      return Node{loop()};
    if (peek().K == Token::Ident && isPunct(":", 1))
      return Node{statement()};
    if (isWord("param") || isWord("array"))
      fail("declarations must appear at the top level");
    fail("expected a loop or a labelled statement");
  }

  LoopAst loop() {
    LoopAst L;
    L.Loc = peek().Loc;
    ++Idx;
    SourceLoc VarLoc = peek().Loc;
    L.Var = ident("a loop variable");
    if (isLoopVar(L.Var) || Params.count(L.Var) || Ast.findArray(L.Var))
      throw ParseError("loop variable '" + L.Var + "' shadows an existing name", VarLoc);
    expect("=");
    L.Lower = bound("max");
    expect("..");
    L.Upper = bound("min");
    expect("{");
    Loops.push_back(L.Var);
    while (!accept("}")) {
      if (peek().K == Token::End)
        fail("expected '}'");
      L.Body.push_back(item());
    }
    Loops.pop_back();
    return L;
  }

  std::vector<AffineExpr> bound(const char *Combiner) {
    std::vector<AffineExpr> Exprs;
    if (isWord(Combiner) && isPunct("(", 1)) {
      Idx += 2;
      do
        Exprs.push_back(affineChecked("non-affine loop bound"));
      while (accept(","));
      expect(")");
    } else {
      Exprs.push_back(affineChecked("non-affine loop bound"));
    }
    return Exprs;
  }

  StatementAst statement() {
    StatementAst S;
    S.Loc = peek().Loc;
    S.Label = ident("a statement label");
    if (!Labels.insert(S.Label).second)
      throw ParseError("duplicate statement label '" + S.Label + "'", S.Loc);
    expect(":");
    // A scalar target lives in a register and performs no memory access.
    std::optional<AccessAst> Target;
    if (peek().K == Token::Ident && isPunct("[", 1)) {
      Target = access();
      Target->IsWrite = true;
    } else {
      SourceLoc Loc = peek().Loc;
      std::string Name = ident("an assignment target");
      if (isLoopVar(Name) || Params.count(Name))
        throw ParseError("cannot assign to '" + Name + "'", Loc);
      Scalars.insert(Name);
    }
    bool Compound = false;
    for (const char *Op : {"+=", "-=", "*=", "/="})
      if (accept(Op))
        Compound = true;
    if (!Compound)
      expect("=");
    if (Compound && Target) {
      AccessAst Read = *Target;
      Read.IsWrite = false;
      S.Accesses.push_back(std::move(Read));
    }
    value(S);
    expect(";");
    if (Target)
      S.Accesses.push_back(std::move(*Target));
    if (S.Accesses.empty())
      throw ParseError("statement '" + S.Label + "' performs no array access", S.Loc);
    return S;
  }

  // Right-hand side values: only the array reads matter, operators are
  // arbitrary.
  void value(StatementAst &S) {
    accept("-");
    valueTerm(S);
    while (accept("+") || accept("-"))
      valueTerm(S);
  }
  void valueTerm(StatementAst &S) {
    valueFactor(S);
    while (accept("*") || accept("/") || accept("%"))
      valueFactor(S);
  }
  void valueFactor(StatementAst &S) {
    if (peek().K == Token::Integer || peek().K == Token::Real) {
      ++Idx;
      return;
    }
    if (accept("-"))
      return valueFactor(S);
    if (accept("(")) {
      value(S);
      expect(")");
      return;
    }
    if (peek().K != Token::Ident)
      fail("expected a value");
    if (isPunct("[", 1)) {
      S.Accesses.push_back(access());
      return;
    }
    if (isPunct("(", 1)) {
      Idx += 2;
      if (!accept(")")) {
        do
          value(S);
        while (accept(","));
        expect(")");
      }
      return;
    }
    const std::string &Name = peek().Text;
    if (!isLoopVar(Name) && !Params.count(Name) && !Scalars.count(Name))
      fail("unknown identifier '" + Name + "'");
    ++Idx;
  }

  AccessAst access() {
    AccessAst A;
    A.Loc = peek().Loc;
    A.Array = Toks[Idx++].Text;
    const ArrayDecl *Decl = Ast.findArray(A.Array);
    if (!Decl)
      throw ParseError("undeclared array '" + A.Array + "'", A.Loc);
    expect("[");
    while (true) {
      A.Subscripts.push_back(affineChecked("non-affine subscript"));
      if (accept(","))
        continue;
      expect("]");
      if (!accept("["))
        break;
    }
    if (A.Subscripts.size() != Decl->Extents.size())
      throw ParseError("array '" + A.Array + "' has " + std::to_string(Decl->Extents.size()) + " dimensions, " +
                           std::to_string(A.Subscripts.size()) + " subscripts given",
                       A.Loc);
    return A;
  }

  /// Affine expressions over loop variables and parameters. Non-affine
  /// products are reported with `NonAffineMsg` at the expression start.
  AffineExpr affineChecked(const char *NonAffineMsg) {
    SourceLoc Loc = peek().Loc;
    NonAffine = false;
    AffineExpr E = affine();
    if (NonAffine)
      throw ParseError(NonAffineMsg, Loc);
    return E;
  }

  AffineExpr affine() {
    AffineExpr E = accept("-") ? -affineTerm() : affineTerm();
    while (true) {
      if (accept("+"))
        E += affineTerm();
      else if (accept("-"))
        E -= affineTerm();
      else
        return E;
    }
  }

  AffineExpr affineTerm() {
    AffineExpr E = affineFactor();
    while (true) {
      if (accept("*")) {
        AffineExpr R = affineFactor();
        if (R.isConstant())
          E *= R.Constant;
        else if (E.isConstant())
          E = R * E.Constant;
        else
          NonAffine = true;
      } else if (accept("/")) {
        E = AffineExpr::floorOf(E, divisor());
      } else if (accept("%")) {
        E = AffineExpr::modOf(E, divisor());
      } else {
        return E;
      }
    }
  }

  Int divisor() {
    SourceLoc Loc = peek().Loc;
    AffineExpr D = affineFactor();
    if (!D.isConstant() || D.Constant <= 0)
      throw ParseError("divisor must be a positive constant", Loc);
    return D.Constant;
  }

  AffineExpr affineFactor() {
    const Token &T = peek();
    if (T.K == Token::Integer) {
      ++Idx;
      return AffineExpr(T.Value);
    }
    if (accept("(")) {
      AffineExpr E = affine();
      expect(")");
      return E;
    }
    if (accept("-"))
      return -affineFactor();
    if (T.K == Token::Ident) {
      if (T.Text == "floor" && isPunct("(", 1)) {
        // Division already rounds down, so floor(...) only groups.
        Idx += 2;
        AffineExpr E = affine();
        expect(")");
        return E;
      }
      for (size_t K = 0; K < Loops.size(); ++K)
        if (Loops[K] == T.Text) {
          ++Idx;
          return AffineExpr::dim(static_cast<unsigned>(K));
        }
      auto It = Params.find(T.Text);
      if (It != Params.end()) {
        ++Idx;
        return AffineExpr(It->second);
      }
      fail("unknown identifier '" + T.Text + "'");
    }
    fail("expected an affine expression");
  }

  bool isLoopVar(const std::string &Name) const {
    return std::find(Loops.begin(), Loops.end(), Name) != Loops.end();
  }

  inline static const std::set<std::string> Keywords = {"param", "array", "elem", "for", "floor"};

  std::vector<Token> Toks;
  size_t Idx = 0;
  const std::map<std::string, Int> &Overrides;
  std::map<std::string, Int> Params;
  std::vector<std::string> Loops;
  std::set<std::string> Labels;
  std::set<std::string> Scalars;
  bool NonAffine = false;
  LoopNestAst Ast;
};

} // namespace

LoopNestAst parseProgram(std::string_view Source, const std::map<std::string, Int> &Overrides) {
  return Parser(Source, Overrides).run();
}

} // namespace lrumodel::frontend
