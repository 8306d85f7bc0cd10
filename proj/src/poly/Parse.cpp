// SPDX-License-Identifier: Apache-2.0

#include "lrumodel/poly/Parse.h"

#include <cctype>
#include <map>
#include <optional>

namespace lrumodel::poly {

namespace {

struct Token {
  enum Kind { Ident, Number, Punct, End } K = End;
  std::string Text;
  Int Value = 0;
  unsigned Line = 1, Column = 1;
};

class Lexer {
public:
  explicit Lexer(std::string_view Src) : Src(Src) {}

  std::vector<Token> run() {
    std::vector<Token> Out;
    while (true) {
      skipSpace();
      Token T;
      T.Line = Line;
      T.Column = Column;
      if (Pos >= Src.size()) {
        Out.push_back(T);
        return Out;
      }
      char C = Src[Pos];
      if (std::isdigit(static_cast<unsigned char>(C))) {
        T.K = Token::Number;
        while (Pos < Src.size() && std::isdigit(static_cast<unsigned char>(Src[Pos]))) {
          T.Value = checkedAdd(checkedMul(T.Value, 10), Src[Pos] - '0');
          T.Text += Src[Pos];
          advance();
        }
      } else if (std::isalpha(static_cast<unsigned char>(C)) || C == '_') {
        T.K = Token::Ident;
        while (Pos < Src.size() &&
               (std::isalnum(static_cast<unsigned char>(Src[Pos])) || Src[Pos] == '_' || Src[Pos] == '\'')) {
          T.Text += Src[Pos];
          advance();
        }
      } else {
        T.K = Token::Punct;
        static const char *Two[] = {"->", "<=", ">=", "==", "!="};
        for (const char *P : Two)
          if (Src.substr(Pos, 2) == P)
            T.Text = P;
        if (T.Text.empty())
          T.Text = std::string(1, C);
        for (size_t I = 0; I < T.Text.size(); ++I)
          advance();
      }
      Out.push_back(std::move(T));
    }
  }

private:
  void advance() {
    if (Src[Pos] == '\n') {
      ++Line;
      Column = 1;
    } else {
      ++Column;
    }
    ++Pos;
  }
  void skipSpace() {
    while (Pos < Src.size()) {
      if (std::isspace(static_cast<unsigned char>(Src[Pos]))) {
        advance();
      } else if (Src[Pos] == '#') {
        while (Pos < Src.size() && Src[Pos] != '\n')
          advance();
      } else {
        break;
      }
    }
  }

  std::string_view Src;
  size_t Pos = 0;
  unsigned Line = 1, Column = 1;
};

/// A parsed piece: tuples plus constraints over in and out dimensions.
struct RawPiece {
  Space In, Out;
  bool IsMap = false;
  std::vector<AffineExpr> Eqs, Ineqs;
};

class Parser {
public:
  explicit Parser(std::string_view Text) : Toks(Lexer(Text).run()) {}

  std::vector<RawPiece> parse() {
    expect("{");
    std::vector<RawPiece> Pieces;
    if (!accept("}")) {
      do
        Pieces.push_back(piece());
      while (accept(";"));
      expect("}");
    }
    if (peek().K != Token::End)
      error("unexpected trailing input");
    return Pieces;
  }

  [[noreturn]] void error(const std::string &Msg) const { throw ParseError(Msg, peek().Line, peek().Column); }

private:
  const Token &peek(size_t Ahead = 0) const { return Toks[std::min(Idx + Ahead, Toks.size() - 1)]; }
  bool isPunct(const char *P, size_t Ahead = 0) const {
    return peek(Ahead).K == Token::Punct && peek(Ahead).Text == P;
  }
  bool accept(const char *P) {
    if (!isPunct(P))
      return false;
    ++Idx;
    return true;
  }
  void expect(const char *P) {
    if (!accept(P))
      error(std::string("expected '") + P + "'");
  }
  bool acceptWord(const char *W) {
    if (peek().K == Token::Ident && peek().Text == W) {
      ++Idx;
      return true;
    }
    return false;
  }

  /// Tuple entries are either fresh dimension names or expressions over
  /// already bound dimensions (which introduce an equality).
  Space tuple(RawPiece &P, unsigned Offset) {
    std::string Name;
    if (peek().K == Token::Ident && isPunct("[", 1)) {
      Name = peek().Text;
      ++Idx;
    }
    expect("[");
    std::vector<std::string> Dims;
    std::vector<std::pair<unsigned, AffineExpr>> Defined;
    if (!accept("]")) {
      do {
        unsigned Index = Offset + static_cast<unsigned>(Dims.size());
        bool Fresh = peek().K == Token::Ident && !Bound.count(peek().Text) && (isPunct(",", 1) || isPunct("]", 1));
        if (Fresh) {
          Dims.push_back(peek().Text);
          Bound[peek().Text] = Index;
          ++Idx;
        } else {
          Defined.emplace_back(Index, expr());
          Dims.push_back("_" + std::to_string(Index));
        }
      } while (accept(","));
      expect("]");
    }
    for (auto &[Index, E] : Defined)
      P.Eqs.push_back(AffineExpr::dim(Index) - E);
    return Space(Name, Dims);
  }

  RawPiece piece() {
    RawPiece P;
    Bound.clear();
    P.In = tuple(P, 0);
    if (accept("->")) {
      P.IsMap = true;
      P.Out = tuple(P, P.In.arity());
    }
    if (accept(":")) {
      do
        chain(P);
      while (acceptWord("and"));
    }
    return P;
  }

  /// e0 op e1 op e2 ...
  void chain(RawPiece &P) {
    AffineExpr Left = expr();
    bool Any = false;
    while (true) {
      std::string Op;
      for (const char *C : {"<=", ">=", "==", "<", ">", "="})
        if (isPunct(C)) {
          Op = C;
          break;
        }
      if (Op.empty())
        break;
      ++Idx;
      AffineExpr Right = expr();
      if (Op == "<=")
        P.Ineqs.push_back(Right - Left);
      else if (Op == "<")
        P.Ineqs.push_back(Right - Left - AffineExpr(1));
      else if (Op == ">=")
        P.Ineqs.push_back(Left - Right);
      else if (Op == ">")
        P.Ineqs.push_back(Left - Right - AffineExpr(1));
      else
        P.Eqs.push_back(Left - Right);
      Left = std::move(Right);
      Any = true;
    }
    if (!Any)
      error("expected a comparison");
  }

  AffineExpr expr() {
    AffineExpr E;
    if (accept("-"))
      E = -term();
    else
      E = term();
    while (true) {
      if (accept("+"))
        E += term();
      else if (accept("-"))
        E -= term();
      else
        return E;
    }
  }

  AffineExpr term() {
    AffineExpr E = factor();
    while (true) {
      if (accept("*")) {
        AffineExpr R = factor();
        if (R.isConstant())
          E *= R.Constant;
        else if (E.isConstant())
          E = R * E.Constant;
        else
          error("non-affine product");
      } else if (accept("%")) {
        E = AffineExpr::modOf(E, divisor());
      } else {
        return E;
      }
    }
  }

  Int divisor() {
    if (peek().K != Token::Number || peek().Value <= 0)
      error("expected a positive integer divisor");
    return Toks[Idx++].Value;
  }

  AffineExpr factor() {
    const Token &T = peek();
    if (T.K == Token::Number) {
      ++Idx;
      return AffineExpr(T.Value);
    }
    if (accept("(")) {
      AffineExpr E = expr();
      expect(")");
      return E;
    }
    if (accept("-"))
      return -factor();
    if (T.K == Token::Ident) {
      if (T.Text == "floor" && isPunct("(", 1)) {
        Idx += 2;
        AffineExpr Inner = expr();
        expect("/");
        Int D = divisor();
        expect(")");
        return AffineExpr::floorOf(Inner, D);
      }
      auto It = Bound.find(T.Text);
      if (It == Bound.end())
        error("unknown identifier '" + T.Text + "'");
      ++Idx;
      return AffineExpr::dim(It->second);
    }
    error("expected an expression");
  }

  std::vector<Token> Toks;
  size_t Idx = 0;
  std::map<std::string, unsigned> Bound;
};

} // namespace

Set parseSet(std::string_view Text) {
  Parser P(Text);
  std::vector<BasicSet> Pieces;
  for (RawPiece &R : P.parse()) {
    if (R.IsMap)
      throw ParseError("expected a set, found a map piece", 1, 1);
    Set S = Set::fromConstraints(R.In, R.Eqs, R.Ineqs);
    Pieces.insert(Pieces.end(), S.pieces().begin(), S.pieces().end());
  }
  return Set::fromPieces(std::move(Pieces));
}

Map parseMap(std::string_view Text) {
  Parser P(Text);
  std::vector<BasicMap> Pieces;
  for (RawPiece &R : P.parse()) {
    if (!R.IsMap)
      throw ParseError("expected a map, found a set piece", 1, 1);
    Map M = Map::fromConstraints(R.In, R.Out, R.Eqs, R.Ineqs);
    Pieces.insert(Pieces.end(), M.pieces().begin(), M.pieces().end());
  }
  return Map::fromPieces(std::move(Pieces));
}

} // namespace lrumodel::poly
