#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "procam/shaderlang.hpp"
#include "shader/types.hpp"

namespace procam::shader {

enum class Tok : std::uint8_t {
  End,
  Identifier,
  IntLit,
  FloatLit,
  // Keywords.
  KwVoid,
  KwBool,
  KwInt,
  KwFloat,
  KwVec2,
  KwVec3,
  KwVec4,
  KwMat2,
  KwMat3,
  KwMat4,
  KwSampler2D,
  KwTrue,
  KwFalse,
  KwConst,
  KwIn,
  KwOut,
  KwInOut,
  KwIf,
  KwElse,
  KwFor,
  KwReturn,
  Reserved,  // GLSL word outside the subset (while, struct, uniform, ...)
  // Punctuation.
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Dot,
  Comma,
  Semicolon,
  Question,
  Colon,
  Plus,
  Minus,
  Star,
  Slash,
  Bang,
  Less,
  Greater,
  LessEq,
  GreaterEq,
  EqEq,
  NotEq,
  AndAnd,
  OrOr,
  XorXor,
  Assign,
  PlusAssign,
  MinusAssign,
  StarAssign,
  SlashAssign,
  PlusPlus,
  MinusMinus,
  BadOperator,  // valid GLSL operator outside the subset (%, &, <<, ...)
};

struct Token {
  Tok kind = Tok::End;
  std::string_view text;
  int line = 1;
  int column = 1;
  float fval = 0.0F;
  std::int32_t ival = 0;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with Tok::End
  std::optional<Diagnostic> error;
};

/// Stops at the first lexical error.
LexResult lex(std::string_view source);

bool is_type_keyword(Tok t);
Type keyword_type(Tok t);

}  // namespace procam::shader
