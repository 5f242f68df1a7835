#include "shader/lexer.hpp"

#include <charconv>
#include <cstdlib>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>

namespace procam::shader {
namespace {

const std::map<std::string_view, Tok>& keywords() {
  static const std::map<std::string_view, Tok> table{
      {"void", Tok::KwVoid},     {"bool", Tok::KwBool},     {"int", Tok::KwInt},
      {"float", Tok::KwFloat},   {"vec2", Tok::KwVec2},     {"vec3", Tok::KwVec3},
      {"vec4", Tok::KwVec4},     {"mat2", Tok::KwMat2},     {"mat3", Tok::KwMat3},
      {"mat4", Tok::KwMat4},     {"sampler2D", Tok::KwSampler2D},
      {"true", Tok::KwTrue},     {"false", Tok::KwFalse},   {"const", Tok::KwConst},
      {"in", Tok::KwIn},         {"out", Tok::KwOut},       {"inout", Tok::KwInOut},
      {"if", Tok::KwIf},         {"else", Tok::KwElse},     {"for", Tok::KwFor},
      {"return", Tok::KwReturn},
  };
  return table;
}

const std::set<std::string_view>& reserved_words() {
  static const std::set<std::string_view> words{
      "while",     "do",         "break",       "continue",     "switch",
      "case",      "default",    "discard",     "struct",       "uniform",
      "precision", "highp",      "mediump",     "lowp",         "attribute",
      "varying",   "layout",     "centroid",    "flat",         "smooth",
      "invariant", "uint",       "ivec2",       "ivec3",        "ivec4",
      "uvec2",     "uvec3",      "uvec4",       "bvec2",        "bvec3",
      "bvec4",     "mat2x2",     "mat2x3",      "mat2x4",       "mat3x2",
      "mat3x3",    "mat3x4",     "mat4x2",      "mat4x3",       "mat4x4",
      "sampler3D", "samplerCube", "sampler2DShadow", "sampler2DArray",
      "isampler2D", "usampler2D", "buffer",     "shared",       "goto",
  };
  return words;
}

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool digit(char c) { return c >= '0' && c <= '9'; }
bool ident_char(char c) { return ident_start(c) || digit(c); }
bool hex_digit(char c) {
  return digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  LexResult run() {
    LexResult out;
    while (true) {
      skip_space_and_comments();
      if (error_) {
        break;
      }
      if (pos_ >= src_.size()) {
        break;
      }
      auto token = next();
      if (error_) {
        break;
      }
      out.tokens.push_back(token);
    }
    Token end;
    end.kind = Tok::End;
    end.line = line_;
    end.column = column_;
    out.tokens.push_back(end);
    out.error = error_;
    return out;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void fail(int line, int column, std::string message) {
    error_.emplace();
    error_->line = line;
    error_->column = column;
    error_->message = std::move(message);
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && peek() != '\n') {
          advance();
        }
      } else if (c == '/' && peek(1) == '*') {
        const int line = line_;
        const int column = column_;
        advance();
        advance();
        bool closed = false;
        while (pos_ < src_.size()) {
          if (peek() == '*' && peek(1) == '/') {
            advance();
            advance();
            closed = true;
            break;
          }
          advance();
        }
        if (!closed) {
          fail(line, column, "unterminated block comment");
          return;
        }
      } else {
        return;
      }
    }
  }

  Token make(Tok kind, std::size_t start, int line, int column) {
    Token t;
    t.kind = kind;
    t.text = src_.substr(start, pos_ - start);
    t.line = line;
    t.column = column;
    return t;
  }

  Token next() {
    const std::size_t start = pos_;
    const int line = line_;
    const int column = column_;
    const char c = peek();

    if (c == '#') {
      fail(line, column, "preprocessor directives are not supported");
      return {};
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(peek())) {
        advance();
      }
      auto token = make(Tok::Identifier, start, line, column);
      if (const auto it = keywords().find(token.text); it != keywords().end()) {
        token.kind = it->second;
      } else if (reserved_words().contains(token.text)) {
        token.kind = Tok::Reserved;
      }
      return token;
    }
    if (digit(c) || (c == '.' && digit(peek(1)))) {
      return number(start, line, column);
    }

    struct Punct {
      std::string_view text;
      Tok kind;
    };
    // Longest match first.
    static constexpr Punct kPuncts[] = {
        {"<<=", Tok::BadOperator}, {">>=", Tok::BadOperator}, {"++", Tok::PlusPlus},
        {"--", Tok::MinusMinus},   {"<=", Tok::LessEq},       {">=", Tok::GreaterEq},
        {"==", Tok::EqEq},         {"!=", Tok::NotEq},        {"&&", Tok::AndAnd},
        {"||", Tok::OrOr},         {"^^", Tok::XorXor},       {"+=", Tok::PlusAssign},
        {"-=", Tok::MinusAssign},  {"*=", Tok::StarAssign},   {"/=", Tok::SlashAssign},
        {"%=", Tok::BadOperator},  {"&=", Tok::BadOperator},  {"|=", Tok::BadOperator},
        {"^=", Tok::BadOperator},  {"<<", Tok::BadOperator},  {">>", Tok::BadOperator},
        {"(", Tok::LParen},        {")", Tok::RParen},        {"{", Tok::LBrace},
        {"}", Tok::RBrace},        {"[", Tok::LBracket},      {"]", Tok::RBracket},
        {".", Tok::Dot},           {",", Tok::Comma},         {";", Tok::Semicolon},
        {"?", Tok::Question},      {":", Tok::Colon},         {"+", Tok::Plus},
        {"-", Tok::Minus},         {"*", Tok::Star},          {"/", Tok::Slash},
        {"!", Tok::Bang},          {"<", Tok::Less},          {">", Tok::Greater},
        {"=", Tok::Assign},        {"%", Tok::BadOperator},   {"&", Tok::BadOperator},
        {"|", Tok::BadOperator},   {"^", Tok::BadOperator},   {"~", Tok::BadOperator},
    };
    const auto rest = src_.substr(pos_);
    for (const auto& p : kPuncts) {
      if (rest.starts_with(p.text)) {
        for (std::size_t i = 0; i < p.text.size(); ++i) {
          advance();
        }
        return make(p.kind, start, line, column);
      }
    }

    const auto byte = static_cast<unsigned char>(c);
    if (byte >= 0x20 && byte < 0x7F) {
      fail(line, column, std::string("unexpected character '") + c + "'");
    } else {
      fail(line, column, "unexpected byte 0x" + to_hex(byte));
    }
    return {};
  }

  static std::string to_hex(unsigned char b) {
    static constexpr char kDigits[] = "0123456789abcdef";
    return {kDigits[b >> 4], kDigits[b & 15]};
  }

  Token number(std::size_t start, int line, int column) {
    bool is_float = false;
    bool is_hex = false;
    if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      is_hex = true;
      advance();
      advance();
      if (!hex_digit(peek())) {
        fail(line, column, "malformed hexadecimal literal");
        return {};
      }
      while (hex_digit(peek())) {
        advance();
      }
    } else {
      while (digit(peek())) {
        advance();
      }
      if (peek() == '.') {
        is_float = true;
        advance();
        while (digit(peek())) {
          advance();
        }
      }
      if (peek() == 'e' || peek() == 'E') {
        const char sign = peek(1);
        const bool has_sign = sign == '+' || sign == '-';
        if (digit(peek(has_sign ? 2 : 1))) {
          is_float = true;
          advance();
          if (has_sign) {
            advance();
          }
          while (digit(peek())) {
            advance();
          }
        } else {
          fail(line_, column_, "malformed exponent in numeric literal");
          return {};
        }
      }
    }
    const std::size_t digits_end = pos_;
    if (!is_hex && (peek() == 'f' || peek() == 'F')) {
      is_float = true;
      advance();
    } else if (peek() == 'u' || peek() == 'U') {
      fail(line_, column_, "unsigned integers are not supported");
      return {};
    }
    if (ident_char(peek())) {
      fail(line_, column_, "invalid suffix on numeric literal");
      return {};
    }

    auto token = make(is_float ? Tok::FloatLit : Tok::IntLit, start, line, column);
    const auto text = src_.substr(start, digits_end - start);
    if (is_float) {
      // from_chars does not accept a leading '.'.
      std::string buf = text.front() == '.' ? "0" + std::string(text) : std::string(text);
      if (buf.back() == '.') {
        buf += '0';
      }
      float value = 0.0F;
      const auto [ptr, ec] = std::from_chars(buf.data(), buf.data() + buf.size(), value);
      if (ec == std::errc::result_out_of_range) {
        // Overflow goes to infinity, underflow to zero.
        const double wide = std::strtod(buf.c_str(), nullptr);
        value = std::fabs(wide) > std::numeric_limits<float>::max()
                    ? std::numeric_limits<float>::infinity()
                    : 0.0F;
      } else if (ec != std::errc() || ptr != buf.data() + buf.size()) {
        fail(line, column, "malformed floating-point literal");
        return {};
      }
      token.fval = value;
    } else {
      std::uint64_t value = 0;
      const bool octal = !is_hex && text.size() > 1 && text.front() == '0';
      const int base = is_hex ? 16 : (octal ? 8 : 10);
      const auto digits = is_hex ? text.substr(2) : text;
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
      if (ec == std::errc::result_out_of_range || value > 0xFFFFFFFFULL) {
        fail(line, column, "integer literal out of range");
        return {};
      }
      if (ec != std::errc() || ptr != digits.data() + digits.size()) {
        fail(line, column, "malformed integer literal");
        return {};
      }
      token.ival = static_cast<std::int32_t>(static_cast<std::uint32_t>(value));
    }
    return token;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  std::optional<Diagnostic> error_;
};

}  // namespace

LexResult lex(std::string_view source) { return Lexer(source).run(); }

bool is_type_keyword(Tok t) { return t >= Tok::KwVoid && t <= Tok::KwSampler2D; }

Type keyword_type(Tok t) {
  switch (t) {
    case Tok::KwVoid: return Type::Void;
    case Tok::KwBool: return Type::Bool;
    case Tok::KwInt: return Type::Int;
    case Tok::KwFloat: return Type::Float;
    case Tok::KwVec2: return Type::Vec2;
    case Tok::KwVec3: return Type::Vec3;
    case Tok::KwVec4: return Type::Vec4;
    case Tok::KwMat2: return Type::Mat2;
    case Tok::KwMat3: return Type::Mat3;
    case Tok::KwMat4: return Type::Mat4;
    case Tok::KwSampler2D: return Type::Sampler2D;
    default: return Type::Void;
  }
}

}  // namespace procam::shader
