#include "shader/parser.hpp"

#include <algorithm>
#include <string>

namespace procam::shader {
namespace {

constexpr int kMaxDepth = 256;

struct SyntaxError {
  Diagnostic diagnostic;
};

std::string quoted(std::string_view text) { return "'" + std::string(text) + "'"; }

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  TranslationUnit run() {
    TranslationUnit unit;
    while (peek().kind != Tok::End) {
      external(unit);
    }
    return unit;
  }

 private:
  // Token access.

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) {
      ++pos_;
    }
    return t;
  }
  bool accept(Tok kind) {
    if (at(kind)) {
      take();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const Token& at_token, std::string message) const {
    throw SyntaxError{Diagnostic{Severity::Error, at_token.line, at_token.column,
                                 std::move(message)}};
  }

  [[noreturn]] void unexpected(std::string_view wanted) const {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Reserved:
        fail(t, quoted(t.text) + " is not supported");
      case Tok::BadOperator:
        fail(t, "operator " + quoted(t.text) + " is not supported");
      case Tok::End:
        fail(t, "expected " + std::string(wanted) + " before end of input");
      default:
        fail(t, "expected " + std::string(wanted) + " before " + quoted(t.text));
    }
  }

  const Token& expect(Tok kind, std::string_view wanted) {
    if (!at(kind)) {
      unexpected(wanted);
    }
    return take();
  }

  // A missing ';' is reported right after the previous token.
  void expect_semicolon() {
    if (at(Tok::Semicolon)) {
      take();
      return;
    }
    if (at(Tok::Reserved) || at(Tok::BadOperator) || pos_ == 0) {
      unexpected("';'");
    }
    const Token& prev = tokens_[pos_ - 1];
    fail(Token{Tok::End, {}, prev.line, prev.column + static_cast<int>(prev.text.size())},
         "expected ';' after " + quoted(prev.text));
  }

  std::string_view identifier() {
    if (!at(Tok::Identifier)) {
      unexpected("identifier");
    }
    return take().text;
  }

  Type type_name() {
    if (!is_type_keyword(peek().kind)) {
      unexpected("type name");
    }
    return keyword_type(take().kind);
  }

  void reject_array() const {
    if (at(Tok::LBracket)) {
      fail(peek(), "arrays are not supported");
    }
  }

  struct DepthGuard {
    DepthGuard(Parser& p, const Token& at) : parser(p) {
      if (++parser.depth_ > kMaxDepth) {
        parser.fail(at, "nesting too deep");
      }
    }
    ~DepthGuard() { --parser.depth_; }
    DepthGuard(const DepthGuard&) = delete;
    DepthGuard& operator=(const DepthGuard&) = delete;
    Parser& parser;
  };

  // Declarations.

  void external(TranslationUnit& unit) {
    const Token& start = peek();
    if (at(Tok::KwIn) || at(Tok::KwOut) || at(Tok::KwInOut)) {
      fail(start, "storage qualifier " + quoted(start.text) + " is not allowed at global scope");
    }
    const bool is_const = accept(Tok::KwConst);
    const Type type = type_name();
    const Token& name = peek();
    const auto name_text = identifier();
    if (at(Tok::LParen)) {
      if (is_const) {
        fail(start, "functions cannot be declared const");
      }
      unit.functions.push_back(function(type, name, name_text));
      return;
    }
    const Token* decl_name = &name;
    while (true) {
      reject_array();
      GlobalDecl global;
      global.is_const = is_const;
      global.type = type;
      global.decl.name = std::string(decl_name->text);
      global.decl.line = decl_name->line;
      global.decl.column = decl_name->column;
      if (accept(Tok::Assign)) {
        global.decl.init = assignment();
      }
      unit.globals.push_back(std::move(global));
      if (!accept(Tok::Comma)) {
        break;
      }
      decl_name = &peek();
      identifier();
    }
    expect_semicolon();
  }

  Function function(Type return_type, const Token& name, std::string_view name_text) {
    Function fn;
    fn.return_type = return_type;
    fn.name = std::string(name_text);
    fn.line = name.line;
    fn.column = name.column;
    expect(Tok::LParen, "'('");
    if (at(Tok::KwVoid) && peek(1).kind == Tok::RParen) {
      take();
    } else if (!at(Tok::RParen)) {
      while (true) {
        fn.params.push_back(param());
        if (!accept(Tok::Comma)) {
          break;
        }
      }
    }
    expect(Tok::RParen, "')'");
    if (accept(Tok::Semicolon)) {
      return fn;  // prototype
    }
    if (!at(Tok::LBrace)) {
      unexpected("'{'");
    }
    fn.body = block();
    return fn;
  }

  Param param() {
    Param p;
    const Token& start = peek();
    p.line = start.line;
    p.column = start.column;
    p.is_const = accept(Tok::KwConst);
    if (accept(Tok::KwIn)) {
      p.qualifier = ParamQualifier::In;
    } else if (accept(Tok::KwOut)) {
      p.qualifier = ParamQualifier::Out;
    } else if (accept(Tok::KwInOut)) {
      p.qualifier = ParamQualifier::InOut;
    }
    p.type = type_name();
    if (at(Tok::Identifier)) {
      const Token& name = take();
      p.name = std::string(name.text);
      p.line = name.line;
      p.column = name.column;
    } else if (!at(Tok::Comma) && !at(Tok::RParen)) {
      unexpected("parameter name");
    }
    reject_array();
    return p;
  }

  // Statements.

  StmtPtr make_stmt(Stmt::Kind kind, const Token& at_token) {
    auto s = std::make_unique<Stmt>();
    s->kind = kind;
    s->line = at_token.line;
    s->column = at_token.column;
    return s;
  }

  StmtPtr block() {
    const Token& open = expect(Tok::LBrace, "'{'");
    DepthGuard guard(*this, open);
    auto s = make_stmt(Stmt::Kind::Block, open);
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) {
        unexpected("'}'");
      }
      s->body.push_back(statement());
    }
    take();
    return s;
  }

  bool starts_declaration() const {
    if (at(Tok::KwConst)) {
      return true;
    }
    return is_type_keyword(peek().kind) && peek(1).kind != Tok::LParen;
  }

  StmtPtr statement() {
    const Token& start = peek();
    DepthGuard guard(*this, start);
    switch (start.kind) {
      case Tok::LBrace:
        return block();
      case Tok::KwIf:
        return if_statement();
      case Tok::KwFor:
        return for_statement();
      case Tok::KwReturn: {
        take();
        auto s = make_stmt(Stmt::Kind::Return, start);
        if (!at(Tok::Semicolon)) {
          s->expr = expression();
        }
        expect_semicolon();
        return s;
      }
      case Tok::Semicolon:
        take();
        return make_stmt(Stmt::Kind::Empty, start);
      case Tok::Reserved:
        fail(start, quoted(start.text) + " is not supported");
      case Tok::KwIn:
      case Tok::KwOut:
      case Tok::KwInOut:
        fail(start, "storage qualifier " + quoted(start.text) + " is not allowed here");
      default:
        break;
    }
    if (starts_declaration()) {
      return declaration();
    }
    auto s = make_stmt(Stmt::Kind::Expr, start);
    s->expr = expression();
    expect_semicolon();
    return s;
  }

  StmtPtr declaration() {
    const Token& start = peek();
    auto s = make_stmt(Stmt::Kind::Decl, start);
    s->is_const = accept(Tok::KwConst);
    s->decl_type = type_name();
    while (true) {
      const Token& name = peek();
      Declarator d;
      d.name = std::string(identifier());
      d.line = name.line;
      d.column = name.column;
      reject_array();
      if (accept(Tok::Assign)) {
        d.init = assignment();
      }
      s->decls.push_back(std::move(d));
      if (!accept(Tok::Comma)) {
        break;
      }
    }
    expect_semicolon();
    return s;
  }

  StmtPtr if_statement() {
    const Token& start = take();
    auto s = make_stmt(Stmt::Kind::If, start);
    expect(Tok::LParen, "'('");
    s->expr = expression();
    expect(Tok::RParen, "')'");
    s->then_branch = statement();
    if (accept(Tok::KwElse)) {
      s->else_branch = statement();
    }
    return s;
  }

  StmtPtr for_statement() {
    const Token& start = take();
    auto s = make_stmt(Stmt::Kind::For, start);
    expect(Tok::LParen, "'('");
    if (at(Tok::Semicolon)) {
      s->init = make_stmt(Stmt::Kind::Empty, take());
    } else if (starts_declaration()) {
      s->init = declaration();
    } else {
      const Token& init_start = peek();
      s->init = make_stmt(Stmt::Kind::Expr, init_start);
      s->init->expr = expression();
      expect_semicolon();
    }
    if (!at(Tok::Semicolon)) {
      s->expr = expression();
    }
    expect_semicolon();
    if (!at(Tok::RParen)) {
      s->step = expression();
    }
    expect(Tok::RParen, "')'");
    s->then_branch = statement();
    return s;
  }

  // Expressions.

  ExprPtr make_expr(Expr::Kind kind, const Token& at_token) {
    auto e = std::make_unique<Expr>();
    e->kind = kind;
    e->line = at_token.line;
    e->column = at_token.column;
    return e;
  }

  void adopt(Expr& parent, ExprPtr child) {
    parent.depth = std::max(parent.depth, child->depth + 1);
    if (parent.depth > kMaxDepth) {
      fail(Token{Tok::End, {}, parent.line, parent.column}, "expression too deeply nested");
    }
    parent.args.push_back(std::move(child));
  }

  ExprPtr expression() {
    auto e = assignment();
    if (at(Tok::Comma)) {
      fail(peek(), "the comma operator is not supported");
    }
    return e;
  }

  static bool assign_op(Tok t, Op& op) {
    switch (t) {
      case Tok::Assign: op = Op::Assign; return true;
      case Tok::PlusAssign: op = Op::AddAssign; return true;
      case Tok::MinusAssign: op = Op::SubAssign; return true;
      case Tok::StarAssign: op = Op::MulAssign; return true;
      case Tok::SlashAssign: op = Op::DivAssign; return true;
      default: return false;
    }
  }

  ExprPtr assignment() {
    DepthGuard guard(*this, peek());
    auto lhs = ternary();
    Op op{};
    if (assign_op(peek().kind, op)) {
      const Token& tok = take();
      auto e = make_expr(Expr::Kind::Assign, tok);
      e->op = op;
      adopt(*e, std::move(lhs));
      adopt(*e, assignment());
      return e;
    }
    return lhs;
  }

  ExprPtr ternary() {
    auto cond = binary(0);
    if (!at(Tok::Question)) {
      return cond;
    }
    const Token& q = take();
    DepthGuard guard(*this, q);
    auto e = make_expr(Expr::Kind::Ternary, q);
    adopt(*e, std::move(cond));
    adopt(*e, expression());
    expect(Tok::Colon, "':'");
    adopt(*e, assignment());
    return e;
  }

  // Binary precedence levels, lowest first.
  static int precedence(Tok t, Op& op) {
    switch (t) {
      case Tok::OrOr: op = Op::Or; return 0;
      case Tok::XorXor: op = Op::Xor; return 1;
      case Tok::AndAnd: op = Op::And; return 2;
      case Tok::EqEq: op = Op::Equal; return 3;
      case Tok::NotEq: op = Op::NotEqual; return 3;
      case Tok::Less: op = Op::Less; return 4;
      case Tok::Greater: op = Op::Greater; return 4;
      case Tok::LessEq: op = Op::LessEq; return 4;
      case Tok::GreaterEq: op = Op::GreaterEq; return 4;
      case Tok::Plus: op = Op::Add; return 5;
      case Tok::Minus: op = Op::Sub; return 5;
      case Tok::Star: op = Op::Mul; return 6;
      case Tok::Slash: op = Op::Div; return 6;
      default: return -1;
    }
  }

  ExprPtr binary(int min_level) {
    if (min_level > 6) {
      return unary();
    }
    auto lhs = binary(min_level + 1);
    while (true) {
      if (at(Tok::BadOperator)) {
        unexpected("operator");
      }
      Op op{};
      if (precedence(peek().kind, op) != min_level) {
        return lhs;
      }
      const Token& tok = take();
      auto e = make_expr(Expr::Kind::Binary, tok);
      e->op = op;
      adopt(*e, std::move(lhs));
      adopt(*e, binary(min_level + 1));
      lhs = std::move(e);
    }
  }

  ExprPtr unary() {
    const Token& tok = peek();
    DepthGuard guard(*this, tok);
    Op op{};
    Expr::Kind kind = Expr::Kind::Unary;
    switch (tok.kind) {
      case Tok::Minus: op = Op::Neg; break;
      case Tok::Plus: op = Op::Plus; break;
      case Tok::Bang: op = Op::Not; break;
      case Tok::PlusPlus: op = Op::PreInc; kind = Expr::Kind::IncDec; break;
      case Tok::MinusMinus: op = Op::PreDec; kind = Expr::Kind::IncDec; break;
      case Tok::BadOperator: unexpected("expression");
      default: return postfix();
    }
    take();
    auto e = make_expr(kind, tok);
    e->op = op;
    adopt(*e, unary());
    return e;
  }

  ExprPtr postfix() {
    auto e = primary();
    while (true) {
      const Token& tok = peek();
      if (accept(Tok::LBracket)) {
        auto index = make_expr(Expr::Kind::Index, tok);
        adopt(*index, std::move(e));
        adopt(*index, expression());
        expect(Tok::RBracket, "']'");
        e = std::move(index);
      } else if (accept(Tok::Dot)) {
        const Token& field = peek();
        auto swizzle = make_expr(Expr::Kind::Swizzle, field);
        swizzle->name = std::string(identifier());
        adopt(*swizzle, std::move(e));
        e = std::move(swizzle);
      } else if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
        take();
        auto inc = make_expr(Expr::Kind::IncDec, tok);
        inc->op = tok.kind == Tok::PlusPlus ? Op::PostInc : Op::PostDec;
        adopt(*inc, std::move(e));
        e = std::move(inc);
      } else {
        return e;
      }
    }
  }

  void call_args(Expr& call) {
    expect(Tok::LParen, "'('");
    if (accept(Tok::RParen)) {
      return;
    }
    while (true) {
      adopt(call, assignment());
      if (!accept(Tok::Comma)) {
        break;
      }
    }
    expect(Tok::RParen, "')'");
  }

  ExprPtr primary() {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::IntLit: {
        take();
        auto e = make_expr(Expr::Kind::IntLit, tok);
        e->ival = tok.ival;
        return e;
      }
      case Tok::FloatLit: {
        take();
        auto e = make_expr(Expr::Kind::FloatLit, tok);
        e->fval = tok.fval;
        return e;
      }
      case Tok::KwTrue:
      case Tok::KwFalse: {
        take();
        auto e = make_expr(Expr::Kind::BoolLit, tok);
        e->ival = tok.kind == Tok::KwTrue ? 1 : 0;
        return e;
      }
      case Tok::Identifier: {
        take();
        if (at(Tok::LParen)) {
          auto e = make_expr(Expr::Kind::Call, tok);
          e->name = std::string(tok.text);
          call_args(*e);
          return e;
        }
        auto e = make_expr(Expr::Kind::Var, tok);
        e->name = std::string(tok.text);
        return e;
      }
      case Tok::LParen: {
        take();
        auto e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      default:
        break;
    }
    if (is_type_keyword(tok.kind)) {
      take();
      if (!at(Tok::LParen)) {
        unexpected("'('");
      }
      auto e = make_expr(Expr::Kind::Construct, tok);
      e->ctor_type = keyword_type(tok.kind);
      e->name = std::string(tok.text);
      call_args(*e);
      return e;
    }
    unexpected("expression");
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

ParseResult parse(std::string_view source) {
  ParseResult result;
  auto lexed = lex(source);
  if (lexed.error) {
    result.error = lexed.error;
    return result;
  }
  try {
    result.unit = Parser(std::move(lexed.tokens)).run();
  } catch (const SyntaxError& e) {
    result.error = e.diagnostic;
    result.unit = {};
  }
  return result;
}

}  // namespace procam::shader
