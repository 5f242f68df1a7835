#pragma once

#include <memory>
#include <string>
#include <vector>

#include "shader/builtins.hpp"
#include "shader/types.hpp"

namespace procam::shader {

enum class Op : std::uint8_t {
  Add,
  Sub,
  Mul,
  Div,
  Less,
  Greater,
  LessEq,
  GreaterEq,
  Equal,
  NotEqual,
  And,
  Or,
  Xor,
  Neg,
  Plus,
  Not,
  Assign,
  AddAssign,
  SubAssign,
  MulAssign,
  DivAssign,
  PreInc,
  PreDec,
  PostInc,
  PostDec,
};

enum class Storage : std::uint8_t { Local, Global, Uniform };

enum class UniformId : std::uint8_t {
  Resolution,
  Time,
  TimeDelta,
  Frame,
  Mouse,
  Channel0,
  Channel1,
  Channel2,
  Channel3,
};

struct Expr {
  enum class Kind : std::uint8_t {
    FloatLit,
    IntLit,
    BoolLit,
    Var,
    Unary,
    Binary,
    Ternary,
    Assign,
    IncDec,
    Call,
    Construct,
    Swizzle,
    Index,
  };

  Kind kind;
  int line = 0;
  int column = 0;
  int depth = 1;  // tree height, bounded by the parser

  // Literals.
  float fval = 0.0F;
  std::int32_t ival = 0;

  std::string name;  // identifier, callee or swizzle text
  Op op = Op::Add;
  Type ctor_type = Type::Void;  // Construct
  std::vector<std::unique_ptr<Expr>> args;

  // Filled in by the checker.
  Type type = Type::Void;
  bool is_const = false;
  Storage storage = Storage::Local;
  int slot = 0;  // local/global slot or UniformId
  int function = -1;
  Builtin builtin = Builtin::None;
  int swizzle_len = 0;
  std::array<std::int8_t, 4> swizzle{};
};

using ExprPtr = std::unique_ptr<Expr>;

struct Declarator {
  std::string name;
  int line = 0;
  int column = 0;
  ExprPtr init;
  int slot = 0;  // checker
};

struct Stmt {
  enum class Kind : std::uint8_t { Block, Decl, Expr, If, For, Return, Empty };

  Kind kind;
  int line = 0;
  int column = 0;

  std::vector<std::unique_ptr<Stmt>> body;  // Block
  bool is_const = false;                    // Decl
  Type decl_type = Type::Void;              // Decl
  std::vector<Declarator> decls;            // Decl
  ExprPtr expr;                             // Expr, Return value, If/For condition
  std::unique_ptr<Stmt> then_branch;        // If, For body
  std::unique_ptr<Stmt> else_branch;        // If
  std::unique_ptr<Stmt> init;               // For
  ExprPtr step;                             // For
};

using StmtPtr = std::unique_ptr<Stmt>;

enum class ParamQualifier : std::uint8_t { In, Out, InOut };

struct Param {
  ParamQualifier qualifier = ParamQualifier::In;
  bool is_const = false;
  Type type = Type::Void;
  std::string name;
  int line = 0;
  int column = 0;
};

struct Function {
  Type return_type = Type::Void;
  std::string name;
  std::vector<Param> params;
  StmtPtr body;  // null for a prototype
  int line = 0;
  int column = 0;

  int frame_size = 0;  // checker: local slots including params
};

struct GlobalDecl {
  bool is_const = false;
  Type type = Type::Void;
  Declarator decl;
};

struct TranslationUnit {
  std::vector<GlobalDecl> globals;
  std::vector<Function> functions;
};

}  // namespace procam::shader
