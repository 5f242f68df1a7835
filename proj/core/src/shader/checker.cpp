#include "shader/checker.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>

namespace procam::shader {
namespace {

struct Symbol {
  Storage storage = Storage::Local;
  Type type = Type::Void;
  int slot = 0;
  bool is_const = false;
  bool loop_counter = false;
};

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

std::string_view op_text(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Less: return "<";
    case Op::Greater: return ">";
    case Op::LessEq: return "<=";
    case Op::GreaterEq: return ">=";
    case Op::Equal: return "==";
    case Op::NotEqual: return "!=";
    case Op::And: return "&&";
    case Op::Or: return "||";
    case Op::Xor: return "^^";
    case Op::Neg: return "-";
    case Op::Plus: return "+";
    case Op::Not: return "!";
    case Op::Assign: return "=";
    case Op::AddAssign: return "+=";
    case Op::SubAssign: return "-=";
    case Op::MulAssign: return "*=";
    case Op::DivAssign: return "/=";
    case Op::PreInc:
    case Op::PostInc: return "++";
    case Op::PreDec:
    case Op::PostDec: return "--";
  }
  return "?";
}

Op arithmetic_of(Op assign) {
  switch (assign) {
    case Op::AddAssign: return Op::Add;
    case Op::SubAssign: return Op::Sub;
    case Op::MulAssign: return Op::Mul;
    default: return Op::Div;
  }
}

/// Result type of an arithmetic operator, or nullopt.
std::optional<Type> arithmetic_result(Op op, Type a, Type b) {
  if (a == Type::Int && b == Type::Int) {
    return Type::Int;
  }
  if (!is_float_based(a) || !is_float_based(b)) {
    return std::nullopt;
  }
  if (a == b) {
    return a;  // component-wise, or matrix product for mat * mat
  }
  if (a == Type::Float) {
    return b;
  }
  if (b == Type::Float) {
    return a;
  }
  if (op == Op::Mul) {
    if (is_vector(a) && is_matrix(b) && component_count(a) == matrix_dim(b)) {
      return a;
    }
    if (is_matrix(a) && is_vector(b) && matrix_dim(a) == component_count(b)) {
      return b;
    }
  }
  return std::nullopt;
}

int swizzle_index(char c) {
  switch (c) {
    case 'x': case 'r': case 's': return 0;
    case 'y': case 'g': case 't': return 1;
    case 'z': case 'b': case 'p': return 2;
    case 'w': case 'a': case 'q': return 3;
    default: return -1;
  }
}

int swizzle_set(char c) {
  static constexpr std::string_view kSets[] = {"xyzw", "rgba", "stpq"};
  for (int s = 0; s < 3; ++s) {
    if (kSets[s].find(c) != std::string_view::npos) {
      return s;
    }
  }
  return -1;
}

std::optional<UniformId> find_uniform(std::string_view name) {
  static const std::map<std::string_view, UniformId> table{
      {"iResolution", UniformId::Resolution}, {"iTime", UniformId::Time},
      {"iTimeDelta", UniformId::TimeDelta},   {"iFrame", UniformId::Frame},
      {"iMouse", UniformId::Mouse},           {"iChannel0", UniformId::Channel0},
      {"iChannel1", UniformId::Channel1},     {"iChannel2", UniformId::Channel2},
      {"iChannel3", UniformId::Channel3},
  };
  const auto it = table.find(name);
  if (it == table.end()) {
    return std::nullopt;
  }
  return it->second;
}

Type uniform_type(UniformId id) {
  switch (id) {
    case UniformId::Resolution: return Type::Vec3;
    case UniformId::Time:
    case UniformId::TimeDelta: return Type::Float;
    case UniformId::Frame: return Type::Int;
    case UniformId::Mouse: return Type::Vec4;
    default: return Type::Sampler2D;
  }
}

std::string signature(std::string_view name, const std::vector<Type>& args) {
  std::string s(name);
  s += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i > 0) {
      s += ", ";
    }
    s += type_name(args[i]);
  }
  return s + ')';
}

class Checker {
 public:
  explicit Checker(TranslationUnit& unit) : unit_(unit) {}

  CheckResult run() {
    declare_functions();
    check_globals();
    for (std::size_t i = 0; i < unit_.functions.size(); ++i) {
      if (unit_.functions[i].body) {
        check_function(static_cast<int>(i));
      }
    }
    check_entry_point();
    check_recursion();
    if (result_.errors.empty() && result_.main_function >= 0) {
      std::map<int, int> memo;
      result_.stack_slots = stack_need(result_.main_function, memo);
    }
    return std::move(result_);
  }

 private:
  void error(int line, int column, std::string message) {
    result_.errors.push_back(Diagnostic{Severity::Error, line, column, std::move(message)});
  }
  void error(const Expr& e, std::string message) { error(e.line, e.column, std::move(message)); }

  // Functions.

  void declare_functions() {
    for (std::size_t i = 0; i < unit_.functions.size(); ++i) {
      auto& fn = unit_.functions[i];
      if (find_builtin(fn.name) != Builtin::None) {
        error(fn.line, fn.column, "cannot redefine built-in function " + quoted(fn.name));
        continue;
      }
      if (find_uniform(fn.name)) {
        error(fn.line, fn.column, "cannot redefine built-in " + quoted(fn.name));
        continue;
      }
      if (fn.return_type == Type::Sampler2D) {
        error(fn.line, fn.column, "functions cannot return sampler2D");
      }
      bool params_ok = true;
      for (const auto& p : fn.params) {
        if (p.type == Type::Void) {
          error(p.line, p.column, "parameter cannot have type void");
          params_ok = false;
        } else if (p.type == Type::Sampler2D && p.qualifier != ParamQualifier::In) {
          error(p.line, p.column, "sampler2D parameters must be 'in'");
          params_ok = false;
        } else if (p.is_const && p.qualifier != ParamQualifier::In) {
          error(p.line, p.column, "const parameters must be 'in'");
          params_ok = false;
        }
        if (fn.body && p.name.empty()) {
          error(p.line, p.column, "parameter of " + quoted(fn.name) + " needs a name");
          params_ok = false;
        }
      }
      if (!params_ok) {
        continue;
      }
      auto& overloads = functions_[fn.name];
      bool duplicate = false;
      for (int& other : overloads) {
        auto& o = unit_.functions[other];
        if (!same_params(o, fn)) {
          continue;
        }
        if (o.return_type != fn.return_type) {
          error(fn.line, fn.column,
                "conflicting return type for " + quoted(fn.name) + " (previously " +
                    std::string(type_name(o.return_type)) + ")");
          duplicate = true;
        } else if (!qualifiers_match(o, fn)) {
          error(fn.line, fn.column, "conflicting parameter qualifiers for " + quoted(fn.name));
          duplicate = true;
        } else if (o.body && fn.body) {
          error(fn.line, fn.column, "redefinition of " + quoted(fn.name));
          duplicate = true;
        } else if (fn.body) {
          // The definition replaces an earlier prototype.
          other = static_cast<int>(i);
          duplicate = true;
        } else {
          duplicate = true;  // redundant prototype
        }
      }
      if (!duplicate) {
        overloads.push_back(static_cast<int>(i));
      }
    }
  }

  static bool same_params(const Function& a, const Function& b) {
    if (a.params.size() != b.params.size()) {
      return false;
    }
    for (std::size_t k = 0; k < a.params.size(); ++k) {
      if (a.params[k].type != b.params[k].type) {
        return false;
      }
    }
    return true;
  }

  static bool qualifiers_match(const Function& a, const Function& b) {
    for (std::size_t k = 0; k < a.params.size(); ++k) {
      if (a.params[k].qualifier != b.params[k].qualifier) {
        return false;
      }
    }
    return true;
  }

  void check_entry_point() {
    const auto it = functions_.find("mainImage");
    if (it == functions_.end()) {
      error(1, 1, "missing entry point 'void mainImage(out vec4 fragColor, in vec2 fragCoord)'");
      return;
    }
    for (int index : it->second) {
      const auto& fn = unit_.functions[index];
      const bool ok = fn.return_type == Type::Void && fn.params.size() == 2 &&
                      fn.params[0].type == Type::Vec4 &&
                      fn.params[0].qualifier == ParamQualifier::Out &&
                      fn.params[1].type == Type::Vec2 &&
                      fn.params[1].qualifier == ParamQualifier::In;
      if (!ok) {
        error(fn.line, fn.column,
              "mainImage must be declared as 'void mainImage(out vec4 fragColor, in vec2 "
              "fragCoord)'");
      } else if (!fn.body) {
        error(fn.line, fn.column, "mainImage is declared but never defined");
      } else {
        result_.main_function = index;
      }
    }
  }

  void check_recursion() {
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> state(unit_.functions.size(), 0);
    std::set<int> reported;
    std::function<void(int)> visit = [&](int f) {
      state[f] = 1;
      for (const auto& [callee, where] : calls_[f]) {
        if (state[callee] == 1) {
          if (reported.insert(callee).second) {
            error(where->line, where->column,
                  "recursion is not allowed (" + quoted(unit_.functions[callee].name) +
                      " is reachable from itself)");
          }
        } else if (state[callee] == 0) {
          visit(callee);
        }
      }
      state[f] = 2;
    };
    for (std::size_t f = 0; f < unit_.functions.size(); ++f) {
      if (state[f] == 0) {
        visit(static_cast<int>(f));
      }
    }
  }

  int stack_need(int f, std::map<int, int>& memo) {
    if (const auto it = memo.find(f); it != memo.end()) {
      return it->second;
    }
    int deepest = 0;
    for (const auto& [callee, where] : calls_[f]) {
      deepest = std::max(deepest, stack_need(callee, memo));
    }
    const int need = unit_.functions[f].frame_size + deepest;
    memo[f] = need;
    return need;
  }

  // Scopes.

  Symbol* lookup(std::string_view name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (const auto found = it->find(std::string(name)); found != it->end()) {
        return &found->second;
      }
    }
    if (const auto it = globals_.find(std::string(name)); it != globals_.end()) {
      return &it->second;
    }
    return nullptr;
  }

  bool declare_local(const std::string& name, int line, int column, Symbol symbol) {
    if (find_uniform(name)) {
      error(line, column, "cannot redeclare built-in " + quoted(name));
      return false;
    }
    auto& scope = scopes_.back();
    if (scope.contains(name)) {
      error(line, column, "redefinition of " + quoted(name));
      return false;
    }
    scope.emplace(name, symbol);
    return true;
  }

  // Globals.

  void check_globals() {
    int slot = 0;
    for (auto& g : unit_.globals) {
      auto& d = g.decl;
      if (!g.is_const) {
        error(d.line, d.column,
              "global variable " + quoted(d.name) + " must be const (only const globals are "
              "supported)");
        continue;
      }
      if (g.type == Type::Void || g.type == Type::Sampler2D) {
        error(d.line, d.column,
              "cannot declare a variable of type " + std::string(type_name(g.type)));
        continue;
      }
      if (!d.init) {
        error(d.line, d.column, "const " + quoted(d.name) + " needs an initializer");
        continue;
      }
      const auto t = check_expr(*d.init);
      if (t && *t != g.type) {
        error(*d.init, "cannot initialize " + std::string(type_name(g.type)) + " " +
                           quoted(d.name) + " with " + std::string(type_name(*t)));
      } else if (t && !d.init->is_const) {
        error(*d.init, "initializer of const " + quoted(d.name) + " is not a constant expression");
      }
      if (find_uniform(d.name)) {
        error(d.line, d.column, "cannot redeclare built-in " + quoted(d.name));
        continue;
      }
      if (globals_.contains(d.name)) {
        error(d.line, d.column, "redefinition of " + quoted(d.name));
        continue;
      }
      d.slot = slot++;
      globals_.emplace(d.name, Symbol{Storage::Global, g.type, d.slot, true, false});
    }
  }

  // Function bodies.

  void check_function(int index) {
    auto& fn = unit_.functions[index];
    current_ = index;
    next_slot_ = 0;
    max_slot_ = 0;
    scopes_.clear();
    scopes_.emplace_back();
    for (const auto& p : fn.params) {
      const Symbol symbol{Storage::Local, p.type, next_slot_++, p.is_const, false};
      if (!p.name.empty()) {
        declare_local(p.name, p.line, p.column, symbol);
      }
    }
    max_slot_ = next_slot_;
    // The body's outer block shares the parameter scope.
    for (auto& s : fn.body->body) {
      check_stmt(*s);
    }
    fn.frame_size = max_slot_;
    scopes_.clear();
    current_ = -1;
  }

  int allocate_slot() {
    const int slot = next_slot_++;
    max_slot_ = std::max(max_slot_, next_slot_);
    return slot;
  }

  void check_block(Stmt& s) {
    scopes_.emplace_back();
    const int saved = next_slot_;
    for (auto& child : s.body) {
      check_stmt(*child);
    }
    next_slot_ = saved;
    scopes_.pop_back();
  }

  // Checks a sub-statement in its own scope (if/for bodies).
  void check_scoped(Stmt& s) {
    if (s.kind == Stmt::Kind::Block) {
      check_block(s);
      return;
    }
    scopes_.emplace_back();
    const int saved = next_slot_;
    check_stmt(s);
    next_slot_ = saved;
    scopes_.pop_back();
  }

  void check_decl(Stmt& s) {
    if (s.decl_type == Type::Void || s.decl_type == Type::Sampler2D) {
      error(s.line, s.column,
            "cannot declare a variable of type " + std::string(type_name(s.decl_type)));
      return;
    }
    for (auto& d : s.decls) {
      if (d.init) {
        const auto t = check_expr(*d.init);
        if (t && *t != s.decl_type) {
          error(*d.init, "cannot initialize " + std::string(type_name(s.decl_type)) + " " +
                             quoted(d.name) + " with " + std::string(type_name(*t)));
        } else if (t && s.is_const && !d.init->is_const) {
          error(*d.init,
                "initializer of const " + quoted(d.name) + " is not a constant expression");
        }
      } else if (s.is_const) {
        error(d.line, d.column, "const " + quoted(d.name) + " needs an initializer");
      }
      d.slot = allocate_slot();
      declare_local(d.name, d.line, d.column,
                    Symbol{Storage::Local, s.decl_type, d.slot, s.is_const, false});
    }
  }

  void check_condition(Expr& e, std::string_view what) {
    const auto t = check_expr(e);
    if (t && *t != Type::Bool) {
      error(e, std::string(what) + " condition must be bool, not " + std::string(type_name(*t)));
    }
  }

  void check_stmt(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Block:
        check_block(s);
        break;
      case Stmt::Kind::Decl:
        check_decl(s);
        break;
      case Stmt::Kind::Expr:
        check_expr(*s.expr);
        break;
      case Stmt::Kind::Empty:
        break;
      case Stmt::Kind::If:
        check_condition(*s.expr, "if");
        check_scoped(*s.then_branch);
        if (s.else_branch) {
          check_scoped(*s.else_branch);
        }
        break;
      case Stmt::Kind::For:
        check_for(s);
        break;
      case Stmt::Kind::Return: {
        const auto& fn = unit_.functions[current_];
        if (!s.expr) {
          if (fn.return_type != Type::Void) {
            error(s.line, s.column, "non-void function " + quoted(fn.name) + " must return a " +
                                        std::string(type_name(fn.return_type)));
          }
          break;
        }
        const auto t = check_expr(*s.expr);
        if (fn.return_type == Type::Void) {
          error(s.line, s.column, "void function " + quoted(fn.name) + " cannot return a value");
        } else if (t && *t != fn.return_type) {
          error(*s.expr, "cannot return " + std::string(type_name(*t)) + " from function " +
                             quoted(fn.name) + " returning " +
                             std::string(type_name(fn.return_type)));
        }
        break;
      }
    }
  }

  static bool is_counter(const Expr& e, const std::string& name) {
    return e.kind == Expr::Kind::Var && e.name == name;
  }

  void check_for(Stmt& s) {
    scopes_.emplace_back();
    const int saved = next_slot_;

    std::string counter;
    auto& init = *s.init;
    if (init.kind == Stmt::Kind::Decl && init.decls.size() == 1 && !init.is_const &&
        (init.decl_type == Type::Int || init.decl_type == Type::Float) && init.decls[0].init) {
      check_decl(init);
      if (init.decls[0].init->is_const) {
        counter = init.decls[0].name;
      } else {
        error(*init.decls[0].init, "for-loop counter must start at a constant value");
      }
    } else {
      error(init.line, init.column,
            "for-loop must declare a single int or float counter with an initial value");
      if (init.kind != Stmt::Kind::Empty) {
        check_stmt(init);
      }
    }

    if (!s.expr) {
      error(s.line, s.column, "for-loop needs a condition");
    } else {
      check_condition(*s.expr, "for-loop");
      const auto& c = *s.expr;
      const bool comparison = c.kind == Expr::Kind::Binary &&
                              (c.op == Op::Less || c.op == Op::Greater || c.op == Op::LessEq ||
                               c.op == Op::GreaterEq || c.op == Op::Equal ||
                               c.op == Op::NotEqual);
      const bool bounded =
          comparison && !counter.empty() &&
          ((is_counter(*c.args[0], counter) && c.args[1]->is_const) ||
           (is_counter(*c.args[1], counter) && c.args[0]->is_const));
      if (!counter.empty() && !bounded) {
        error(c, "for-loop condition must compare the counter " + quoted(counter) +
                     " with a constant");
      }
    }

    if (!s.step) {
      error(s.line, s.column, "for-loop needs a step expression");
    } else {
      check_expr(*s.step);
      const auto& st = *s.step;
      const bool inc = st.kind == Expr::Kind::IncDec && is_counter(*st.args[0], counter);
      const bool add = st.kind == Expr::Kind::Assign &&
                       (st.op == Op::AddAssign || st.op == Op::SubAssign) &&
                       is_counter(*st.args[0], counter) && st.args[1]->is_const;
      if (!counter.empty() && !inc && !add) {
        error(st, "for-loop step must be ++, --, += constant or -= constant on " +
                      quoted(counter));
      }
    }

    Symbol* symbol = counter.empty() ? nullptr : lookup(counter);
    if (symbol != nullptr) {
      symbol->loop_counter = true;
    }
    check_scoped(*s.then_branch);
    scopes_.pop_back();
    next_slot_ = saved;
  }

  // Expressions. nullopt means an error was already reported.

  std::optional<Type> check_expr(Expr& e) {
    auto t = check_expr_inner(e);
    if (t) {
      e.type = *t;
    }
    return t;
  }

  bool children_const(const Expr& e) const {
    for (const auto& a : e.args) {
      if (!a->is_const) {
        return false;
      }
    }
    return true;
  }

  std::optional<Type> check_expr_inner(Expr& e) {
    switch (e.kind) {
      case Expr::Kind::FloatLit:
        e.is_const = true;
        return Type::Float;
      case Expr::Kind::IntLit:
        e.is_const = true;
        return Type::Int;
      case Expr::Kind::BoolLit:
        e.is_const = true;
        return Type::Bool;
      case Expr::Kind::Var:
        return check_var(e);
      case Expr::Kind::Unary:
        return check_unary(e);
      case Expr::Kind::Binary:
        return check_binary(e);
      case Expr::Kind::Ternary:
        return check_ternary(e);
      case Expr::Kind::Assign:
        return check_assign(e);
      case Expr::Kind::IncDec:
        return check_incdec(e);
      case Expr::Kind::Call:
        return check_call(e);
      case Expr::Kind::Construct:
        return check_construct(e);
      case Expr::Kind::Swizzle:
        return check_swizzle(e);
      case Expr::Kind::Index:
        return check_index(e);
    }
    return std::nullopt;
  }

  std::optional<Type> check_var(Expr& e) {
    if (const auto id = find_uniform(e.name); id && lookup(e.name) == nullptr) {
      e.storage = Storage::Uniform;
      e.slot = static_cast<int>(*id);
      if (*id >= UniformId::Channel0) {
        result_.channels_used[static_cast<int>(*id) - static_cast<int>(UniformId::Channel0)] =
            true;
      }
      return uniform_type(*id);
    }
    const Symbol* symbol = lookup(e.name);
    if (symbol == nullptr) {
      error(e, "undeclared identifier " + quoted(e.name));
      return std::nullopt;
    }
    e.storage = symbol->storage;
    e.slot = symbol->slot;
    e.is_const = symbol->is_const;
    return symbol->type;
  }

  std::optional<Type> check_unary(Expr& e) {
    const auto t = check_expr(*e.args[0]);
    if (!t) {
      return std::nullopt;
    }
    e.is_const = children_const(e);
    if (e.op == Op::Not) {
      if (*t != Type::Bool) {
        error(e, "operator '!' needs a bool operand, not " + std::string(type_name(*t)));
        return std::nullopt;
      }
      return Type::Bool;
    }
    if (*t != Type::Int && !is_float_based(*t)) {
      error(e, "unary " + quoted(op_text(e.op)) + " cannot be applied to " +
                   std::string(type_name(*t)));
      return std::nullopt;
    }
    return t;
  }

  std::optional<Type> check_binary(Expr& e) {
    const auto a = check_expr(*e.args[0]);
    const auto b = check_expr(*e.args[1]);
    if (!a || !b) {
      return std::nullopt;
    }
    e.is_const = children_const(e);
    const auto mismatch = [&]() -> std::optional<Type> {
      error(e, "no operator " + quoted(op_text(e.op)) + " for " + std::string(type_name(*a)) +
                   " and " + std::string(type_name(*b)));
      return std::nullopt;
    };
    switch (e.op) {
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        const auto r = arithmetic_result(e.op, *a, *b);
        return r ? r : mismatch();
      }
      case Op::Less:
      case Op::Greater:
      case Op::LessEq:
      case Op::GreaterEq:
        if (*a == *b && (*a == Type::Int || *a == Type::Float)) {
          return Type::Bool;
        }
        return mismatch();
      case Op::Equal:
      case Op::NotEqual:
        if (*a == *b && *a != Type::Void && *a != Type::Sampler2D) {
          return Type::Bool;
        }
        return mismatch();
      case Op::And:
      case Op::Or:
      case Op::Xor:
        if (*a == Type::Bool && *b == Type::Bool) {
          return Type::Bool;
        }
        return mismatch();
      default:
        return mismatch();
    }
  }

  std::optional<Type> check_ternary(Expr& e) {
    check_condition(*e.args[0], "ternary");
    const auto a = check_expr(*e.args[1]);
    const auto b = check_expr(*e.args[2]);
    if (!a || !b) {
      return std::nullopt;
    }
    e.is_const = children_const(e);
    if (*a != *b) {
      error(e, "ternary branches have different types (" + std::string(type_name(*a)) +
                   " and " + std::string(type_name(*b)) + ")");
      return std::nullopt;
    }
    if (*a == Type::Sampler2D) {
      error(e, "ternary cannot select a sampler2D");
      return std::nullopt;
    }
    return a;
  }

  // Reports and returns false if `e` cannot be written.
  bool check_lvalue(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::Var: {
        if (e.storage == Storage::Uniform) {
          error(e, "cannot assign to built-in uniform " + quoted(e.name));
          return false;
        }
        if (e.storage == Storage::Global) {
          error(e, "cannot assign to const " + quoted(e.name));
          return false;
        }
        const Symbol* symbol = lookup(e.name);
        if (symbol != nullptr && symbol->loop_counter) {
          error(e, "cannot modify loop counter " + quoted(e.name) + " inside the loop body");
          return false;
        }
        if (e.is_const) {
          error(e, "cannot assign to const " + quoted(e.name));
          return false;
        }
        return true;
      }
      case Expr::Kind::Swizzle: {
        for (int i = 0; i < e.swizzle_len; ++i) {
          for (int j = i + 1; j < e.swizzle_len; ++j) {
            if (e.swizzle[i] == e.swizzle[j]) {
              error(e, "swizzle " + quoted(e.name) + " repeats a component and cannot be "
                       "assigned");
              return false;
            }
          }
        }
        return check_lvalue(*e.args[0]);
      }
      case Expr::Kind::Index:
        return check_lvalue(*e.args[0]);
      default:
        error(e, "expression is not assignable");
        return false;
    }
  }

  std::optional<Type> check_assign(Expr& e) {
    const auto a = check_expr(*e.args[0]);
    const auto b = check_expr(*e.args[1]);
    if (!a || !b) {
      return std::nullopt;
    }
    if (!check_lvalue(*e.args[0])) {
      return std::nullopt;
    }
    if (e.op == Op::Assign) {
      if (*a != *b) {
        error(e, "cannot assign " + std::string(type_name(*b)) + " to " +
                     std::string(type_name(*a)));
        return std::nullopt;
      }
      return a;
    }
    const auto r = arithmetic_result(arithmetic_of(e.op), *a, *b);
    if (!r || *r != *a) {
      error(e, "no operator " + quoted(op_text(e.op)) + " for " + std::string(type_name(*a)) +
                   " and " + std::string(type_name(*b)));
      return std::nullopt;
    }
    return a;
  }

  std::optional<Type> check_incdec(Expr& e) {
    const auto t = check_expr(*e.args[0]);
    if (!t) {
      return std::nullopt;
    }
    if (*t != Type::Int && !is_float_based(*t)) {
      error(e, quoted(op_text(e.op)) + " cannot be applied to " + std::string(type_name(*t)));
      return std::nullopt;
    }
    if (!check_lvalue(*e.args[0])) {
      return std::nullopt;
    }
    return t;
  }

  std::optional<std::vector<Type>> check_args(Expr& e) {
    std::vector<Type> types;
    bool ok = true;
    for (auto& a : e.args) {
      const auto t = check_expr(*a);
      if (!t) {
        ok = false;
      } else {
        types.push_back(*t);
      }
    }
    if (!ok) {
      return std::nullopt;
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
      if (types[i] == Type::Void) {
        error(*e.args[i], "void value used as an argument");
        return std::nullopt;
      }
    }
    return types;
  }

  std::optional<Type> check_call(Expr& e) {
    const auto types = check_args(e);
    if (!types) {
      return std::nullopt;
    }
    if (const auto fn = find_builtin(e.name); fn != Builtin::None) {
      const auto r = builtin_result(fn, *types);
      if (!r) {
        error(e, "no matching overload for " + signature(e.name, *types));
        return std::nullopt;
      }
      e.builtin = fn;
      e.is_const = fn != Builtin::Texture && children_const(e);
      return r;
    }
    const auto it = functions_.find(e.name);
    if (it == functions_.end()) {
      error(e, "undeclared function " + quoted(e.name));
      return std::nullopt;
    }
    for (int index : it->second) {
      const auto& fn = unit_.functions[index];
      if (fn.params.size() != types->size()) {
        continue;
      }
      bool match = true;
      for (std::size_t k = 0; k < types->size(); ++k) {
        match = match && fn.params[k].type == (*types)[k];
      }
      if (!match) {
        continue;
      }
      if (!fn.body) {
        error(e, "function " + quoted(e.name) + " is declared but never defined");
        return std::nullopt;
      }
      for (std::size_t k = 0; k < types->size(); ++k) {
        if (fn.params[k].qualifier != ParamQualifier::In && !check_lvalue(*e.args[k])) {
          return std::nullopt;
        }
      }
      e.function = index;
      if (current_ >= 0) {
        calls_[current_].emplace_back(index, &e);
      }
      return fn.return_type;
    }
    error(e, "no matching overload for " + signature(e.name, *types));
    return std::nullopt;
  }

  std::optional<Type> check_construct(Expr& e) {
    const auto types = check_args(e);
    if (!types) {
      return std::nullopt;
    }
    const Type target = e.ctor_type;
    e.is_const = children_const(e);
    if (target == Type::Void || target == Type::Sampler2D) {
      error(e, "cannot construct a value of type " + std::string(type_name(target)));
      return std::nullopt;
    }
    if (types->empty()) {
      error(e, std::string(type_name(target)) + " constructor needs arguments");
      return std::nullopt;
    }
    for (std::size_t i = 0; i < types->size(); ++i) {
      if ((*types)[i] == Type::Sampler2D) {
        error(*e.args[i], "sampler2D cannot be converted");
        return std::nullopt;
      }
    }
    if (is_scalar(target)) {
      if (types->size() != 1) {
        error(e, std::string(type_name(target)) + " constructor takes one argument");
        return std::nullopt;
      }
      return target;
    }
    if (types->size() == 1 && (is_scalar((*types)[0]) || is_matrix((*types)[0]))) {
      return target;  // splat, diagonal, matrix resize or matrix flatten
    }
    const int needed = component_count(target);
    int supplied = 0;
    for (std::size_t i = 0; i < types->size(); ++i) {
      const Type t = (*types)[i];
      if (is_matrix(t) && is_matrix(target)) {
        error(*e.args[i], "a matrix argument must be the only argument of a matrix constructor");
        return std::nullopt;
      }
      if (supplied >= needed) {
        error(*e.args[i], "too many arguments to " + std::string(type_name(target)) +
                              " constructor");
        return std::nullopt;
      }
      supplied += component_count(t);
    }
    if (supplied < needed) {
      error(e, "not enough components for " + std::string(type_name(target)) + " constructor (" +
                   std::to_string(supplied) + " of " + std::to_string(needed) + ")");
      return std::nullopt;
    }
    return target;
  }

  std::optional<Type> check_swizzle(Expr& e) {
    const auto t = check_expr(*e.args[0]);
    if (!t) {
      return std::nullopt;
    }
    e.is_const = children_const(e);
    if (!is_vector(*t)) {
      error(e, "cannot select field " + quoted(e.name) + " of " + std::string(type_name(*t)));
      return std::nullopt;
    }
    const int dim = component_count(*t);
    if (e.name.empty() || e.name.size() > 4) {
      error(e, "invalid swizzle " + quoted(e.name));
      return std::nullopt;
    }
    const int set = swizzle_set(e.name[0]);
    for (std::size_t i = 0; i < e.name.size(); ++i) {
      const int index = swizzle_index(e.name[i]);
      if (index < 0 || swizzle_set(e.name[i]) != set) {
        error(e, "invalid swizzle " + quoted(e.name));
        return std::nullopt;
      }
      if (index >= dim) {
        error(e, "swizzle " + quoted(e.name) + " is out of range for " +
                     std::string(type_name(*t)));
        return std::nullopt;
      }
      e.swizzle[i] = static_cast<std::int8_t>(index);
    }
    e.swizzle_len = static_cast<int>(e.name.size());
    return vector_type(e.swizzle_len);
  }

  std::optional<Type> check_index(Expr& e) {
    const auto base = check_expr(*e.args[0]);
    const auto index = check_expr(*e.args[1]);
    if (!base || !index) {
      return std::nullopt;
    }
    e.is_const = children_const(e);
    if (*index != Type::Int) {
      error(*e.args[1], "index must be int, not " + std::string(type_name(*index)));
      return std::nullopt;
    }
    int extent = 0;
    Type result = Type::Void;
    if (is_vector(*base)) {
      extent = component_count(*base);
      result = Type::Float;
    } else if (is_matrix(*base)) {
      extent = matrix_dim(*base);
      result = vector_type(extent);
    } else {
      error(e, "cannot index a value of type " + std::string(type_name(*base)));
      return std::nullopt;
    }
    const Expr& ix = *e.args[1];
    if (ix.kind == Expr::Kind::IntLit && (ix.ival < 0 || ix.ival >= extent)) {
      error(ix, "index " + std::to_string(ix.ival) + " is out of range for " +
                    std::string(type_name(*base)));
      return std::nullopt;
    }
    if (ix.kind == Expr::Kind::Unary && ix.op == Op::Neg &&
        ix.args[0]->kind == Expr::Kind::IntLit) {
      error(ix, "negative index");
      return std::nullopt;
    }
    return result;
  }

  TranslationUnit& unit_;
  CheckResult result_;
  std::unordered_map<std::string, std::vector<int>> functions_;
  std::unordered_map<std::string, Symbol> globals_;
  std::vector<std::unordered_map<std::string, Symbol>> scopes_;
  std::map<int, std::vector<std::pair<int, const Expr*>>> calls_;
  int current_ = -1;
  int next_slot_ = 0;
  int max_slot_ = 0;
};

}  // namespace

CheckResult check(TranslationUnit& unit) { return Checker(unit).run(); }

}  // namespace procam::shader
