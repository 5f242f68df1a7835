#include "shader/interpreter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace procam::shader {
namespace {

float lane(Type t, const Value& v, int k) { return t == Type::Float ? v.f[0] : v.f[k]; }

std::int32_t wrap_add(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) + static_cast<std::uint32_t>(b));
}
std::int32_t wrap_sub(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) - static_cast<std::uint32_t>(b));
}
std::int32_t wrap_mul(std::int32_t a, std::int32_t b) {
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(a) * static_cast<std::uint32_t>(b));
}
std::int32_t safe_div(std::int32_t a, std::int32_t b) {
  if (b == 0) {
    return 0;
  }
  if (a == std::numeric_limits<std::int32_t>::min() && b == -1) {
    return a;
  }
  return a / b;
}

std::int32_t float_to_int(float f) {
  if (std::isnan(f)) {
    return 0;
  }
  if (f >= 2147483647.0F) {
    return std::numeric_limits<std::int32_t>::max();
  }
  if (f <= -2147483648.0F) {
    return std::numeric_limits<std::int32_t>::min();
  }
  return static_cast<std::int32_t>(f);
}

// First scalar of a value as float / int / bool.
float scalar_as_float(Type t, const Value& v) {
  if (t == Type::Int) return static_cast<float>(v.i);
  if (t == Type::Bool) return v.i != 0 ? 1.0F : 0.0F;
  return v.f[0];
}

std::int32_t scalar_as_int(Type t, const Value& v) {
  if (t == Type::Int || t == Type::Bool) return t == Type::Bool ? (v.i != 0 ? 1 : 0) : v.i;
  return float_to_int(v.f[0]);
}

bool scalar_as_bool(Type t, const Value& v) {
  if (t == Type::Int || t == Type::Bool) return v.i != 0;
  return v.f[0] != 0.0F;
}

bool equal_values(Type t, const Value& a, const Value& b) {
  if (t == Type::Int || t == Type::Bool) {
    return a.i == b.i;
  }
  for (int k = 0; k < component_count(t); ++k) {
    if (!(a.f[k] == b.f[k])) {
      return false;
    }
  }
  return true;
}

std::int64_t wrap_texel(std::int64_t i, int extent, ChannelWrap wrap) {
  if (wrap == ChannelWrap::Clamp) {
    return std::clamp<std::int64_t>(i, 0, extent - 1);
  }
  const std::int64_t m = i % extent;
  return m < 0 ? m + extent : m;
}

}  // namespace

std::array<float, 4> sample_texture(const BoundChannel& channel, float u, float v) {
  const RgbImage& image = *channel.image;
  const int w = image.width();
  const int h = image.height();
  float x = u * static_cast<float>(w) - 0.5F;
  float y = (1.0F - v) * static_cast<float>(h) - 0.5F;
  if (!std::isfinite(x) || !std::isfinite(y)) {
    return {0.0F, 0.0F, 0.0F, 1.0F};
  }
  constexpr float kLimit = 16777216.0F;
  x = std::clamp(x, -kLimit, kLimit);
  y = std::clamp(y, -kLimit, kLimit);
  const float fx0 = std::floor(x);
  const float fy0 = std::floor(y);
  const float ax = x - fx0;
  const float ay = y - fy0;
  const auto ix = static_cast<std::int64_t>(fx0);
  const auto iy = static_cast<std::int64_t>(fy0);
  const auto x0 = static_cast<int>(wrap_texel(ix, w, channel.wrap));
  const auto x1 = static_cast<int>(wrap_texel(ix + 1, w, channel.wrap));
  const auto y0 = static_cast<int>(wrap_texel(iy, h, channel.wrap));
  const auto y1 = static_cast<int>(wrap_texel(iy + 1, h, channel.wrap));
  const Rgb8 c00 = image.at(x0, y0);
  const Rgb8 c10 = image.at(x1, y0);
  const Rgb8 c01 = image.at(x0, y1);
  const Rgb8 c11 = image.at(x1, y1);
  const auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
    const float top = (a / 255.0F) * (1.0F - ax) + (b / 255.0F) * ax;
    const float bottom = (c / 255.0F) * (1.0F - ax) + (d / 255.0F) * ax;
    return top * (1.0F - ay) + bottom * ay;
  };
  return {mix(c00.r, c10.r, c01.r, c11.r), mix(c00.g, c10.g, c01.g, c11.g),
          mix(c00.b, c10.b, c01.b, c11.b), 1.0F};
}

Value arithmetic(Op op, Type ta, const Value& a, Type tb, const Value& b, Type result) {
  Value r;
  if (ta == Type::Int) {
    switch (op) {
      case Op::Add: r.i = wrap_add(a.i, b.i); break;
      case Op::Sub: r.i = wrap_sub(a.i, b.i); break;
      case Op::Mul: r.i = wrap_mul(a.i, b.i); break;
      default: r.i = safe_div(a.i, b.i); break;
    }
    return r;
  }
  if (op == Op::Mul) {
    if (is_matrix(ta) && ta == tb) {
      const int n = matrix_dim(ta);
      for (int c = 0; c < n; ++c) {
        for (int row = 0; row < n; ++row) {
          float s = a.f[row] * b.f[c * n];
          for (int k = 1; k < n; ++k) {
            s += a.f[k * n + row] * b.f[c * n + k];
          }
          r.f[c * n + row] = s;
        }
      }
      return r;
    }
    if (is_vector(ta) && is_matrix(tb)) {
      const int n = matrix_dim(tb);
      for (int c = 0; c < n; ++c) {
        float s = a.f[0] * b.f[c * n];
        for (int k = 1; k < n; ++k) {
          s += a.f[k] * b.f[c * n + k];
        }
        r.f[c] = s;
      }
      return r;
    }
    if (is_matrix(ta) && is_vector(tb)) {
      const int n = matrix_dim(ta);
      for (int row = 0; row < n; ++row) {
        float s = a.f[row] * b.f[0];
        for (int k = 1; k < n; ++k) {
          s += a.f[k * n + row] * b.f[k];
        }
        r.f[row] = s;
      }
      return r;
    }
  }
  const int n = component_count(result);
  for (int k = 0; k < n; ++k) {
    const float x = lane(ta, a, k);
    const float y = lane(tb, b, k);
    switch (op) {
      case Op::Add: r.f[k] = x + y; break;
      case Op::Sub: r.f[k] = x - y; break;
      case Op::Mul: r.f[k] = x * y; break;
      default: r.f[k] = x / y; break;
    }
  }
  return r;
}

Interpreter::Interpreter(const Program& program, const FrameInputs* inputs,
                         std::uint64_t iteration_limit)
    : program_(program), inputs_(inputs), iteration_limit_(iteration_limit) {
  stack_.resize(static_cast<std::size_t>(std::max(program.stack_slots, 1)));
}

void Interpreter::ensure_stack(std::size_t top) {
  if (top > stack_.size()) {
    stack_.resize(std::max(top, stack_.size() * 2));
  }
}

Value Interpreter::eval_constant(const Expr& e) {
  base_ = 0;
  top_ = 0;
  return eval(e);
}

Value Interpreter::run_main(float frag_x, float frag_y) {
  iterations_ = 0;
  const Function& fn = program_.unit.functions[program_.main_function];
  base_ = 0;
  top_ = static_cast<std::size_t>(fn.frame_size);
  ensure_stack(top_);
  std::fill(stack_.begin(), stack_.begin() + static_cast<std::ptrdiff_t>(top_), Value{});
  stack_[1].f[0] = frag_x;
  stack_[1].f[1] = frag_y;
  for (const auto& s : fn.body->body) {
    if (exec(*s) == Flow::Return) {
      break;
    }
  }
  return stack_[0];
}

Interpreter::Flow Interpreter::exec(const Stmt& s) {
  switch (s.kind) {
    case Stmt::Kind::Block:
      for (const auto& child : s.body) {
        if (exec(*child) == Flow::Return) {
          return Flow::Return;
        }
      }
      return Flow::Normal;
    case Stmt::Kind::Decl:
      for (const auto& d : s.decls) {
        stack_[base_ + static_cast<std::size_t>(d.slot)] = d.init ? eval(*d.init) : Value{};
      }
      return Flow::Normal;
    case Stmt::Kind::Expr:
      eval(*s.expr);
      return Flow::Normal;
    case Stmt::Kind::Empty:
      return Flow::Normal;
    case Stmt::Kind::If:
      if (eval(*s.expr).i != 0) {
        return exec(*s.then_branch);
      }
      if (s.else_branch) {
        return exec(*s.else_branch);
      }
      return Flow::Normal;
    case Stmt::Kind::For:
      exec(*s.init);
      while (eval(*s.expr).i != 0) {
        if (++iterations_ > iteration_limit_) {
          throw RuntimeError(Diagnostic{
              Severity::Error, s.line, s.column,
              "loop iteration limit of " + std::to_string(iteration_limit_) +
                  " per pixel exceeded"});
        }
        if (exec(*s.then_branch) == Flow::Return) {
          return Flow::Return;
        }
        eval(*s.step);
      }
      return Flow::Normal;
    case Stmt::Kind::Return:
      return_value_ = s.expr ? eval(*s.expr) : Value{};
      return Flow::Return;
  }
  return Flow::Normal;
}

Value Interpreter::eval(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::FloatLit: {
      Value v;
      v.f[0] = e.fval;
      return v;
    }
    case Expr::Kind::IntLit:
    case Expr::Kind::BoolLit: {
      Value v;
      v.i = e.ival;
      return v;
    }
    case Expr::Kind::Var:
      switch (e.storage) {
        case Storage::Local:
          return stack_[base_ + static_cast<std::size_t>(e.slot)];
        case Storage::Global:
          return program_.globals[static_cast<std::size_t>(e.slot)];
        case Storage::Uniform: {
          const auto id = static_cast<UniformId>(e.slot);
          switch (id) {
            case UniformId::Resolution: return inputs_->resolution;
            case UniformId::Time: return inputs_->time;
            case UniformId::TimeDelta: return inputs_->time_delta;
            case UniformId::Frame: return inputs_->frame;
            case UniformId::Mouse: return inputs_->mouse;
            default: {
              Value v;
              v.i = e.slot - static_cast<int>(UniformId::Channel0);
              return v;
            }
          }
        }
      }
      return {};
    case Expr::Kind::Unary: {
      Value v = eval(*e.args[0]);
      if (e.op == Op::Not) {
        v.i = v.i != 0 ? 0 : 1;
      } else if (e.op == Op::Neg) {
        if (e.type == Type::Int) {
          v.i = wrap_sub(0, v.i);
        } else {
          for (int k = 0; k < component_count(e.type); ++k) {
            v.f[k] = -v.f[k];
          }
        }
      }
      return v;
    }
    case Expr::Kind::Binary: {
      const Expr& l = *e.args[0];
      const Expr& r = *e.args[1];
      if (e.op == Op::And) {
        Value v;
        v.i = (eval(l).i != 0 && eval(r).i != 0) ? 1 : 0;
        return v;
      }
      if (e.op == Op::Or) {
        Value v;
        v.i = (eval(l).i != 0 || eval(r).i != 0) ? 1 : 0;
        return v;
      }
      const Value a = eval(l);
      const Value b = eval(r);
      Value v;
      switch (e.op) {
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
          return arithmetic(e.op, l.type, a, r.type, b, e.type);
        case Op::Xor:
          v.i = (a.i != 0) != (b.i != 0) ? 1 : 0;
          return v;
        case Op::Equal:
          v.i = equal_values(l.type, a, b) ? 1 : 0;
          return v;
        case Op::NotEqual:
          v.i = equal_values(l.type, a, b) ? 0 : 1;
          return v;
        default:
          break;
      }
      bool result = false;
      if (l.type == Type::Int) {
        switch (e.op) {
          case Op::Less: result = a.i < b.i; break;
          case Op::Greater: result = a.i > b.i; break;
          case Op::LessEq: result = a.i <= b.i; break;
          default: result = a.i >= b.i; break;
        }
      } else {
        switch (e.op) {
          case Op::Less: result = a.f[0] < b.f[0]; break;
          case Op::Greater: result = a.f[0] > b.f[0]; break;
          case Op::LessEq: result = a.f[0] <= b.f[0]; break;
          default: result = a.f[0] >= b.f[0]; break;
        }
      }
      v.i = result ? 1 : 0;
      return v;
    }
    case Expr::Kind::Ternary:
      return eval(*e.args[0]).i != 0 ? eval(*e.args[1]) : eval(*e.args[2]);
    case Expr::Kind::Assign:
      return eval_assign(e);
    case Expr::Kind::IncDec:
      return eval_incdec(e);
    case Expr::Kind::Call:
      return eval_call(e);
    case Expr::Kind::Construct:
      return eval_construct(e);
    case Expr::Kind::Swizzle: {
      const Value base = eval(*e.args[0]);
      Value v;
      for (int k = 0; k < e.swizzle_len; ++k) {
        v.f[k] = base.f[e.swizzle[k]];
      }
      return v;
    }
    case Expr::Kind::Index: {
      const Expr& base_expr = *e.args[0];
      const Value base = eval(base_expr);
      const std::int32_t index = eval(*e.args[1]).i;
      Value v;
      if (is_vector(base_expr.type)) {
        if (index >= 0 && index < component_count(base_expr.type)) {
          v.f[0] = base.f[index];
        }
      } else {
        const int n = matrix_dim(base_expr.type);
        if (index >= 0 && index < n) {
          for (int k = 0; k < n; ++k) {
            v.f[k] = base.f[index * n + k];
          }
        }
      }
      return v;
    }
  }
  return {};
}

Interpreter::LRef Interpreter::resolve(const Expr& e) {
  LRef ref;
  switch (e.kind) {
    case Expr::Kind::Var:
      ref.slot = base_ + static_cast<std::size_t>(e.slot);
      return ref;
    case Expr::Kind::Swizzle: {
      const LRef inner = resolve(*e.args[0]);
      ref = inner;
      ref.whole = false;
      ref.n = e.swizzle_len;
      for (int k = 0; k < e.swizzle_len; ++k) {
        ref.comps[k] = inner.whole ? e.swizzle[k] : inner.comps[e.swizzle[k]];
      }
      return ref;
    }
    case Expr::Kind::Index: {
      const Expr& base_expr = *e.args[0];
      const LRef inner = resolve(base_expr);
      const std::int32_t index = eval(*e.args[1]).i;
      ref = inner;
      ref.whole = false;
      const bool vector = is_vector(base_expr.type);
      const int extent = vector ? component_count(base_expr.type) : matrix_dim(base_expr.type);
      if (index < 0 || index >= extent) {
        ref.valid = false;
        return ref;
      }
      const int width = vector ? 1 : extent;
      ref.n = width;
      for (int k = 0; k < width; ++k) {
        const int flat = vector ? index : index * extent + k;
        ref.comps[k] = inner.whole ? static_cast<std::int8_t>(flat) : inner.comps[flat];
      }
      return ref;
    }
    default:
      return ref;  // unreachable for checked programs
  }
}

Value Interpreter::read(const LRef& ref, Type type) const {
  if (!ref.valid) {
    return {};
  }
  const Value& base = stack_[ref.slot];
  if (ref.whole) {
    (void)type;
    return base;
  }
  Value v;
  for (int k = 0; k < ref.n; ++k) {
    v.f[k] = base.f[ref.comps[k]];
  }
  return v;
}

void Interpreter::write(const LRef& ref, Type type, const Value& v) {
  (void)type;
  if (!ref.valid) {
    return;
  }
  Value& base = stack_[ref.slot];
  if (ref.whole) {
    base = v;
    return;
  }
  for (int k = 0; k < ref.n; ++k) {
    base.f[ref.comps[k]] = v.f[k];
  }
}

Value Interpreter::eval_assign(const Expr& e) {
  const Expr& target = *e.args[0];
  const Expr& source = *e.args[1];
  const LRef ref = resolve(target);
  const Value rhs = eval(source);
  Value result = rhs;
  if (e.op != Op::Assign) {
    Op op = Op::Div;
    switch (e.op) {
      case Op::AddAssign: op = Op::Add; break;
      case Op::SubAssign: op = Op::Sub; break;
      case Op::MulAssign: op = Op::Mul; break;
      default: break;
    }
    result = arithmetic(op, target.type, read(ref, target.type), source.type, rhs, target.type);
  }
  write(ref, target.type, result);
  return result;
}

Value Interpreter::eval_incdec(const Expr& e) {
  const Expr& target = *e.args[0];
  const LRef ref = resolve(target);
  const Value old = read(ref, target.type);
  const bool inc = e.op == Op::PreInc || e.op == Op::PostInc;
  Value updated = old;
  if (target.type == Type::Int) {
    updated.i = inc ? wrap_add(old.i, 1) : wrap_sub(old.i, 1);
  } else {
    for (int k = 0; k < component_count(target.type); ++k) {
      updated.f[k] = inc ? old.f[k] + 1.0F : old.f[k] - 1.0F;
    }
  }
  write(ref, target.type, updated);
  return (e.op == Op::PreInc || e.op == Op::PreDec) ? updated : old;
}

Value Interpreter::eval_call(const Expr& e) {
  if (e.builtin == Builtin::Texture) {
    const Value channel = eval(*e.args[0]);
    const Value uv = eval(*e.args[1]);
    const auto& bound = inputs_->channels[static_cast<std::size_t>(channel.i)];
    const auto rgba = sample_texture(bound, uv.f[0], uv.f[1]);
    Value v;
    std::copy(rgba.begin(), rgba.end(), v.f.begin());
    return v;
  }
  if (e.builtin != Builtin::None) {
    std::array<Value, 3> values;
    std::array<Type, 3> types{};
    const std::size_t n = e.args.size();
    for (std::size_t k = 0; k < n; ++k) {
      values[k] = eval(*e.args[k]);
      types[k] = e.args[k]->type;
    }
    return eval_builtin(e.builtin, std::span<const Type>(types.data(), n),
                        std::span<const Value>(values.data(), n));
  }

  const Function& fn = program_.unit.functions[static_cast<std::size_t>(e.function)];
  const std::size_t frame = top_;
  const auto frame_size = static_cast<std::size_t>(fn.frame_size);
  top_ += frame_size;
  ensure_stack(top_);
  std::fill(stack_.begin() + static_cast<std::ptrdiff_t>(frame),
            stack_.begin() + static_cast<std::ptrdiff_t>(top_), Value{});

  // Arguments are evaluated in the caller's frame; nested calls land above
  // the pending callee frame.
  std::array<LRef, 8> small_refs;
  std::vector<LRef> big_refs;
  LRef* refs = small_refs.data();
  if (fn.params.size() > small_refs.size()) {
    big_refs.resize(fn.params.size());
    refs = big_refs.data();
  }
  for (std::size_t k = 0; k < fn.params.size(); ++k) {
    const auto& p = fn.params[k];
    const Expr& arg = *e.args[k];
    if (p.qualifier == ParamQualifier::In) {
      stack_[frame + k] = eval(arg);
    } else {
      refs[k] = resolve(arg);
      if (p.qualifier == ParamQualifier::InOut) {
        stack_[frame + k] = read(refs[k], arg.type);
      }
    }
  }

  const std::size_t saved_base = base_;
  base_ = frame;
  return_value_ = Value{};
  for (const auto& s : fn.body->body) {
    if (exec(*s) == Flow::Return) {
      break;
    }
  }
  const Value result = return_value_;
  base_ = saved_base;

  for (std::size_t k = 0; k < fn.params.size(); ++k) {
    if (fn.params[k].qualifier != ParamQualifier::In) {
      write(refs[k], e.args[k]->type, stack_[frame + k]);
    }
  }
  top_ = frame;
  return result;
}

Value Interpreter::eval_construct(const Expr& e) {
  const Type target = e.ctor_type;
  Value v;
  if (is_scalar(target)) {
    const Expr& arg = *e.args[0];
    const Value a = eval(arg);
    const Type src = is_scalar(arg.type) ? arg.type : Type::Float;
    if (target == Type::Float) {
      v.f[0] = scalar_as_float(src, a);
    } else if (target == Type::Int) {
      v.i = scalar_as_int(src, a);
    } else {
      v.i = scalar_as_bool(src, a) ? 1 : 0;
    }
    return v;
  }

  if (e.args.size() == 1) {
    const Expr& arg = *e.args[0];
    const Value a = eval(arg);
    if (is_scalar(arg.type)) {
      const float s = scalar_as_float(arg.type, a);
      if (is_vector(target)) {
        for (int k = 0; k < component_count(target); ++k) {
          v.f[k] = s;
        }
      } else {
        const int n = matrix_dim(target);
        for (int k = 0; k < n; ++k) {
          v.f[k * n + k] = s;
        }
      }
      return v;
    }
    if (is_matrix(arg.type) && is_matrix(target)) {
      const int n = matrix_dim(target);
      const int m = matrix_dim(arg.type);
      for (int c = 0; c < n; ++c) {
        for (int r = 0; r < n; ++r) {
          v.f[c * n + r] = (c < m && r < m) ? a.f[c * m + r] : (c == r ? 1.0F : 0.0F);
        }
      }
      return v;
    }
  }

  const int needed = component_count(target);
  int filled = 0;
  for (const auto& arg : e.args) {
    const Value a = eval(*arg);
    if (is_scalar(arg->type)) {
      if (filled < needed) {
        v.f[filled++] = scalar_as_float(arg->type, a);
      }
      continue;
    }
    for (int k = 0; k < component_count(arg->type) && filled < needed; ++k) {
      v.f[filled++] = a.f[k];
    }
  }
  return v;
}

}  // namespace procam::shader
