#include "shader/builtins.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace procam::shader {
namespace {

const std::map<std::string_view, Builtin>& builtin_table() {
  static const std::map<std::string_view, Builtin> table{
      {"sin", Builtin::Sin},         {"cos", Builtin::Cos},
      {"tan", Builtin::Tan},         {"asin", Builtin::Asin},
      {"acos", Builtin::Acos},       {"atan", Builtin::Atan},
      {"pow", Builtin::Pow},         {"exp", Builtin::Exp},
      {"log", Builtin::Log},         {"exp2", Builtin::Exp2},
      {"log2", Builtin::Log2},       {"sqrt", Builtin::Sqrt},
      {"inversesqrt", Builtin::InverseSqrt},
      {"abs", Builtin::Abs},         {"sign", Builtin::Sign},
      {"floor", Builtin::Floor},     {"ceil", Builtin::Ceil},
      {"fract", Builtin::Fract},     {"mod", Builtin::Mod},
      {"min", Builtin::Min},         {"max", Builtin::Max},
      {"clamp", Builtin::Clamp},     {"mix", Builtin::Mix},
      {"step", Builtin::Step},       {"smoothstep", Builtin::Smoothstep},
      {"length", Builtin::Length},   {"distance", Builtin::Distance},
      {"dot", Builtin::Dot},         {"cross", Builtin::Cross},
      {"normalize", Builtin::Normalize},
      {"reflect", Builtin::Reflect}, {"texture", Builtin::Texture},
  };
  return table;
}

bool gen(Type t) { return is_gen_type(t); }

// Lane k of argument a, broadcasting floats.
float lane(Type t, const Value& v, int k) { return t == Type::Float ? v.f[0] : v.f[k]; }

float fsign(float x) { return x > 0.0F ? 1.0F : (x < 0.0F ? -1.0F : 0.0F); }
float fmin(float x, float y) { return y < x ? y : x; }
float fmax(float x, float y) { return x < y ? y : x; }
float fclamp(float x, float lo, float hi) { return fmin(fmax(x, lo), hi); }

float dot_n(const Value& a, const Value& b, int n) {
  float s = a.f[0] * b.f[0];
  for (int k = 1; k < n; ++k) {
    s += a.f[k] * b.f[k];
  }
  return s;
}

template <typename F>
Value map1(const Value& a, int n, F f) {
  Value r;
  for (int k = 0; k < n; ++k) {
    r.f[k] = f(a.f[k]);
  }
  return r;
}

}  // namespace

Builtin find_builtin(std::string_view name) {
  const auto& table = builtin_table();
  const auto it = table.find(name);
  return it == table.end() ? Builtin::None : it->second;
}

std::optional<Type> builtin_result(Builtin fn, std::span<const Type> a) {
  const auto n = a.size();
  switch (fn) {
    case Builtin::None:
      return std::nullopt;
    case Builtin::Sin:
    case Builtin::Cos:
    case Builtin::Tan:
    case Builtin::Asin:
    case Builtin::Acos:
    case Builtin::Exp:
    case Builtin::Log:
    case Builtin::Exp2:
    case Builtin::Log2:
    case Builtin::Sqrt:
    case Builtin::InverseSqrt:
    case Builtin::Floor:
    case Builtin::Ceil:
    case Builtin::Fract:
    case Builtin::Normalize:
      if (n == 1 && gen(a[0])) return a[0];
      return std::nullopt;
    case Builtin::Atan:
      if (n == 1 && gen(a[0])) return a[0];
      if (n == 2 && gen(a[0]) && a[1] == a[0]) return a[0];
      return std::nullopt;
    case Builtin::Pow:
    case Builtin::Reflect:
      if (n == 2 && gen(a[0]) && a[1] == a[0]) return a[0];
      return std::nullopt;
    case Builtin::Abs:
    case Builtin::Sign:
      if (n == 1 && (gen(a[0]) || a[0] == Type::Int)) return a[0];
      return std::nullopt;
    case Builtin::Mod:
      if (n == 2 && gen(a[0]) && (a[1] == a[0] || a[1] == Type::Float)) return a[0];
      return std::nullopt;
    case Builtin::Min:
    case Builtin::Max:
      if (n == 2 && gen(a[0]) && (a[1] == a[0] || a[1] == Type::Float)) return a[0];
      if (n == 2 && a[0] == Type::Int && a[1] == Type::Int) return Type::Int;
      return std::nullopt;
    case Builtin::Clamp:
      if (n == 3 && gen(a[0]) &&
          ((a[1] == a[0] && a[2] == a[0]) || (a[1] == Type::Float && a[2] == Type::Float))) {
        return a[0];
      }
      if (n == 3 && a[0] == Type::Int && a[1] == Type::Int && a[2] == Type::Int) return Type::Int;
      return std::nullopt;
    case Builtin::Mix:
      if (n == 3 && gen(a[0]) && a[1] == a[0] && (a[2] == a[0] || a[2] == Type::Float)) {
        return a[0];
      }
      return std::nullopt;
    case Builtin::Step:
      if (n == 2 && gen(a[1]) && (a[0] == a[1] || a[0] == Type::Float)) return a[1];
      return std::nullopt;
    case Builtin::Smoothstep:
      if (n == 3 && gen(a[2]) &&
          ((a[0] == a[2] && a[1] == a[2]) || (a[0] == Type::Float && a[1] == Type::Float))) {
        return a[2];
      }
      return std::nullopt;
    case Builtin::Length:
      if (n == 1 && gen(a[0])) return Type::Float;
      return std::nullopt;
    case Builtin::Distance:
    case Builtin::Dot:
      if (n == 2 && gen(a[0]) && a[1] == a[0]) return Type::Float;
      return std::nullopt;
    case Builtin::Cross:
      if (n == 2 && a[0] == Type::Vec3 && a[1] == Type::Vec3) return Type::Vec3;
      return std::nullopt;
    case Builtin::Texture:
      if (n == 2 && a[0] == Type::Sampler2D && a[1] == Type::Vec2) return Type::Vec4;
      return std::nullopt;
  }
  return std::nullopt;
}

Value eval_builtin(Builtin fn, std::span<const Type> t, std::span<const Value> a) {
  const bool int_args = t[0] == Type::Int;
  const int n = component_count(fn == Builtin::Step || fn == Builtin::Smoothstep ? t.back() : t[0]);
  Value r;
  switch (fn) {
    case Builtin::Sin: return map1(a[0], n, [](float x) { return std::sin(x); });
    case Builtin::Cos: return map1(a[0], n, [](float x) { return std::cos(x); });
    case Builtin::Tan: return map1(a[0], n, [](float x) { return std::tan(x); });
    case Builtin::Asin: return map1(a[0], n, [](float x) { return std::asin(x); });
    case Builtin::Acos: return map1(a[0], n, [](float x) { return std::acos(x); });
    case Builtin::Exp: return map1(a[0], n, [](float x) { return std::exp(x); });
    case Builtin::Log: return map1(a[0], n, [](float x) { return std::log(x); });
    case Builtin::Exp2: return map1(a[0], n, [](float x) { return std::exp2(x); });
    case Builtin::Log2: return map1(a[0], n, [](float x) { return std::log2(x); });
    case Builtin::Sqrt: return map1(a[0], n, [](float x) { return std::sqrt(x); });
    case Builtin::InverseSqrt:
      return map1(a[0], n, [](float x) { return 1.0F / std::sqrt(x); });
    case Builtin::Floor: return map1(a[0], n, [](float x) { return std::floor(x); });
    case Builtin::Ceil: return map1(a[0], n, [](float x) { return std::ceil(x); });
    case Builtin::Fract: return map1(a[0], n, [](float x) { return x - std::floor(x); });
    case Builtin::Atan:
      if (a.size() == 1) {
        return map1(a[0], n, [](float x) { return std::atan(x); });
      }
      for (int k = 0; k < n; ++k) r.f[k] = std::atan2(a[0].f[k], a[1].f[k]);
      return r;
    case Builtin::Pow:
      for (int k = 0; k < n; ++k) r.f[k] = std::pow(a[0].f[k], a[1].f[k]);
      return r;
    case Builtin::Abs:
      if (int_args) {
        // Wraps for INT_MIN like two's-complement hardware.
        r.i = a[0].i < 0 ? static_cast<std::int32_t>(0U - static_cast<std::uint32_t>(a[0].i))
                         : a[0].i;
        return r;
      }
      return map1(a[0], n, [](float x) { return std::fabs(x); });
    case Builtin::Sign:
      if (int_args) {
        r.i = (a[0].i > 0) - (a[0].i < 0);
        return r;
      }
      return map1(a[0], n, fsign);
    case Builtin::Mod:
      for (int k = 0; k < n; ++k) {
        const float x = a[0].f[k];
        const float y = lane(t[1], a[1], k);
        r.f[k] = x - y * std::floor(x / y);
      }
      return r;
    case Builtin::Min:
    case Builtin::Max: {
      const bool is_min = fn == Builtin::Min;
      if (int_args) {
        r.i = is_min ? std::min(a[0].i, a[1].i) : std::max(a[0].i, a[1].i);
        return r;
      }
      for (int k = 0; k < n; ++k) {
        const float y = lane(t[1], a[1], k);
        r.f[k] = is_min ? fmin(a[0].f[k], y) : fmax(a[0].f[k], y);
      }
      return r;
    }
    case Builtin::Clamp:
      if (int_args) {
        r.i = std::min(std::max(a[0].i, a[1].i), a[2].i);
        return r;
      }
      for (int k = 0; k < n; ++k) {
        r.f[k] = fclamp(a[0].f[k], lane(t[1], a[1], k), lane(t[2], a[2], k));
      }
      return r;
    case Builtin::Mix:
      for (int k = 0; k < n; ++k) {
        const float w = lane(t[2], a[2], k);
        r.f[k] = a[0].f[k] * (1.0F - w) + a[1].f[k] * w;
      }
      return r;
    case Builtin::Step:
      for (int k = 0; k < n; ++k) {
        r.f[k] = a[1].f[k] < lane(t[0], a[0], k) ? 0.0F : 1.0F;
      }
      return r;
    case Builtin::Smoothstep:
      for (int k = 0; k < n; ++k) {
        const float e0 = lane(t[0], a[0], k);
        const float e1 = lane(t[1], a[1], k);
        const float s = fclamp((a[2].f[k] - e0) / (e1 - e0), 0.0F, 1.0F);
        r.f[k] = s * s * (3.0F - 2.0F * s);
      }
      return r;
    case Builtin::Length:
      r.f[0] = std::sqrt(dot_n(a[0], a[0], n));
      return r;
    case Builtin::Distance: {
      Value d;
      for (int k = 0; k < n; ++k) d.f[k] = a[0].f[k] - a[1].f[k];
      r.f[0] = std::sqrt(dot_n(d, d, n));
      return r;
    }
    case Builtin::Dot:
      r.f[0] = dot_n(a[0], a[1], n);
      return r;
    case Builtin::Cross: {
      const auto& x = a[0].f;
      const auto& y = a[1].f;
      r.f[0] = x[1] * y[2] - y[1] * x[2];
      r.f[1] = x[2] * y[0] - y[2] * x[0];
      r.f[2] = x[0] * y[1] - y[0] * x[1];
      return r;
    }
    case Builtin::Normalize: {
      const float len = std::sqrt(dot_n(a[0], a[0], n));
      for (int k = 0; k < n; ++k) r.f[k] = a[0].f[k] / len;
      return r;
    }
    case Builtin::Reflect: {
      const float d = 2.0F * dot_n(a[1], a[0], n);
      for (int k = 0; k < n; ++k) r.f[k] = a[0].f[k] - d * a[1].f[k];
      return r;
    }
    case Builtin::Texture:
    case Builtin::None:
      break;
  }
  return r;
}

}  // namespace procam::shader
