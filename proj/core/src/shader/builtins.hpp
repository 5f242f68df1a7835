#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "shader/types.hpp"

namespace procam::shader {

enum class Builtin : std::uint8_t {
  None,
  Sin,
  Cos,
  Tan,
  Asin,
  Acos,
  Atan,
  Pow,
  Exp,
  Log,
  Exp2,
  Log2,
  Sqrt,
  InverseSqrt,
  Abs,
  Sign,
  Floor,
  Ceil,
  Fract,
  Mod,
  Min,
  Max,
  Clamp,
  Mix,
  Step,
  Smoothstep,
  Length,
  Distance,
  Dot,
  Cross,
  Normalize,
  Reflect,
  Texture,
};

Builtin find_builtin(std::string_view name);

/// Result type for a call with these argument types, or nullopt if no
/// overload matches.
std::optional<Type> builtin_result(Builtin fn, std::span<const Type> args);

/// Everything except texture(), which needs channel state.
Value eval_builtin(Builtin fn, std::span<const Type> arg_types, std::span<const Value> args);

}  // namespace procam::shader
