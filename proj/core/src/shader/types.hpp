#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace procam::shader {

enum class Type : std::uint8_t {
  Void,
  Bool,
  Int,
  Float,
  Vec2,
  Vec3,
  Vec4,
  Mat2,
  Mat3,
  Mat4,
  Sampler2D,
};

constexpr bool is_vector(Type t) { return t == Type::Vec2 || t == Type::Vec3 || t == Type::Vec4; }
constexpr bool is_matrix(Type t) { return t == Type::Mat2 || t == Type::Mat3 || t == Type::Mat4; }
constexpr bool is_float_based(Type t) { return t == Type::Float || is_vector(t) || is_matrix(t); }
/// float or vecN
constexpr bool is_gen_type(Type t) { return t == Type::Float || is_vector(t); }
constexpr bool is_scalar(Type t) { return t == Type::Bool || t == Type::Int || t == Type::Float; }

/// Columns/rows of a matrix, or 0.
constexpr int matrix_dim(Type t) {
  switch (t) {
    case Type::Mat2: return 2;
    case Type::Mat3: return 3;
    case Type::Mat4: return 4;
    default: return 0;
  }
}

/// Scalar component count (16 for mat4).
constexpr int component_count(Type t) {
  switch (t) {
    case Type::Bool:
    case Type::Int:
    case Type::Float: return 1;
    case Type::Vec2: return 2;
    case Type::Vec3: return 3;
    case Type::Vec4: return 4;
    case Type::Mat2: return 4;
    case Type::Mat3: return 9;
    case Type::Mat4: return 16;
    default: return 0;
  }
}

constexpr Type vector_type(int n) {
  switch (n) {
    case 1: return Type::Float;
    case 2: return Type::Vec2;
    case 3: return Type::Vec3;
    case 4: return Type::Vec4;
    default: return Type::Void;
  }
}

constexpr Type matrix_type(int n) {
  switch (n) {
    case 2: return Type::Mat2;
    case 3: return Type::Mat3;
    case 4: return Type::Mat4;
    default: return Type::Void;
  }
}

constexpr std::string_view type_name(Type t) {
  switch (t) {
    case Type::Void: return "void";
    case Type::Bool: return "bool";
    case Type::Int: return "int";
    case Type::Float: return "float";
    case Type::Vec2: return "vec2";
    case Type::Vec3: return "vec3";
    case Type::Vec4: return "vec4";
    case Type::Mat2: return "mat2";
    case Type::Mat3: return "mat3";
    case Type::Mat4: return "mat4";
    case Type::Sampler2D: return "sampler2D";
  }
  return "?";
}

/// Runtime value. Floats (scalar, vector, column-major matrix) live in `f`;
/// int, bool and sampler (channel index) live in `i`.
struct Value {
  std::array<float, 16> f{};
  std::int32_t i = 0;
};

}  // namespace procam::shader
