#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shader/program.hpp"

namespace procam::shader {

struct BoundChannel {
  const RgbImage* image = nullptr;
  ChannelWrap wrap = ChannelWrap::Repeat;
};

/// Per-frame uniform values in interpreter form.
struct FrameInputs {
  Value resolution;
  Value time;
  Value time_delta;
  Value frame;
  Value mouse;
  std::array<BoundChannel, 4> channels;
};

/// Bilinear lookup with GL texture conventions: uv (0, 0) is the bottom-left
/// corner of the image and texel centres sit at half-integer uv * size.
std::array<float, 4> sample_texture(const BoundChannel& channel, float u, float v);

/// Evaluation state for one thread. Not thread-safe; create one per worker.
class Interpreter {
 public:
  Interpreter(const Program& program, const FrameInputs* inputs, std::uint64_t iteration_limit);

  /// Runs mainImage and returns fragColor.
  Value run_main(float frag_x, float frag_y);

  /// Evaluates a constant expression (const global initializers).
  Value eval_constant(const Expr& e);

 private:
  enum class Flow { Normal, Return };

  struct LRef {
    std::size_t slot = 0;  // absolute stack index
    bool whole = true;
    bool valid = true;
    int n = 0;
    std::array<std::int8_t, 16> comps{};
  };

  Value call(const Function& fn, const Expr* call_site, float frag_x, float frag_y);
  Flow exec(const Stmt& s);
  Value eval(const Expr& e);
  Value eval_call(const Expr& e);
  Value eval_construct(const Expr& e);
  Value eval_incdec(const Expr& e);
  Value eval_assign(const Expr& e);
  LRef resolve(const Expr& e);
  Value read(const LRef& ref, Type type) const;
  void write(const LRef& ref, Type type, const Value& v);
  void ensure_stack(std::size_t top);

  const Program& program_;
  const FrameInputs* inputs_;
  std::uint64_t iteration_limit_;
  std::uint64_t iterations_ = 0;
  std::vector<Value> stack_;
  std::size_t base_ = 0;
  std::size_t top_ = 0;
  Value return_value_;
};

/// Arithmetic on annotated operand types; shared with compound assignment.
Value arithmetic(Op op, Type ta, const Value& a, Type tb, const Value& b, Type result);

}  // namespace procam::shader
