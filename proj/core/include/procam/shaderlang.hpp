#pragma once

// CPU interpreter for Shadertoy-style GLSL fragment shaders.
//
// Accepted subset: scalar/vector/matrix types (bool, int, float, vec2-4,
// mat2-4), sampler2D only through iChannel0-3, const globals, user functions
// with in/out/inout parameters, declarations, (compound) assignment, ++/--,
// if/else, for loops over an int or float counter, return and
// blocks. Typing follows GLSL ES 3.00: no implicit int -> float conversion
// outside constructors. Anything else is rejected with a located diagnostic.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procam/error.hpp"
#include "procam/image.hpp"

namespace procam::shader {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  int line = 1;    // 1-based
  int column = 1;  // 1-based
  std::string message;

  /// "line:column: error: message"
  std::string to_string() const;
};

class CompileError : public Error {
 public:
  explicit CompileError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Raised when a shader exceeds the per-pixel loop iteration budget.
class RuntimeError : public Error {
 public:
  explicit RuntimeError(Diagnostic diagnostic);
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

/// A checked shader. Immutable and safe to share across threads.
class Program;

struct CompileResult {
  std::shared_ptr<const Program> program;  // null when diagnostics hold errors
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program != nullptr; }
};

/// Never throws on malformed source; errors come back as diagnostics.
CompileResult compile(std::string_view source);

enum class ChannelWrap { Repeat, Clamp };

struct Channel {
  std::shared_ptr<const RgbImage> image;
  ChannelWrap wrap = ChannelWrap::Repeat;
};

struct Uniforms {
  double time = 0.0;        // iTime
  double time_delta = 0.0;  // iTimeDelta
  int frame = 0;            // iFrame
  std::array<float, 4> mouse{0.0F, 0.0F, 0.0F, 0.0F};  // iMouse
  std::array<std::optional<Channel>, 4> channels;       // iChannel0..3
};

struct RenderOptions {
  unsigned threads = 0;                          // 0 = default_thread_count()
  std::uint64_t iteration_limit = 10'000'000;    // loop iterations per pixel
};

/// Evaluates mainImage once per pixel. fragCoord = (x + 0.5, y + 0.5) with
/// y measured from the bottom row; iResolution = (w, h, 1). Output channels
/// are clamped to [0, 1] (NaN -> 0) and stored as round(v * 255).
///
/// Throws InvalidArgument when a referenced channel is unbound and
/// RuntimeError when a pixel exceeds the iteration limit.
RgbImage render_frame(const Program& program, const Uniforms& uniforms, Size size,
                      const RenderOptions& options = {});

/// Compile-or-throw convenience used by the CLI and effects.
std::shared_ptr<const Program> compile_or_throw(std::string_view source);

}  // namespace procam::shader
