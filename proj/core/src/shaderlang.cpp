#include "procam/shaderlang.hpp"

#include <algorithm>
#include <cmath>

#include "procam/parallel.hpp"
#include "shader/checker.hpp"
#include "shader/interpreter.hpp"
#include "shader/parser.hpp"
#include "shader/program.hpp"

namespace procam::shader {
namespace {

std::string join_messages(const std::vector<Diagnostic>& diagnostics) {
  std::string text = "shader compile failed";
  for (const auto& d : diagnostics) {
    text += "\n" + d.to_string();
  }
  return text;
}

std::uint8_t quantize(float v) {
  if (std::isnan(v)) {
    return 0;
  }
  const float c = std::clamp(v, 0.0F, 1.0F);
  return static_cast<std::uint8_t>(std::lround(c * 255.0F));
}

Value scalar(float f) {
  Value v;
  v.f[0] = f;
  return v;
}

}  // namespace

std::string Diagnostic::to_string() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " +
         (severity == Severity::Error ? "error" : "warning") + ": " + message;
}

CompileError::CompileError(std::vector<Diagnostic> diagnostics)
    : Error(join_messages(diagnostics)), diagnostics_(std::move(diagnostics)) {}

RuntimeError::RuntimeError(Diagnostic diagnostic)
    : Error("shader runtime error: " + diagnostic.to_string()),
      diagnostic_(std::move(diagnostic)) {}

CompileResult compile(std::string_view source) {
  CompileResult result;
  auto parsed = parse(source);
  if (parsed.error) {
    result.diagnostics.push_back(*parsed.error);
    return result;
  }
  auto checked = check(parsed.unit);
  if (!checked.errors.empty()) {
    std::stable_sort(checked.errors.begin(), checked.errors.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return a.line != b.line ? a.line < b.line : a.column < b.column;
                     });
    result.diagnostics = std::move(checked.errors);
    return result;
  }

  auto program = std::make_shared<Program>();
  program->unit = std::move(parsed.unit);
  program->main_function = checked.main_function;
  program->channels_used = checked.channels_used;
  program->stack_slots = checked.stack_slots;
  // Const globals only see earlier globals, so one pass in order suffices.
  Interpreter folder(*program, nullptr, 0);
  for (const auto& g : program->unit.globals) {
    program->globals.push_back(folder.eval_constant(*g.decl.init));
  }
  result.program = std::move(program);
  return result;
}

std::shared_ptr<const Program> compile_or_throw(std::string_view source) {
  auto result = compile(source);
  if (!result.program) {
    throw CompileError(std::move(result.diagnostics));
  }
  return std::move(result.program);
}

RgbImage render_frame(const Program& program, const Uniforms& uniforms, Size size,
                      const RenderOptions& options) {
  if (size.width <= 0 || size.height <= 0) {
    throw InvalidArgument("shader frame size must be positive, got " + format_size(size));
  }
  FrameInputs inputs;
  inputs.resolution.f[0] = static_cast<float>(size.width);
  inputs.resolution.f[1] = static_cast<float>(size.height);
  inputs.resolution.f[2] = 1.0F;
  inputs.time = scalar(static_cast<float>(uniforms.time));
  inputs.time_delta = scalar(static_cast<float>(uniforms.time_delta));
  inputs.frame.i = uniforms.frame;
  std::copy(uniforms.mouse.begin(), uniforms.mouse.end(), inputs.mouse.f.begin());
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& channel = uniforms.channels[k];
    if (channel && channel->image && !channel->image->empty()) {
      inputs.channels[k] = BoundChannel{channel->image.get(), channel->wrap};
    } else if (program.channels_used[k]) {
      throw InvalidArgument("shader uses iChannel" + std::to_string(k) +
                            " but no image is bound to it");
    }
  }

  RgbImage out(size);
  parallel_for_rows(size.height, options.threads, [&](int begin, int end) {
    Interpreter interpreter(program, &inputs, options.iteration_limit);
    for (int row = begin; row < end; ++row) {
      const float frag_y = static_cast<float>(size.height - 1 - row) + 0.5F;
      for (int x = 0; x < size.width; ++x) {
        const Value c = interpreter.run_main(static_cast<float>(x) + 0.5F, frag_y);
        out.at(x, row) = Rgb8{quantize(c.f[0]), quantize(c.f[1]), quantize(c.f[2])};
      }
    }
  });
  return out;
}

}  // namespace procam::shader
