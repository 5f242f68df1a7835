#pragma once

#include <array>
#include <vector>

#include "shader/ast.hpp"
#include "procam/shaderlang.hpp"

namespace procam::shader {

struct CheckResult {
  std::vector<Diagnostic> errors;
  int main_function = -1;
  std::array<bool, 4> channels_used{};
  int stack_slots = 0;  // worst-case local slots over any call chain from mainImage
};

/// Resolves names, assigns slots and annotates every expression with its
/// type. Collects all errors rather than stopping at the first.
CheckResult check(TranslationUnit& unit);

}  // namespace procam::shader
