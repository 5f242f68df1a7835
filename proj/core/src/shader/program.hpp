#pragma once

#include <array>
#include <vector>

#include "shader/ast.hpp"
#include "procam/shaderlang.hpp"

namespace procam::shader {

class Program {
 public:
  TranslationUnit unit;
  std::vector<Value> globals;  // const globals, evaluated at compile time
  int main_function = -1;
  std::array<bool, 4> channels_used{};
  int stack_slots = 0;
};

}  // namespace procam::shader
