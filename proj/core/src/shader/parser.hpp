#pragma once

#include <optional>
#include <string_view>

#include "shader/ast.hpp"
#include "shader/lexer.hpp"

namespace procam::shader {

struct ParseResult {
  TranslationUnit unit;
  std::optional<Diagnostic> error;  // first lexical or syntax error
};

ParseResult parse(std::string_view source);

}  // namespace procam::shader
