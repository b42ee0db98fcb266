#pragma once

#include <string>

#include "uspkit/ast.hpp"

namespace uspkit {

/// Canonical text: 4-space indent, one member per line, ASCII `<<...>>`
/// stereotypes. parse(print(m)) == m for any parser-produced m.
std::string print(const ast::Model& m);

std::string print_expr(const ast::Expr& e);
std::string print_literal(const ast::Literal& lit);

}  // namespace uspkit
