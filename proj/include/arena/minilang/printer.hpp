#pragma once

#include "arena/minilang/ast.hpp"

#include <string>

namespace arena::minilang {

/// Canonical formatting: two-space indentation, one statement per line,
/// minimal parentheses. parse_unit(print_unit(u)) is structurally equal to u.
std::string print_unit(const SourceUnit& unit);
std::string print_function(const FunctionDecl& fn);
std::string print_stmt(const Stmt& stmt, int indent = 0);
std::string print_expr(const Expr& expr);

}  // namespace arena::minilang
