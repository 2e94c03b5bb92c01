#pragma once

#include "arena/common/error.hpp"
#include "arena/minilang/ast.hpp"

#include <cstddef>
#include <string>
#include <string_view>

namespace arena::minilang {

inline constexpr std::size_t kMaxSourceBytes = 64 * 1024;

/// Statements and expressions may nest at most this deep.
inline constexpr int kMaxNestingDepth = 200;

class SyntaxError : public Error
{
public:
    SyntaxError(int line, int column, const std::string& message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    /// The message without the "line:col: " prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    int line_;
    int column_;
    std::string detail_;
};

/// Parses a whole `.cut` unit. Throws SyntaxError at the first offending token,
/// or Error("SourceTooLarge") when the input exceeds kMaxSourceBytes.
/// The result is untyped; run typecheck() before evaluating it.
SourceUnit parse_unit(std::string_view source, std::string name = "unit");

/// Number of lines as an editor shows them (a trailing newline does not start
/// a new line). Always >= 1.
int count_lines(std::string_view source) noexcept;

}  // namespace arena::minilang
