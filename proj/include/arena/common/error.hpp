#pragma once

#include <stdexcept>
#include <string>

namespace arena {

/// Base for every domain error raised by the arena libraries. `code()` is the
/// machine-readable name (e.g. "SyntaxError", "EditTooLarge") that the CLI
/// prints and the HTTP layer maps to a status.
class Error : public std::runtime_error
{
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code))
    {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace arena
