#pragma once

#include <cstddef>
#include <functional>

namespace arena::minilang::detail {

/// Runs `fn` to completion on a new thread with a `stack_bytes` stack and
/// rethrows whatever it threw. Used to give deep MiniLang recursion more
/// native stack than the calling thread has.
void run_on_fresh_stack(std::size_t stack_bytes, const std::function<void()>& fn);

}  // namespace arena::minilang::detail
