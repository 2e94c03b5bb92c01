#pragma once

#include "arena/minilang/typecheck.hpp"
#include "arena/minilang/value.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace arena::minilang {

inline constexpr std::uint64_t kDefaultStepBudget = 100'000;

struct ExecutionTrace
{
    std::vector<int> covered_lines;  // ascending, each in [1, line_count]
    std::uint64_t steps_used = 0;

    friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

struct Evaluation
{
    Outcome outcome;
    ExecutionTrace trace;

    friend bool operator==(const Evaluation&, const Evaluation&) = default;
};

/// Runs `fn(args)` to completion or until it traps.
///
/// Cost model: each statement costs one step when it starts (a while loop
/// pays again for every re-evaluation of its condition) and each binary
/// operation costs one step. Once `budget` steps are spent the next charge
/// traps with StepBudgetExceeded. Coverage records the function header line
/// on entry plus the line of every statement started and every expression
/// evaluated.
///
/// Throws Error("UnknownFunction"), Error("ArityOrTypeMismatch") or
/// Error("InvalidBudget") for caller mistakes; traps are outcomes, not errors.
/// Safe to call concurrently.
Evaluation evaluate_call(const TypedUnit& unit, std::string_view fn, std::span<const Value> args,
                         std::uint64_t budget = kDefaultStepBudget);

}  // namespace arena::minilang
