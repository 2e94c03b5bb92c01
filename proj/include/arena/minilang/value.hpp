#pragma once

#include "arena/minilang/ast.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arena::minilang {

/// A MiniLang runtime value. Arrays have value semantics.
class Value
{
public:
    using Array = std::vector<std::int64_t>;

    Value() : v_(std::int64_t{0}) {}
    Value(std::int64_t i) : v_(i) {}
    Value(int i) : v_(static_cast<std::int64_t>(i)) {}
    Value(bool b) : v_(b) {}
    Value(Array a) : v_(std::move(a)) {}

    Type type() const noexcept
    {
        switch (v_.index()) {
        case 0: return Type::Int;
        case 1: return Type::Bool;
        default: return Type::IntArray;
        }
    }

    std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
    bool as_bool() const { return std::get<bool>(v_); }
    const Array& as_array() const { return std::get<Array>(v_); }
    Array& as_array() { return std::get<Array>(v_); }

    /// MiniLang literal spelling: `42`, `-3`, `true`, `[1, 2]`.
    std::string to_string() const;

    friend bool operator==(const Value&, const Value&) = default;

private:
    std::variant<std::int64_t, bool, Array> v_;
};

enum class TrapKind
{
    DivByZero,
    ModByZero,
    IndexOutOfBounds,
    StepBudgetExceeded,
};

std::string_view to_string(TrapKind kind) noexcept;

/// Result of one evaluation: either a value or a trap.
class Outcome
{
public:
    static Outcome value(Value v) { return Outcome(std::move(v)); }
    static Outcome trap(TrapKind k) { return Outcome(k); }

    bool is_value() const noexcept { return std::holds_alternative<Value>(v_); }
    bool is_trap() const noexcept { return !is_value(); }
    const Value& value() const { return std::get<Value>(v_); }
    TrapKind trap() const { return std::get<TrapKind>(v_); }

    /// `Value(2)` or `Trap(DivByZero)`.
    std::string to_string() const;

    friend bool operator==(const Outcome&, const Outcome&) = default;

private:
    explicit Outcome(Value v) : v_(std::move(v)) {}
    explicit Outcome(TrapKind k) : v_(k) {}

    std::variant<Value, TrapKind> v_;
};

}  // namespace arena::minilang
