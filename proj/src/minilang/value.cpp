#include "arena/minilang/value.hpp"

namespace arena::minilang {

std::string Value::to_string() const
{
    switch (type()) {
    case Type::Int:
        return std::to_string(as_int());
    case Type::Bool:
        return as_bool() ? "true" : "false";
    case Type::IntArray: {
        std::string out = "[";
        const auto& a = as_array();
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i)
                out += ", ";
            out += std::to_string(a[i]);
        }
        return out + "]";
    }
    }
    return "?";
}

std::string_view to_string(TrapKind kind) noexcept
{
    switch (kind) {
    case TrapKind::DivByZero: return "DivByZero";
    case TrapKind::ModByZero: return "ModByZero";
    case TrapKind::IndexOutOfBounds: return "IndexOutOfBounds";
    case TrapKind::StepBudgetExceeded: return "StepBudgetExceeded";
    }
    return "?";
}

std::string Outcome::to_string() const
{
    if (is_value())
        return "Value(" + value().to_string() + ")";
    return "Trap(" + std::string(minilang::to_string(trap())) + ")";
}

}  // namespace arena::minilang
