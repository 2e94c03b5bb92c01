#pragma once

#include "arena/common/error.hpp"
#include "arena/minilang/ast.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arena::minilang {

enum class TypeErrorKind
{
    TypeMismatch,
    MissingReturn,
    UndeclaredVariable,
    UnknownFunction,
    ArityMismatch,
    DuplicateFunction,
    DuplicateParameter,
    Redeclared,
};

std::string_view to_string(TypeErrorKind kind) noexcept;

struct TypeError
{
    TypeErrorKind kind = TypeErrorKind::TypeMismatch;
    int line = 0;
    int column = 0;
    std::string message;
};

struct TypecheckResult;

/// A unit that parsed and typechecked. Immutable and cheap to copy; the only
/// way to obtain one is through typecheck() or load_unit().
class TypedUnit
{
public:
    const SourceUnit& unit() const noexcept { return *unit_; }
    const SourceUnit* operator->() const noexcept { return unit_.get(); }
    const std::string& source() const noexcept { return unit_->source; }

private:
    friend TypecheckResult typecheck(SourceUnit unit);
    explicit TypedUnit(std::shared_ptr<const SourceUnit> unit) : unit_(std::move(unit)) {}

    std::shared_ptr<const SourceUnit> unit_;
};

struct TypecheckResult
{
    std::optional<TypedUnit> unit;  // set iff errors is empty
    std::vector<TypeError> errors;

    bool ok() const noexcept { return errors.empty(); }
};

/// Annotates expression types and variable slots. One error per violation,
/// in source order.
TypecheckResult typecheck(SourceUnit unit);

/// Thrown by load_unit() when typechecking fails.
class TypeCheckFailed : public Error
{
public:
    explicit TypeCheckFailed(std::vector<TypeError> errors);

    const std::vector<TypeError>& errors() const noexcept { return errors_; }

private:
    std::vector<TypeError> errors_;
};

/// parse_unit + typecheck. Throws SyntaxError, TypeCheckFailed or
/// Error("SourceTooLarge").
TypedUnit load_unit(std::string_view source, std::string name = "unit");

}  // namespace arena::minilang
