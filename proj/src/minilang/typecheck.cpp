#include "arena/minilang/typecheck.hpp"

#include "arena/minilang/parser.hpp"

#include <map>
#include <set>

namespace arena::minilang {

std::string_view to_string(TypeErrorKind kind) noexcept
{
    switch (kind) {
    case TypeErrorKind::TypeMismatch: return "TypeMismatch";
    case TypeErrorKind::MissingReturn: return "MissingReturn";
    case TypeErrorKind::UndeclaredVariable: return "UndeclaredVariable";
    case TypeErrorKind::UnknownFunction: return "UnknownFunction";
    case TypeErrorKind::ArityMismatch: return "ArityMismatch";
    case TypeErrorKind::DuplicateFunction: return "DuplicateFunction";
    case TypeErrorKind::DuplicateParameter: return "DuplicateParameter";
    case TypeErrorKind::Redeclared: return "Redeclared";
    }
    return "?";
}

namespace {

std::string first_message(const std::vector<TypeError>& errors)
{
    if (errors.empty())
        return "type error";
    const auto& e = errors.front();
    std::string msg = std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message;
    if (errors.size() > 1)
        msg += " (and " + std::to_string(errors.size() - 1) + " more)";
    return msg;
}

class Checker
{
public:
    explicit Checker(SourceUnit& unit) : unit_(unit) {}

    std::vector<TypeError> run()
    {
        std::set<std::string> seen;
        for (auto& fn : unit_.functions)
            if (!seen.insert(fn.name).second)
                error(TypeErrorKind::DuplicateFunction, fn.pos, "duplicate function '" + fn.name + "'");
        for (auto& fn : unit_.functions)
            function(fn);
        return std::move(errors_);
    }

private:
    struct Local
    {
        Type type;
        int slot;
    };

    void error(TypeErrorKind kind, SourcePos pos, std::string message)
    {
        errors_.push_back({kind, pos.line, pos.column, std::move(message)});
    }

    const Local* lookup(const std::string& name) const
    {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end())
                return &found->second;
        }
        return nullptr;
    }

    void declare(const std::string& name, Type type, SourcePos pos, int& slot_out)
    {
        if (lookup(name)) {
            error(TypeErrorKind::Redeclared, pos, "'" + name + "' is already declared");
            slot_out = -1;
            return;
        }
        slot_out = next_slot_++;
        scopes_.back().emplace(name, Local{type, slot_out});
    }

    void function(FunctionDecl& fn)
    {
        fn_ = &fn;
        next_slot_ = 0;
        scopes_.assign(1, {});
        std::set<std::string> names;
        for (auto& p : fn.params) {
            if (!names.insert(p.name).second) {
                error(TypeErrorKind::DuplicateParameter, p.pos, "duplicate parameter '" + p.name + "'");
                continue;
            }
            int slot = 0;
            declare(p.name, p.type, p.pos, slot);
        }
        // Parameters occupy slots 0..n-1 in order; keep that even after an error.
        next_slot_ = std::max(next_slot_, static_cast<int>(fn.params.size()));
        const bool returns = block(fn.body);
        if (!returns)
            error(TypeErrorKind::MissingReturn, fn.pos,
                  "function '" + fn.name + "' does not return on every path");
        fn.frame_size = next_slot_;
        scopes_.clear();
    }

    // Returns true when every path through the block ends in a return.
    bool block(std::vector<Stmt>& body)
    {
        scopes_.emplace_back();
        bool returns = false;
        for (auto& s : body)
            returns = stmt(s) || returns;
        scopes_.pop_back();
        return returns;
    }

    void expect(const Expr& e, std::optional<Type> actual, Type wanted, const char* what)
    {
        if (actual && *actual != wanted)
            error(TypeErrorKind::TypeMismatch, e.pos,
                  std::string(what) + " must be " + std::string(to_string(wanted)) + ", found " +
                      std::string(to_string(*actual)));
    }

    bool stmt(Stmt& s)
    {
        switch (s.kind) {
        case StmtKind::VarDecl: {
            auto t = expr(s.exprs[0]);
            expect(s.exprs[0], t, s.declared_type, "initializer");
            declare(s.name, s.declared_type, s.pos, s.slot);
            return false;
        }
        case StmtKind::Assign: {
            auto t = expr(s.exprs[0]);
            const Local* local = lookup(s.name);
            if (!local) {
                error(TypeErrorKind::UndeclaredVariable, s.pos, "undeclared variable '" + s.name + "'");
                return false;
            }
            s.slot = local->slot;
            expect(s.exprs[0], t, local->type, "assigned value");
            return false;
        }
        case StmtKind::ArrayAssign: {
            auto ti = expr(s.exprs[0]);
            auto tv = expr(s.exprs[1]);
            expect(s.exprs[0], ti, Type::Int, "array index");
            expect(s.exprs[1], tv, Type::Int, "array element");
            const Local* local = lookup(s.name);
            if (!local) {
                error(TypeErrorKind::UndeclaredVariable, s.pos, "undeclared variable '" + s.name + "'");
                return false;
            }
            s.slot = local->slot;
            if (local->type != Type::IntArray)
                error(TypeErrorKind::TypeMismatch, s.pos, "'" + s.name + "' is not an int[]");
            return false;
        }
        case StmtKind::If: {
            expect(s.exprs[0], expr(s.exprs[0]), Type::Bool, "condition");
            const bool then_returns = block(s.body);
            const bool else_returns = block(s.else_body);
            return s.has_else && then_returns && else_returns;
        }
        case StmtKind::While:
            expect(s.exprs[0], expr(s.exprs[0]), Type::Bool, "condition");
            block(s.body);
            return false;
        case StmtKind::Return:
            expect(s.exprs[0], expr(s.exprs[0]), fn_->return_type, "return value");
            return true;
        }
        return false;
    }

    std::optional<Type> expr(Expr& e)
    {
        auto t = infer(e);
        if (t)
            e.type = *t;
        return t;
    }

    std::optional<Type> infer(Expr& e)
    {
        switch (e.kind) {
        case ExprKind::IntLit:
            return Type::Int;
        case ExprKind::BoolLit:
            return Type::Bool;
        case ExprKind::Var: {
            const Local* local = lookup(e.name);
            if (!local) {
                error(TypeErrorKind::UndeclaredVariable, e.pos, "undeclared variable '" + e.name + "'");
                return std::nullopt;
            }
            e.slot = local->slot;
            return local->type;
        }
        case ExprKind::ArrayLit:
            for (auto& el : e.operands)
                expect(el, expr(el), Type::Int, "array element");
            return Type::IntArray;
        case ExprKind::Index:
            expect(e.operands[0], expr(e.operands[0]), Type::IntArray, "indexed value");
            expect(e.operands[1], expr(e.operands[1]), Type::Int, "array index");
            return Type::Int;
        case ExprKind::Unary: {
            const Type want = e.unary_op == UnaryOp::Neg ? Type::Int : Type::Bool;
            expect(e.operands[0], expr(e.operands[0]), want, "operand");
            return want;
        }
        case ExprKind::Binary: {
            const auto lt = expr(e.operands[0]);
            const auto rt = expr(e.operands[1]);
            const Type operand = is_logical(e.binary_op) ? Type::Bool : Type::Int;
            expect(e.operands[0], lt, operand, "left operand");
            expect(e.operands[1], rt, operand, "right operand");
            return is_arithmetic(e.binary_op) ? Type::Int : Type::Bool;
        }
        case ExprKind::Call: {
            std::vector<std::optional<Type>> args;
            for (auto& a : e.operands)
                args.push_back(expr(a));
            const int index = unit_.index_of(e.name);
            if (index < 0) {
                error(TypeErrorKind::UnknownFunction, e.pos, "unknown function '" + e.name + "'");
                return std::nullopt;
            }
            e.slot = index;
            const FunctionDecl& callee = unit_.functions[static_cast<std::size_t>(index)];
            if (callee.params.size() != args.size()) {
                error(TypeErrorKind::ArityMismatch, e.pos,
                      "'" + e.name + "' takes " + std::to_string(callee.params.size()) +
                          " argument(s), " + std::to_string(args.size()) + " given");
            } else {
                for (std::size_t i = 0; i < args.size(); ++i)
                    expect(e.operands[i], args[i], callee.params[i].type, "argument");
            }
            return callee.return_type;
        }
        }
        return std::nullopt;
    }

    SourceUnit& unit_;
    FunctionDecl* fn_ = nullptr;
    std::vector<std::map<std::string, Local>> scopes_;
    int next_slot_ = 0;
    std::vector<TypeError> errors_;
};

}  // namespace

TypecheckResult typecheck(SourceUnit unit)
{
    TypecheckResult result;
    result.errors = Checker(unit).run();
    if (result.errors.empty())
        result.unit = TypedUnit(std::make_shared<const SourceUnit>(std::move(unit)));
    return result;
}

TypeCheckFailed::TypeCheckFailed(std::vector<TypeError> errors)
    : Error("TypeError", first_message(errors)),
      errors_(std::move(errors))
{}

TypedUnit load_unit(std::string_view source, std::string name)
{
    auto result = typecheck(parse_unit(source, std::move(name)));
    if (!result.ok())
        throw TypeCheckFailed(std::move(result.errors));
    return std::move(*result.unit);
}

}  // namespace arena::minilang
