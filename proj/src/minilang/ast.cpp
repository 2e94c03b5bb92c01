#include "arena/minilang/ast.hpp"

#include <algorithm>

namespace arena::minilang {

std::string_view to_string(Type type) noexcept
{
    switch (type) {
    case Type::Int: return "int";
    case Type::Bool: return "bool";
    case Type::IntArray: return "int[]";
    }
    return "?";
}

std::string_view to_string(UnaryOp op) noexcept
{
    return op == UnaryOp::Neg ? "-" : "!";
}

std::string_view to_string(BinaryOp op) noexcept
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    }
    return "?";
}

bool is_arithmetic(BinaryOp op) noexcept
{
    return op == BinaryOp::Add || op == BinaryOp::Sub || op == BinaryOp::Mul ||
           op == BinaryOp::Div || op == BinaryOp::Mod;
}

bool is_relational(BinaryOp op) noexcept
{
    return op == BinaryOp::Lt || op == BinaryOp::Le || op == BinaryOp::Gt ||
           op == BinaryOp::Ge || op == BinaryOp::Eq || op == BinaryOp::Ne;
}

bool is_logical(BinaryOp op) noexcept
{
    return op == BinaryOp::And || op == BinaryOp::Or;
}

std::string_view to_string(ExprKind kind) noexcept
{
    switch (kind) {
    case ExprKind::IntLit: return "IntLit";
    case ExprKind::BoolLit: return "BoolLit";
    case ExprKind::Var: return "Var";
    case ExprKind::ArrayLit: return "ArrayLit";
    case ExprKind::Index: return "Index";
    case ExprKind::Unary: return "Unary";
    case ExprKind::Binary: return "Binary";
    case ExprKind::Call: return "Call";
    }
    return "?";
}

std::string_view to_string(StmtKind kind) noexcept
{
    switch (kind) {
    case StmtKind::VarDecl: return "VarDecl";
    case StmtKind::Assign: return "Assign";
    case StmtKind::ArrayAssign: return "ArrayAssign";
    case StmtKind::If: return "If";
    case StmtKind::While: return "While";
    case StmtKind::Return: return "Return";
    }
    return "?";
}

const FunctionDecl* SourceUnit::find(std::string_view fn) const noexcept
{
    const int i = index_of(fn);
    return i < 0 ? nullptr : &functions[static_cast<std::size_t>(i)];
}

int SourceUnit::index_of(std::string_view fn) const noexcept
{
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == fn)
            return static_cast<int>(i);
    return -1;
}

namespace {

template <typename T>
bool all_equal(const std::vector<T>& a, const std::vector<T>& b) noexcept
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const T& x, const T& y) { return structurally_equal(x, y); });
}

}  // namespace

bool structurally_equal(const Expr& a, const Expr& b) noexcept
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind) {
    case ExprKind::IntLit:
        return a.int_value == b.int_value;
    case ExprKind::BoolLit:
        return a.bool_value == b.bool_value;
    case ExprKind::Var:
        return a.name == b.name;
    case ExprKind::Call:
        return a.name == b.name && all_equal(a.operands, b.operands);
    case ExprKind::Unary:
        return a.unary_op == b.unary_op && all_equal(a.operands, b.operands);
    case ExprKind::Binary:
        return a.binary_op == b.binary_op && all_equal(a.operands, b.operands);
    case ExprKind::ArrayLit:
    case ExprKind::Index:
        return all_equal(a.operands, b.operands);
    }
    return false;
}

bool structurally_equal(const Stmt& a, const Stmt& b) noexcept
{
    if (a.kind != b.kind || a.name != b.name || a.has_else != b.has_else)
        return false;
    if (a.kind == StmtKind::VarDecl && a.declared_type != b.declared_type)
        return false;
    return all_equal(a.exprs, b.exprs) && all_equal(a.body, b.body) &&
           all_equal(a.else_body, b.else_body);
}

bool same_signature(const FunctionDecl& a, const FunctionDecl& b) noexcept
{
    if (a.name != b.name || a.return_type != b.return_type || a.params.size() != b.params.size())
        return false;
    for (std::size_t i = 0; i < a.params.size(); ++i)
        if (a.params[i].name != b.params[i].name || a.params[i].type != b.params[i].type)
            return false;
    return true;
}

bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b) noexcept
{
    return same_signature(a, b) && all_equal(a.body, b.body);
}

bool structurally_equal(const SourceUnit& a, const SourceUnit& b) noexcept
{
    return all_equal(a.functions, b.functions);
}

std::size_t node_count(const Expr& e) noexcept
{
    std::size_t n = 1;
    for (const auto& op : e.operands)
        n += node_count(op);
    return n;
}

std::size_t node_count(const Stmt& s) noexcept
{
    std::size_t n = 1;
    for (const auto& e : s.exprs)
        n += node_count(e);
    for (const auto& b : s.body)
        n += node_count(b);
    for (const auto& b : s.else_body)
        n += node_count(b);
    return n;
}

}  // namespace arena::minilang
