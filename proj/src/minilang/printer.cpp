#include "arena/minilang/printer.hpp"

namespace arena::minilang {
namespace {

constexpr int kPrecUnary = 7;
constexpr int kPrecAtom = 8;

int precedence(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Or: return 1;
    case BinaryOp::And: return 2;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 3;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 4;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 5;
    default: return 6;
    }
}

int precedence(const Expr& e)
{
    switch (e.kind) {
    case ExprKind::Binary: return precedence(e.binary_op);
    case ExprKind::Unary: return kPrecUnary;
    // A negative literal reads as a unary minus to its neighbours.
    case ExprKind::IntLit: return e.int_value < 0 ? kPrecUnary : kPrecAtom;
    default: return kPrecAtom;
    }
}

void emit(const Expr& e, std::string& out);

void emit_wrapped(const Expr& e, bool parens, std::string& out)
{
    if (parens)
        out += '(';
    emit(e, out);
    if (parens)
        out += ')';
}

void emit_list(const std::vector<Expr>& items, std::string& out)
{
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += ", ";
        emit(items[i], out);
    }
}

void emit(const Expr& e, std::string& out)
{
    switch (e.kind) {
    case ExprKind::IntLit:
        out += std::to_string(e.int_value);
        return;
    case ExprKind::BoolLit:
        out += e.bool_value ? "true" : "false";
        return;
    case ExprKind::Var:
        out += e.name;
        return;
    case ExprKind::Call:
        out += e.name;
        out += '(';
        emit_list(e.operands, out);
        out += ')';
        return;
    case ExprKind::ArrayLit:
        out += '[';
        emit_list(e.operands, out);
        out += ']';
        return;
    case ExprKind::Index:
        emit_wrapped(e.operands[0], precedence(e.operands[0]) < kPrecAtom, out);
        out += '[';
        emit(e.operands[1], out);
        out += ']';
        return;
    case ExprKind::Unary: {
        const Expr& x = e.operands[0];
        out += to_string(e.unary_op);
        // `-5` would re-parse as a literal, so a negated literal keeps its parens.
        const bool parens = x.kind == ExprKind::IntLit || precedence(x) < kPrecUnary;
        emit_wrapped(x, parens, out);
        return;
    }
    case ExprKind::Binary: {
        const int prec = precedence(e.binary_op);
        emit_wrapped(e.operands[0], precedence(e.operands[0]) < prec, out);
        out += ' ';
        out += to_string(e.binary_op);
        out += ' ';
        emit_wrapped(e.operands[1], precedence(e.operands[1]) <= prec, out);
        return;
    }
    }
}

void emit_block(const std::vector<Stmt>& body, int indent, std::string& out);

void emit(const Stmt& s, int indent, std::string& out)
{
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    switch (s.kind) {
    case StmtKind::VarDecl:
        out += "var " + s.name + ": " + std::string(to_string(s.declared_type)) + " = ";
        emit(s.exprs[0], out);
        out += ";\n";
        return;
    case StmtKind::Assign:
        out += s.name + " = ";
        emit(s.exprs[0], out);
        out += ";\n";
        return;
    case StmtKind::ArrayAssign:
        out += s.name + "[";
        emit(s.exprs[0], out);
        out += "] = ";
        emit(s.exprs[1], out);
        out += ";\n";
        return;
    case StmtKind::Return:
        out += "return ";
        emit(s.exprs[0], out);
        out += ";\n";
        return;
    case StmtKind::While:
        out += "while (";
        emit(s.exprs[0], out);
        out += ") ";
        emit_block(s.body, indent, out);
        out += '\n';
        return;
    case StmtKind::If: {
        const Stmt* cur = &s;
        for (;;) {
            out += "if (";
            emit(cur->exprs[0], out);
            out += ") ";
            emit_block(cur->body, indent, out);
            if (!cur->has_else)
                break;
            out += " else ";
            if (cur->else_body.size() == 1 && cur->else_body[0].kind == StmtKind::If) {
                cur = &cur->else_body[0];
                continue;
            }
            emit_block(cur->else_body, indent, out);
            break;
        }
        out += '\n';
        return;
    }
    }
}

void emit_block(const std::vector<Stmt>& body, int indent, std::string& out)
{
    out += "{\n";
    for (const auto& s : body)
        emit(s, indent + 1, out);
    out.append(static_cast<std::size_t>(indent) * 2, ' ');
    out += '}';
}

}  // namespace

std::string print_expr(const Expr& expr)
{
    std::string out;
    emit(expr, out);
    return out;
}

std::string print_stmt(const Stmt& stmt, int indent)
{
    std::string out;
    emit(stmt, indent, out);
    return out;
}

std::string print_function(const FunctionDecl& fn)
{
    std::string out = "fun " + fn.name + "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
        if (i)
            out += ", ";
        out += fn.params[i].name + ": " + std::string(to_string(fn.params[i].type));
    }
    out += ") -> " + std::string(to_string(fn.return_type)) + " ";
    emit_block(fn.body, 0, out);
    out += '\n';
    return out;
}

std::string print_unit(const SourceUnit& unit)
{
    std::string out;
    for (std::size_t i = 0; i < unit.functions.size(); ++i) {
        if (i)
            out += '\n';
        out += print_function(unit.functions[i]);
    }
    return out;
}

}  // namespace arena::minilang
