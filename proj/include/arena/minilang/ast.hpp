#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace arena::minilang {

enum class Type
{
    Int,
    Bool,
    IntArray,
};

std::string_view to_string(Type type) noexcept;

/// 1-based line and column of the token that introduces a node. For binary
/// expressions this is the operator token.
struct SourcePos
{
    int line = 0;
    int column = 0;

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Half-open byte range of a node's text in the source it was parsed from.
struct SourceSpan
{
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class UnaryOp
{
    Neg,
    Not,
};

enum class BinaryOp
{
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Or,
};

std::string_view to_string(UnaryOp op) noexcept;
std::string_view to_string(BinaryOp op) noexcept;

bool is_arithmetic(BinaryOp op) noexcept;
bool is_relational(BinaryOp op) noexcept;  // includes == and !=
bool is_logical(BinaryOp op) noexcept;

enum class ExprKind
{
    IntLit,
    BoolLit,
    Var,
    ArrayLit,
    Index,
    Unary,
    Binary,
    Call,
};

std::string_view to_string(ExprKind kind) noexcept;

struct Expr
{
    ExprKind kind = ExprKind::IntLit;
    SourcePos pos;
    SourceSpan span;

    std::int64_t int_value = 0;
    bool bool_value = false;
    std::string name;  // Var, Call
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;

    // Index: {array, index}; Unary: {operand}; Binary: {lhs, rhs};
    // Call: arguments; ArrayLit: elements.
    std::vector<Expr> operands;

    // Filled in by the typechecker.
    Type type = Type::Int;
    int slot = -1;  // Var: local slot; Call: callee function index
};

enum class StmtKind
{
    VarDecl,
    Assign,
    ArrayAssign,
    If,
    While,
    Return,
};

std::string_view to_string(StmtKind kind) noexcept;

struct Stmt
{
    StmtKind kind = StmtKind::Return;
    SourcePos pos;
    SourceSpan span;

    std::string name;                     // VarDecl, Assign, ArrayAssign target
    Type declared_type = Type::Int;       // VarDecl
    std::vector<Expr> exprs;              // see below
    std::vector<Stmt> body;               // If then-branch, While body
    std::vector<Stmt> else_body;          // If
    bool has_else = false;
    bool else_if = false;  // If: the else branch was written `else if`; layout only

    int slot = -1;  // VarDecl/Assign/ArrayAssign target slot, set by the typechecker

    // exprs layout: VarDecl, Assign, Return: {value}; ArrayAssign: {index, value};
    // If, While: {condition}.
};

struct Param
{
    std::string name;
    Type type = Type::Int;
    SourcePos pos;
};

struct FunctionDecl
{
    std::string name;
    std::vector<Param> params;
    Type return_type = Type::Int;
    std::vector<Stmt> body;
    SourcePos pos;
    SourceSpan span;

    int frame_size = 0;  // local slots incl. params, set by the typechecker
};

struct SourceUnit
{
    std::string name;
    std::string source;
    std::vector<FunctionDecl> functions;
    int line_count = 1;

    const FunctionDecl* find(std::string_view fn) const noexcept;
    int index_of(std::string_view fn) const noexcept;
};

// Structural equality ignores positions, spans and typechecker annotations.
bool structurally_equal(const Expr& a, const Expr& b) noexcept;
bool structurally_equal(const Stmt& a, const Stmt& b) noexcept;
bool structurally_equal(const FunctionDecl& a, const FunctionDecl& b) noexcept;
bool structurally_equal(const SourceUnit& a, const SourceUnit& b) noexcept;

bool same_signature(const FunctionDecl& a, const FunctionDecl& b) noexcept;

/// Number of AST nodes in the subtree (each Expr and Stmt counts once).
std::size_t node_count(const Expr& e) noexcept;
std::size_t node_count(const Stmt& s) noexcept;

}  // namespace arena::minilang
