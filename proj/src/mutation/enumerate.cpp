#include "arena/mutation/mutation.hpp"

#include "arena/minilang/printer.hpp"

#include <stdexcept>

namespace arena::mutation {

using namespace minilang;

std::string_view to_string(MutationOperator op) noexcept
{
    switch (op) {
    case MutationOperator::AOR: return "AOR";
    case MutationOperator::ROR: return "ROR";
    case MutationOperator::LOR: return "LOR";
    case MutationOperator::UOI: return "UOI";
    case MutationOperator::CRP: return "CRP";
    case MutationOperator::SDL: return "SDL";
    }
    return "?";
}

std::optional<MutationOperator> parse_operator(std::string_view name) noexcept
{
    for (auto op : kAllOperators)
        if (to_string(op) == name)
            return op;
    return std::nullopt;
}

std::vector<MutationOperator> parse_operator_list(std::string_view list)
{
    std::vector<MutationOperator> out;
    std::size_t start = 0;
    while (start <= list.size()) {
        std::size_t comma = list.find(',', start);
        if (comma == std::string_view::npos)
            comma = list.size();
        const auto name = list.substr(start, comma - start);
        const auto op = parse_operator(name);
        if (!op)
            throw Error("UnknownOperator", "unknown mutation operator '" + std::string(name) + "'");
        out.push_back(*op);
        start = comma + 1;
    }
    return out;
}

std::string format_candidate(const MutantCandidate& c)
{
    return std::string(to_string(c.op)) + " " + std::to_string(c.site.line) + ":" +
           std::to_string(c.site.column) + " " + c.original_fragment + " -> " + c.mutated_fragment;
}

namespace {

constexpr BinaryOp kArithmetic[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div,
                                    BinaryOp::Mod};
constexpr BinaryOp kRelational[] = {BinaryOp::Lt, BinaryOp::Le, BinaryOp::Gt,
                                    BinaryOp::Ge, BinaryOp::Eq, BinaryOp::Ne};

std::string one_line(std::string text)
{
    std::string out;
    bool space = false;
    for (char c : text) {
        if (c == '\n' || c == ' ') {
            space = true;
            continue;
        }
        if (space && !out.empty())
            out += ' ';
        space = false;
        out += c;
    }
    return out;
}

// The replacement values for literal c: three distinct values, none equal to
// c, and none equal to -c (that product belongs to UOI).
std::vector<std::int64_t> literal_replacements(std::int64_t c)
{
    auto add = [c](std::uint64_t d) {
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(c) + d);
    };
    const std::int64_t up = add(1);
    const std::int64_t down = add(~std::uint64_t{0});
    const bool zero_collides = c == 0 || up == 0 || down == 0;
    return {up, down, zero_collides ? add(2) : 0};
}

// Preorder walk shared by the enumerator and by the reconstruction of the
// expected mutant tree, so that node ids agree.
template <typename List, typename ExprT, typename OnStmt, typename OnExpr>
struct Walker
{
    OnStmt& on_stmt;
    OnExpr& on_expr;

    void expr(ExprT& e, bool under_unary)
    {
        on_expr(e, under_unary);
        for (auto& op : e.operands)
            expr(op, e.kind == ExprKind::Unary);
    }

    void block(List& body, bool else_if_child)
    {
        for (std::size_t i = 0; i < body.size(); ++i) {
            on_stmt(body, i, else_if_child);
            auto& s = body[i];
            for (auto& e : s.exprs)
                expr(e, false);
            block(s.body, false);
            block(s.else_body, s.else_if);
        }
    }
};

template <typename OnStmt, typename OnExpr>
void walk(const SourceUnit& unit, OnStmt&& on_stmt, OnExpr&& on_expr)
{
    Walker<const std::vector<Stmt>, const Expr, OnStmt, OnExpr> w{on_stmt, on_expr};
    for (const auto& fn : unit.functions)
        w.block(fn.body, false);
}

template <typename OnStmt, typename OnExpr>
void walk(SourceUnit& unit, OnStmt&& on_stmt, OnExpr&& on_expr)
{
    Walker<std::vector<Stmt>, Expr, OnStmt, OnExpr> w{on_stmt, on_expr};
    for (auto& fn : unit.functions)
        w.block(fn.body, false);
}

class Enumerator
{
public:
    Enumerator(const SourceUnit& unit, const std::vector<MutationOperator>& ops) : unit_(unit)
    {
        for (auto op : ops)
            enabled_[static_cast<int>(op)] = true;
    }

    std::vector<MutantCandidate> run()
    {
        walk(
            unit_,
            [&](const std::vector<Stmt>& siblings, std::size_t i, bool else_if_child) {
                stmt(siblings, i, else_if_child);
                ++stmt_id_;
            },
            [&](const Expr& e, bool under_unary) {
                expr(e, under_unary);
                ++expr_id_;
            });
        return std::move(out_);
    }

private:
    bool on(MutationOperator op) const { return enabled_[static_cast<int>(op)]; }

    std::string splice(std::size_t begin, std::size_t end, std::string_view text) const
    {
        std::string s = unit_.source;
        s.replace(begin, end - begin, text);
        return s;
    }

    std::string text(std::size_t begin, std::size_t end) const
    {
        return unit_.source.substr(begin, end - begin);
    }

    // The unit as it should look after the mutation, built on the AST.
    template <typename F>
    SourceUnit expected_expr(F&& mutate) const
    {
        SourceUnit copy = unit_;
        std::size_t id = 0;
        walk(
            copy, [](auto&, std::size_t, bool) {},
            [&](Expr& e, bool) {
                if (id++ == expr_id_)
                    mutate(e);
            });
        return copy;
    }

    SourceUnit expected_deletion() const
    {
        SourceUnit copy = unit_;
        std::size_t id = 0;
        std::vector<Stmt>* list = nullptr;
        std::size_t index = 0;
        walk(
            copy,
            [&](std::vector<Stmt>& siblings, std::size_t i, bool) {
                if (id++ == stmt_id_) {
                    list = &siblings;
                    index = i;
                }
            },
            [](Expr&, bool) {});
        list->erase(list->begin() + static_cast<std::ptrdiff_t>(index));
        return copy;
    }

    // Loads each source in turn and records the first whose tree is
    // `expected`. Returns false when none loads, which is only legitimate for
    // statement deletion.
    bool add(MutationOperator op, SourcePos site, std::string original, std::string mutated,
             const SourceUnit& expected, std::initializer_list<std::string> sources)
    {
        for (const auto& source : sources) {
            try {
                if (!structurally_equal(load_unit(source, unit_.name).unit(), expected))
                    continue;
            } catch (const Error&) {
                continue;
            }
            out_.push_back({op, site, std::move(original), std::move(mutated), source});
            return true;
        }
        if (op == MutationOperator::SDL)
            return false;
        throw std::logic_error("no spelling reproduces the mutant at " + std::to_string(site.line) +
                               ":" + std::to_string(site.column));
    }

    void stmt(const std::vector<Stmt>& siblings, std::size_t i, bool else_if_child)
    {
        const Stmt& s = siblings[i];
        // Deleting any member of a run of identical siblings yields the same
        // unit, so only the first member of a run is a site.
        if (!on(MutationOperator::SDL) || s.kind == StmtKind::Return ||
            (i > 0 && structurally_equal(siblings[i - 1], s)))
            return;
        // `else if (...) {...}` must keep a block after the else.
        const std::string_view gap = else_if_child ? "{ }" : "";
        add(MutationOperator::SDL, s.pos, one_line(print_stmt(s)), "(deleted)", expected_deletion(),
            {splice(s.span.begin, s.span.end, gap)});
    }

    std::size_t operator_offset(const Expr& e) const
    {
        const std::string_view op = minilang::to_string(e.binary_op);
        const std::string& src = unit_.source;
        std::size_t i = e.operands[0].span.end;
        const std::size_t end = e.operands[1].span.begin;
        while (i < end) {
            if (src.compare(i, 2, "//") == 0) {
                while (i < end && src[i] != '\n')
                    ++i;
                continue;
            }
            if (src.compare(i, op.size(), op) == 0)
                return i;
            ++i;
        }
        throw std::logic_error("operator token not found");
    }

    void replace_operator(MutationOperator kind, const Expr& e, BinaryOp to)
    {
        Expr m = e;
        m.binary_op = to;
        const std::size_t at = operator_offset(e);
        const std::size_t len = minilang::to_string(e.binary_op).size();
        std::string op(minilang::to_string(to));
        // `/` directly followed by `/` would start a comment.
        if (at + len < unit_.source.size() && unit_.source[at + len] == '/')
            op += ' ';
        // Swapping in an operator of another precedence level can regroup
        // unparenthesised neighbours; the fallback parenthesises the node and
        // both operands, keeping every line break.
        const Expr& lhs = e.operands[0];
        const Expr& rhs = e.operands[1];
        const std::string grouped = "((" + text(lhs.span.begin, lhs.span.end) + ")" +
                                    text(lhs.span.end, at) + op +
                                    text(at + len, rhs.span.begin) + "(" +
                                    text(rhs.span.begin, rhs.span.end) + "))";
        add(kind, e.pos, print_expr(e), print_expr(m),
            expected_expr([to](Expr& x) { x.binary_op = to; }),
            {splice(at, at + len, op), splice(e.span.begin, e.span.end, grouped)});
    }

    void expr(const Expr& e, bool under_unary)
    {
        if (e.kind == ExprKind::Binary) {
            if (is_arithmetic(e.binary_op) && on(MutationOperator::AOR))
                for (auto op : kArithmetic)
                    if (op != e.binary_op)
                        replace_operator(MutationOperator::AOR, e, op);
            if (is_relational(e.binary_op) && on(MutationOperator::ROR))
                for (auto op : kRelational)
                    if (op != e.binary_op)
                        replace_operator(MutationOperator::ROR, e, op);
            if (is_logical(e.binary_op) && on(MutationOperator::LOR))
                replace_operator(MutationOperator::LOR, e,
                                 e.binary_op == BinaryOp::And ? BinaryOp::Or : BinaryOp::And);
        }
        if (on(MutationOperator::UOI) && !under_unary && e.type != Type::IntArray)
            insert_unary(e);
        if (e.kind == ExprKind::IntLit && on(MutationOperator::CRP)) {
            for (std::int64_t v : literal_replacements(e.int_value)) {
                Expr m = e;
                m.int_value = v;
                const std::string digits = std::to_string(v);
                add(MutationOperator::CRP, e.pos, print_expr(e), print_expr(m),
                    expected_expr([v](Expr& x) { x.int_value = v; }),
                    {splice(e.span.begin, e.span.end, digits),
                     splice(e.span.begin, e.span.end, "(" + digits + ")")});
            }
        }
    }

    void insert_unary(const Expr& e)
    {
        const UnaryOp op = e.type == Type::Bool ? UnaryOp::Not : UnaryOp::Neg;
        auto wrap = [op](Expr& x) {
            Expr inner = std::move(x);
            x = Expr{};
            x.kind = ExprKind::Unary;
            x.unary_op = op;
            x.type = inner.type;
            x.operands.push_back(std::move(inner));
        };
        Expr m = e;
        wrap(m);
        const std::string sign(minilang::to_string(op));
        const std::string original = text(e.span.begin, e.span.end);
        const bool bare = e.kind == ExprKind::Var || e.kind == ExprKind::BoolLit;
        add(MutationOperator::UOI, e.pos, print_expr(e), print_expr(m), expected_expr(wrap),
            {splice(e.span.begin, e.span.end, bare ? sign + original : sign + "(" + original + ")")});
    }

    const SourceUnit& unit_;
    bool enabled_[std::size(kAllOperators)] = {};
    std::vector<MutantCandidate> out_;
    std::size_t stmt_id_ = 0;
    std::size_t expr_id_ = 0;
};

}  // namespace

std::vector<MutantCandidate> enumerate_mutants(const TypedUnit& unit,
                                               const std::vector<MutationOperator>& ops)
{
    return Enumerator(unit.unit(), ops).run();
}

}  // namespace arena::mutation
