#include "arena/mutation/mutation.hpp"

#include <algorithm>
#include <map>
#include <utility>

namespace arena::mutation {

using namespace minilang;

namespace {

struct Diff
{
    std::size_t cost = 0;
    std::set<int> lines;

    void merge(const Diff& other)
    {
        cost += other.cost;
        lines.insert(other.lines.begin(), other.lines.end());
    }
};

void subtree_lines(const Expr& e, std::set<int>& out)
{
    out.insert(e.pos.line);
    for (const auto& op : e.operands)
        subtree_lines(op, out);
}

void subtree_lines(const Stmt& s, std::set<int>& out)
{
    out.insert(s.pos.line);
    for (const auto& e : s.exprs)
        subtree_lines(e, out);
    for (const auto& b : s.body)
        subtree_lines(b, out);
    for (const auto& b : s.else_body)
        subtree_lines(b, out);
}

template <typename Node>
Diff replacement(const Node& original, const Node& edited)
{
    Diff d;
    d.cost = std::max<std::size_t>(1, node_count(edited));
    subtree_lines(original, d.lines);
    return d;
}

bool same_attributes(const Expr& a, const Expr& b)
{
    switch (a.kind) {
    case ExprKind::IntLit: return a.int_value == b.int_value;
    case ExprKind::BoolLit: return a.bool_value == b.bool_value;
    case ExprKind::Var:
    case ExprKind::Call: return a.name == b.name;
    case ExprKind::Unary: return a.unary_op == b.unary_op;
    case ExprKind::Binary: return a.binary_op == b.binary_op;
    default: return true;
    }
}

bool same_attributes(const Stmt& a, const Stmt& b)
{
    return a.name == b.name && a.has_else == b.has_else &&
           (a.kind != StmtKind::VarDecl || a.declared_type == b.declared_type);
}

class Differ
{
public:
    Diff expr(const Expr& a, const Expr& b)
    {
        if (structurally_equal(a, b))
            return {};
        if (a.kind == b.kind && a.operands.size() == b.operands.size()) {
            Diff d;
            if (!same_attributes(a, b)) {
                d.cost = 1;
                d.lines.insert(a.pos.line);
            }
            for (std::size_t i = 0; i < a.operands.size(); ++i)
                d.merge(expr(a.operands[i], b.operands[i]));
            return d;
        }
        Diff best = replacement(a, b);
        // A unary operator inserted above, or removed from above, a node.
        auto consider = [&](Diff inner, int line) {
            inner.cost += 1;
            inner.lines.insert(line);
            if (inner.cost <= best.cost)
                best = std::move(inner);
        };
        if (b.kind == ExprKind::Unary && a.kind != ExprKind::Unary)
            consider(expr(a, b.operands[0]), a.pos.line);
        else if (a.kind == ExprKind::Unary && b.kind != ExprKind::Unary)
            consider(expr(a.operands[0], b), a.pos.line);
        return best;
    }

    Diff stmt(const Stmt& a, const Stmt& b)
    {
        const auto key = std::make_pair(&a, &b);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        Diff d;
        if (structurally_equal(a, b)) {
            // no edit
        } else if (a.kind == b.kind && a.exprs.size() == b.exprs.size()) {
            if (!same_attributes(a, b)) {
                d.cost = 1;
                d.lines.insert(a.pos.line);
            }
            for (std::size_t i = 0; i < a.exprs.size(); ++i)
                d.merge(expr(a.exprs[i], b.exprs[i]));
            d.merge(list(a.body, b.body, a.pos.line));
            d.merge(list(a.else_body, b.else_body, a.pos.line));
        } else {
            d = replacement(a, b);
        }
        memo_.emplace(key, d);
        return d;
    }

    // Cheapest alignment of two statement lists. Ties prefer matching, then
    // deleting, then inserting, so the reported lines are deterministic.
    Diff list(const std::vector<Stmt>& a, const std::vector<Stmt>& b, int header_line)
    {
        const std::size_t n = a.size();
        const std::size_t m = b.size();
        if (n == m && std::equal(a.begin(), a.end(), b.begin(), b.end(),
                                 [](const Stmt& x, const Stmt& y) { return structurally_equal(x, y); }))
            return {};
        std::vector<std::vector<std::size_t>> cost(n + 1, std::vector<std::size_t>(m + 1, 0));
        for (std::size_t i = n + 1; i-- > 0;) {
            for (std::size_t j = m + 1; j-- > 0;) {
                if (i == n && j == m)
                    continue;
                std::size_t best = SIZE_MAX;
                if (i < n && j < m)
                    best = std::min(best, stmt(a[i], b[j]).cost + cost[i + 1][j + 1]);
                if (i < n)
                    best = std::min(best, 1 + cost[i + 1][j]);
                if (j < m)
                    best = std::min(best, node_count(b[j]) + cost[i][j + 1]);
                cost[i][j] = best;
            }
        }
        Diff d;
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < n || j < m) {
            if (i < n && j < m) {
                Diff match = stmt(a[i], b[j]);
                if (match.cost + cost[i + 1][j + 1] == cost[i][j]) {
                    d.merge(match);
                    ++i;
                    ++j;
                    continue;
                }
            }
            if (i < n && 1 + cost[i + 1][j] == cost[i][j]) {
                d.cost += 1;
                subtree_lines(a[i], d.lines);
                ++i;
                continue;
            }
            d.cost += node_count(b[j]);
            d.lines.insert(i < n ? a[i].pos.line : header_line);
            ++j;
        }
        return d;
    }

private:
    std::map<std::pair<const Stmt*, const Stmt*>, Diff> memo_;
};

}  // namespace

AstEditSummary ast_edit_summary(const SourceUnit& original, const SourceUnit& edited)
{
    Differ differ;
    AstEditSummary summary;
    for (const auto& fn : original.functions) {
        const FunctionDecl* other = edited.find(fn.name);
        if (!other)
            continue;
        Diff d = differ.list(fn.body, other->body, fn.pos.line);
        summary.edited_node_count += d.cost;
        summary.edited_lines.insert(d.lines.begin(), d.lines.end());
    }
    return summary;
}

ValidatedMutant validate_mutant_submission(const TypedUnit& original, std::string_view edited_source,
                                           const MutantLimits& limits)
{
    TypedUnit edited = load_unit(edited_source, original->name);
    const auto& a = original->functions;
    const auto& b = edited->functions;
    for (const auto& fn : a)
        if (!edited->find(fn.name))
            throw Error("FunctionAddedOrRemoved", "function '" + fn.name + "' was removed");
    for (const auto& fn : b)
        if (!original->find(fn.name))
            throw Error("FunctionAddedOrRemoved", "function '" + fn.name + "' was added");
    for (std::size_t i = 0; i < a.size(); ++i) {
        const FunctionDecl& other = *edited->find(a[i].name);
        if (!same_signature(a[i], other))
            throw Error("SignatureChanged", "signature of '" + a[i].name + "' changed");
        if (b[i].name != a[i].name)
            throw Error("SignatureChanged", "functions were reordered");
    }
    if (structurally_equal(original.unit(), edited.unit()))
        throw Error("IdenticalToOriginal", "the edit does not change the program");
    AstEditSummary summary = ast_edit_summary(original.unit(), edited.unit());
    if (summary.edited_node_count > limits.max_edited_nodes)
        throw Error("EditTooLarge", "edit touches " + std::to_string(summary.edited_node_count) +
                                        " nodes, limit is " +
                                        std::to_string(limits.max_edited_nodes));
    return {std::move(edited), std::move(summary)};
}

}  // namespace arena::mutation
