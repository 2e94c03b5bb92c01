#include "site_scanner.hpp"

#include "arena/minilang/printer.hpp"

namespace arena::testsupport {

using namespace minilang;

namespace {

void scan(const Expr& e, bool under_unary, SiteCounts& c)
{
    if (e.kind == ExprKind::Binary) {
        if (is_arithmetic(e.binary_op))
            ++c.arithmetic;
        else if (is_relational(e.binary_op))
            ++c.relational;
        else
            ++c.logical;
    }
    if (e.kind == ExprKind::IntLit)
        ++c.int_literals;
    if (!under_unary && (e.type == Type::Int || e.type == Type::Bool))
        ++c.negatable;
    for (const auto& op : e.operands)
        scan(op, e.kind == ExprKind::Unary, c);
}

void scan(const std::vector<Stmt>& body, SiteCounts& c)
{
    for (const auto& s : body) {
        for (const auto& e : s.exprs)
            scan(e, false, c);
        scan(s.body, c);
        scan(s.else_body, c);
    }
}

// Visits every statement list in the unit, handing out a mutable reference.
template <typename F>
void each_list(std::vector<Stmt>& body, F&& f)
{
    f(body);
    for (auto& s : body) {
        each_list(s.body, f);
        each_list(s.else_body, f);
    }
}

}  // namespace

SiteCounts scan_sites(const TypedUnit& unit)
{
    SiteCounts c;
    for (const auto& fn : unit->functions)
        scan(fn.body, c);

    // Count lists first, then delete each statement of the k-th list in a
    // fresh copy so every deletion starts from the original unit.
    std::size_t lists = 0;
    {
        SourceUnit copy = unit.unit();
        for (auto& fn : copy.functions)
            each_list(fn.body, [&](std::vector<Stmt>&) { ++lists; });
    }
    for (std::size_t k = 0; k < lists; ++k) {
        for (std::size_t i = 0;; ++i) {
            SourceUnit copy = unit.unit();
            std::size_t seen = 0;
            bool done = false;
            bool deleted = false;
            for (auto& fn : copy.functions) {
                each_list(fn.body, [&](std::vector<Stmt>& body) {
                    if (seen++ != k)
                        return;
                    if (i >= body.size()) {
                        done = true;
                        return;
                    }
                    if (body[i].kind == StmtKind::Return)
                        return;
                    body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
                    deleted = true;
                });
                if (deleted || done)
                    break;
            }
            if (done)
                break;
            if (!deleted)
                continue;
            const std::string text = print_unit(copy);
            try {
                load_unit(text);
                c.deletions.insert(text);
            } catch (const Error&) {
                // Deletion broke scoping or the all-paths-return rule.
            }
        }
    }
    return c;
}

}  // namespace arena::testsupport
