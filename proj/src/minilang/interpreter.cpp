#include "arena/minilang/interpreter.hpp"

#include "stack_segment.hpp"


namespace arena::minilang {
namespace {

// Calls nest this many levels on one native stack before the next level is
// moved onto a fresh one.
constexpr int kFramesPerSegment = 256;
constexpr std::size_t kSegmentStackBytes = 16u << 20;

struct TrapSignal
{
    TrapKind kind;
};

using Frame = std::vector<Value>;

class Machine
{
public:
    Machine(const SourceUnit& unit, std::uint64_t budget)
        : unit_(unit), budget_(budget), covered_(static_cast<std::size_t>(unit.line_count) + 1, 0)
    {}

    Value call(int fn_index, Frame frame)
    {
        if (depth_ > 0 && depth_ % kFramesPerSegment == 0) {
            Value out;
            detail::run_on_fresh_stack(kSegmentStackBytes,
                                       [&] { out = invoke(fn_index, std::move(frame)); });
            return out;
        }
        return invoke(fn_index, std::move(frame));
    }

    ExecutionTrace trace() const
    {
        ExecutionTrace t;
        t.steps_used = steps_;
        for (std::size_t line = 1; line < covered_.size(); ++line)
            if (covered_[line])
                t.covered_lines.push_back(static_cast<int>(line));
        return t;
    }

private:
    struct DepthScope
    {
        int& depth;
        explicit DepthScope(int& d) : depth(d) { ++depth; }
        ~DepthScope() { --depth; }
    };

    Value invoke(int fn_index, Frame frame)
    {
        DepthScope scope(depth_);
        const FunctionDecl& fn = unit_.functions[static_cast<std::size_t>(fn_index)];
        mark(fn.pos.line);
        frame.resize(static_cast<std::size_t>(fn.frame_size));
        Value result;
        exec_block(fn.body, frame, result);
        return result;
    }

    void charge()
    {
        if (steps_ >= budget_)
            throw TrapSignal{TrapKind::StepBudgetExceeded};
        ++steps_;
    }

    void mark(int line)
    {
        if (line > 0 && static_cast<std::size_t>(line) < covered_.size())
            covered_[static_cast<std::size_t>(line)] = 1;
    }

    // Returns true once a return statement has produced `result`.
    bool exec_block(const std::vector<Stmt>& body, Frame& frame, Value& result)
    {
        for (const auto& s : body)
            if (exec(s, frame, result))
                return true;
        return false;
    }

    bool exec(const Stmt& s, Frame& frame, Value& result)
    {
        charge();
        mark(s.pos.line);
        switch (s.kind) {
        case StmtKind::VarDecl:
        case StmtKind::Assign:
            frame[static_cast<std::size_t>(s.slot)] = eval(s.exprs[0], frame);
            return false;
        case StmtKind::ArrayAssign: {
            const std::int64_t index = eval(s.exprs[0], frame).as_int();
            const std::int64_t value = eval(s.exprs[1], frame).as_int();
            auto& arr = frame[static_cast<std::size_t>(s.slot)].as_array();
            if (index < 0 || static_cast<std::uint64_t>(index) >= arr.size())
                throw TrapSignal{TrapKind::IndexOutOfBounds};
            arr[static_cast<std::size_t>(index)] = value;
            return false;
        }
        case StmtKind::If:
            if (eval(s.exprs[0], frame).as_bool())
                return exec_block(s.body, frame, result);
            return exec_block(s.else_body, frame, result);
        case StmtKind::While:
            for (;;) {
                if (!eval(s.exprs[0], frame).as_bool())
                    return false;
                if (exec_block(s.body, frame, result))
                    return true;
                charge();
                mark(s.pos.line);
            }
        case StmtKind::Return:
            result = eval(s.exprs[0], frame);
            return true;
        }
        return false;
    }

    Value eval(const Expr& e, Frame& frame)
    {
        switch (e.kind) {
        case ExprKind::IntLit:
            mark(e.pos.line);
            return e.int_value;
        case ExprKind::BoolLit:
            mark(e.pos.line);
            return e.bool_value;
        case ExprKind::Var:
            mark(e.pos.line);
            return frame[static_cast<std::size_t>(e.slot)];
        case ExprKind::ArrayLit: {
            mark(e.pos.line);
            Value::Array out;
            out.reserve(e.operands.size());
            for (const auto& el : e.operands)
                out.push_back(eval(el, frame).as_int());
            return out;
        }
        case ExprKind::Index:
            return eval_index(e, frame);
        case ExprKind::Unary: {
            mark(e.pos.line);
            const Value x = eval(e.operands[0], frame);
            if (e.unary_op == UnaryOp::Not)
                return !x.as_bool();
            return static_cast<std::int64_t>(0ULL - static_cast<std::uint64_t>(x.as_int()));
        }
        case ExprKind::Binary:
            return eval_binary(e, frame);
        case ExprKind::Call: {
            mark(e.pos.line);
            Frame args;
            args.reserve(e.operands.size());
            for (const auto& a : e.operands)
                args.push_back(eval(a, frame));
            return call(e.slot, std::move(args));
        }
        }
        return Value{};
    }

    Value eval_index(const Expr& e, Frame& frame)
    {
        mark(e.pos.line);
        const Expr& base = e.operands[0];
        std::int64_t index = 0;
        if (base.kind == ExprKind::Var) {
            // Read straight out of the slot instead of copying the array.
            mark(base.pos.line);
            index = eval(e.operands[1], frame).as_int();
            const auto& arr = frame[static_cast<std::size_t>(base.slot)].as_array();
            return element(arr, index);
        }
        const Value arr = eval(base, frame);
        index = eval(e.operands[1], frame).as_int();
        return element(arr.as_array(), index);
    }

    static std::int64_t element(const Value::Array& arr, std::int64_t index)
    {
        if (index < 0 || static_cast<std::uint64_t>(index) >= arr.size())
            throw TrapSignal{TrapKind::IndexOutOfBounds};
        return arr[static_cast<std::size_t>(index)];
    }

    Value eval_binary(const Expr& e, Frame& frame)
    {
        charge();
        mark(e.pos.line);
        switch (e.binary_op) {
        case BinaryOp::And:
            return eval(e.operands[0], frame).as_bool() && eval(e.operands[1], frame).as_bool();
        case BinaryOp::Or:
            return eval(e.operands[0], frame).as_bool() || eval(e.operands[1], frame).as_bool();
        default:
            break;
        }
        const std::int64_t lhs = eval(e.operands[0], frame).as_int();
        const std::int64_t rhs = eval(e.operands[1], frame).as_int();
        const auto ul = static_cast<std::uint64_t>(lhs);
        const auto ur = static_cast<std::uint64_t>(rhs);
        switch (e.binary_op) {
        case BinaryOp::Add: return static_cast<std::int64_t>(ul + ur);
        case BinaryOp::Sub: return static_cast<std::int64_t>(ul - ur);
        case BinaryOp::Mul: return static_cast<std::int64_t>(ul * ur);
        case BinaryOp::Div:
            if (rhs == 0)
                throw TrapSignal{TrapKind::DivByZero};
            return rhs == -1 ? static_cast<std::int64_t>(0ULL - ul) : lhs / rhs;
        case BinaryOp::Mod:
            if (rhs == 0)
                throw TrapSignal{TrapKind::ModByZero};
            return rhs == -1 ? std::int64_t{0} : lhs % rhs;
        case BinaryOp::Lt: return lhs < rhs;
        case BinaryOp::Le: return lhs <= rhs;
        case BinaryOp::Gt: return lhs > rhs;
        case BinaryOp::Ge: return lhs >= rhs;
        case BinaryOp::Eq: return lhs == rhs;
        case BinaryOp::Ne: return lhs != rhs;
        default: break;
        }
        return Value{};
    }

    const SourceUnit& unit_;
    std::uint64_t budget_;
    std::uint64_t steps_ = 0;
    int depth_ = 0;
    std::vector<char> covered_;
};

}  // namespace

Evaluation evaluate_call(const TypedUnit& typed, std::string_view fn, std::span<const Value> args,
                         std::uint64_t budget)
{
    const SourceUnit& unit = typed.unit();
    if (budget == 0)
        throw Error("InvalidBudget", "step budget must be positive");
    const int index = unit.index_of(fn);
    if (index < 0)
        throw Error("UnknownFunction", "unknown function '" + std::string(fn) + "'");
    const FunctionDecl& decl = unit.functions[static_cast<std::size_t>(index)];
    if (decl.params.size() != args.size())
        throw Error("ArityOrTypeMismatch", "'" + decl.name + "' takes " +
                                               std::to_string(decl.params.size()) + " argument(s), " +
                                               std::to_string(args.size()) + " given");
    for (std::size_t i = 0; i < args.size(); ++i)
        if (args[i].type() != decl.params[i].type)
            throw Error("ArityOrTypeMismatch", "argument " + std::to_string(i + 1) + " of '" +
                                                   decl.name + "' must be " +
                                                   std::string(to_string(decl.params[i].type)));

    Machine machine(unit, budget);
    Evaluation result{Outcome::value(Value{}), {}};
    try {
        result.outcome = Outcome::value(machine.call(index, Frame(args.begin(), args.end())));
    } catch (const TrapSignal& trap) {
        result.outcome = Outcome::trap(trap.kind);
    }
    result.trace = machine.trace();
    return result;
}

}  // namespace arena::minilang
