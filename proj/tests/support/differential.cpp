#include "differential.hpp"

#include "program_gen.hpp"
#include "reference_eval.hpp"

#include "arena/minilang/interpreter.hpp"
#include "arena/minilang/typecheck.hpp"

#include <sstream>

namespace arena::testsupport {

using namespace minilang;

namespace {

constexpr std::size_t kMaxReported = 20;

std::string describe(const std::string& source, const std::string& fn, const std::vector<Value>& args,
                     std::uint64_t budget, const std::string& what)
{
    std::ostringstream os;
    os << what << " in " << fn << "(";
    for (std::size_t i = 0; i < args.size(); ++i)
        os << (i ? ", " : "") << args[i].to_string();
    os << ") budget " << budget << "\n" << source;
    return os.str();
}

std::string lines(const std::vector<int>& v)
{
    std::string s;
    for (int x : v)
        s += std::to_string(x) + " ";
    return s;
}

}  // namespace

DifferentialReport run_differential(std::uint64_t seed, int programs, int tuples)
{
    static constexpr std::uint64_t kBudgets[] = {40, 400, 4000};
    Rng rng(seed);
    DifferentialReport report;
    auto fail = [&](std::string msg) {
        if (report.disagreements.size() < kMaxReported)
            report.disagreements.push_back(std::move(msg));
    };
    for (int p = 0; p < programs; ++p) {
        const std::string source = generate_program(rng);
        ++report.programs;
        std::optional<TypedUnit> unit;
        try {
            unit = load_unit(source);
        } catch (const Error& e) {
            fail("generator produced an invalid unit (" + e.code() + ": " + e.what() + ")\n" + source);
            continue;
        }
        const auto& fns = unit->unit().functions;
        for (int t = 0; t < tuples; ++t) {
            const auto& fn = fns[rng.below(fns.size())];
            const auto args = generate_args(rng, fn);
            const std::uint64_t budget = kBudgets[rng.below(3)];
            const auto prod = evaluate_call(*unit, fn.name, args, budget);
            const auto ref = reference_evaluate(unit->unit(), fn.name, args, budget);
            ++report.evaluations;
            ++(prod.outcome.is_value() ? report.value_outcomes : report.trap_outcomes);
            const std::vector<int> ref_lines(ref.covered_lines.begin(), ref.covered_lines.end());
            if (!(prod.outcome == ref.outcome))
                fail(describe(source, fn.name, args, budget,
                              "outcome " + prod.outcome.to_string() + " vs " + ref.outcome.to_string()));
            else if (prod.trace.covered_lines != ref_lines)
                fail(describe(source, fn.name, args, budget,
                              "coverage " + lines(prod.trace.covered_lines) + "vs " + lines(ref_lines)));
            else if (prod.trace.steps_used != ref.steps_used)
                fail(describe(source, fn.name, args, budget,
                              "steps " + std::to_string(prod.trace.steps_used) + " vs " +
                                  std::to_string(ref.steps_used)));
        }
    }
    return report;
}

}  // namespace arena::testsupport
