#pragma once

#include "arena/minilang/interpreter.hpp"
#include "arena/minilang/typecheck.hpp"
#include "arena/minilang/value.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace arena::runner {

inline constexpr std::size_t kMaxAssertions = 10;

struct Assertion
{
    std::string fn;
    std::vector<minilang::Value> args;
    minilang::Value expected;

    friend bool operator==(const Assertion&, const Assertion&) = default;
};

struct TestCase
{
    std::string id;
    std::string author;
    std::vector<Assertion> assertions;
};

/// A test that passed on the original unit, with the lines its assertions
/// executed there.
struct ValidTest
{
    TestCase test;
    std::set<int> covered_lines;
};

/// Rejection of a test. `index` is the offending assertion (0-based) when one
/// is to blame. Codes: EmptyTest, TooManyAssertions, UnknownFunction,
/// ArityOrTypeMismatch, AssertionFailsOnOriginal, TrapOnOriginal.
class TestRejected : public Error
{
public:
    TestRejected(std::string code, const std::string& message, std::optional<std::size_t> index = {})
        : Error(std::move(code), message), index_(index)
    {}

    std::optional<std::size_t> index() const noexcept { return index_; }

private:
    std::optional<std::size_t> index_;
};

ValidTest validate_test(const minilang::TypedUnit& unit, TestCase test,
                        std::uint64_t budget = minilang::kDefaultStepBudget);

struct KillResult
{
    bool killed = false;
    std::size_t index = 0;  // first differing assertion when killed
    std::optional<minilang::Outcome> baseline_outcome;
    std::optional<minilang::Outcome> variant_outcome;
};

/// Runs every assertion against both units in order and reports the first
/// whose Outcomes differ. Symmetric in its two unit arguments.
KillResult first_difference(const minilang::TypedUnit& baseline, const minilang::TypedUnit& variant,
                            const std::vector<Assertion>& assertions, std::uint64_t budget);

KillResult kill_check(const minilang::TypedUnit& original, const minilang::TypedUnit& mutant,
                      const ValidTest& test, std::uint64_t budget = minilang::kDefaultStepBudget);

enum class Verdict
{
    NotRun,
    Survived,
    Killed,
};

std::string_view to_string(Verdict v) noexcept;

struct KillMatrix
{
    std::vector<std::string> test_ids;
    std::vector<std::string> mutant_ids;
    std::map<std::pair<std::string, std::string>, Verdict> entries;  // (test, mutant)

    Verdict at(const std::string& test, const std::string& mutant) const;
    bool killed(const std::string& mutant) const;
};

struct NamedMutant
{
    std::string id;
    minilang::TypedUnit unit;
};

struct KillMatrixResult
{
    KillMatrix matrix;
    double mutation_score = 1.0;  // killed / total; 1.0 when there are no mutants
    std::size_t killed = 0;
    std::size_t total = 0;
};

KillMatrixResult build_kill_matrix(const minilang::TypedUnit& original,
                                   const std::vector<NamedMutant>& mutants,
                                   const std::vector<ValidTest>& tests,
                                   std::uint64_t budget = minilang::kDefaultStepBudget);

struct CoverageReport
{
    std::map<std::string, std::set<int>> per_test;
    std::set<int> suite;
};

CoverageReport coverage_report(const std::vector<ValidTest>& tests);

// ---- bounded equivalence oracle ----

inline constexpr std::uint64_t kMaxDomainTuples = 1'000'000;

/// Candidate values for one parameter, in the order they are tried.
struct ParamDomain
{
    std::vector<minilang::Value> values;
    std::string description;
};

struct DomainSpec
{
    std::int64_t int_lo = -8;
    std::int64_t int_hi = 8;
    std::size_t array_max_len = 3;
    std::int64_t element_lo = -2;
    std::int64_t element_hi = 2;
};

/// One ParamDomain per parameter of `fn`. Ints ascend; bools are false then
/// true; arrays are ordered by length, then lexicographically.
std::vector<ParamDomain> make_domain(const minilang::FunctionDecl& fn, const DomainSpec& spec = {});

struct Counterexample
{
    std::string fn;
    std::vector<minilang::Value> args;
    minilang::Outcome original;
    minilang::Outcome mutant;
};

struct EquivalenceVerdict
{
    std::string domain;                    // human-readable description
    std::optional<Counterexample> counterexample;  // empty means Equivalent
    std::uint64_t tuples_checked = 0;

    bool equivalent() const noexcept { return !counterexample; }
};

/// Exhaustive comparison of `fn` over the cross product of `domain`, first
/// parameter varying slowest. Throws Error("DomainTooLarge") above
/// kMaxDomainTuples and Error("UnknownFunction").
EquivalenceVerdict bounded_equivalence_oracle(const minilang::TypedUnit& original,
                                              const minilang::TypedUnit& mutant,
                                              const std::string& fn,
                                              const std::vector<ParamDomain>& domain,
                                              std::uint64_t budget = minilang::kDefaultStepBudget);

// ---- JSON forms ----

nlohmann::ordered_json value_to_json(const minilang::Value& v);
/// Integers, booleans and arrays of integers. Throws Error("MalformedTest").
minilang::Value value_from_json(const nlohmann::json& j);

nlohmann::ordered_json assertion_to_json(const Assertion& a);
Assertion assertion_from_json(const nlohmann::json& j);

/// A test file: array of {fn, args, expected}.
std::vector<Assertion> assertions_from_json(const nlohmann::json& j);
nlohmann::ordered_json assertions_to_json(const std::vector<Assertion>& assertions);

}  // namespace arena::runner
