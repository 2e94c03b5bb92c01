#pragma once

#include "arena/minilang/typecheck.hpp"

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace arena::mutation {

/// Listed in enumeration order.
enum class MutationOperator
{
    AOR,  // arithmetic operator replacement within + - * / %
    ROR,  // relational operator replacement within < <= > >= == !=
    LOR,  // && <-> ||
    UOI,  // wrap an int operand in `-` or a bool operand in `!`
    CRP,  // integer literal c -> c+1, c-1, 0 (c+2 when 0 collides)
    SDL,  // delete one non-return statement
};

inline constexpr MutationOperator kAllOperators[] = {
    MutationOperator::AOR, MutationOperator::ROR, MutationOperator::LOR,
    MutationOperator::UOI, MutationOperator::CRP, MutationOperator::SDL,
};

std::string_view to_string(MutationOperator op) noexcept;
std::optional<MutationOperator> parse_operator(std::string_view name) noexcept;

/// Parses a comma-separated list such as "AOR,ROR". Throws
/// Error("UnknownOperator").
std::vector<MutationOperator> parse_operator_list(std::string_view list);

struct MutantCandidate
{
    MutationOperator op = MutationOperator::AOR;
    minilang::SourcePos site;
    std::string original_fragment;  // canonical text of the node, one line
    std::string mutated_fragment;   // "(deleted)" for SDL
    std::string mutated_source;     // original text with only the site rewritten
};

/// Every first-order mutant of `unit` for the given operators, in AST
/// preorder and, per node, in operator order. Candidates are pairwise
/// structurally distinct, typecheck, and keep every other line of the source
/// byte-identical.
std::vector<MutantCandidate> enumerate_mutants(const minilang::TypedUnit& unit,
                                               const std::vector<MutationOperator>& ops);

/// `<op> <line>:<col> <original> -> <mutated>`
std::string format_candidate(const MutantCandidate& candidate);

struct AstEditSummary
{
    std::size_t edited_node_count = 0;
    std::set<int> edited_lines;  // lines of the original source

    friend bool operator==(const AstEditSummary&, const AstEditSummary&) = default;
};

/// Top-down tree comparison. Functions are matched by name. Equal-kinded
/// nodes recurse and cost 1 if their own attributes differ; wrapping a node in
/// a unary operator (or removing one) costs 1; any other differing node costs
/// the size of its replacement subtree, minimum 1. Statement lists are aligned
/// with deletions costing 1 and insertions costing the inserted subtree size.
///
/// Lines: an attribute change or wrap reports the node's own line, a
/// replacement or deletion every line of the original subtree, and an
/// insertion the line of the next original sibling (or of the enclosing
/// statement or function header when appended at the end of a block).
AstEditSummary ast_edit_summary(const minilang::SourceUnit& original,
                                const minilang::SourceUnit& edited);

struct MutantLimits
{
    std::size_t max_edited_nodes = 5;
};

struct ValidatedMutant
{
    minilang::TypedUnit unit;
    AstEditSummary summary;
};

/// Accepts an attacker's full-source edit. Throws SyntaxError or
/// TypeCheckFailed from loading, then Error with code SignatureChanged,
/// FunctionAddedOrRemoved, IdenticalToOriginal or EditTooLarge.
ValidatedMutant validate_mutant_submission(const minilang::TypedUnit& original,
                                           std::string_view edited_source,
                                           const MutantLimits& limits = {});

}  // namespace arena::mutation
