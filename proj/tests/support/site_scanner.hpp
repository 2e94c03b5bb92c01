#pragma once

#include "arena/minilang/typecheck.hpp"

#include <cstddef>
#include <set>
#include <string>

namespace arena::testsupport {

/// Mutation sites counted straight from the AST, independent of the
/// enumerator. `deletions` holds the canonical text of every distinct unit
/// obtained by removing one non-return statement that still typechecks.
struct SiteCounts
{
    std::size_t arithmetic = 0;
    std::size_t relational = 0;
    std::size_t logical = 0;
    std::size_t negatable = 0;  // int/bool expressions not directly under a unary operator
    std::size_t int_literals = 0;
    std::set<std::string> deletions;

    std::size_t expected_total() const
    {
        return 4 * arithmetic + 5 * relational + logical + negatable + 3 * int_literals +
               deletions.size();
    }
};

SiteCounts scan_sites(const minilang::TypedUnit& unit);

}  // namespace arena::testsupport
