#pragma once

#include "arena/game/game.hpp"

#include <string>
#include <vector>

namespace arena::testsupport {

std::string abs_diff_mutant(const std::string& line2, const std::string& line3);

/// The scripted game recorded in golden_game.ndjson, played through the
/// engine's public operations. One timestamp per operation.
game::Transition play_golden_script(const std::string& abs_diff_source);

}  // namespace arena::testsupport
