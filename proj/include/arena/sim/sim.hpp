#pragma once

#include "arena/common/rng.hpp"
#include "arena/game/game.hpp"
#include "arena/mutation/mutation.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace arena::sim {

inline constexpr std::size_t kDefenderTries = 20;

/// Submits enumerated first-order mutants (all operators), each at most once,
/// drawn uniformly from those not yet submitted.
class AttackerBot
{
public:
    explicit AttackerBot(const minilang::TypedUnit& unit);

    /// Next mutant source, or nullopt to pass.
    std::optional<std::string> move(Rng& rng);
    std::size_t remaining() const noexcept { return remaining_.size(); }

private:
    std::vector<std::string> remaining_;
};

/// Draws up to `tries` one-assertion tests with arguments from the oracle's
/// default domain and expected values from the original unit. Returns the
/// first that validates and kills an Alive mutant or adds coverage. Reads
/// live mutants from the state, which a human defender cannot see.
class DefenderBot
{
public:
    DefenderBot(const minilang::TypedUnit& unit, std::size_t tries = kDefenderTries);

    std::optional<std::vector<runner::Assertion>> move(const game::GameState& state, Rng& rng) const;

private:
    minilang::TypedUnit unit_;
    std::size_t tries_;
    std::vector<std::pair<std::string, std::vector<runner::ParamDomain>>> functions_;
};

struct PlayedGame
{
    game::GameState state;
    std::vector<game::GameEvent> events;
};

/// One bot-vs-bot game: attacker and defender alternate, starting with the
/// attacker, until both pass in a row or the game stops accepting events.
/// Timestamps are synthetic, so the transcript depends only on the inputs.
PlayedGame play_game(const std::string& game_id, const game::GameConfig& config, std::uint64_t seed,
                     std::size_t defender_tries = kDefenderTries);

struct GameSummary
{
    std::string game_id;
    std::uint64_t seed = 0;
    std::uint64_t events = 0;
    std::string finish_reason;
    std::size_t killed = 0;  // AOR and ROR candidates killed by the final suite
    std::size_t total = 0;
    std::vector<std::string> unreached;  // killable candidates the suite missed
    std::int64_t attacker_points = 0;
    std::int64_t defender_points = 0;
    std::string state_hash;
};

struct SimReport
{
    std::string unit_name;
    std::uint64_t seed = 0;
    game::GameConfig config;
    std::vector<GameSummary> games;
    double mean_length = 0;
    double median_length = 0;
    std::int64_t attacker_points = 0;
    std::int64_t defender_points = 0;
    double wall_clock_seconds = 0;  // not part of the serialized report
};

struct SimOptions
{
    /// Event logs and analytics statement logs go here; empty writes nothing.
    std::filesystem::path data_dir;
    std::size_t defender_tries = kDefenderTries;
};

/// Plays `n_games` games of `config.unit_source`. Game i uses the i-th draw of
/// an Rng seeded with `seed`.
SimReport run_simulation(const game::GameConfig& config, std::uint64_t n_games, std::uint64_t seed,
                         const SimOptions& options = {});

/// Canonical form; omits the wall-clock time so equal inputs give equal bytes.
nlohmann::ordered_json report_to_json(const SimReport& report);

/// AOR and ROR candidates of `unit`, the population the report scores.
std::vector<mutation::MutantCandidate> scored_candidates(const minilang::TypedUnit& unit);

}  // namespace arena::sim
