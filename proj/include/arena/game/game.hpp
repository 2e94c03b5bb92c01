#pragma once

#include "arena/common/error.hpp"
#include "arena/minilang/typecheck.hpp"
#include "arena/runner/test_runner.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arena::game {

inline constexpr std::string_view kSystemActor = "System";

struct GameConfig
{
    std::string unit_name = "unit";
    std::string unit_source;
    std::uint64_t max_players_per_role = 8;
    std::uint64_t max_edited_nodes = 5;
    std::uint64_t max_assertions = runner::kMaxAssertions;
    std::uint64_t step_budget = minilang::kDefaultStepBudget;
    std::uint64_t claim_window = 5;
    std::uint64_t max_events = 10'000;  // the game finishes once this many events exist

    friend bool operator==(const GameConfig&, const GameConfig&) = default;
};

/// Throws Error("InvalidConfig") for a zero bound or more assertions than the
/// runner allows, and the load errors of the unit source.
minilang::TypedUnit check_config(const GameConfig& config);

/// Missing fields keep their defaults. Throws Error("InvalidConfig") for
/// unknown fields and values that are not positive integers.
GameConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const GameConfig& config);

enum class Role
{
    Attacker,
    Defender,
};

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

// ---- events ----

struct GameCreated
{
    std::string game_id;
    GameConfig config;
};

struct PlayerJoined
{
    std::string player_id;
    std::string name;
    Role role = Role::Attacker;
    std::string team;
};

struct MutantAccepted
{
    std::string mutant_id;
    std::string source;
    std::string source_hash;  // SHA-256 of source, hex
    std::vector<int> edited_lines;
    std::uint64_t edited_nodes = 0;
    std::string submission_id;
};

struct MutantRejected
{
    std::string source;
    std::string code;
    std::string message;
    std::string submission_id;
};

struct TestAccepted
{
    std::string test_id;
    std::vector<runner::Assertion> assertions;
    std::vector<int> covered_lines;
    std::string submission_id;
};

struct TestRejected
{
    std::vector<runner::Assertion> assertions;
    std::string code;
    std::string message;
    std::optional<std::uint64_t> index;
    std::string submission_id;
};

struct MutantKilled
{
    std::string mutant_id;
    std::string test_id;
    bool at_birth = false;
};

struct MutantSurvivedTest
{
    std::string mutant_id;
    std::string test_id;
};

struct EquivalenceClaimed
{
    std::string mutant_id;
    std::string submission_id;
};

struct ClaimCountered
{
    std::string mutant_id;
    std::vector<runner::Assertion> assertions;
    std::string submission_id;
};

struct ClaimUpheld
{
    std::string mutant_id;
};

struct GameFinished
{
    std::string reason;
};

using EventPayload = std::variant<GameCreated, PlayerJoined, MutantAccepted, MutantRejected, TestAccepted,
                                  TestRejected, MutantKilled, MutantSurvivedTest, EquivalenceClaimed,
                                  ClaimCountered, ClaimUpheld, GameFinished>;

struct GameEvent
{
    std::uint64_t seq = 0;
    std::string timestamp;  // UTC ISO-8601
    std::string actor;      // player id or "System"
    EventPayload payload;
};

std::string_view event_type(const EventPayload& payload) noexcept;
std::string_view event_type(const GameEvent& event) noexcept;
/// Submission id carried by the payload, empty if none.
std::string_view submission_id(const GameEvent& event) noexcept;

/// Fixed field order: seq, timestamp, actor, type, then the payload fields.
nlohmann::ordered_json event_to_json(const GameEvent& event);
/// Throws Error("MalformedEvent").
GameEvent event_from_json(const nlohmann::json& j);
/// One line, no insignificant whitespace, no trailing newline.
std::string canonical_event(const GameEvent& event);

// ---- state ----

enum class GameStatus
{
    Empty,
    Active,
    Finished,
};

enum class MutantStatus
{
    Alive,
    Stillborn,
    Killed,
    RemovedEquivalent,
};

std::string_view to_string(GameStatus s) noexcept;
std::string_view to_string(MutantStatus s) noexcept;

struct Player
{
    std::string id;
    std::string name;
    Role role = Role::Attacker;
    std::string team;
    std::int64_t points = 0;
};

struct Claim
{
    std::string claimant;
    std::uint64_t tests_seen = 0;  // accepted defender tests since the claim opened
};

struct Mutant
{
    std::string id;
    std::string author;
    std::string source;
    std::string source_hash;
    std::set<int> edited_lines;
    std::uint64_t edited_nodes = 0;
    MutantStatus status = MutantStatus::Alive;
    std::string killed_by;  // test id, or the attacker's id after a countered claim
    std::int64_t accrued_points = 0;
    std::vector<std::string> survived_test_ids;
    std::int64_t attacker_points = 0;  // what this mutant currently contributes to its author
    std::optional<Claim> claim;
    std::vector<runner::Assertion> counter_assertions;
    std::optional<minilang::TypedUnit> unit;  // not serialized
};

struct Test
{
    std::string id;
    std::string author;
    std::vector<runner::Assertion> assertions;
    std::set<int> covered_lines;
    std::int64_t points = 0;
};

struct GameState
{
    std::string game_id;
    GameConfig config;
    GameStatus status = GameStatus::Empty;
    std::uint64_t last_seq = 0;
    std::vector<Player> players;
    std::vector<Mutant> mutants;
    std::vector<Test> tests;
    std::uint64_t rejected_mutants = 0;
    std::uint64_t rejected_tests = 0;
    std::optional<minilang::TypedUnit> unit;  // not serialized

    const Player* player(std::string_view id) const;
    const Mutant* mutant(std::string_view id) const;
    const Test* test(std::string_view id) const;
    std::set<int> suite_coverage() const;
};

/// Rejection of an event by the fold. Codes: OutOfOrderEvent, ActorNotInGame,
/// GameNotActive, NotAttacker, NotDefender, InvalidEvent.
class EventRejected : public Error
{
public:
    using Error::Error;
};

/// Applies one event in place. On EventRejected the state is unchanged.
void apply_event(GameState& state, const GameEvent& event);
/// Pure form of apply_event.
GameState applied(GameState state, const GameEvent& event);

/// Field order fixed; unit caches omitted.
nlohmann::ordered_json state_to_json(const GameState& state);
std::string canonical_state(const GameState& state);
/// SHA-256 of canonical_state, hex.
std::string state_hash(const GameState& state);

std::string sha256_hex(std::string_view data);

// ---- scoreboard ----

struct Scoreboard
{
    std::vector<std::pair<std::string, std::int64_t>> players;  // player id, points; join order
    std::vector<std::pair<std::string, std::int64_t>> teams;    // team, total; first appearance order
    std::vector<std::pair<std::string, std::int64_t>> mutants;  // mutant id, attacker points
    std::vector<std::pair<std::string, std::int64_t>> tests;    // test id, defender points
};

Scoreboard scoreboard(const GameState& state);
nlohmann::ordered_json scoreboard_to_json(const GameState& state);

// ---- emitters ----

/// State after an operation and the events it appended, in order.
struct Transition
{
    GameState state;
    std::vector<GameEvent> events;
};

Transition create_game(std::string game_id, GameConfig config, const std::string& timestamp);

/// Errors: GameNotActive, NameTaken, RoleFull, InvalidPlayer.
Transition join_game(const GameState& state, const std::string& name, Role role, const std::string& team,
                     const std::string& timestamp);

/// Validation failures become a MutantRejected event, not an exception.
/// Errors: GameNotActive, ActorNotInGame, NotAttacker.
Transition submit_mutant(const GameState& state, const std::string& attacker, const std::string& source,
                         const std::string& timestamp, const std::string& submission = {});

/// Validation failures become a TestRejected event, not an exception.
/// Errors: GameNotActive, ActorNotInGame, NotDefender.
Transition submit_test(const GameState& state, const std::string& defender,
                       std::vector<runner::Assertion> assertions, const std::string& timestamp,
                       const std::string& submission = {});

/// Errors: GameNotActive, ActorNotInGame, NotDefender, UnknownMutant,
/// MutantNotAlive, ClaimAlreadyOpen.
Transition claim_equivalence(const GameState& state, const std::string& defender, const std::string& mutant_id,
                             const std::string& timestamp, const std::string& submission = {});

/// The counter test is validated like a defender test and must kill the
/// claimed mutant. Errors: GameNotActive, ActorNotInGame, NotAttacker,
/// UnknownMutant, NotMutantAuthor, NoOpenClaim, CounterFailed, and the test
/// rejection codes (as runner::TestRejected).
Transition counter_claim(const GameState& state, const std::string& attacker, const std::string& mutant_id,
                         std::vector<runner::Assertion> assertions, const std::string& timestamp,
                         const std::string& submission = {});

/// Upholds open claims, then emits GameFinished. Errors: GameNotActive.
Transition finish_game(const GameState& state, const std::string& reason, const std::string& timestamp);

// ---- replay ----

/// Undecodable event, gap, or event the fold rejects, at `seq`.
class CorruptLog : public Error
{
public:
    CorruptLog(std::uint64_t seq, const std::string& message)
        : Error("CorruptLog", "event " + std::to_string(seq) + ": " + message), seq_(seq)
    {}

    std::uint64_t seq() const noexcept { return seq_; }

private:
    std::uint64_t seq_;
};

struct ReplayResult
{
    GameState state;
    std::vector<GameEvent> events;
    bool dropped_partial_tail = false;
};

/// Folds an NDJSON event log. With `tolerate_partial_tail`, a last line that
/// lacks its newline and does not decode is dropped instead of failing.
ReplayResult replay_log(std::string_view ndjson, bool tolerate_partial_tail = false);
GameState replay(const std::vector<GameEvent>& events);

}  // namespace arena::game
