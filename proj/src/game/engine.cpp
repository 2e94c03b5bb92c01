#include "arena/game/game.hpp"

#include "arena/mutation/mutation.hpp"

#include <algorithm>

namespace arena::game {

namespace {

class Emitter
{
public:
    Emitter(const GameState& state, std::string timestamp) : t_{state, {}}, timestamp_(std::move(timestamp))
    {}

    const GameState& state() const { return t_.state; }

    void emit(std::string actor, EventPayload payload)
    {
        GameEvent e{t_.state.last_seq + 1, timestamp_, std::move(actor), std::move(payload)};
        apply_event(t_.state, e);
        t_.events.push_back(std::move(e));
    }

    void uphold_due_claims(bool all)
    {
        for (const auto& m : t_.state.mutants)
            if (m.status == MutantStatus::Alive && m.claim &&
                (all || m.claim->tests_seen >= t_.state.config.claim_window))
                emit(std::string(kSystemActor), ClaimUpheld{m.id});
    }

    void finish(const std::string& reason)
    {
        uphold_due_claims(true);
        emit(std::string(kSystemActor), GameFinished{reason});
    }

    Transition done()
    {
        if (t_.state.status == GameStatus::Active && t_.state.last_seq >= t_.state.config.max_events)
            finish("event_limit");
        return std::move(t_);
    }

private:
    Transition t_;
    std::string timestamp_;
};

void require_active(const GameState& s)
{
    if (s.status != GameStatus::Active)
        throw Error("GameNotActive", "game is " + std::string(to_string(s.status)));
}

const Player& require_player(const GameState& s, const std::string& id, Role role)
{
    require_active(s);
    const Player* p = s.player(id);
    if (!p)
        throw Error("ActorNotInGame", "player " + id + " is not in the game");
    if (p->role != role)
        throw Error(role == Role::Attacker ? "NotAttacker" : "NotDefender",
                    "player " + id + " is not an " + std::string(to_string(role)));
    return *p;
}

const Mutant& require_mutant(const GameState& s, const std::string& id)
{
    const Mutant* m = s.mutant(id);
    if (!m)
        throw Error("UnknownMutant", "no mutant " + id);
    return *m;
}

runner::ValidTest validate(const GameState& s, std::vector<runner::Assertion> assertions)
{
    if (assertions.size() > s.config.max_assertions)
        throw runner::TestRejected("TooManyAssertions", "a test may have at most " +
                                                            std::to_string(s.config.max_assertions) +
                                                            " assertions");
    return runner::validate_test(*s.unit, runner::TestCase{"", "", std::move(assertions)},
                                 s.config.step_budget);
}

}  // namespace

Transition create_game(std::string game_id, GameConfig config, const std::string& timestamp)
{
    check_config(config);
    if (game_id.empty())
        throw Error("InvalidConfig", "empty game id");
    Emitter out(GameState{}, timestamp);
    out.emit(std::string(kSystemActor), GameCreated{std::move(game_id), std::move(config)});
    return out.done();
}

Transition join_game(const GameState& state, const std::string& name, Role role, const std::string& team,
                     const std::string& timestamp)
{
    require_active(state);
    if (name.empty() || team.empty())
        throw Error("InvalidPlayer", "name and team are required");
    for (const auto& p : state.players)
        if (p.name == name)
            throw Error("NameTaken", "name '" + name + "' is taken");
    const auto same_role = std::count_if(state.players.begin(), state.players.end(),
                                         [&](const Player& p) { return p.role == role; });
    if (static_cast<std::uint64_t>(same_role) >= state.config.max_players_per_role)
        throw Error("RoleFull", "no " + std::string(to_string(role)) + " slots left");
    Emitter out(state, timestamp);
    const std::string id = "P" + std::to_string(state.players.size() + 1);
    out.emit(id, PlayerJoined{id, name, role, team});
    return out.done();
}

Transition submit_mutant(const GameState& state, const std::string& attacker, const std::string& source,
                         const std::string& timestamp, const std::string& submission)
{
    require_player(state, attacker, Role::Attacker);
    Emitter out(state, timestamp);
    std::optional<mutation::ValidatedMutant> valid;
    try {
        valid = mutation::validate_mutant_submission(
            *state.unit, source, mutation::MutantLimits{state.config.max_edited_nodes});
    } catch (const Error& e) {
        out.emit(attacker, MutantRejected{source, e.code(), e.what(), submission});
        return out.done();
    }
    const std::string id = "M" + std::to_string(state.mutants.size() + 1);
    const auto& lines = valid->summary.edited_lines;
    out.emit(attacker, MutantAccepted{id, source, sha256_hex(source), {lines.begin(), lines.end()},
                                      valid->summary.edited_node_count, submission});
    const minilang::TypedUnit& unit = *out.state().mutants.back().unit;
    const auto tests = out.state().tests;
    for (const auto& t : tests) {
        runner::ValidTest vt{{t.id, t.author, t.assertions}, t.covered_lines};
        if (runner::kill_check(*state.unit, unit, vt, state.config.step_budget).killed) {
            out.emit(std::string(kSystemActor), MutantKilled{id, t.id, true});
            return out.done();
        }
    }
    for (const auto& t : tests)
        out.emit(std::string(kSystemActor), MutantSurvivedTest{id, t.id});
    return out.done();
}

Transition submit_test(const GameState& state, const std::string& defender,
                       std::vector<runner::Assertion> assertions, const std::string& timestamp,
                       const std::string& submission)
{
    require_player(state, defender, Role::Defender);
    Emitter out(state, timestamp);
    std::optional<runner::ValidTest> valid;
    try {
        valid = validate(state, assertions);
    } catch (const runner::TestRejected& e) {
        std::optional<std::uint64_t> index;
        if (e.index())
            index = *e.index();
        out.emit(defender, TestRejected{std::move(assertions), e.code(), e.what(), index, submission});
        return out.done();
    }
    const std::string id = "T" + std::to_string(state.tests.size() + 1);
    const auto& lines = valid->covered_lines;
    out.emit(defender, TestAccepted{id, valid->test.assertions, {lines.begin(), lines.end()}, submission});
    for (const auto& m : state.mutants) {
        if (m.status != MutantStatus::Alive)
            continue;
        if (runner::kill_check(*state.unit, *m.unit, *valid, state.config.step_budget).killed)
            out.emit(std::string(kSystemActor), MutantKilled{m.id, id, false});
        else if (!m.claim)
            out.emit(std::string(kSystemActor), MutantSurvivedTest{m.id, id});
    }
    out.uphold_due_claims(false);
    return out.done();
}

Transition claim_equivalence(const GameState& state, const std::string& defender, const std::string& mutant_id,
                             const std::string& timestamp, const std::string& submission)
{
    require_player(state, defender, Role::Defender);
    const Mutant& m = require_mutant(state, mutant_id);
    if (m.status != MutantStatus::Alive)
        throw Error("MutantNotAlive", "mutant " + mutant_id + " is " + std::string(to_string(m.status)));
    if (m.claim)
        throw Error("ClaimAlreadyOpen", "mutant " + mutant_id + " is already claimed");
    Emitter out(state, timestamp);
    out.emit(defender, EquivalenceClaimed{mutant_id, submission});
    return out.done();
}

Transition counter_claim(const GameState& state, const std::string& attacker, const std::string& mutant_id,
                         std::vector<runner::Assertion> assertions, const std::string& timestamp,
                         const std::string& submission)
{
    require_player(state, attacker, Role::Attacker);
    const Mutant& m = require_mutant(state, mutant_id);
    if (m.author != attacker)
        throw Error("NotMutantAuthor", "mutant " + mutant_id + " belongs to " + m.author);
    if (m.status != MutantStatus::Alive || !m.claim)
        throw Error("NoOpenClaim", "mutant " + mutant_id + " has no open claim");
    const runner::ValidTest valid = validate(state, std::move(assertions));
    if (!runner::kill_check(*state.unit, *m.unit, valid, state.config.step_budget).killed)
        throw Error("CounterFailed", "the counter test does not kill " + mutant_id);
    Emitter out(state, timestamp);
    out.emit(attacker, ClaimCountered{mutant_id, valid.test.assertions, submission});
    return out.done();
}

Transition finish_game(const GameState& state, const std::string& reason, const std::string& timestamp)
{
    require_active(state);
    Emitter out(state, timestamp);
    out.finish(reason);
    return out.done();
}

}  // namespace arena::game
