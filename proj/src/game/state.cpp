#include "arena/game/game.hpp"

#include <algorithm>

namespace arena::game {

using nlohmann::ordered_json;

std::string_view to_string(GameStatus s) noexcept
{
    switch (s) {
    case GameStatus::Empty: return "Empty";
    case GameStatus::Active: return "Active";
    case GameStatus::Finished: return "Finished";
    }
    return "?";
}

std::string_view to_string(MutantStatus s) noexcept
{
    switch (s) {
    case MutantStatus::Alive: return "Alive";
    case MutantStatus::Stillborn: return "Stillborn";
    case MutantStatus::Killed: return "Killed";
    case MutantStatus::RemovedEquivalent: return "RemovedEquivalent";
    }
    return "?";
}

namespace {

template <typename T>
T* find_by_id(std::vector<T>& items, std::string_view id)
{
    auto it = std::find_if(items.begin(), items.end(), [id](const T& x) { return x.id == id; });
    return it == items.end() ? nullptr : &*it;
}

template <typename T>
const T* find_by_id(const std::vector<T>& items, std::string_view id)
{
    return find_by_id(const_cast<std::vector<T>&>(items), id);
}

[[noreturn]] void reject(const std::string& code, const std::string& message)
{
    throw EventRejected(code, message);
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        reject("InvalidEvent", message);
}

std::string next_id(char prefix, std::size_t count)
{
    return prefix + std::to_string(count + 1);
}

class Folder
{
public:
    Folder(GameState& s, const GameEvent& e) : s_(s), e_(e) {}

    void operator()(const GameCreated& p)
    {
        std::optional<minilang::TypedUnit> unit;
        try {
            unit = check_config(p.config);
        } catch (const Error& err) {
            reject("InvalidEvent", std::string("bad game config: ") + err.what());
        }
        require(!p.game_id.empty(), "empty game id");
        s_.game_id = p.game_id;
        s_.config = p.config;
        s_.unit = std::move(unit);
        s_.status = GameStatus::Active;
    }

    void operator()(const PlayerJoined& p)
    {
        require(e_.actor == p.player_id, "a player joins as themselves");
        require(p.player_id == next_id('P', s_.players.size()), "player ids are dense");
        require(!p.name.empty() && !p.team.empty(), "name and team are required");
        require(std::none_of(s_.players.begin(), s_.players.end(),
                             [&](const Player& x) { return x.name == p.name; }),
                "name taken");
        const auto same_role = std::count_if(s_.players.begin(), s_.players.end(),
                                             [&](const Player& x) { return x.role == p.role; });
        require(static_cast<std::uint64_t>(same_role) < s_.config.max_players_per_role, "role is full");
        s_.players.push_back({p.player_id, p.name, p.role, p.team, 0});
    }

    void operator()(const MutantAccepted& p)
    {
        actor(Role::Attacker);
        require(p.mutant_id == next_id('M', s_.mutants.size()), "mutant ids are dense");
        std::optional<minilang::TypedUnit> unit;
        try {
            unit = minilang::load_unit(p.source, s_.config.unit_name);
        } catch (const Error& err) {
            reject("InvalidEvent", std::string("accepted mutant does not load: ") + err.what());
        }
        Mutant m;
        m.id = p.mutant_id;
        m.author = e_.actor;
        m.source = p.source;
        m.source_hash = p.source_hash;
        m.edited_lines.insert(p.edited_lines.begin(), p.edited_lines.end());
        m.edited_nodes = p.edited_nodes;
        m.unit = std::move(unit);
        s_.mutants.push_back(std::move(m));
    }

    void operator()(const MutantRejected&)
    {
        actor(Role::Attacker);
        ++s_.rejected_mutants;
    }

    void operator()(const TestAccepted& p)
    {
        actor(Role::Defender);
        require(p.test_id == next_id('T', s_.tests.size()), "test ids are dense");
        require(!p.assertions.empty(), "accepted test without assertions");
        s_.tests.push_back({p.test_id, e_.actor, p.assertions,
                            std::set<int>(p.covered_lines.begin(), p.covered_lines.end()), 0});
        for (auto& m : s_.mutants)
            if (m.claim)
                ++m.claim->tests_seen;
    }

    void operator()(const TestRejected&)
    {
        actor(Role::Defender);
        ++s_.rejected_tests;
    }

    void operator()(const MutantKilled& p)
    {
        system();
        Mutant& m = alive_mutant(p.mutant_id);
        Test* t = find_by_id(s_.tests, p.test_id);
        require(t, "unknown test " + p.test_id);
        require(!p.at_birth || m.survived_test_ids.empty(), "a mutant killed at birth survived nothing");
        Player& killer = player(t->author);
        const std::int64_t award = 1 + m.accrued_points;
        killer.points += award;
        t->points += award;
        m.status = p.at_birth ? MutantStatus::Stillborn : MutantStatus::Killed;
        m.killed_by = t->id;
        m.claim.reset();
    }

    void operator()(const MutantSurvivedTest& p)
    {
        system();
        Mutant& m = alive_mutant(p.mutant_id);
        require(!m.claim, "a claimed mutant does not accrue");
        require(find_by_id(s_.tests, p.test_id), "unknown test " + p.test_id);
        require(std::find(m.survived_test_ids.begin(), m.survived_test_ids.end(), p.test_id) ==
                    m.survived_test_ids.end(),
                "survival already recorded");
        player(m.author).points += 1;
        m.accrued_points += 1;
        m.attacker_points += 1;
        m.survived_test_ids.push_back(p.test_id);
    }

    void operator()(const EquivalenceClaimed& p)
    {
        actor(Role::Defender);
        Mutant& m = alive_mutant(p.mutant_id);
        require(!m.claim, "claim already open");
        m.claim = Claim{e_.actor, 0};
    }

    void operator()(const ClaimCountered& p)
    {
        actor(Role::Attacker);
        Mutant& m = alive_mutant(p.mutant_id);
        require(m.claim.has_value(), "no open claim");
        require(m.author == e_.actor, "only the mutant's author may counter");
        require(!p.assertions.empty(), "counter without assertions");
        player(m.author).points += 1;
        m.attacker_points += 1;
        m.status = MutantStatus::Killed;
        m.killed_by = m.author;
        m.counter_assertions = p.assertions;
        m.claim.reset();
    }

    void operator()(const ClaimUpheld& p)
    {
        system();
        Mutant& m = alive_mutant(p.mutant_id);
        require(m.claim.has_value(), "no open claim");
        Player& attacker = player(m.author);
        Player& claimant = player(m.claim->claimant);
        attacker.points = std::max<std::int64_t>(0, attacker.points - m.accrued_points);
        m.attacker_points = 0;
        claimant.points += 1;
        m.status = MutantStatus::RemovedEquivalent;
        m.claim.reset();
    }

    void operator()(const GameFinished&)
    {
        system();
        s_.status = GameStatus::Finished;
    }

private:
    Player& player(const std::string& id)
    {
        Player* p = find_by_id(s_.players, id);
        require(p, "unknown player " + id);
        return *p;
    }

    Mutant& alive_mutant(const std::string& id)
    {
        Mutant* m = find_by_id(s_.mutants, id);
        require(m, "unknown mutant " + id);
        require(m->status == MutantStatus::Alive, "mutant " + id + " is not alive");
        return *m;
    }

    void system() { require(e_.actor == kSystemActor, "derived events are emitted by the system"); }

    void actor(Role role)
    {
        const Player* p = find_by_id(s_.players, e_.actor);
        if (!p)
            reject("ActorNotInGame", "actor " + e_.actor + " is not in the game");
        if (p->role != role)
            reject(role == Role::Attacker ? "NotAttacker" : "NotDefender",
                   "actor " + e_.actor + " is not an " + std::string(to_string(role)));
    }

    GameState& s_;
    const GameEvent& e_;
};

}  // namespace

const Player* GameState::player(std::string_view id) const
{
    return find_by_id(players, id);
}

const Mutant* GameState::mutant(std::string_view id) const
{
    return find_by_id(mutants, id);
}

const Test* GameState::test(std::string_view id) const
{
    return find_by_id(tests, id);
}

std::set<int> GameState::suite_coverage() const
{
    std::set<int> lines;
    for (const auto& t : tests)
        lines.insert(t.covered_lines.begin(), t.covered_lines.end());
    return lines;
}

void apply_event(GameState& state, const GameEvent& event)
{
    if (event.seq != state.last_seq + 1)
        reject("OutOfOrderEvent", "expected seq " + std::to_string(state.last_seq + 1) + ", got " +
                                      std::to_string(event.seq));
    const bool created = std::holds_alternative<GameCreated>(event.payload);
    if (created != (state.status == GameStatus::Empty) || state.status == GameStatus::Finished)
        reject("GameNotActive", std::string(event_type(event)) + " in a game that is " +
                                    std::string(to_string(state.status)));
    if (created && event.actor != kSystemActor)
        reject("InvalidEvent", "games are created by the system");
    // Work on a copy so that a rejection in the middle of a transition cannot
    // leave half-applied changes behind.
    GameState next = state;
    std::visit(Folder(next, event), event.payload);
    next.last_seq = event.seq;
    state = std::move(next);
}

GameState applied(GameState state, const GameEvent& event)
{
    apply_event(state, event);
    return state;
}

// ---- serialization ----

namespace {

ordered_json ids(const std::vector<std::string>& v)
{
    return ordered_json(v);
}

}  // namespace

ordered_json state_to_json(const GameState& s)
{
    ordered_json j;
    j["game_id"] = s.game_id;
    j["status"] = to_string(s.status);
    j["last_seq"] = s.last_seq;
    j["config"] = config_to_json(s.config);
    j["players"] = ordered_json::array();
    for (const auto& p : s.players) {
        ordered_json x;
        x["id"] = p.id;
        x["name"] = p.name;
        x["role"] = to_string(p.role);
        x["team"] = p.team;
        x["points"] = p.points;
        j["players"].push_back(std::move(x));
    }
    j["mutants"] = ordered_json::array();
    for (const auto& m : s.mutants) {
        ordered_json x;
        x["id"] = m.id;
        x["author"] = m.author;
        x["source"] = m.source;
        x["source_hash"] = m.source_hash;
        x["edited_lines"] = m.edited_lines;
        x["edited_nodes"] = m.edited_nodes;
        x["status"] = to_string(m.status);
        x["killed_by"] = m.killed_by;
        x["accrued_points"] = m.accrued_points;
        x["survived_test_ids"] = ids(m.survived_test_ids);
        x["attacker_points"] = m.attacker_points;
        if (m.claim) {
            x["claim"]["claimant"] = m.claim->claimant;
            x["claim"]["tests_seen"] = m.claim->tests_seen;
        } else {
            x["claim"] = nullptr;
        }
        x["counter_assertions"] = runner::assertions_to_json(m.counter_assertions);
        j["mutants"].push_back(std::move(x));
    }
    j["tests"] = ordered_json::array();
    for (const auto& t : s.tests) {
        ordered_json x;
        x["id"] = t.id;
        x["author"] = t.author;
        x["assertions"] = runner::assertions_to_json(t.assertions);
        x["covered_lines"] = t.covered_lines;
        x["points"] = t.points;
        j["tests"].push_back(std::move(x));
    }
    j["rejected_mutants"] = s.rejected_mutants;
    j["rejected_tests"] = s.rejected_tests;
    return j;
}

std::string canonical_state(const GameState& state)
{
    return state_to_json(state).dump();
}

std::string state_hash(const GameState& state)
{
    return sha256_hex(canonical_state(state));
}

// ---- scoreboard ----

Scoreboard scoreboard(const GameState& state)
{
    Scoreboard b;
    for (const auto& p : state.players) {
        b.players.emplace_back(p.id, p.points);
        auto team = std::find_if(b.teams.begin(), b.teams.end(),
                                 [&](const auto& t) { return t.first == p.team; });
        if (team == b.teams.end())
            b.teams.emplace_back(p.team, p.points);
        else
            team->second += p.points;
    }
    for (const auto& m : state.mutants)
        b.mutants.emplace_back(m.id, m.attacker_points);
    for (const auto& t : state.tests)
        b.tests.emplace_back(t.id, t.points);
    return b;
}

ordered_json scoreboard_to_json(const GameState& state)
{
    const Scoreboard b = scoreboard(state);
    ordered_json j;
    j["players"] = ordered_json::array();
    for (const auto& [id, points] : b.players) {
        const Player* p = state.player(id);
        ordered_json x;
        x["id"] = id;
        x["name"] = p->name;
        x["role"] = to_string(p->role);
        x["team"] = p->team;
        x["points"] = points;
        j["players"].push_back(std::move(x));
    }
    auto pairs = [](const auto& v, const char* key) {
        ordered_json out = ordered_json::array();
        for (const auto& [id, points] : v) {
            ordered_json x;
            x[key] = id;
            x["points"] = points;
            out.push_back(std::move(x));
        }
        return out;
    };
    j["teams"] = pairs(b.teams, "team");
    j["mutants"] = pairs(b.mutants, "id");
    j["tests"] = pairs(b.tests, "id");
    return j;
}

}  // namespace arena::game
