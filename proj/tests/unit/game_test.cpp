#include "arena/common/rng.hpp"
#include "arena/game/game.hpp"
#include "arena/mutation/mutation.hpp"

#include "fixtures.hpp"
#include "golden_script.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace arena;
using namespace arena::game;
using minilang::Value;
using runner::Assertion;
using testsupport::abs_diff_mutant;
using testsupport::read_fixture;

namespace {

const std::string kTs = "2025-01-01T00:00:00Z";
const std::string kLine3 = "return b - a;";
const std::string kGe = abs_diff_mutant("if (a >= b) { return a - b; }", kLine3);
const std::string kPlus = abs_diff_mutant("if (a > b) { return a + b; }", kLine3);
const std::string kPlus3 = abs_diff_mutant("if (a > b) { return a - b; }", "return b + a;");

std::string expect_error(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "no error";
}

std::vector<std::string> types(const std::vector<GameEvent>& events)
{
    std::vector<std::string> out;
    for (const auto& e : events)
        out.emplace_back(event_type(e));
    return out;
}

std::int64_t points(const GameState& s, const std::string& id)
{
    return s.player(id)->points;
}

// abs_diff game with attackers P1, P2 and defenders P3, P4.
class AbsDiffGame : public ::testing::Test
{
protected:
    void SetUp() override
    {
        GameConfig config;
        config.unit_name = "abs_diff";
        config.unit_source = read_fixture("abs_diff.cut");
        state = run(create_game("g", config, kTs));
        state = run(join_game(state, "A1", Role::Attacker, "red", kTs));
        state = run(join_game(state, "A2", Role::Attacker, "red", kTs));
        state = run(join_game(state, "D1", Role::Defender, "blue", kTs));
        state = run(join_game(state, "D2", Role::Defender, "blue", kTs));
    }

    GameState run(Transition t)
    {
        last = t.events;
        log.insert(log.end(), t.events.begin(), t.events.end());
        return std::move(t.state);
    }

    void test(const std::string& defender, std::vector<Value> args, Value expected)
    {
        state = run(submit_test(state, defender, {{"abs_diff", std::move(args), std::move(expected)}}, kTs));
    }

    void mutant(const std::string& attacker, const std::string& source)
    {
        state = run(submit_mutant(state, attacker, source, kTs));
    }

    GameState state;
    std::vector<GameEvent> last;
    std::vector<GameEvent> log;
};

}  // namespace

TEST(GoldenGame, ScriptReproducesFixtureBytes)
{
    const auto played = testsupport::play_golden_script(read_fixture("abs_diff.cut"));
    std::string text;
    for (const auto& e : played.events)
        text += canonical_event(e) + "\n";
    EXPECT_EQ(text, read_fixture("golden_game.ndjson"));
}

TEST(GoldenGame, ReplayScoreboardAndHash)
{
    const auto r = replay_log(read_fixture("golden_game.ndjson"));
    ASSERT_EQ(r.events.size(), 12u);
    const auto& s = r.state;
    std::map<std::string, std::int64_t> by_name;
    for (const auto& p : s.players)
        by_name[p.name] = p.points;
    EXPECT_EQ(by_name, (std::map<std::string, std::int64_t>{{"A", 2}, {"D1", 2}, {"D2", 0}}));
    const auto board = scoreboard(s);
    EXPECT_EQ(board.teams, (std::vector<std::pair<std::string, std::int64_t>>{{"attackers", 2}, {"defenders", 2}}));
    EXPECT_EQ(s.suite_coverage(), (std::set<int>{1, 2}));
    for (const auto& m : s.mutants)
        EXPECT_EQ(m.edited_lines, std::set<int>{2});
    EXPECT_EQ(s.mutant("M1")->status, MutantStatus::Alive);
    EXPECT_TRUE(s.mutant("M1")->claim);
    EXPECT_EQ(s.mutant("M2")->status, MutantStatus::Killed);

    const auto live = testsupport::play_golden_script(read_fixture("abs_diff.cut"));
    EXPECT_EQ(canonical_state(s), canonical_state(live.state));
    EXPECT_EQ(state_hash(s), state_hash(live.state));
    EXPECT_EQ(state_hash(replay(r.events)), state_hash(s));
}

TEST(GoldenGame, EventsRoundTripCanonically)
{
    const std::string text = read_fixture("golden_game.ndjson");
    std::size_t start = 0;
    while (start < text.size()) {
        const auto end = text.find('\n', start);
        const std::string line = text.substr(start, end - start);
        EXPECT_EQ(canonical_event(event_from_json(nlohmann::json::parse(line))), line);
        start = end + 1;
    }
}

TEST(GoldenGame, SourceHashIsSha256)
{
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto r = replay_log(read_fixture("golden_game.ndjson"));
    for (const auto& m : r.state.mutants)
        EXPECT_EQ(m.source_hash, sha256_hex(m.source));
}

TEST(Replay, GapAndCorruption)
{
    const std::string text = read_fixture("golden_game.ndjson");
    std::vector<std::string> lines;
    for (std::size_t start = 0; start < text.size();) {
        const auto end = text.find('\n', start);
        lines.push_back(text.substr(start, end - start + 1));
        start = end + 1;
    }
    auto join = [&](std::size_t skip, const std::string& replacement = "") {
        std::string out;
        for (std::size_t i = 0; i < lines.size(); ++i)
            out += i == skip ? replacement : lines[i];
        return out;
    };
    try {
        replay_log(join(6));
        FAIL();
    } catch (const CorruptLog& e) {
        EXPECT_EQ(e.seq(), 7u);
    }
    try {
        replay_log(join(3, "{not json\n"));
        FAIL();
    } catch (const CorruptLog& e) {
        EXPECT_EQ(e.seq(), 4u);
    }

    std::string truncated = join(99);
    truncated.resize(truncated.size() - 20);
    EXPECT_THROW(replay_log(truncated), CorruptLog);
    const auto r = replay_log(truncated, true);
    EXPECT_TRUE(r.dropped_partial_tail);
    EXPECT_EQ(r.state.last_seq, 11u);
    EXPECT_EQ(canonical_state(r.state), canonical_state(replay({r.events.begin(), r.events.begin() + 11})));
    // A corrupt line that is newline-terminated is never forgiven.
    EXPECT_THROW(replay_log(join(11, "{\"seq\":12\n"), true), CorruptLog);
    EXPECT_EQ(replay_log("").state.status, GameStatus::Empty);
}

TEST(Fold, TransitionGuards)
{
    GameState empty;
    EXPECT_TRUE(scoreboard(empty).players.empty());
    GameConfig config;
    config.unit_source = read_fixture("abs_diff.cut");
    GameEvent created{1, kTs, "System", GameCreated{"g", config}};
    const GameState s = applied(empty, created);
    EXPECT_EQ(s.status, GameStatus::Active);
    EXPECT_TRUE(s.players.empty());

    GameEvent skip{3, kTs, "P1", PlayerJoined{"P1", "A", Role::Attacker, "red"}};
    EXPECT_EQ(expect_error([&] { applied(s, skip); }), "OutOfOrderEvent");
    GameEvent stranger{2, kTs, "P9", MutantRejected{"x", "SyntaxError", "", ""}};
    EXPECT_EQ(expect_error([&] { applied(s, stranger); }), "ActorNotInGame");
    GameEvent before{1, kTs, "P1", PlayerJoined{"P1", "A", Role::Attacker, "red"}};
    EXPECT_EQ(expect_error([&] { applied(empty, before); }), "GameNotActive");
    const GameState done = applied(s, GameEvent{2, kTs, "System", GameFinished{"x"}});
    GameEvent late{3, kTs, "P1", PlayerJoined{"P1", "A", Role::Attacker, "red"}};
    EXPECT_EQ(expect_error([&] { applied(done, late); }), "GameNotActive");

    // A rejected event leaves the state as it was.
    GameState copy = s;
    EXPECT_THROW(apply_event(copy, GameEvent{2, kTs, "System", MutantKilled{"M1", "T1", false}}), EventRejected);
    EXPECT_EQ(canonical_state(copy), canonical_state(s));
}

TEST(Config, Validation)
{
    EXPECT_EQ(expect_error([] { config_from_json(nlohmann::json::parse(R"({"step_budget":-5})")); }),
              "InvalidConfig");
    EXPECT_EQ(expect_error([] { config_from_json(nlohmann::json::parse(R"({"claim_window":0})")); }),
              "InvalidConfig");
    EXPECT_EQ(expect_error([] { config_from_json(nlohmann::json::parse(R"({"colour":1})")); }), "InvalidConfig");
    GameConfig c = config_from_json(nlohmann::json::parse(R"({"unit_source":"fun f() -> int { return 1; }","step_budget":50})"));
    EXPECT_EQ(c.step_budget, 50u);
    EXPECT_EQ(c.claim_window, 5u);
    EXPECT_EQ(config_from_json(nlohmann::json::parse(config_to_json(c).dump())), c);
    c.max_assertions = 11;
    EXPECT_EQ(expect_error([&] { check_config(c); }), "InvalidConfig");
    c.max_assertions = 3;
    c.unit_source = "fun f( {";
    EXPECT_EQ(expect_error([&] { check_config(c); }), "SyntaxError");
}

TEST_F(AbsDiffGame, JoinRules)
{
    EXPECT_EQ(expect_error([&] { join_game(state, "A1", Role::Defender, "x", kTs); }), "NameTaken");
    GameState small = state;
    small.config.max_players_per_role = 2;
    EXPECT_EQ(expect_error([&] { join_game(small, "A3", Role::Attacker, "x", kTs); }), "RoleFull");
    EXPECT_EQ(state.players.size(), 4u);
    EXPECT_EQ(state.players[2].id, "P3");
}

TEST_F(AbsDiffGame, FirstMutantIntoEmptySuite)
{
    mutant("P1", kGe);
    EXPECT_EQ(types(last), (std::vector<std::string>{"MutantAccepted"}));
    EXPECT_EQ(state.mutant("M1")->accrued_points, 0);
    EXPECT_EQ(points(state, "P1"), 0);
}

TEST_F(AbsDiffGame, MutantSurvivesOrDiesAtBirth)
{
    test("P3", {5, 3}, 2);
    test("P4", {0, 0}, 0);
    mutant("P1", kGe);
    EXPECT_EQ(types(last), (std::vector<std::string>{"MutantAccepted", "MutantSurvivedTest", "MutantSurvivedTest"}));
    EXPECT_EQ(points(state, "P1"), 2);
    EXPECT_EQ(state.mutant("M1")->accrued_points, 2);
    EXPECT_EQ(state.mutant("M1")->survived_test_ids, (std::vector<std::string>{"T1", "T2"}));

    mutant("P2", kPlus);
    EXPECT_EQ(types(last), (std::vector<std::string>{"MutantAccepted", "MutantKilled"}));
    const Mutant& m = *state.mutant("M2");
    EXPECT_EQ(m.status, MutantStatus::Stillborn);
    EXPECT_EQ(m.killed_by, "T1");
    EXPECT_EQ(m.accrued_points, 0);
    EXPECT_EQ(points(state, "P2"), 0);
    EXPECT_EQ(points(state, "P3"), 1);
    EXPECT_EQ(points(state, "P4"), 0);
}

TEST_F(AbsDiffGame, KillBonusIsOnePlusAccrued)
{
    mutant("P1", kPlus3);
    test("P3", {5, 3}, 2);
    test("P3", {9, 1}, 8);
    test("P3", {4, 4}, 0);  // 4 + 4 is 8: killed here
    ASSERT_EQ(state.mutant("M1")->status, MutantStatus::Killed);
    EXPECT_EQ(state.mutant("M1")->accrued_points, 2);
    EXPECT_EQ(points(state, "P3"), 3);

    // Survives T1 to T3 at birth: only (4, 4) reaches line 3, and 4 % 4 is 0.
    mutant("P2", abs_diff_mutant("if (a > b) { return a - b; }", "return b % a;"));
    EXPECT_EQ(state.mutant("M2")->accrued_points, 3);
    EXPECT_EQ(points(state, "P2"), 3);
    test("P4", {1, 2}, 1);
    EXPECT_EQ(state.mutant("M2")->status, MutantStatus::Killed);
    EXPECT_EQ(points(state, "P4"), 4);
    EXPECT_EQ(state.test("T4")->points, 4);
    EXPECT_EQ(points(state, "P2"), 3);
}

TEST_F(AbsDiffGame, SurvivingTestPaysEachAttacker)
{
    mutant("P1", kGe);
    mutant("P2", kPlus3);
    test("P3", {5, 3}, 2);
    EXPECT_EQ(types(last), (std::vector<std::string>{"TestAccepted", "MutantSurvivedTest", "MutantSurvivedTest"}));
    EXPECT_EQ(points(state, "P3"), 0);
    EXPECT_EQ(points(state, "P1"), 1);
    EXPECT_EQ(points(state, "P2"), 1);
}

TEST_F(AbsDiffGame, RejectionsAreScoreNeutral)
{
    mutant("P1", kGe);
    const std::string before = canonical_state(state);
    test("P3", {5, 3}, 3);
    ASSERT_EQ(types(last), (std::vector<std::string>{"TestRejected"}));
    const auto& r = std::get<TestRejected>(last[0].payload);
    EXPECT_EQ(r.code, "AssertionFailsOnOriginal");
    EXPECT_EQ(r.index, 0u);
    mutant("P1", "fun abs_diff(a: int, b: int) -> int { return a; ");
    ASSERT_EQ(types(last), (std::vector<std::string>{"MutantRejected"}));
    EXPECT_EQ(std::get<MutantRejected>(last[0].payload).code, "SyntaxError");
    mutant("P1", read_fixture("abs_diff.cut"));
    EXPECT_EQ(std::get<MutantRejected>(last[0].payload).code, "IdenticalToOriginal");
    for (const auto& p : state.players)
        EXPECT_EQ(p.points, 0);
    EXPECT_EQ(state.rejected_tests, 1u);
    EXPECT_EQ(state.rejected_mutants, 2u);
    EXPECT_NE(canonical_state(state), before);

    GameState strict = state;
    strict.config.max_assertions = 1;
    const auto t = submit_test(strict, "P3", {{"abs_diff", {1, 1}, 0}, {"abs_diff", {2, 2}, 0}}, kTs);
    EXPECT_EQ(std::get<TestRejected>(t.events[0].payload).code, "TooManyAssertions");
}

TEST_F(AbsDiffGame, RoleGuards)
{
    EXPECT_EQ(expect_error([&] { submit_mutant(state, "P3", kGe, kTs); }), "NotAttacker");
    EXPECT_EQ(expect_error([&] { submit_test(state, "P1", {{"abs_diff", {1, 1}, 0}}, kTs); }), "NotDefender");
    EXPECT_EQ(expect_error([&] { submit_test(state, "P9", {{"abs_diff", {1, 1}, 0}}, kTs); }), "ActorNotInGame");
    mutant("P1", kGe);
    EXPECT_EQ(expect_error([&] { claim_equivalence(state, "P1", "M1", kTs); }), "NotDefender");
    EXPECT_EQ(expect_error([&] { claim_equivalence(state, "P3", "M9", kTs); }), "UnknownMutant");
}

TEST_F(AbsDiffGame, UpheldClaimDeductsAccrued)
{
    test("P3", {5, 3}, 2);
    test("P3", {0, 0}, 0);
    mutant("P1", kGe);
    ASSERT_EQ(points(state, "P1"), 2);
    state = run(claim_equivalence(state, "P4", "M1", kTs));
    EXPECT_EQ(expect_error([&] { claim_equivalence(state, "P3", "M1", kTs); }), "ClaimAlreadyOpen");
    const std::vector<std::pair<int, int>> args = {{1, 2}, {2, 1}, {3, 3}, {-4, 4}, {8, -8}};
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto [a, b] = args[i];
        test("P3", {a, b}, std::abs(a - b));
        const std::vector<std::string> expected =
            i + 1 == args.size() ? std::vector<std::string>{"TestAccepted", "ClaimUpheld"}
                                 : std::vector<std::string>{"TestAccepted"};
        EXPECT_EQ(types(last), expected);
    }
    const Mutant& m = *state.mutant("M1");
    EXPECT_EQ(m.status, MutantStatus::RemovedEquivalent);
    EXPECT_EQ(m.accrued_points, 2);
    EXPECT_EQ(m.survived_test_ids.size(), 2u);
    EXPECT_EQ(points(state, "P1"), 0);
    EXPECT_EQ(points(state, "P4"), 1);
    EXPECT_EQ(expect_error([&] { claim_equivalence(state, "P3", "M1", kTs); }), "MutantNotAlive");
}

TEST_F(AbsDiffGame, CounteredClaim)
{
    test("P3", {5, 3}, 2);
    mutant("P1", kPlus3);
    ASSERT_EQ(points(state, "P1"), 1);
    EXPECT_EQ(expect_error([&] { counter_claim(state, "P1", "M1", {{"abs_diff", {-8, -8}, 0}}, kTs); }),
              "NoOpenClaim");
    state = run(claim_equivalence(state, "P3", "M1", kTs));
    EXPECT_EQ(expect_error([&] { counter_claim(state, "P2", "M1", {{"abs_diff", {-8, -8}, 0}}, kTs); }),
              "NotMutantAuthor");
    EXPECT_EQ(expect_error([&] { counter_claim(state, "P1", "M1", {{"abs_diff", {5, 3}, 2}}, kTs); }),
              "CounterFailed");
    EXPECT_EQ(expect_error([&] { counter_claim(state, "P1", "M1", {{"abs_diff", {-8, -8}, 1}}, kTs); }),
              "AssertionFailsOnOriginal");
    state = run(counter_claim(state, "P1", "M1", {{"abs_diff", {-8, -8}, 0}}, kTs));
    EXPECT_EQ(types(last), (std::vector<std::string>{"ClaimCountered"}));
    const Mutant& m = *state.mutant("M1");
    EXPECT_EQ(m.status, MutantStatus::Killed);
    EXPECT_EQ(m.killed_by, "P1");
    EXPECT_EQ(points(state, "P1"), 2);
    EXPECT_EQ(points(state, "P3"), 0);
    EXPECT_EQ(state.tests.size(), 1u);
}

TEST_F(AbsDiffGame, ClaimedMutantKilledByDefenderClosesClaim)
{
    mutant("P1", kPlus3);
    state = run(claim_equivalence(state, "P3", "M1", kTs));
    test("P4", {1, 2}, 1);
    EXPECT_EQ(types(last), (std::vector<std::string>{"TestAccepted", "MutantKilled"}));
    EXPECT_FALSE(state.mutant("M1")->claim);
    EXPECT_EQ(points(state, "P4"), 1);
}

TEST_F(AbsDiffGame, FinishUpholdsOpenClaims)
{
    test("P3", {5, 3}, 2);
    mutant("P1", kGe);
    state = run(claim_equivalence(state, "P4", "M1", kTs));
    state = run(finish_game(state, "creator", kTs));
    EXPECT_EQ(types(last), (std::vector<std::string>{"ClaimUpheld", "GameFinished"}));
    EXPECT_EQ(state.status, GameStatus::Finished);
    EXPECT_EQ(points(state, "P1"), 0);
    EXPECT_EQ(expect_error([&] { submit_mutant(state, "P1", kPlus, kTs); }), "GameNotActive");
    EXPECT_EQ(expect_error([&] { finish_game(state, "again", kTs); }), "GameNotActive");
}

TEST_F(AbsDiffGame, EventLimitFinishesGame)
{
    state.config.max_events = 7;
    test("P3", {5, 3}, 2);  // seq 6
    EXPECT_EQ(state.status, GameStatus::Active);
    mutant("P1", kGe);      // seq 7, 8, then the limit
    EXPECT_EQ(types(last), (std::vector<std::string>{"MutantAccepted", "MutantSurvivedTest", "GameFinished"}));
    EXPECT_EQ(std::get<GameFinished>(last.back().payload).reason, "event_limit");
}

TEST_F(AbsDiffGame, RandomPlayKeepsInvariantsAndReplays)
{
    const auto unit = *state.unit;
    const auto candidates = mutation::enumerate_mutants(unit, {mutation::kAllOperators, std::end(mutation::kAllOperators)});
    Rng rng(99);
    for (int step = 0; step < 120; ++step) {
        switch (rng.below(4)) {
        case 0:
            mutant(rng.chance(1, 2) ? "P1" : "P2", candidates[rng.below(candidates.size())].mutated_source);
            break;
        case 1: {
            const int a = static_cast<int>(rng.between(-8, 8));
            const int b = static_cast<int>(rng.between(-8, 8));
            test(rng.chance(1, 2) ? "P3" : "P4", {a, b}, std::abs(a - b));
            break;
        }
        case 2:
            for (const auto& m : state.mutants)
                if (m.status == MutantStatus::Alive && !m.claim) {
                    state = run(claim_equivalence(state, "P3", m.id, kTs));
                    break;
                }
            break;
        default:
            for (const auto& m : state.mutants)
                if (m.claim) {
                    try {
                        state = run(counter_claim(state, m.author, m.id, {{"abs_diff", {-8, -8}, 0}}, kTs));
                    } catch (const Error&) {
                    }
                    break;
                }
        }
        std::map<std::string, std::int64_t> from_mutants;
        std::map<std::string, std::int64_t> from_tests;
        for (const auto& m : state.mutants) {
            if (m.status == MutantStatus::Alive) {
                ASSERT_EQ(m.accrued_points, static_cast<std::int64_t>(m.survived_test_ids.size()));
            }
            if (m.status == MutantStatus::Stillborn) {
                ASSERT_EQ(m.attacker_points, 0);
            }
            from_mutants[m.author] += m.attacker_points;
        }
        for (const auto& t : state.tests)
            from_tests[t.author] += t.points;
        std::int64_t red = 0;
        for (const auto& p : state.players) {
            ASSERT_GE(p.points, 0);
            if (p.role == Role::Attacker) {
                ASSERT_EQ(p.points, from_mutants[p.id]);
                red += p.points;
            }
        }
        ASSERT_EQ(scoreboard(state).teams[0].second, red);
    }
    EXPECT_GT(state.mutants.size(), 10u);
    std::string text;
    for (const auto& e : log)
        text += canonical_event(e) + "\n";
    EXPECT_EQ(canonical_state(replay_log(text).state), canonical_state(state));
}
