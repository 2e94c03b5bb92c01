#include "arena/server/service.hpp"

#include "fixtures.hpp"

#include "httplib.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <future>
#include <numeric>
#include <thread>

using namespace arena;
using namespace arena::server;
using nlohmann::json;
using testsupport::read_fixture;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("arena_server_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Options that reproduce the golden fixture: id "golden" and one fixture
/// timestamp per state-changing request.
ServiceOptions golden_options(const fs::path& dir, std::shared_ptr<int> tick = std::make_shared<int>(0))
{
    ServiceOptions o;
    o.data_dir = dir;
    o.game_ids = [] { return std::string("golden"); };
    o.clock = [tick] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "2025-03-04T10:00:%02dZ", (*tick)++);
        return std::string(buf);
    };
    o.delivery_interval = std::chrono::milliseconds(0);
    return o;
}

Response call(ArenaService& s, const std::string& method, const std::string& path, const json& body = nullptr,
              const std::string& token = "")
{
    Request r;
    r.method = method;
    const auto q = path.find('?');
    r.path = path.substr(0, q);
    if (q != std::string::npos) {
        const std::string query = path.substr(q + 1);
        const auto eq = query.find('=');
        r.query[query.substr(0, eq)] = query.substr(eq + 1);
    }
    if (!body.is_null())
        r.body = body.dump();
    if (!token.empty())
        r.headers["authorization"] = "Bearer " + token;
    return s.handle(r);
}

json body_of(const Response& r)
{
    return json::parse(r.body);
}

std::string error_code(const Response& r)
{
    return body_of(r).at("error").at("code").get<std::string>();
}

json golden_config()
{
    return {{"unit_name", "abs_diff"}, {"unit_source", read_fixture("abs_diff.cut")}};
}

std::string mutant(const std::string& line2)
{
    return "fun abs_diff(a: int, b: int) -> int {\n  " + line2 + "\n  return b - a;\n}\n";
}

struct Tokens
{
    std::string creator, a, d1, d2;
};

/// Creates the golden game and joins its three players.
Tokens setup_golden(ArenaService& s)
{
    Tokens t;
    const auto created = call(s, "POST", "/games", golden_config());
    EXPECT_EQ(created.status, 201) << created.body;
    t.creator = body_of(created)["creator_token"];
    t.a = body_of(call(s, "POST", "/games/golden/join", {{"name", "A"}, {"role", "attacker"}, {"team", "attackers"}}))
              ["token"];
    t.d1 = body_of(call(s, "POST", "/games/golden/join", {{"name", "D1"}, {"role", "defender"}, {"team", "defenders"}}))
               ["token"];
    t.d2 = body_of(call(s, "POST", "/games/golden/join", {{"name", "D2"}, {"role", "defender"}, {"team", "defenders"}}))
               ["token"];
    return t;
}

json assertion(int a, int b, int expected)
{
    return json::array({{{"fn", "abs_diff"}, {"args", {a, b}}, {"expected", expected}}});
}

/// Plays the first `ops` submissions of the golden script. Two leave the log
/// at event 7, five finish it at event 12.
Tokens play_golden(ArenaService& s, int ops)
{
    Tokens t = setup_golden(s);
    const std::vector<std::function<Response()>> steps{
        [&] { return call(s, "POST", "/games/golden/tests", {{"assertions", assertion(5, 3, 2)}, {"submission_id", "d2-t1"}}, t.d2); },
        [&] { return call(s, "POST", "/games/golden/mutants", {{"source", mutant("if (a >= b) { return a - b; }")}, {"submission_id", "a-m1"}}, t.a); },
        [&] { return call(s, "POST", "/games/golden/mutants", {{"source", mutant("if (a > b) { return a % b; }")}, {"submission_id", "a-m2"}}, t.a); },
        [&] { return call(s, "POST", "/games/golden/claims", {{"mutant_id", "M1"}, {"submission_id", "d2-c1"}}, t.d2); },
        [&] { return call(s, "POST", "/games/golden/tests", {{"assertions", assertion(7, 1, 6)}, {"submission_id", "d1-t2"}}, t.d1); },
    };
    for (int i = 0; i < ops; ++i) {
        const Response r = steps[i]();
        EXPECT_EQ(r.status, 201) << r.body;
    }
    return t;
}

std::vector<std::string> fixture_lines(std::size_t n)
{
    std::istringstream in(read_fixture("golden_game.ndjson"));
    std::vector<std::string> out;
    for (std::string line; out.size() < n && std::getline(in, line);)
        out.push_back(line);
    return out;
}

std::string events_body(const std::vector<std::string>& lines)
{
    std::string out = "{\"events\":[";
    for (std::size_t i = 0; i < lines.size(); ++i)
        out += (i ? "," : "") + lines[i];
    return out + "],\"last_seq\":" + std::to_string(lines.size()) + "}";
}

std::uint64_t last_seq(ArenaService& s)
{
    return body_of(call(s, "GET", "/games/golden"))["last_seq"].get<std::uint64_t>();
}

}  // namespace

TEST(Server, GoldenGameThroughTheApiReproducesTheFixture)
{
    const auto dir = fresh_dir("golden");
    ArenaService s(golden_options(dir));
    play_golden(s, 5);
    const Response events = call(s, "GET", "/games/golden/events?since=0");
    ASSERT_EQ(events.status, 200);
    EXPECT_EQ(events.body, events_body(fixture_lines(12)));
    EXPECT_EQ(body_of(events)["events"].size(), 12u);

    const json board = body_of(call(s, "GET", "/games/golden/scoreboard"));
    std::map<std::string, int> points;
    for (const auto& p : board["players"])
        points[p["name"]] = p["points"];
    EXPECT_EQ(points, (std::map<std::string, int>{{"A", 2}, {"D1", 2}, {"D2", 0}}));

    const std::string on_disk = [&] {
        std::ifstream in(dir / "games" / "golden.ndjson");
        return std::string(std::istreambuf_iterator<char>(in), {});
    }();
    EXPECT_EQ(on_disk, read_fixture("golden_game.ndjson"));
}

TEST(Server, EventsSinceReturnsOnlyLaterEvents)
{
    ArenaService s(golden_options(fresh_dir("since")));
    play_golden(s, 5);
    const json tail = body_of(call(s, "GET", "/games/golden/events?since=10"));
    ASSERT_EQ(tail["events"].size(), 2u);
    EXPECT_EQ(tail["events"][0]["seq"], 11);
    EXPECT_EQ(tail["last_seq"], 12);
    EXPECT_EQ(body_of(call(s, "GET", "/games/golden/events?since=99"))["events"].size(), 0u);
    EXPECT_EQ(call(s, "GET", "/games/golden/events?since=-1").status, 422);
}

TEST(Server, PublicStateAnnotatesLinesAndHidesLiveMutants)
{
    ArenaService s(golden_options(fresh_dir("state")));
    play_golden(s, 5);
    const json st = body_of(call(s, "GET", "/games/golden"));
    ASSERT_EQ(st["lines"].size(), 4u);
    EXPECT_TRUE(st["lines"][0]["covered"]);
    EXPECT_TRUE(st["lines"][1]["covered"]);
    EXPECT_FALSE(st["lines"][2]["covered"]);
    const json& line2 = st["lines"][1]["mutants"];
    ASSERT_EQ(line2.size(), 2u);
    EXPECT_EQ(line2[0], (json{{"id", "M1"}, {"status", "Alive"}, {"claimed", true}}));
    EXPECT_EQ(line2[1], (json{{"id", "M2"}, {"status", "Killed"}, {"claimed", false}}));
    EXPECT_FALSE(st["mutants"][0].contains("source"));
    EXPECT_TRUE(st["mutants"][1].contains("source"));
}

TEST(Server, MutantFromDefenderTokenIsForbidden)
{
    ArenaService s(golden_options(fresh_dir("roles")));
    const Tokens t = setup_golden(s);
    const Response r = call(s, "POST", "/games/golden/mutants", {{"source", mutant("if (a >= b) { return a - b; }")}}, t.d1);
    EXPECT_EQ(r.status, 403);
    EXPECT_EQ(error_code(r), "NotAttacker");
    EXPECT_EQ(call(s, "POST", "/games/golden/tests", {{"assertions", assertion(5, 3, 2)}}, t.a).status, 403);
    EXPECT_EQ(call(s, "POST", "/games/golden/mutants", {{"source", "x"}}, t.creator).status, 403);
    EXPECT_EQ(call(s, "POST", "/games/golden/finish", json::object(), t.a).status, 403);
    EXPECT_EQ(last_seq(s), 4u);
}

TEST(Server, AuthenticationAndRouting)
{
    ArenaService s(golden_options(fresh_dir("auth")));
    setup_golden(s);
    EXPECT_EQ(call(s, "POST", "/games/golden/mutants", {{"source", "x"}}).status, 401);
    EXPECT_EQ(call(s, "POST", "/games/golden/mutants", {{"source", "x"}}, "0123").status, 401);
    EXPECT_EQ(call(s, "GET", "/games/nope").status, 404);
    EXPECT_EQ(call(s, "GET", "/games/../etc").status, 404);
    EXPECT_EQ(call(s, "GET", "/games/golden/unknown").status, 404);
    EXPECT_EQ(call(s, "GET", "/elsewhere").status, 404);
    EXPECT_EQ(call(s, "DELETE", "/games/golden").status, 405);
    EXPECT_EQ(call(s, "GET", "/games/golden/mutants").status, 405);
}

TEST(Server, CreateValidatesTheConfig)
{
    ArenaService s(golden_options(fresh_dir("config")));
    json negative = golden_config();
    negative["step_budget"] = -1;
    Response r = call(s, "POST", "/games", negative);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(error_code(r), "InvalidConfig");
    json unknown = golden_config();
    unknown["colour"] = "red";
    EXPECT_EQ(call(s, "POST", "/games", unknown).status, 422);
    EXPECT_EQ(call(s, "POST", "/games", {{"unit_source", "fun f( {"}}).status, 422);
    Request bad{"POST", "/games", {}, {}, "not json"};
    EXPECT_EQ(s.handle(bad).status, 422);
    EXPECT_EQ(call(s, "POST", "/games", golden_config()).status, 201);
    EXPECT_EQ(call(s, "POST", "/games", golden_config()).status, 409);
}

TEST(Server, OversizedBodyIsRejected)
{
    ArenaService s(golden_options(fresh_dir("large")));
    Request r{"POST", "/games", {}, {}, std::string(kMaxBodyBytes + 1, ' ')};
    const Response out = s.handle(r);
    EXPECT_EQ(out.status, 413);
    EXPECT_EQ(error_code(out), "BodyTooLarge");
}

TEST(Server, RejectedSubmissionsAreRecordedAnd422)
{
    ArenaService s(golden_options(fresh_dir("reject")));
    const Tokens t = setup_golden(s);
    Response r = call(s, "POST", "/games/golden/mutants", {{"source", read_fixture("abs_diff.cut")}}, t.a);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(error_code(r), "IdenticalToOriginal");
    EXPECT_EQ(body_of(r)["seq"], 5);
    r = call(s, "POST", "/games/golden/tests",
             {{"assertions", {{{"fn", "abs_diff"}, {"args", {1, 1}}, {"expected", 0}},
                              {{"fn", "abs_diff"}, {"args", {1, 2}}, {"expected", 5}}}}},
             t.d1);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(error_code(r), "AssertionFailsOnOriginal");
    EXPECT_EQ(body_of(r)["error"]["index"], 1);
    EXPECT_EQ(last_seq(s), 6u);
    // Malformed requests never reach the log.
    EXPECT_EQ(call(s, "POST", "/games/golden/tests", {{"assertions", "x"}}, t.d1).status, 422);
    EXPECT_EQ(call(s, "POST", "/games/golden/mutants", json::object(), t.a).status, 422);
    EXPECT_EQ(last_seq(s), 6u);
}

TEST(Server, DuplicateSubmissionIdReturnsTheSameResponse)
{
    const auto dir = fresh_dir("dup");
    const json body{{"source", mutant("if (a >= b) { return a - b; }")}, {"submission_id", "s-1"}};
    Response first;
    std::string token;
    {
        ArenaService s(golden_options(dir));
        const Tokens t = setup_golden(s);
        token = t.a;
        first = call(s, "POST", "/games/golden/mutants", body, t.a);
        ASSERT_EQ(first.status, 201);
        const auto seq = last_seq(s);
        EXPECT_EQ(call(s, "POST", "/games/golden/mutants", body, t.a), first);
        EXPECT_EQ(last_seq(s), seq);
        // The same id from another player is a different submission.
        const auto other = call(s, "POST", "/games/golden/tests", {{"assertions", assertion(1, 2, 1)}, {"submission_id", "s-1"}}, t.d1);
        EXPECT_EQ(other.status, 201);
    }
    ArenaService restarted(golden_options(dir));
    const auto seq = last_seq(restarted);
    EXPECT_EQ(call(restarted, "POST", "/games/golden/mutants", body, token), first);
    EXPECT_EQ(last_seq(restarted), seq);
}

TEST(Server, RejectionsAreIdempotentToo)
{
    ArenaService s(golden_options(fresh_dir("dupreject")));
    const Tokens t = setup_golden(s);
    const json body{{"source", "fun broken("}, {"submission_id", "bad"}};
    const Response first = call(s, "POST", "/games/golden/mutants", body, t.a);
    EXPECT_EQ(first.status, 422);
    EXPECT_EQ(call(s, "POST", "/games/golden/mutants", body, t.a), first);
    EXPECT_EQ(last_seq(s), 5u);
}

TEST(Server, RecoveryAfterSevenEventsEqualsTheFold)
{
    const auto dir = fresh_dir("recover");
    std::string state_before;
    Tokens t;
    auto tick = std::make_shared<int>(0);
    {
        ArenaService s(golden_options(dir, tick));
        t = play_golden(s, 2);
        ASSERT_EQ(last_seq(s), 7u);
        state_before = call(s, "GET", "/games/golden").body;
    }
    ArenaService s(golden_options(dir, tick));
    EXPECT_TRUE(s.warnings().empty());
    EXPECT_EQ(call(s, "GET", "/games/golden").body, state_before);
    EXPECT_EQ(call(s, "GET", "/games/golden/events?since=0").body, events_body(fixture_lines(7)));

    const auto folded = game::replay_log([] {
        std::string text;
        for (const auto& l : fixture_lines(7))
            text += l + "\n";
        return text;
    }());
    EXPECT_EQ(call(s, "GET", "/games/golden/scoreboard").body, game::scoreboard_to_json(folded.state).dump());

    // Sessions survive: the rest of the script finishes the golden game.
    call(s, "POST", "/games/golden/mutants", {{"source", mutant("if (a > b) { return a % b; }")}, {"submission_id", "a-m2"}}, t.a);
    call(s, "POST", "/games/golden/claims", {{"mutant_id", "M1"}, {"submission_id", "d2-c1"}}, t.d2);
    call(s, "POST", "/games/golden/tests", {{"assertions", assertion(7, 1, 6)}, {"submission_id", "d1-t2"}}, t.d1);
    EXPECT_EQ(call(s, "GET", "/games/golden/events?since=0").body, events_body(fixture_lines(12)));
}

TEST(Server, RecoveryDropsAPartialFinalLine)
{
    const auto dir = fresh_dir("partial");
    const fs::path log = dir / "games" / "golden.ndjson";
    Tokens t;
    {
        ArenaService s(golden_options(dir));
        t = play_golden(s, 2);
    }
    const auto intact = fs::file_size(log);
    std::ofstream(log, std::ios::app) << "{\"seq\":8,\"timestamp\":\"2025-03-";
    ArenaService s(golden_options(dir));
    ASSERT_EQ(s.warnings().size(), 1u);
    EXPECT_NE(s.warnings()[0].find("dropped partial final line"), std::string::npos);
    EXPECT_EQ(last_seq(s), 7u);
    EXPECT_EQ(fs::file_size(log), intact);
    const Response next = call(s, "POST", "/games/golden/tests", {{"assertions", assertion(1, 2, 1)}}, t.d1);
    EXPECT_EQ(body_of(next)["seq"], 8);

    ArenaService again(golden_options(dir));
    EXPECT_TRUE(again.warnings().empty());
    EXPECT_EQ(last_seq(again), last_seq(s));
}

TEST(Server, CorruptLogIsNotLoaded)
{
    const auto dir = fresh_dir("corrupt");
    {
        ArenaService s(golden_options(dir));
        play_golden(s, 1);
    }
    std::ofstream(dir / "games" / "golden.ndjson", std::ios::app) << "garbage\n";
    ArenaService s(golden_options(dir));
    ASSERT_EQ(s.warnings().size(), 1u);
    EXPECT_EQ(call(s, "GET", "/games/golden").status, 404);
}

TEST(Server, ClaimsAndCountersOverHttp)
{
    ArenaService s(golden_options(fresh_dir("claims")));
    const Tokens t = setup_golden(s);
    const Response m = call(s, "POST", "/games/golden/mutants", {{"source", mutant("if (a > b) { return a + b; }")}}, t.a);
    ASSERT_EQ(body_of(m)["status"], "Alive");
    EXPECT_EQ(call(s, "POST", "/games/golden/claims", {{"mutant_id", "M9"}}, t.d1).status, 404);
    EXPECT_EQ(call(s, "POST", "/games/golden/claims", {{"mutant_id", "M1"}}, t.d1).status, 201);
    EXPECT_EQ(call(s, "POST", "/games/golden/claims", {{"mutant_id", "M1"}}, t.d2).status, 409);
    EXPECT_EQ(call(s, "POST", "/games/golden/claims/M1/counter", {{"assertions", assertion(3, 1, 2)}}, t.d1).status, 403);
    const Response weak = call(s, "POST", "/games/golden/claims/M1/counter", {{"assertions", assertion(1, 3, 2)}}, t.a);
    EXPECT_EQ(weak.status, 422);
    EXPECT_EQ(error_code(weak), "CounterFailed");
    const Response counter = call(s, "POST", "/games/golden/claims/M1/counter", {{"assertions", assertion(3, 1, 2)}}, t.a);
    ASSERT_EQ(counter.status, 201) << counter.body;
    EXPECT_EQ(body_of(counter)["status"], "Killed");
    EXPECT_EQ(call(s, "POST", "/games/golden/claims/M1/counter", {{"assertions", assertion(3, 1, 2)}}, t.a).status, 409);
}

TEST(Server, FinishRequiresTheCreator)
{
    ArenaService s(golden_options(fresh_dir("finish")));
    const Tokens t = play_golden(s, 5);
    const Response done = call(s, "POST", "/games/golden/finish", json::object(), t.creator);
    ASSERT_EQ(done.status, 200) << done.body;
    EXPECT_EQ(body_of(done)["status"], "Finished");
    EXPECT_EQ(call(s, "POST", "/games/golden/finish", json::object(), t.creator).status, 409);
    EXPECT_EQ(call(s, "POST", "/games/golden/tests", {{"assertions", assertion(1, 2, 1)}}, t.d1).status, 409);
    EXPECT_EQ(call(s, "POST", "/games/golden/join", {{"name", "Late"}, {"role", "defender"}}).status, 409);
}

TEST(Server, JoinRules)
{
    ArenaService s(golden_options(fresh_dir("join")));
    setup_golden(s);
    EXPECT_EQ(call(s, "POST", "/games/golden/join", {{"name", "A"}, {"role", "defender"}}).status, 409);
    EXPECT_EQ(call(s, "POST", "/games/golden/join", {{"name", "Z"}, {"role", "referee"}}).status, 422);
    const Response r = call(s, "POST", "/games/golden/join", {{"name", "Z"}, {"role", "defender"}});
    ASSERT_EQ(r.status, 201);
    EXPECT_EQ(body_of(r)["player_id"], "P4");
    EXPECT_EQ(body_of(call(s, "GET", "/games/golden"))["players"][3]["team"], "defenders");
}

TEST(Server, ConcurrentJoinsGetDistinctIds)
{
    ArenaService s(golden_options(fresh_dir("concurrent")));
    call(s, "POST", "/games", golden_config());
    std::vector<std::thread> threads;
    std::vector<std::string> ids(8);
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&, i] {
            const json r = body_of(call(s, "POST", "/games/golden/join",
                                        {{"name", "p" + std::to_string(i)}, {"role", i % 2 ? "attacker" : "defender"}}));
            ids[i] = r["player_id"];
        });
    for (auto& t : threads)
        t.join();
    std::sort(ids.begin(), ids.end());
    EXPECT_EQ(std::unique(ids.begin(), ids.end()), ids.end());
    EXPECT_EQ(last_seq(s), 9u);
}

namespace {

struct Collector
{
    httplib::Server server;
    std::thread thread;
    int port = 0;
    std::mutex mutex;
    std::vector<json> received;
    std::atomic<bool> up{true};

    Collector()
    {
        server.Post("/statements", [this](const httplib::Request& req, httplib::Response& res) {
            if (!up) {
                res.status = 503;
                return;
            }
            std::lock_guard lock(mutex);
            for (const auto& s : json::parse(req.body))
                received.push_back(s);
            res.status = 204;
        });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~Collector()
    {
        server.stop();
        thread.join();
    }

    std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }

    std::vector<std::uint64_t> seqs()
    {
        std::lock_guard lock(mutex);
        std::vector<std::uint64_t> out;
        for (const auto& s : received)
            out.push_back(s["extensions"]["seq"]);
        return out;
    }
};

}  // namespace

TEST(Server, AnalyticsReachTheCollector)
{
    Collector collector;
    auto o = golden_options(fresh_dir("analytics"));
    o.analytics_url = collector.url();
    ArenaService s(o);
    play_golden(s, 5);
    s.flush_analytics();
    std::vector<std::uint64_t> expected(12);
    std::iota(expected.begin(), expected.end(), 1);
    EXPECT_EQ(collector.seqs(), expected);
    EXPECT_EQ(s.analytics_state("golden")->delivered, 12u);
}

TEST(Server, UndeliveredStatementsAreResentAfterRestart)
{
    Collector collector;
    collector.up = false;
    const auto dir = fresh_dir("resend");
    auto o = golden_options(dir);
    o.analytics_url = collector.url();
    std::string events_down;
    {
        ArenaService s(o);
        play_golden(s, 5);
        s.flush_analytics();
        EXPECT_EQ(s.analytics_state("golden")->delivered, 0u);
        EXPECT_GT(s.analytics_state("golden")->failed, 0u);
        events_down = call(s, "GET", "/games/golden/events?since=0").body;
    }
    EXPECT_EQ(events_down, events_body(fixture_lines(12)));
    collector.up = true;
    ArenaService s(o);
    s.flush_analytics();
    EXPECT_EQ(collector.seqs().size(), 12u);
    // The cursor file stops a second resend.
    ArenaService again(o);
    again.flush_analytics();
    EXPECT_EQ(collector.seqs().size(), 12u);
}

TEST(Server, AnalyticsDisabledLeavesGameplayUnchanged)
{
    const auto on = fresh_dir("tracker_on");
    const auto off = fresh_dir("tracker_off");
    auto o = golden_options(off);
    o.analytics_enabled = false;
    ArenaService with(golden_options(on));
    ArenaService without(o);
    play_golden(with, 5);
    play_golden(without, 5);
    EXPECT_EQ(call(with, "GET", "/games/golden/events?since=0").body,
              call(without, "GET", "/games/golden/events?since=0").body);
    EXPECT_FALSE(without.analytics_state("golden"));
    EXPECT_FALSE(fs::exists(off / "analytics"));
    EXPECT_EQ(with.analytics_state("golden")->failed, 0u);
}

TEST(Server, ServesOverASocket)
{
    ArenaService s(golden_options(fresh_dir("socket")));
    std::atomic<bool> stop{false};
    std::promise<int> listening;
    std::thread t([&] { serve(s, "127.0.0.1", 0, &stop, [&](int port) { listening.set_value(port); }); });
    const int port = listening.get_future().get();
    httplib::Client client("127.0.0.1", port);
    const auto created = client.Post("/games", golden_config().dump(), "application/json");
    ASSERT_TRUE(created);
    EXPECT_EQ(created->status, 201);
    const auto joined = client.Post("/games/golden/join", json{{"name", "A"}, {"role", "attacker"}}.dump(),
                                    "application/json");
    ASSERT_TRUE(joined);
    const std::string token = json::parse(joined->body)["token"];
    httplib::Headers auth{{"Authorization", "Bearer " + token}};
    const auto submitted = client.Post("/games/golden/mutants", auth,
                                       json{{"source", mutant("if (a >= b) { return a - b; }")}}.dump(), "application/json");
    ASSERT_TRUE(submitted);
    EXPECT_EQ(submitted->status, 201) << submitted->body;
    const auto events = client.Get("/games/golden/events?since=1");
    ASSERT_TRUE(events);
    EXPECT_EQ(json::parse(events->body)["events"].size(), 2u);
    const auto big = client.Post("/games", std::string(kMaxBodyBytes + 10, ' '), "application/json");
    ASSERT_TRUE(big);
    EXPECT_EQ(big->status, 413);
    stop = true;
    t.join();
}
