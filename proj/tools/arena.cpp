#include "arena/analytics/tracker.hpp"
#include "arena/game/game.hpp"
#include "arena/minilang/interpreter.hpp"
#include "arena/mutation/mutation.hpp"
#include "arena/runner/test_runner.hpp"
#include "arena/server/service.hpp"
#include "arena/sim/sim.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace arena;
namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("FileNotFound", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string unit_name_of(const std::string& path)
{
    return fs::path(path).stem().string();
}

minilang::TypedUnit load_file(const std::string& path)
{
    return minilang::load_unit(read_file(path), unit_name_of(path));
}

std::string call_text(const std::string& fn, const std::vector<minilang::Value>& args)
{
    std::string out = fn + "(";
    for (std::size_t i = 0; i < args.size(); ++i)
        out += (i ? ", " : "") + args[i].to_string();
    return out + ")";
}

std::string join_lines(const std::set<int>& lines)
{
    std::string out;
    for (int l : lines)
        out += (out.empty() ? "" : ",") + std::to_string(l);
    return out.empty() ? "-" : out;
}

/// "-8..8" -> {-8, 8}.
std::pair<std::int64_t, std::int64_t> parse_range(const std::string& text)
{
    const auto dots = text.find("..", 1);
    try {
        if (dots == std::string::npos)
            throw std::invalid_argument(text);
        std::size_t used = 0;
        const auto lo = std::stoll(text.substr(0, dots), &used);
        if (used != dots)
            throw std::invalid_argument(text);
        const std::string hi_text = text.substr(dots + 2);
        const auto hi = std::stoll(hi_text, &used);
        if (used != hi_text.size() || lo > hi)
            throw std::invalid_argument(text);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--domain", "expected LO..HI, got '" + text + "'");
    }
}

int cmd_mutate(const std::string& unit_path, const std::string& ops)
{
    const auto unit = load_file(unit_path);
    const auto list = ops.empty() ? std::vector<mutation::MutationOperator>(std::begin(mutation::kAllOperators),
                                                                            std::end(mutation::kAllOperators))
                                  : mutation::parse_operator_list(ops);
    for (const auto& c : mutation::enumerate_mutants(unit, list))
        std::cout << mutation::format_candidate(c) << '\n';
    return 0;
}

int cmd_test(const std::string& unit_path, const std::string& tests_path, const std::vector<std::string>& mutants,
             std::uint64_t budget)
{
    const auto unit = load_file(unit_path);
    const auto assertions = runner::assertions_from_json(nlohmann::json::parse(read_file(tests_path), nullptr, false));
    for (std::size_t i = 0; i < assertions.size(); ++i) {
        const auto& a = assertions[i];
        const auto eval = minilang::evaluate_call(unit, a.fn, a.args, budget);
        const bool pass = eval.outcome == minilang::Outcome::value(a.expected);
        std::cout << i << ' ' << call_text(a.fn, a.args) << " == " << a.expected.to_string() << ": "
                  << (pass ? "pass" : "FAIL, got " + eval.outcome.to_string()) << " (lines "
                  << join_lines({eval.trace.covered_lines.begin(), eval.trace.covered_lines.end()}) << ")\n";
    }
    // A failing assertion surfaces as the validation error and exit code 1.
    const auto valid = runner::validate_test(unit, {"t", "", assertions}, budget);
    std::cout << "valid test, covers lines " << join_lines(valid.covered_lines) << '\n';
    for (const auto& path : mutants) {
        const auto m = load_file(path);
        const auto r = runner::kill_check(unit, m, valid, budget);
        std::cout << path << ": ";
        if (r.killed)
            std::cout << "Killed at assertion " << r.index << " (" << r.baseline_outcome->to_string() << " vs "
                      << r.variant_outcome->to_string() << ")\n";
        else
            std::cout << "Survived\n";
    }
    return 0;
}

int cmd_equivalence(const std::string& unit_path, const std::string& mutant_path, const std::string& fn_name,
                    const std::string& domain, std::uint64_t budget)
{
    const auto unit = load_file(unit_path);
    const auto mutant = load_file(mutant_path);
    runner::DomainSpec spec;
    if (!domain.empty())
        std::tie(spec.int_lo, spec.int_hi) = parse_range(domain);
    std::vector<const minilang::FunctionDecl*> fns;
    if (fn_name.empty()) {
        for (const auto& f : unit->functions)
            fns.push_back(&f);
    } else if (const auto* f = unit->find(fn_name)) {
        fns.push_back(f);
    } else {
        throw Error("UnknownFunction", "no function " + fn_name);
    }
    for (const auto* f : fns) {
        const auto v = runner::bounded_equivalence_oracle(unit, mutant, f->name, runner::make_domain(*f, spec), budget);
        if (v.equivalent()) {
            std::cout << f->name << ": Equivalent over " << v.domain << " (" << v.tuples_checked << " tuples)\n";
            continue;
        }
        const auto& c = *v.counterexample;
        std::cout << f->name << ": Counterexample " << call_text(c.fn, c.args) << ": original "
                  << c.original.to_string() << ", mutant " << c.mutant.to_string() << '\n';
        if (c.original.is_value())
            std::cout << "killing test: "
                      << runner::assertions_to_json({{c.fn, c.args, c.original.value()}}).dump() << '\n';
    }
    return 0;
}

int cmd_replay(const std::string& log_path, bool tolerate, const std::string& expect_hash)
{
    const std::string text = read_file(log_path);
    const auto replayed = game::replay_log(text, tolerate);
    if (replayed.dropped_partial_tail)
        std::cerr << "warning: dropped partial final line after event " << replayed.state.last_seq << '\n';
    // Refold from the canonical re-serialization; both folds must agree.
    std::string canonical;
    for (const auto& e : replayed.events)
        canonical += game::canonical_event(e) + '\n';
    const std::string hash = game::state_hash(replayed.state);
    if (game::state_hash(game::replay_log(canonical).state) != hash)
        throw Error("HashMismatch", "canonical re-serialization folds to a different state");
    if (!expect_hash.empty() && expect_hash != hash)
        throw Error("HashMismatch", "state hash " + hash + " differs from expected " + expect_hash);

    const auto& s = replayed.state;
    const auto board = game::scoreboard(s);
    std::string summary;
    for (const auto& p : s.players)
        summary += (summary.empty() ? "" : ", ") + p.name + ":" + std::to_string(p.points);
    std::cout << "game " << s.game_id << ": " << game::to_string(s.status) << ", " << s.last_seq << " events\n";
    std::cout << "scoreboard {" << summary << "}\n";
    for (const auto& p : s.players)
        std::cout << "  " << p.id << ' ' << p.name << " (" << game::to_string(p.role) << ", " << p.team
                  << "): " << p.points << '\n';
    for (const auto& [team, points] : board.teams)
        std::cout << "  team " << team << ": " << points << '\n';
    std::cout << "state_hash " << hash << " verified\n";
    return 0;
}

int cmd_sim(const std::string& unit_path, std::uint64_t games, std::uint64_t seed, const std::string& out,
            const std::string& data_dir, std::size_t tries)
{
    game::GameConfig config;
    config.unit_name = unit_name_of(unit_path);
    config.unit_source = read_file(unit_path);
    const auto report = sim::run_simulation(config, games, seed, {data_dir, tries});
    const std::string json = sim::report_to_json(report).dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << json;
    } else {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        f << json;
        if (!f)
            throw Error("StorageFailure", "cannot write " + out);
    }
    std::size_t best = 0;
    for (const auto& g : report.games)
        best += g.unreached.empty() ? 1 : 0;
    std::cerr << report.games.size() << " games, mean length " << report.mean_length << " events, "
              << best << " reached every killable mutant, " << std::fixed << std::setprecision(2)
              << report.wall_clock_seconds << " s\n";
    return 0;
}

std::atomic<bool> g_stop{false};

int cmd_serve(const std::string& host, int port, const std::string& data_dir, const std::string& analytics_url,
              bool analytics_disabled)
{
    server::ServiceOptions options;
    options.data_dir = data_dir;
    options.analytics_enabled = !analytics_disabled;
    if (!analytics_url.empty())
        options.analytics_url = analytics_url;
    server::ArenaService service(options);
    for (const auto& w : service.warnings())
        std::cerr << "warning: " << w << '\n';
    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    const bool ok = server::serve(service, host, port, &g_stop, [&](int bound) {
        std::cerr << "listening on " << host << ':' << bound << ", data in " << data_dir << '\n';
    });
    if (!ok)
        throw Error("BindFailed", "cannot listen on " + host + ":" + std::to_string(port));
    service.flush_analytics();
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mutation-testing game over MiniLang"};
    app.require_subcommand(1);
    std::uint64_t budget = minilang::kDefaultStepBudget;

    std::string unit_path, ops;
    auto* mutate = app.add_subcommand("mutate", "List first-order mutants, one per line");
    mutate->add_option("unit", unit_path, "MiniLang source")->required();
    mutate->add_option("--ops", ops, "Comma-separated operators (default: all)");

    std::string tests_path;
    std::vector<std::string> mutants;
    auto* test = app.add_subcommand("test", "Run a test file against a unit, and optionally mutants");
    test->add_option("unit", unit_path, "MiniLang source")->required();
    test->add_option("tests", tests_path, "JSON array of {fn, args, expected}")->required();
    test->add_option("--mutant", mutants, "Mutant source to kill-check");
    test->add_option("--budget", budget, "Step budget per call");

    std::string mutant_path, fn_name, domain;
    auto* equivalence = app.add_subcommand("equivalence", "Bounded exhaustive equivalence check");
    equivalence->add_option("unit", unit_path, "Original source")->required();
    equivalence->add_option("mutant", mutant_path, "Mutant source")->required();
    equivalence->add_option("--fn", fn_name, "Function to compare (default: every function)");
    equivalence->add_option("--domain", domain, "Integer range LO..HI (default -8..8)");
    equivalence->add_option("--budget", budget, "Step budget per call");

    std::string log_path, expect_hash;
    bool tolerate = false;
    auto* replay = app.add_subcommand("replay", "Fold an event log and print the scoreboard");
    replay->add_option("log", log_path, "NDJSON event log")->required();
    replay->add_flag("--tolerate-partial", tolerate, "Drop an unterminated final line");
    replay->add_option("--expect-hash", expect_hash, "Fail unless the state hash matches");

    std::uint64_t games = 100, seed = 42;
    std::string out, sim_dir;
    std::size_t tries = sim::kDefenderTries;
    auto* simulate = app.add_subcommand("sim", "Bot-vs-bot simulation");
    simulate->add_option("--unit", unit_path, "MiniLang source")->required();
    simulate->add_option("--games", games, "Number of games");
    simulate->add_option("--seed", seed, "Simulation seed");
    simulate->add_option("--out", out, "Report path (default: stdout)");
    simulate->add_option("--data-dir", sim_dir, "Write event and statement logs here");
    simulate->add_option("--defender-tries", tries, "Random tests the defender bot draws per turn");

    std::string host = "0.0.0.0", data_dir = "data", analytics_url;
    int port = 8080;
    bool analytics_disabled = false;
    auto* serve = app.add_subcommand("serve", "Run the HTTP game server");
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port")->envname("ARENA_PORT")->check(CLI::Range(0, 65535));
    serve->add_option("--data-dir", data_dir, "Game and analytics logs")->envname("ARENA_DATA_DIR");
    serve->add_option("--analytics-url", analytics_url, "Statement collector base URL")
        ->envname("ARENA_ANALYTICS_URL");
    serve->add_flag("--analytics-disabled", analytics_disabled, "Do not record statements");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*mutate)
            return cmd_mutate(unit_path, ops);
        if (*test)
            return cmd_test(unit_path, tests_path, mutants, budget);
        if (*equivalence)
            return cmd_equivalence(unit_path, mutant_path, fn_name, domain, budget);
        if (*replay)
            return cmd_replay(log_path, tolerate, expect_hash);
        if (*simulate)
            return cmd_sim(unit_path, games, seed, out, sim_dir, tries);
        if (*serve)
            return cmd_serve(host, port, data_dir, analytics_url, analytics_disabled);
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const runner::TestRejected& e) {
        std::cerr << e.code() << ": " << e.what();
        if (e.index())
            std::cerr << " (assertion " << *e.index() << ")";
        std::cerr << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << '\n';
        return 1;
    }
    return 2;
}
