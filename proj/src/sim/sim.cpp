#include "arena/sim/sim.hpp"

#include "arena/analytics/tracker.hpp"
#include "arena/minilang/interpreter.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>

namespace arena::sim {

using namespace arena::game;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::time_t kSimEpoch = 946684800;  // 2000-01-01T00:00:00Z

std::string synthetic_timestamp(std::uint64_t tick)
{
    const std::time_t t = kSimEpoch + static_cast<std::time_t>(tick);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool killable(const minilang::TypedUnit& original, const minilang::TypedUnit& mutant, std::uint64_t budget)
{
    for (const auto& fn : original->functions) {
        try {
            if (!runner::bounded_equivalence_oracle(original, mutant, fn.name, runner::make_domain(fn), budget)
                     .equivalent())
                return true;
        } catch (const Error&) {
            // Too large to decide: report it with the killable ones so a miss
            // is never hidden.
            return true;
        }
    }
    return false;
}

}  // namespace

AttackerBot::AttackerBot(const minilang::TypedUnit& unit)
{
    for (auto& c : mutation::enumerate_mutants(unit, {std::begin(mutation::kAllOperators),
                                                      std::end(mutation::kAllOperators)}))
        remaining_.push_back(std::move(c.mutated_source));
}

std::optional<std::string> AttackerBot::move(Rng& rng)
{
    if (remaining_.empty())
        return std::nullopt;
    const auto i = static_cast<std::ptrdiff_t>(rng.below(remaining_.size()));
    std::string source = std::move(remaining_[i]);
    remaining_.erase(remaining_.begin() + i);
    return source;
}

DefenderBot::DefenderBot(const minilang::TypedUnit& unit, std::size_t tries) : unit_(unit), tries_(tries)
{
    for (const auto& fn : unit->functions)
        functions_.emplace_back(fn.name, runner::make_domain(fn));
}

std::optional<std::vector<runner::Assertion>> DefenderBot::move(const GameState& state, Rng& rng) const
{
    if (functions_.empty())
        return std::nullopt;
    const std::set<int> suite = state.suite_coverage();
    const std::uint64_t budget = state.config.step_budget;
    for (std::size_t attempt = 0; attempt < tries_; ++attempt) {
        const auto& [fn, domain] = functions_[rng.below(functions_.size())];
        std::vector<minilang::Value> args;
        for (const auto& param : domain)
            args.push_back(param.values[rng.below(param.values.size())]);
        const auto eval = minilang::evaluate_call(unit_, fn, args, budget);
        if (!eval.outcome.is_value())
            continue;
        runner::ValidTest valid;
        try {
            valid = runner::validate_test(unit_, {"", "", {{fn, args, eval.outcome.value()}}}, budget);
        } catch (const runner::TestRejected&) {
            continue;
        }
        bool useful = !std::includes(suite.begin(), suite.end(), valid.covered_lines.begin(),
                                     valid.covered_lines.end());
        for (const auto& m : state.mutants) {
            if (useful)
                break;
            if (m.status == MutantStatus::Alive && runner::kill_check(unit_, *m.unit, valid, budget).killed)
                useful = true;
        }
        if (useful)
            return valid.test.assertions;
    }
    return std::nullopt;
}

PlayedGame play_game(const std::string& game_id, const GameConfig& config, std::uint64_t seed,
                     std::size_t defender_tries)
{
    std::uint64_t tick = 0;
    PlayedGame out;
    const auto step = [&](Transition t) {
        out.events.insert(out.events.end(), t.events.begin(), t.events.end());
        out.state = std::move(t.state);
    };
    step(create_game(game_id, config, synthetic_timestamp(tick++)));
    step(join_game(out.state, "attacker-bot", Role::Attacker, "attackers", synthetic_timestamp(tick++)));
    step(join_game(out.state, "defender-bot", Role::Defender, "defenders", synthetic_timestamp(tick++)));
    const std::string attacker = out.state.players[0].id;
    const std::string defender = out.state.players[1].id;

    Rng rng(seed);
    AttackerBot attacker_bot(*out.state.unit);
    const DefenderBot defender_bot(*out.state.unit, defender_tries);
    int passes = 0;
    bool attacker_turn = true;
    while (out.state.status == GameStatus::Active) {
        if (passes >= 2) {
            step(finish_game(out.state, "no_moves", synthetic_timestamp(tick++)));
            break;
        }
        if (attacker_turn) {
            if (auto source = attacker_bot.move(rng)) {
                step(submit_mutant(out.state, attacker, *source, synthetic_timestamp(tick++)));
                passes = 0;
            } else {
                ++passes;
            }
        } else {
            if (auto test = defender_bot.move(out.state, rng)) {
                step(submit_test(out.state, defender, std::move(*test), synthetic_timestamp(tick++)));
                passes = 0;
            } else {
                ++passes;
            }
        }
        attacker_turn = !attacker_turn;
    }
    return out;
}

std::vector<mutation::MutantCandidate> scored_candidates(const minilang::TypedUnit& unit)
{
    return mutation::enumerate_mutants(unit, {mutation::MutationOperator::AOR, mutation::MutationOperator::ROR});
}

SimReport run_simulation(const GameConfig& config, std::uint64_t n_games, std::uint64_t seed,
                         const SimOptions& options)
{
    const auto started = std::chrono::steady_clock::now();
    check_config(config);
    const minilang::TypedUnit unit = minilang::load_unit(config.unit_source, config.unit_name);

    std::vector<runner::NamedMutant> scored;
    std::vector<bool> can_kill;
    for (const auto& c : scored_candidates(unit)) {
        scored.push_back({mutation::format_candidate(c), minilang::load_unit(c.mutated_source, config.unit_name)});
        can_kill.push_back(killable(unit, scored.back().unit, config.step_budget));
    }

    if (!options.data_dir.empty()) {
        fs::create_directories(options.data_dir / "games");
        fs::create_directories(options.data_dir / "analytics");
    }

    SimReport report;
    report.unit_name = config.unit_name;
    report.seed = seed;
    report.config = config;
    Rng seeds(seed);
    for (std::uint64_t i = 0; i < n_games; ++i) {
        GameSummary g;
        g.seed = seeds.next();
        g.game_id = "sim-" + std::to_string(seed) + "-" + std::to_string(i + 1);
        const PlayedGame played = play_game(g.game_id, config, g.seed, options.defender_tries);

        if (!options.data_dir.empty()) {
            const fs::path log = options.data_dir / "games" / (g.game_id + ".ndjson");
            std::ofstream out(log, std::ios::binary | std::ios::trunc);
            for (const auto& e : played.events)
                out << canonical_event(e) << '\n';
            if (!out)
                throw Error("StorageFailure", "cannot write " + log.string());
            const fs::path statements = options.data_dir / "analytics" / (g.game_id + ".ndjson");
            fs::remove(statements);
            analytics::Tracker tracker(statements);
            GameState before;
            for (const auto& e : played.events) {
                tracker.record(e, before);
                apply_event(before, e);
            }
            if (tracker.failed())
                throw Error("StorageFailure", tracker.state().last_error);
        }

        const GameState& s = played.state;
        std::vector<runner::ValidTest> suite;
        for (const auto& t : s.tests)
            suite.push_back({{t.id, t.author, t.assertions}, t.covered_lines});
        const auto matrix = runner::build_kill_matrix(unit, scored, suite, config.step_budget);
        g.killed = matrix.killed;
        g.total = matrix.total;
        for (std::size_t k = 0; k < scored.size(); ++k)
            if (can_kill[k] && !matrix.matrix.killed(scored[k].id))
                g.unreached.push_back(scored[k].id);
        g.events = s.last_seq;
        if (!played.events.empty())
            if (const auto* f = std::get_if<GameFinished>(&played.events.back().payload))
                g.finish_reason = f->reason;
        for (const auto& p : s.players)
            (p.role == Role::Attacker ? g.attacker_points : g.defender_points) += p.points;
        g.state_hash = state_hash(s);
        report.attacker_points += g.attacker_points;
        report.defender_points += g.defender_points;
        report.games.push_back(std::move(g));
    }

    if (!report.games.empty()) {
        std::vector<std::uint64_t> lengths;
        for (const auto& g : report.games)
            lengths.push_back(g.events);
        std::sort(lengths.begin(), lengths.end());
        std::uint64_t sum = 0;
        for (auto l : lengths)
            sum += l;
        report.mean_length = static_cast<double>(sum) / static_cast<double>(lengths.size());
        const std::size_t mid = lengths.size() / 2;
        report.median_length = lengths.size() % 2 ? static_cast<double>(lengths[mid])
                                                  : (static_cast<double>(lengths[mid - 1]) + lengths[mid]) / 2.0;
    }
    report.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

ordered_json report_to_json(const SimReport& r)
{
    std::map<std::pair<std::size_t, std::size_t>, std::uint64_t, std::greater<>> distribution;
    for (const auto& g : r.games)
        ++distribution[{g.killed, g.total}];
    ordered_json dist = ordered_json::array();
    for (const auto& [score, count] : distribution)
        dist.push_back({{"killed", score.first}, {"total", score.second}, {"games", count}});

    ordered_json games = ordered_json::array();
    for (const auto& g : r.games)
        games.push_back({{"game_id", g.game_id},
                         {"seed", g.seed},
                         {"events", g.events},
                         {"finish_reason", g.finish_reason},
                         {"killed", g.killed},
                         {"total", g.total},
                         {"unreached", g.unreached},
                         {"attacker_points", g.attacker_points},
                         {"defender_points", g.defender_points},
                         {"state_hash", g.state_hash}});

    ordered_json out;
    out["unit"] = r.unit_name;
    out["seed"] = r.seed;
    out["config"] = config_to_json(r.config);
    out["games_played"] = r.games.size();
    out["mean_length"] = r.mean_length;
    out["median_length"] = r.median_length;
    out["score_distribution"] = dist;
    out["points"] = {{"attackers", r.attacker_points}, {"defenders", r.defender_points}};
    out["games"] = games;
    return out;
}

}  // namespace arena::sim
