#include "arena/server/service.hpp"

#include "arena/runner/test_runner.hpp"

#include <openssl/rand.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <ctime>
#include <fstream>
#include <regex>
#include <span>
#include <sstream>

namespace arena::server {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace arena::game;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxSubmissionId = 128;
const std::regex kIdPattern("[A-Za-z0-9_-]{1,64}");

struct Snapshot
{
    GameState state;
    std::shared_ptr<const std::vector<std::string>> lines;  // canonical events, seq order
};

Response json_response(int status, const ordered_json& body)
{
    return {status, body.dump()};
}

Response error_response(const std::string& code, const std::string& message,
                        std::optional<std::uint64_t> index = {})
{
    ordered_json err{{"code", code}, {"message", message}};
    if (index)
        err["index"] = *index;
    return json_response(status_for(code), ordered_json{{"error", err}});
}

std::string random_hex(std::size_t bytes)
{
    std::vector<unsigned char> buf(bytes);
    if (RAND_bytes(buf.data(), static_cast<int>(buf.size())) != 1)
        throw Error("StorageFailure", "no randomness available");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned char b : buf) {
        out += kHex[b >> 4];
        out += kHex[b & 15];
    }
    return out;
}

json parse_body(const Request& r)
{
    json body = json::parse(r.body.empty() ? std::string("{}") : r.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
        throw Error("MalformedRequest", "body must be a JSON object");
    return body;
}

std::string string_field(const json& body, const char* name, bool required = true)
{
    const auto it = body.find(name);
    if (it == body.end()) {
        if (required)
            throw Error("MalformedRequest", std::string("missing field '") + name + "'");
        return {};
    }
    if (!it->is_string())
        throw Error("MalformedRequest", std::string("field '") + name + "' must be a string");
    return it->get<std::string>();
}

std::string submission_field(const json& body)
{
    std::string sid = string_field(body, "submission_id", false);
    if (sid.size() > kMaxSubmissionId)
        throw Error("MalformedRequest", "submission_id is longer than 128 characters");
    return sid;
}

std::vector<runner::Assertion> assertions_field(const json& body)
{
    const auto it = body.find("assertions");
    if (it == body.end())
        throw Error("MalformedRequest", "missing field 'assertions'");
    return runner::assertions_from_json(*it);
}

ordered_json lines_json(const std::set<int>& lines)
{
    ordered_json out = ordered_json::array();
    for (int l : lines)
        out.push_back(l);
    return out;
}

/// Response to the submission event at `*begin`, built from that event and
/// the System events that follow it. Derived events are matched by the ids
/// they reference, so the same response is rebuilt from the log on recovery.
Response submission_response(const GameEvent* begin, const GameEvent* end)
{
    const GameEvent& head = *begin;
    const GameEvent* tail_end = begin + 1;
    while (tail_end != end && tail_end->actor == kSystemActor)
        ++tail_end;
    const std::span<const GameEvent> derived(begin + 1, tail_end);

    ordered_json out;
    out["submission_id"] = submission_id(head);
    out["seq"] = head.seq;
    if (const auto* p = std::get_if<MutantAccepted>(&head.payload)) {
        std::string status = "Alive";
        std::string killed_by;
        ordered_json survived = ordered_json::array();
        for (const auto& e : derived) {
            if (const auto* k = std::get_if<MutantKilled>(&e.payload); k && k->mutant_id == p->mutant_id) {
                status = "Stillborn";
                killed_by = k->test_id;
            } else if (const auto* s = std::get_if<MutantSurvivedTest>(&e.payload);
                       s && s->mutant_id == p->mutant_id) {
                survived.push_back(s->test_id);
            }
        }
        out["mutant_id"] = p->mutant_id;
        out["status"] = status;
        if (!killed_by.empty())
            out["killed_by"] = killed_by;
        out["survived_tests"] = survived;
        out["edited_lines"] = p->edited_lines;
        out["edited_nodes"] = p->edited_nodes;
        return json_response(201, out);
    }
    if (const auto* p = std::get_if<TestAccepted>(&head.payload)) {
        ordered_json killed = ordered_json::array();
        ordered_json survived = ordered_json::array();
        for (const auto& e : derived) {
            if (const auto* k = std::get_if<MutantKilled>(&e.payload); k && k->test_id == p->test_id)
                killed.push_back(k->mutant_id);
            else if (const auto* s = std::get_if<MutantSurvivedTest>(&e.payload); s && s->test_id == p->test_id)
                survived.push_back(s->mutant_id);
        }
        out["test_id"] = p->test_id;
        out["covered_lines"] = p->covered_lines;
        out["killed"] = killed;
        out["survived"] = survived;
        return json_response(201, out);
    }
    if (const auto* p = std::get_if<EquivalenceClaimed>(&head.payload)) {
        out["mutant_id"] = p->mutant_id;
        out["claim"] = "open";
        return json_response(201, out);
    }
    if (const auto* p = std::get_if<ClaimCountered>(&head.payload)) {
        out["mutant_id"] = p->mutant_id;
        out["status"] = "Killed";
        return json_response(201, out);
    }
    ordered_json err;
    if (const auto* p = std::get_if<MutantRejected>(&head.payload)) {
        err = {{"code", p->code}, {"message", p->message}};
    } else if (const auto* p = std::get_if<TestRejected>(&head.payload)) {
        err = {{"code", p->code}, {"message", p->message}};
        if (p->index)
            err["index"] = *p->index;
    } else {
        throw Error("InvalidEvent", "event " + std::to_string(head.seq) + " is not a submission");
    }
    ordered_json rejected;
    rejected["error"] = err;
    rejected["submission_id"] = out["submission_id"];
    rejected["seq"] = out["seq"];
    return json_response(422, rejected);
}

/// Appends whole lines and fsyncs. Throws Error("StorageFailure").
void append_durably(int fd, const std::string& text, const fs::path& path)
{
    std::size_t done = 0;
    while (done < text.size()) {
        const ssize_t n = ::write(fd, text.data() + done, text.size() - done);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            throw Error("StorageFailure", path.string() + ": " + std::strerror(errno));
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0)
        throw Error("StorageFailure", path.string() + ": fsync: " + std::strerror(errno));
}

int open_append(const fs::path& path)
{
    const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
    if (fd < 0)
        throw Error("StorageFailure", path.string() + ": " + std::strerror(errno));
    return fd;
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Cuts an unterminated final line off, or terminates a complete one, so the
/// next append starts on a fresh line. Returns true when bytes were dropped.
bool repair_tail(const fs::path& path, const std::string& text, bool drop_partial)
{
    if (text.empty() || text.back() == '\n')
        return false;
    if (drop_partial) {
        const auto nl = text.rfind('\n');
        fs::resize_file(path, nl == std::string::npos ? 0 : nl + 1);
        return true;
    }
    std::ofstream(path, std::ios::app | std::ios::binary) << '\n';
    return false;
}

std::string key_of(const std::string& subject, const std::string& sid)
{
    return subject + '\n' + sid;
}

}  // namespace

int status_for(std::string_view code)
{
    static const std::map<std::string_view, int> table{
        {"Unauthorized", 401},      {"NotAttacker", 403},        {"NotDefender", 403},
        {"NotMutantAuthor", 403},   {"NotCreator", 403},         {"ActorNotInGame", 403},
        {"UnknownGame", 404},       {"UnknownMutant", 404},      {"NotFound", 404},
        {"MethodNotAllowed", 405},  {"GameNotActive", 409},      {"MutantNotAlive", 409},
        {"ClaimAlreadyOpen", 409},  {"NoOpenClaim", 409},        {"NameTaken", 409},
        {"RoleFull", 409},          {"GameExists", 409},         {"BodyTooLarge", 413},
        {"StorageFailure", 503},
    };
    const auto it = table.find(code);
    return it == table.end() ? 422 : it->second;
}

std::string utc_now_iso8601()
{
    const auto now = std::chrono::system_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char date[32];
    std::strftime(date, sizeof date, "%Y-%m-%dT%H:%M:%S", &tm);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%s.%03dZ", date, static_cast<int>(ms));
    return buf;
}

struct ArenaService::Game
{
    std::string id;
    fs::path log_path;
    fs::path sessions_path;
    fs::path cursor_path;  // highest seq the analytics collector acknowledged

    // Guarded by writer.
    std::mutex writer;
    GameState state;
    int log_fd = -1;
    int sessions_fd = -1;
    std::map<std::string, std::string> tokens;  // sha256(token) -> player id or "creator"
    std::map<std::string, Response> responses;  // subject + submission id
    bool read_only = false;

    mutable std::mutex snapshot_mutex;
    std::shared_ptr<const Snapshot> snapshot;

    std::unique_ptr<analytics::Tracker> tracker;
    std::uint64_t cursor = 0;  // guarded by the service's delivery pass

    ~Game()
    {
        if (log_fd >= 0)
            ::close(log_fd);
        if (sessions_fd >= 0)
            ::close(sessions_fd);
    }

    std::shared_ptr<const Snapshot> read() const
    {
        std::lock_guard lock(snapshot_mutex);
        return snapshot;
    }

    void publish(std::vector<std::string> added)
    {
        auto lines = std::make_shared<std::vector<std::string>>();
        if (const auto old = read(); old && old->lines)
            *lines = *old->lines;
        for (auto& l : added)
            lines->push_back(std::move(l));
        auto next = std::make_shared<Snapshot>(Snapshot{state, std::move(lines)});
        std::lock_guard lock(snapshot_mutex);
        snapshot = std::move(next);
    }

    void add_session(const std::string& subject, const std::string& token_hash)
    {
        ordered_json line{{"subject", subject}, {"token_sha256", token_hash}};
        append_durably(sessions_fd, line.dump() + "\n", sessions_path);
        tokens[token_hash] = subject;
    }
};

ArenaService::ArenaService(ServiceOptions options) : options_(std::move(options))
{
    fs::create_directories(options_.data_dir / "games");
    if (options_.analytics_enabled)
        fs::create_directories(options_.data_dir / "analytics");
    recover();
    if (options_.analytics_enabled && options_.analytics_url && options_.delivery_interval.count() > 0) {
        deliverer_ = std::thread([this] {
            std::unique_lock lock(stop_mutex_);
            while (!stop_cv_.wait_for(lock, options_.delivery_interval, [this] { return stopping_; })) {
                lock.unlock();
                flush_analytics();
                lock.lock();
            }
        });
    }
}

ArenaService::~ArenaService()
{
    {
        std::lock_guard lock(stop_mutex_);
        stopping_ = true;
    }
    stop_cv_.notify_all();
    if (deliverer_.joinable())
        deliverer_.join();
}

std::string ArenaService::now() const
{
    return options_.clock ? options_.clock() : utc_now_iso8601();
}

std::shared_ptr<ArenaService::Game> ArenaService::find(const std::string& id) const
{
    std::shared_lock lock(games_mutex_);
    const auto it = games_.find(id);
    return it == games_.end() ? nullptr : it->second;
}

std::shared_ptr<ArenaService::Game> ArenaService::open_game(const std::string& id, bool create)
{
    auto g = std::make_shared<Game>();
    g->id = id;
    g->log_path = options_.data_dir / "games" / (id + ".ndjson");
    g->sessions_path = options_.data_dir / "games" / (id + ".sessions.ndjson");
    g->cursor_path = options_.data_dir / "analytics" / (id + ".delivered");
    if (create && fs::exists(g->log_path))
        throw Error("GameExists", "game " + id + " already exists");
    g->log_fd = open_append(g->log_path);
    g->sessions_fd = open_append(g->sessions_path);
    if (options_.analytics_enabled) {
        std::shared_ptr<analytics::RemoteSink> remote;
        if (options_.analytics_url)
            remote = std::make_shared<analytics::HttpSink>(*options_.analytics_url);
        g->tracker = std::make_unique<analytics::Tracker>(options_.data_dir / "analytics" / (id + ".ndjson"),
                                                          std::move(remote));
    }
    return g;
}

void ArenaService::recover()
{
    std::vector<fs::path> logs;
    for (const auto& entry : fs::directory_iterator(options_.data_dir / "games")) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".ndjson") && !name.ends_with(".sessions.ndjson"))
            logs.push_back(entry.path());
    }
    std::sort(logs.begin(), logs.end());
    for (const auto& path : logs) {
        const std::string id = path.stem().string();
        const std::string text = read_file(path);
        ReplayResult replayed;
        try {
            replayed = replay_log(text, true);
        } catch (const Error& e) {
            warnings_.push_back("game " + id + ": " + e.what() + "; not loaded");
            continue;
        }
        if (replayed.events.empty()) {
            warnings_.push_back("game " + id + ": empty log; not loaded");
            continue;
        }
        if (repair_tail(path, text, replayed.dropped_partial_tail))
            warnings_.push_back("game " + id + ": dropped partial final line after event " +
                                std::to_string(replayed.state.last_seq));

        auto g = open_game(id, false);
        g->state = std::move(replayed.state);

        const std::string sessions = read_file(g->sessions_path);
        repair_tail(g->sessions_path, sessions, true);
        std::istringstream sin(sessions);
        for (std::string line; std::getline(sin, line);) {
            const json s = json::parse(line, nullptr, false);
            if (s.is_discarded() || !s.is_object() || !s.contains("subject") || !s.contains("token_sha256"))
                continue;
            const auto subject = s["subject"].get<std::string>();
            if (subject == "creator" || g->state.player(subject))
                g->tokens[s["token_sha256"].get<std::string>()] = subject;
        }

        const auto& events = replayed.events;
        std::vector<std::string> lines;
        lines.reserve(events.size());
        for (std::size_t i = 0; i < events.size(); ++i) {
            lines.push_back(canonical_event(events[i]));
            const std::string sid(submission_id(events[i]));
            if (!sid.empty() && events[i].actor != kSystemActor)
                g->responses.emplace(key_of(events[i].actor, sid),
                                     submission_response(events.data() + i, events.data() + events.size()));
        }

        if (g->tracker) {
            // Statements are written after their event, so the local log may
            // lag the game log by the events of one request.
            const fs::path statements = options_.data_dir / "analytics" / (id + ".ndjson");
            const std::string stext = read_file(statements);
            repair_tail(statements, stext, true);
            std::uint64_t logged = 0;
            if (fs::exists(g->cursor_path))
                std::ifstream(g->cursor_path) >> g->cursor;
            std::istringstream lin(stext);
            for (std::string line; std::getline(lin, line);) {
                const ordered_json j = ordered_json::parse(line, nullptr, false);
                if (j.is_discarded())
                    continue;
                try {
                    const auto s = analytics::statement_from_json(j);
                    logged = std::max(logged, s.seq());
                    if (options_.analytics_url && s.seq() > g->cursor)
                        g->tracker->requeue(s);
                } catch (const Error&) {
                }
            }
            GameState before;
            for (const auto& e : events) {
                if (e.seq > logged)
                    g->tracker->record(e, before);
                apply_event(before, e);
            }
        }
        g->publish(std::move(lines));
        games_.emplace(id, std::move(g));
    }
}

void ArenaService::flush_analytics()
{
    std::vector<std::shared_ptr<Game>> games;
    {
        std::shared_lock lock(games_mutex_);
        for (const auto& [id, g] : games_)
            games.push_back(g);
    }
    static std::mutex pass;  // one delivery pass at a time owns the cursors
    std::lock_guard lock(pass);
    for (const auto& g : games) {
        if (!g->tracker)
            continue;
        g->tracker->flush();
        const auto delivered = g->tracker->last_delivered_seq();
        if (delivered > g->cursor) {
            const fs::path tmp = g->cursor_path.string() + ".tmp";
            std::ofstream(tmp, std::ios::trunc) << delivered << '\n';
            std::error_code ec;
            fs::rename(tmp, g->cursor_path, ec);
            if (!ec)
                g->cursor = delivered;
        }
    }
}

std::optional<analytics::DeliveryState> ArenaService::analytics_state(const std::string& game_id) const
{
    const auto g = find(game_id);
    if (!g || !g->tracker)
        return std::nullopt;
    return g->tracker->state();
}

std::vector<std::string> ArenaService::warnings() const
{
    return warnings_;
}

Response ArenaService::handle(const Request& r)
{
    try {
        if (r.body.size() > kMaxBodyBytes)
            throw Error("BodyTooLarge", "request body exceeds " + std::to_string(kMaxBodyBytes) + " bytes");
        std::vector<std::string> parts;
        std::istringstream in(r.path);
        for (std::string part; std::getline(in, part, '/');)
            if (!part.empty())
                parts.push_back(part);
        if (parts.empty() || parts[0] != "games")
            throw Error("NotFound", "no route " + r.path);
        const auto method = [&](const char* m) {
            if (r.method != m)
                throw Error("MethodNotAllowed", r.method + " is not allowed on " + r.path);
        };
        if (parts.size() == 1) {
            method("POST");
            return create(r);
        }
        if (!std::regex_match(parts[1], kIdPattern))
            throw Error("UnknownGame", "no game " + parts[1]);
        const auto g = find(parts[1]);
        if (!g)
            throw Error("UnknownGame", "no game " + parts[1]);
        if (parts.size() == 2) {
            method("GET");
            return public_state(*g);
        }
        const std::string& leaf = parts[2];
        if (parts.size() == 3) {
            if (leaf == "join")
                return method("POST"), join(*g, r);
            if (leaf == "mutants")
                return method("POST"), submit(*g, r, "mutant", "");
            if (leaf == "tests")
                return method("POST"), submit(*g, r, "test", "");
            if (leaf == "claims")
                return method("POST"), submit(*g, r, "claim", "");
            if (leaf == "scoreboard")
                return method("GET"), scoreboard(*g);
            if (leaf == "events")
                return method("GET"), events(*g, r);
            if (leaf == "finish")
                return method("POST"), finish(*g, r);
        }
        if (parts.size() == 5 && leaf == "claims" && parts[4] == "counter") {
            method("POST");
            return submit(*g, r, "counter", parts[3]);
        }
        throw Error("NotFound", "no route " + r.path);
    } catch (const runner::TestRejected& e) {
        std::optional<std::uint64_t> index;
        if (e.index())
            index = *e.index();
        return error_response(e.code(), e.what(), index);
    } catch (const Error& e) {
        return error_response(e.code(), e.what());
    } catch (const json::exception& e) {
        return error_response("MalformedRequest", e.what());
    }
}

namespace {

std::string authenticate(const std::map<std::string, std::string>& tokens, const Request& r)
{
    const auto it = r.headers.find("authorization");
    static constexpr std::string_view kBearer = "Bearer ";
    if (it == r.headers.end() || !it->second.starts_with(kBearer))
        throw Error("Unauthorized", "missing bearer token");
    const auto found = tokens.find(sha256_hex(std::string_view(it->second).substr(kBearer.size())));
    if (found == tokens.end())
        throw Error("Unauthorized", "unknown token");
    return found->second;
}

}  // namespace

Response ArenaService::create(const Request& r)
{
    const json body = parse_body(r);
    const GameConfig config = config_from_json(body);
    std::unique_lock lock(games_mutex_);
    const std::string id = options_.game_ids ? options_.game_ids() : "g" + random_hex(6);
    if (!std::regex_match(id, kIdPattern))
        throw Error("InvalidConfig", "bad game id '" + id + "'");
    if (games_.count(id))
        throw Error("GameExists", "game " + id + " already exists");
    Transition t = create_game(id, config, now());
    auto g = open_game(id, true);
    std::vector<std::string> lines;
    std::string text;
    for (const auto& e : t.events) {
        lines.push_back(canonical_event(e));
        text += lines.back() + '\n';
    }
    append_durably(g->log_fd, text, g->log_path);
    const std::string token = random_hex(16);
    g->add_session("creator", sha256_hex(token));
    if (g->tracker) {
        GameState before;
        for (const auto& e : t.events) {
            g->tracker->record(e, before);
            apply_event(before, e);
        }
    }
    g->state = std::move(t.state);
    g->publish(std::move(lines));
    games_.emplace(id, std::move(g));
    return json_response(201, ordered_json{{"game_id", id}, {"creator_token", token}});
}

namespace {

/// Runs one state-changing operation for `g`: appends its events to the log,
/// records analytics, then publishes the new state. The caller holds the
/// writer lock.
template <class Op>
std::vector<GameEvent> commit(ArenaService::Game& g, const std::string& timestamp, Op&& op)
{
    if (g.read_only)
        throw Error("StorageFailure", "game " + g.id + " is read-only after a storage failure");
    Transition t = op(g.state, timestamp);
    std::vector<std::string> lines;
    std::string text;
    for (const auto& e : t.events) {
        lines.push_back(canonical_event(e));
        text += lines.back() + '\n';
    }
    try {
        append_durably(g.log_fd, text, g.log_path);
    } catch (const Error&) {
        g.read_only = true;
        throw;
    }
    if (g.tracker) {
        GameState before = g.state;
        for (const auto& e : t.events) {
            g.tracker->record(e, before);
            apply_event(before, e);
        }
    }
    g.state = std::move(t.state);
    g.publish(std::move(lines));
    return std::move(t.events);
}

}  // namespace

Response ArenaService::join(Game& g, const Request& r)
{
    const json body = parse_body(r);
    const std::string name = string_field(body, "name");
    const auto parsed = parse_role(string_field(body, "role"));
    if (!parsed)
        throw Error("InvalidPlayer", "role must be attacker or defender");
    const Role role = *parsed;
    const std::string team = string_field(body, "team", false);
    std::lock_guard lock(g.writer);
    const auto events = commit(g, now(), [&](const GameState& s, const std::string& ts) {
        return join_game(s, name, role, team.empty() ? std::string(to_string(role)) + "s" : team, ts);
    });
    const auto& joined = std::get<PlayerJoined>(events.front().payload);
    const std::string token = random_hex(16);
    try {
        g.add_session(joined.player_id, sha256_hex(token));
    } catch (const Error&) {
        g.read_only = true;
        throw;
    }
    return json_response(201, ordered_json{{"player_id", joined.player_id}, {"token", token}});
}

Response ArenaService::submit(Game& g, const Request& r, const std::string& kind, const std::string& mutant_id)
{
    const json body = parse_body(r);
    const std::string sid = submission_field(body);
    std::lock_guard lock(g.writer);
    const std::string subject = authenticate(g.tokens, r);
    if (!sid.empty())
        if (const auto it = g.responses.find(key_of(subject, sid)); it != g.responses.end())
            return it->second;
    std::function<Transition(const GameState&, const std::string&)> op;
    if (kind == "mutant") {
        op = [&, source = string_field(body, "source")](const GameState& s, const std::string& ts) {
            return submit_mutant(s, subject, source, ts, sid);
        };
    } else if (kind == "test") {
        op = [&, assertions = assertions_field(body)](const GameState& s, const std::string& ts) {
            return submit_test(s, subject, assertions, ts, sid);
        };
    } else if (kind == "claim") {
        op = [&, target = string_field(body, "mutant_id")](const GameState& s, const std::string& ts) {
            return claim_equivalence(s, subject, target, ts, sid);
        };
    } else {
        op = [&, assertions = assertions_field(body)](const GameState& s, const std::string& ts) {
            return counter_claim(s, subject, mutant_id, assertions, ts, sid);
        };
    }
    const auto events = commit(g, now(), op);
    Response out = submission_response(events.data(), events.data() + events.size());
    if (!sid.empty())
        g.responses.emplace(key_of(subject, sid), out);
    return out;
}

Response ArenaService::finish(Game& g, const Request& r)
{
    const json body = parse_body(r);
    const std::string reason = body.contains("reason") ? string_field(body, "reason") : "finished_by_creator";
    std::lock_guard lock(g.writer);
    if (authenticate(g.tokens, r) != "creator")
        throw Error("NotCreator", "only the game's creator may finish it");
    const auto events = commit(g, now(), [&](const GameState& s, const std::string& ts) {
        return finish_game(s, reason, ts);
    });
    ordered_json out;
    out["seq"] = events.back().seq;
    out["status"] = to_string(g.state.status);
    out["scoreboard"] = scoreboard_to_json(g.state);
    return json_response(200, out);
}

Response ArenaService::public_state(const Game& g)
{
    const auto snap = g.read();
    const GameState& s = snap->state;
    ordered_json out;
    out["game_id"] = s.game_id;
    out["status"] = to_string(s.status);
    out["last_seq"] = s.last_seq;
    out["config"] = config_to_json(s.config);

    ordered_json players = ordered_json::array();
    for (const auto& p : s.players)
        players.push_back(
            {{"id", p.id}, {"name", p.name}, {"role", to_string(p.role)}, {"team", p.team}, {"points", p.points}});
    out["players"] = players;

    ordered_json mutants = ordered_json::array();
    for (const auto& m : s.mutants) {
        ordered_json j{{"id", m.id},
                       {"author", m.author},
                       {"status", to_string(m.status)},
                       {"claimed", m.claim.has_value()},
                       {"edited_lines", lines_json(m.edited_lines)},
                       {"points", m.attacker_points}};
        if (!m.killed_by.empty())
            j["killed_by"] = m.killed_by;
        // Live mutants stay hidden from defenders; the code is revealed once
        // the mutant leaves play.
        if (m.status != MutantStatus::Alive)
            j["source"] = m.source;
        mutants.push_back(j);
    }
    out["mutants"] = mutants;

    ordered_json tests = ordered_json::array();
    for (const auto& t : s.tests)
        tests.push_back({{"id", t.id},
                         {"author", t.author},
                         {"assertions", runner::assertions_to_json(t.assertions)},
                         {"covered_lines", lines_json(t.covered_lines)},
                         {"points", t.points}});
    out["tests"] = tests;

    const std::string& source = s.config.unit_source;
    int line_count = static_cast<int>(std::count(source.begin(), source.end(), '\n'));
    if (!source.empty() && source.back() != '\n')
        ++line_count;
    const std::set<int> covered = s.suite_coverage();
    ordered_json lines = ordered_json::array();
    for (int l = 1; l <= line_count; ++l) {
        ordered_json markers = ordered_json::array();
        for (const auto& m : s.mutants)
            if (m.edited_lines.count(l))
                markers.push_back({{"id", m.id}, {"status", to_string(m.status)}, {"claimed", m.claim.has_value()}});
        lines.push_back({{"line", l}, {"covered", covered.count(l) > 0}, {"mutants", markers}});
    }
    out["lines"] = lines;
    return json_response(200, out);
}

Response ArenaService::scoreboard(const Game& g)
{
    return json_response(200, scoreboard_to_json(g.read()->state));
}

Response ArenaService::events(const Game& g, const Request& r)
{
    std::uint64_t since = 0;
    if (const auto it = r.query.find("since"); it != r.query.end()) {
        const std::string& v = it->second;
        if (v.empty() || v.size() > 19 || !std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; }))
            throw Error("MalformedRequest", "since must be a non-negative integer");
        since = std::stoull(v);
    }
    const auto snap = g.read();
    const auto& lines = *snap->lines;
    std::string body = "{\"events\":[";
    for (std::size_t i = std::min<std::uint64_t>(since, lines.size()); i < lines.size(); ++i) {
        if (body.back() != '[')
            body += ',';
        body += lines[i];
    }
    body += "],\"last_seq\":" + std::to_string(snap->state.last_seq) + "}";
    return {200, body};
}

}  // namespace arena::server
