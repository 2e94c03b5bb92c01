#include "arena/analytics/tracker.hpp"

#include "httplib.h"

#include <algorithm>
#include <fstream>

namespace arena::analytics {

using nlohmann::json;
using nlohmann::ordered_json;
using namespace arena::game;

namespace {

StatementActor actor_of(const GameState& s, const std::string& id)
{
    if (id == kSystemActor)
        return {id, id};
    const Player* p = s.player(id);
    return {id, p ? p->name : id};
}

class Mapper
{
public:
    Mapper(const GameEvent& e, const GameState& before) : s_(before)
    {
        st_.actor = actor_of(before, e.actor);
        st_.timestamp = e.timestamp;
        st_.object.game_id = before.game_id;
        st_.extensions["seq"] = e.seq;
        st_.extensions["event"] = event_type(e);
    }

    Statement operator()(const GameCreated& p)
    {
        st_.object = {p.game_id, "game", p.game_id};
        return done("started");
    }

    Statement operator()(const PlayerJoined& p)
    {
        st_.actor = {p.player_id, p.name};
        st_.object.kind = "player";
        st_.object.id = p.player_id;
        st_.extensions["role"] = to_string(p.role);
        st_.extensions["team"] = p.team;
        return done("joined");
    }

    Statement operator()(const MutantAccepted& p)
    {
        st_.object.kind = "mutant";
        st_.object.id = p.mutant_id;
        st_.result = StatementResult{0, true};
        st_.extensions["source_hash"] = p.source_hash;
        st_.extensions["edited_lines"] = p.edited_lines;
        st_.extensions["edited_nodes"] = p.edited_nodes;
        return done("submitted_mutant");
    }

    Statement operator()(const MutantRejected& p)
    {
        st_.object.kind = "mutant";
        st_.result = StatementResult{0, false};
        st_.extensions["source_hash"] = sha256_hex(p.source);
        st_.extensions["code"] = p.code;
        return done("submitted_mutant");
    }

    Statement operator()(const TestAccepted& p)
    {
        st_.object.kind = "test";
        st_.object.id = p.test_id;
        st_.result = StatementResult{0, true};
        st_.extensions["assertion_count"] = p.assertions.size();
        st_.extensions["covered_lines"] = p.covered_lines;
        return done("submitted_test");
    }

    Statement operator()(const TestRejected& p)
    {
        st_.object.kind = "test";
        st_.result = StatementResult{0, false};
        st_.extensions["assertion_count"] = p.assertions.size();
        st_.extensions["code"] = p.code;
        return done("submitted_test");
    }

    Statement operator()(const MutantKilled& p)
    {
        const Mutant* m = s_.mutant(p.mutant_id);
        const Test* t = s_.test(p.test_id);
        st_.actor = actor_of(s_, t->author);
        mutant_object(p.mutant_id);
        st_.result = StatementResult{1 + m->accrued_points, true};
        st_.extensions["test_id"] = p.test_id;
        st_.extensions["accrued_points"] = m->accrued_points;
        st_.extensions["at_birth"] = p.at_birth;
        return done("killed_mutant");
    }

    Statement operator()(const MutantSurvivedTest& p)
    {
        const Mutant* m = s_.mutant(p.mutant_id);
        st_.actor = actor_of(s_, m->author);
        mutant_object(p.mutant_id);
        st_.result = StatementResult{1, true};
        st_.extensions["test_id"] = p.test_id;
        st_.extensions["accrued_points"] = m->accrued_points + 1;
        return done("mutant_survived");
    }

    Statement operator()(const EquivalenceClaimed& p)
    {
        mutant_object(p.mutant_id);
        st_.extensions["accrued_points"] = s_.mutant(p.mutant_id)->accrued_points;
        return done("claimed_equivalence");
    }

    Statement operator()(const ClaimCountered& p)
    {
        mutant_object(p.mutant_id);
        st_.result = StatementResult{1, true};
        st_.extensions["assertion_count"] = p.assertions.size();
        return done("countered_claim");
    }

    Statement operator()(const ClaimUpheld& p)
    {
        const Mutant* m = s_.mutant(p.mutant_id);
        const Player* attacker = s_.player(m->author);
        st_.actor = actor_of(s_, m->claim->claimant);
        mutant_object(p.mutant_id);
        st_.result = StatementResult{1, true};
        st_.extensions["attacker"] = m->author;
        st_.extensions["attacker_delta"] = -std::min(attacker->points, m->accrued_points);
        return done("claim_upheld");
    }

    Statement operator()(const GameFinished& p)
    {
        st_.object.kind = "game";
        st_.object.id = s_.game_id;
        st_.extensions["reason"] = p.reason;
        return done("finished");
    }

private:
    void mutant_object(const std::string& id)
    {
        st_.object.kind = "mutant";
        st_.object.id = id;
    }

    Statement done(std::string verb)
    {
        st_.verb = std::move(verb);
        return std::move(st_);
    }

    const GameState& s_;
    Statement st_;
};

[[noreturn]] void malformed(const std::string& message)
{
    throw Error("MalformedStatement", message);
}

std::string get_string(const ordered_json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        malformed(std::string("'") + key + "' must be a string");
    return it->get<std::string>();
}

const ordered_json& get_object(const ordered_json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end() || !it->is_object())
        malformed(std::string("'") + key + "' must be an object");
    return *it;
}

}  // namespace

std::optional<Statement> to_statement(const GameEvent& event, const GameState& before)
{
    return std::visit(Mapper(event, before), event.payload);
}

ordered_json statement_to_json(const Statement& s)
{
    ordered_json j;
    j["actor"]["id"] = s.actor.id;
    j["actor"]["name"] = s.actor.name;
    j["verb"] = s.verb;
    j["object"]["game_id"] = s.object.game_id;
    j["object"]["kind"] = s.object.kind;
    j["object"]["id"] = s.object.id;
    if (s.result) {
        j["result"]["score_delta"] = s.result->score_delta;
        j["result"]["success"] = s.result->success;
    } else {
        j["result"] = nullptr;
    }
    j["timestamp"] = s.timestamp;
    j["extensions"] = s.extensions;
    return j;
}

Statement statement_from_json(const ordered_json& j)
{
    if (!j.is_object())
        malformed("a statement is a JSON object");
    Statement s;
    const ordered_json& actor = get_object(j, "actor");
    s.actor = {get_string(actor, "id"), get_string(actor, "name")};
    s.verb = get_string(j, "verb");
    if (std::find(std::begin(kVerbs), std::end(kVerbs), s.verb) == std::end(kVerbs))
        malformed("unknown verb '" + s.verb + "'");
    const ordered_json& object = get_object(j, "object");
    s.object = {get_string(object, "game_id"), get_string(object, "kind"), get_string(object, "id")};
    auto result = j.find("result");
    if (result == j.end())
        malformed("'result' is required");
    if (!result->is_null()) {
        if (!result->is_object())
            malformed("'result' must be {score_delta, success}");
        const auto delta = result->find("score_delta");
        const auto success = result->find("success");
        if (delta == result->end() || success == result->end() || !delta->is_number_integer() ||
            !success->is_boolean())
            malformed("'result' must be {score_delta, success}");
        s.result = StatementResult{delta->get<std::int64_t>(), success->get<bool>()};
    }
    s.timestamp = get_string(j, "timestamp");
    s.extensions = get_object(j, "extensions");
    if (!s.extensions.contains("seq") || !s.extensions["seq"].is_number_unsigned())
        malformed("extensions.seq is required");
    return s;
}

std::string canonical_statement(const Statement& s)
{
    return statement_to_json(s).dump();
}

// ---- remote ----

HttpSink::HttpSink(std::string url, std::chrono::milliseconds timeout) : timeout_(timeout)
{
    const auto scheme = url.find("://");
    const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    origin_ = url.substr(0, path);
    path_ = path == std::string::npos ? "" : url.substr(path);
    while (!path_.empty() && path_.back() == '/')
        path_.pop_back();
    path_ += "/statements";
}

void HttpSink::deliver(const std::vector<Statement>& batch)
{
    ordered_json body = ordered_json::array();
    for (const auto& s : batch)
        body.push_back(statement_to_json(s));
    httplib::Client client(origin_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    const auto res = client.Post(path_, body.dump(), "application/json");
    if (!res)
        throw Error("SinkUnavailable", "POST " + origin_ + path_ + ": " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error("SinkUnavailable", "POST " + origin_ + path_ + ": status " + std::to_string(res->status));
}

std::chrono::milliseconds BackoffPolicy::delay(std::uint64_t failures) const
{
    auto d = base;
    for (std::uint64_t i = 1; i < failures && d < cap; ++i)
        d *= factor;
    return std::min(d, cap);
}

// ---- tracker ----

Tracker::Tracker(std::filesystem::path log_path, std::shared_ptr<RemoteSink> remote, BackoffPolicy backoff,
                 Clock clock)
    : log_path_(std::move(log_path)), remote_(std::move(remote)), backoff_(backoff), clock_(std::move(clock))
{}

bool Tracker::record(const GameEvent& event, const GameState& before)
{
    std::optional<Statement> s;
    try {
        s = to_statement(event, before);
    } catch (const std::exception& e) {
        std::lock_guard lock(mutex_);
        delivery_.last_error = e.what();
        return !dead_;
    }
    return s ? record(*s) : !failed();
}

bool Tracker::record(const Statement& statement)
{
    std::lock_guard lock(mutex_);
    if (dead_)
        return false;
    if (!log_path_.empty()) {
        try {
            if (log_path_.has_parent_path())
                std::filesystem::create_directories(log_path_.parent_path());
            std::ofstream out(log_path_, std::ios::app | std::ios::binary);
            out << canonical_statement(statement) << '\n';
            out.flush();
            if (!out)
                throw std::runtime_error("write failed");
        } catch (const std::exception& e) {
            dead_ = true;
            delivery_.last_error = "LocalLogWriteFailure: " + log_path_.string() + ": " + e.what();
            return false;
        }
    }
    ++recorded_;
    if (remote_) {
        pending_.push_back(statement);
        delivery_.pending = pending_.size();
    }
    return true;
}

void Tracker::requeue(const Statement& statement)
{
    std::lock_guard lock(mutex_);
    if (dead_ || !remote_)
        return;
    pending_.push_back(statement);
    delivery_.pending = pending_.size();
}

DeliveryState Tracker::flush()
{
    std::lock_guard flushing(flush_mutex_);
    for (;;) {
        std::vector<Statement> batch;
        {
            std::lock_guard lock(mutex_);
            if (!remote_ || pending_.empty() || (consecutive_failures_ > 0 && clock_() < retry_at_))
                return delivery_;
            const std::size_t n = std::min(kMaxBatch, pending_.size());
            batch.assign(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
        }
        std::string error;
        try {
            remote_->deliver(batch);
        } catch (const std::exception& e) {
            error = e.what();
        }
        std::lock_guard lock(mutex_);
        if (!error.empty()) {
            ++delivery_.failed;
            ++consecutive_failures_;
            delivery_.last_error = error;
            retry_at_ = clock_() + backoff_.delay(consecutive_failures_);
            return delivery_;
        }
        pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(batch.size()));
        delivery_.delivered += batch.size();
        last_delivered_seq_ = std::max(last_delivered_seq_, batch.back().seq());
        delivery_.pending = pending_.size();
        consecutive_failures_ = 0;
    }
}

DeliveryState Tracker::state() const
{
    std::lock_guard lock(mutex_);
    return delivery_;
}

std::optional<std::chrono::steady_clock::time_point> Tracker::next_attempt() const
{
    std::lock_guard lock(mutex_);
    if (!remote_ || pending_.empty())
        return std::nullopt;
    return consecutive_failures_ > 0 ? retry_at_ : clock_();
}

bool Tracker::failed() const
{
    std::lock_guard lock(mutex_);
    return dead_;
}

std::uint64_t Tracker::recorded() const
{
    std::lock_guard lock(mutex_);
    return recorded_;
}

std::uint64_t Tracker::last_delivered_seq() const
{
    std::lock_guard lock(mutex_);
    return last_delivered_seq_;
}

std::vector<Statement> read_statement_log(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("MalformedStatement", "cannot read " + path.string());
    std::vector<Statement> out;
    std::string line;
    while (std::getline(in, line)) {
        try {
            out.push_back(statement_from_json(ordered_json::parse(line)));
        } catch (const json::exception& e) {
            malformed(e.what());
        }
    }
    return out;
}

}  // namespace arena::analytics
