#pragma once

#include "arena/game/game.hpp"

#include "json.hpp"

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace arena::analytics {

inline constexpr std::string_view kVerbs[] = {
    "started",       "joined",          "submitted_mutant",    "submitted_test",  "killed_mutant",
    "mutant_survived", "claimed_equivalence", "countered_claim", "claim_upheld", "finished",
};

struct StatementActor
{
    std::string id;
    std::string name;

    friend bool operator==(const StatementActor&, const StatementActor&) = default;
};

struct StatementObject
{
    std::string game_id;
    std::string kind;  // game, player, mutant, test
    std::string id;    // empty when the entity was never created (a rejection)

    friend bool operator==(const StatementObject&, const StatementObject&) = default;
};

struct StatementResult
{
    std::int64_t score_delta = 0;
    bool success = true;

    friend bool operator==(const StatementResult&, const StatementResult&) = default;
};

struct Statement
{
    StatementActor actor;
    std::string verb;
    StatementObject object;
    std::optional<StatementResult> result;
    std::string timestamp;
    nlohmann::ordered_json extensions = nlohmann::ordered_json::object();  // always carries "seq"

    std::uint64_t seq() const { return extensions.at("seq").get<std::uint64_t>(); }

    friend bool operator==(const Statement&, const Statement&) = default;
};

/// Statement for `event`, which has just been applied to `before`. Returns
/// nullopt for bookkeeping events that are not interactions.
std::optional<Statement> to_statement(const game::GameEvent& event, const game::GameState& before);

nlohmann::ordered_json statement_to_json(const Statement& s);
/// Throws Error("MalformedStatement").
Statement statement_from_json(const nlohmann::ordered_json& j);
std::string canonical_statement(const Statement& s);

// ---- sinks ----

/// Remote collector. `deliver` returns normally only once the whole batch is
/// acknowledged; it throws Error("SinkUnavailable") otherwise.
class RemoteSink
{
public:
    virtual ~RemoteSink() = default;
    virtual void deliver(const std::vector<Statement>& batch) = 0;
};

/// POST <url>/statements with a JSON array body; any 2xx acknowledges.
class HttpSink : public RemoteSink
{
public:
    explicit HttpSink(std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(2));
    void deliver(const std::vector<Statement>& batch) override;

private:
    std::string origin_;
    std::string path_;
    std::chrono::milliseconds timeout_;
};

struct BackoffPolicy
{
    std::chrono::milliseconds base{1000};
    unsigned factor = 2;
    std::chrono::milliseconds cap{60'000};

    /// Wait before retry number `failures` (1 after the first failure).
    std::chrono::milliseconds delay(std::uint64_t failures) const;
};

struct DeliveryState
{
    std::uint64_t pending = 0;
    std::uint64_t delivered = 0;
    std::uint64_t failed = 0;  // failed delivery attempts
    std::string last_error;

    friend bool operator==(const DeliveryState&, const DeliveryState&) = default;
};

inline constexpr std::size_t kMaxBatch = 100;

/// Per-game tracker. record() appends to the local log and queues the
/// statement for the remote sink; flush() delivers queued statements in
/// order, in batches of at most kMaxBatch, honouring the backoff after a
/// failure. record() and flush() may run concurrently on different threads.
class Tracker
{
public:
    using Clock = std::function<std::chrono::steady_clock::time_point()>;

    /// `log_path` empty disables the local log.
    Tracker(std::filesystem::path log_path, std::shared_ptr<RemoteSink> remote = nullptr,
            BackoffPolicy backoff = {}, Clock clock = std::chrono::steady_clock::now);

    /// Never throws. Returns false once the local log has failed; the tracker
    /// is then dead and ignores further input.
    bool record(const game::GameEvent& event, const game::GameState& before);
    bool record(const Statement& statement);
    /// Queues a statement for the remote sink only; used to resend what the
    /// local log holds but the collector never acknowledged.
    void requeue(const Statement& statement);

    /// Attempts delivery unless a backoff is pending. Idempotent.
    DeliveryState flush();
    DeliveryState state() const;
    /// Time of the next permitted attempt; nullopt when nothing waits.
    std::optional<std::chrono::steady_clock::time_point> next_attempt() const;

    bool failed() const;
    std::uint64_t recorded() const;
    /// Highest seq the remote sink has acknowledged, 0 if none.
    std::uint64_t last_delivered_seq() const;

private:
    std::filesystem::path log_path_;
    std::shared_ptr<RemoteSink> remote_;
    BackoffPolicy backoff_;
    Clock clock_;

    mutable std::mutex mutex_;
    std::deque<Statement> pending_;
    DeliveryState delivery_;
    std::uint64_t consecutive_failures_ = 0;
    std::chrono::steady_clock::time_point retry_at_{};
    std::uint64_t recorded_ = 0;
    std::uint64_t last_delivered_seq_ = 0;
    bool dead_ = false;
    std::mutex flush_mutex_;
};

/// Reads a local statement log. Throws Error("MalformedStatement").
std::vector<Statement> read_statement_log(const std::filesystem::path& path);

}  // namespace arena::analytics
