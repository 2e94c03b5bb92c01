#pragma once

#include "arena/analytics/tracker.hpp"
#include "arena/game/game.hpp"

#include <atomic>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

namespace arena::server {

inline constexpr std::size_t kMaxBodyBytes = 128 * 1024;

struct Request
{
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;  // lower-case names
    std::string body;
};

struct Response
{
    int status = 200;
    std::string body;  // canonical JSON

    friend bool operator==(const Response&, const Response&) = default;
};

/// HTTP status for a module error code. Unknown codes are validation
/// failures (422).
int status_for(std::string_view code);

struct ServiceOptions
{
    std::filesystem::path data_dir = "data";
    std::optional<std::string> analytics_url;
    bool analytics_enabled = true;
    /// Timestamp stamped on the events of one request; UTC ISO-8601.
    std::function<std::string()> clock;
    /// New game ids; random when empty.
    std::function<std::string()> game_ids;
    /// Flush interval of the analytics deliverer; zero disables the thread.
    std::chrono::milliseconds delivery_interval{200};
};

/// Transport-independent request handler. Games persist as append-only
/// event logs under data_dir/games and are recovered by replay on
/// construction. Requests for different games run in parallel; writes to one
/// game are serialized.
class ArenaService
{
public:
    explicit ArenaService(ServiceOptions options);
    ~ArenaService();

    ArenaService(const ArenaService&) = delete;
    ArenaService& operator=(const ArenaService&) = delete;

    Response handle(const Request& request);

    /// Flushes every game's analytics queue once.
    void flush_analytics();
    std::optional<analytics::DeliveryState> analytics_state(const std::string& game_id) const;
    /// Recovery warnings (dropped partial lines), one per affected game.
    std::vector<std::string> warnings() const;

    struct Game;

private:
    std::shared_ptr<Game> find(const std::string& id) const;
    void recover();
    std::shared_ptr<Game> open_game(const std::string& id, bool create);
    std::string now() const;

    Response create(const Request& r);
    Response join(Game& g, const Request& r);
    Response public_state(const Game& g);
    Response scoreboard(const Game& g);
    Response events(const Game& g, const Request& r);
    Response submit(Game& g, const Request& r, const std::string& kind, const std::string& mutant_id);
    Response finish(Game& g, const Request& r);

    ServiceOptions options_;
    mutable std::shared_mutex games_mutex_;
    std::map<std::string, std::shared_ptr<Game>> games_;
    std::vector<std::string> warnings_;

    std::mutex stop_mutex_;
    std::condition_variable stop_cv_;
    bool stopping_ = false;
    std::thread deliverer_;
};

/// Serves `service` over HTTP until `stop` is set or the process ends.
/// Returns false if the port could not be bound.
bool serve(ArenaService& service, const std::string& host, int port, const std::atomic<bool>* stop = nullptr,
           std::function<void(int)> on_listening = {});

std::string utc_now_iso8601();

}  // namespace arena::server
