#include "arena/game/game.hpp"

namespace arena::game {

ReplayResult replay_log(std::string_view ndjson, bool tolerate_partial_tail)
{
    ReplayResult r;
    std::size_t start = 0;
    while (start < ndjson.size()) {
        std::size_t end = ndjson.find('\n', start);
        const bool terminated = end != std::string_view::npos;
        if (!terminated)
            end = ndjson.size();
        const std::string_view line = ndjson.substr(start, end - start);
        start = end + 1;
        const std::uint64_t seq = r.state.last_seq + 1;
        GameEvent event;
        try {
            event = event_from_json(nlohmann::json::parse(line));
        } catch (const std::exception& e) {
            if (!terminated && tolerate_partial_tail) {
                r.dropped_partial_tail = true;
                break;
            }
            throw CorruptLog(seq, e.what());
        }
        try {
            apply_event(r.state, event);
        } catch (const EventRejected& e) {
            throw CorruptLog(seq, e.code() + ": " + e.what());
        }
        r.events.push_back(std::move(event));
    }
    return r;
}

GameState replay(const std::vector<GameEvent>& events)
{
    GameState state;
    for (const auto& e : events) {
        try {
            apply_event(state, e);
        } catch (const EventRejected& err) {
            throw CorruptLog(state.last_seq + 1, err.code() + ": " + err.what());
        }
    }
    return state;
}

}  // namespace arena::game
