#include "arena/game/game.hpp"

#include <openssl/sha.h>

#include <cstdio>
#include <type_traits>

namespace arena::game {

using nlohmann::json;
using nlohmann::ordered_json;

std::string sha256_hex(std::string_view data)
{
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), digest);
    std::string hex;
    hex.reserve(2 * SHA256_DIGEST_LENGTH);
    for (unsigned char b : digest) {
        char buf[3];
        std::snprintf(buf, sizeof buf, "%02x", b);
        hex += buf;
    }
    return hex;
}

std::string_view to_string(Role role) noexcept
{
    return role == Role::Attacker ? "attacker" : "defender";
}

std::optional<Role> parse_role(std::string_view text) noexcept
{
    if (text == "attacker")
        return Role::Attacker;
    if (text == "defender")
        return Role::Defender;
    return std::nullopt;
}

// ---- config ----

namespace {

struct ConfigField
{
    const char* name;
    std::uint64_t GameConfig::*member;
};

constexpr ConfigField kBounds[] = {
    {"max_players_per_role", &GameConfig::max_players_per_role},
    {"max_edited_nodes", &GameConfig::max_edited_nodes},
    {"max_assertions", &GameConfig::max_assertions},
    {"step_budget", &GameConfig::step_budget},
    {"claim_window", &GameConfig::claim_window},
    {"max_events", &GameConfig::max_events},
};

}  // namespace

minilang::TypedUnit check_config(const GameConfig& config)
{
    for (const auto& f : kBounds)
        if (config.*f.member == 0)
            throw Error("InvalidConfig", std::string(f.name) + " must be positive");
    if (config.max_assertions > runner::kMaxAssertions)
        throw Error("InvalidConfig",
                    "max_assertions may not exceed " + std::to_string(runner::kMaxAssertions));
    return minilang::load_unit(config.unit_source, config.unit_name);
}

ordered_json config_to_json(const GameConfig& config)
{
    ordered_json j;
    j["unit_name"] = config.unit_name;
    j["unit_source"] = config.unit_source;
    for (const auto& f : kBounds)
        j[f.name] = config.*f.member;
    return j;
}

GameConfig config_from_json(const json& j)
{
    if (!j.is_object())
        throw Error("InvalidConfig", "config must be a JSON object");
    GameConfig config;
    for (const auto& [key, value] : j.items()) {
        if (key == "unit_name" || key == "unit_source") {
            if (!value.is_string())
                throw Error("InvalidConfig", key + " must be a string");
            (key == "unit_name" ? config.unit_name : config.unit_source) = value.get<std::string>();
            continue;
        }
        const ConfigField* field = nullptr;
        for (const auto& f : kBounds)
            if (key == f.name)
                field = &f;
        if (!field)
            throw Error("InvalidConfig", "unknown config field '" + key + "'");
        if (!value.is_number_unsigned() || value.get<std::uint64_t>() == 0)
            throw Error("InvalidConfig", key + " must be a positive integer");
        config.*field->member = value.get<std::uint64_t>();
    }
    return config;
}

// ---- events ----

namespace {

template <typename T>
constexpr std::string_view type_name()
{
    if constexpr (std::is_same_v<T, GameCreated>)
        return "GameCreated";
    else if constexpr (std::is_same_v<T, PlayerJoined>)
        return "PlayerJoined";
    else if constexpr (std::is_same_v<T, MutantAccepted>)
        return "MutantAccepted";
    else if constexpr (std::is_same_v<T, MutantRejected>)
        return "MutantRejected";
    else if constexpr (std::is_same_v<T, TestAccepted>)
        return "TestAccepted";
    else if constexpr (std::is_same_v<T, TestRejected>)
        return "TestRejected";
    else if constexpr (std::is_same_v<T, MutantKilled>)
        return "MutantKilled";
    else if constexpr (std::is_same_v<T, MutantSurvivedTest>)
        return "MutantSurvivedTest";
    else if constexpr (std::is_same_v<T, EquivalenceClaimed>)
        return "EquivalenceClaimed";
    else if constexpr (std::is_same_v<T, ClaimCountered>)
        return "ClaimCountered";
    else if constexpr (std::is_same_v<T, ClaimUpheld>)
        return "ClaimUpheld";
    else
        return "GameFinished";
}

[[noreturn]] void malformed(const std::string& message)
{
    throw Error("MalformedEvent", message);
}

const json& field(const json& j, const char* name)
{
    auto it = j.find(name);
    if (it == j.end())
        malformed(std::string("missing field '") + name + "'");
    return *it;
}

std::string str(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_string())
        malformed(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t uint(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_number_unsigned())
        malformed(std::string("field '") + name + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

bool boolean(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_boolean())
        malformed(std::string("field '") + name + "' must be a boolean");
    return v.get<bool>();
}

std::vector<int> lines(const json& j, const char* name)
{
    const json& v = field(j, name);
    if (!v.is_array())
        malformed(std::string("field '") + name + "' must be an array");
    std::vector<int> out;
    for (const auto& x : v) {
        if (!x.is_number_unsigned() || x.get<std::uint64_t>() > 1'000'000)
            malformed(std::string("field '") + name + "' must hold line numbers");
        out.push_back(static_cast<int>(x.get<std::uint64_t>()));
    }
    return out;
}

std::vector<runner::Assertion> assertions(const json& j, const char* name)
{
    try {
        return runner::assertions_from_json(field(j, name));
    } catch (const Error& e) {
        malformed(std::string("field '") + name + "': " + e.what());
    }
}

void put_payload(ordered_json& j, const GameCreated& p)
{
    j["game_id"] = p.game_id;
    j["config"] = config_to_json(p.config);
}

void put_payload(ordered_json& j, const PlayerJoined& p)
{
    j["player_id"] = p.player_id;
    j["name"] = p.name;
    j["role"] = to_string(p.role);
    j["team"] = p.team;
}

void put_payload(ordered_json& j, const MutantAccepted& p)
{
    j["mutant_id"] = p.mutant_id;
    j["source"] = p.source;
    j["source_hash"] = p.source_hash;
    j["edited_lines"] = p.edited_lines;
    j["edited_nodes"] = p.edited_nodes;
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const MutantRejected& p)
{
    j["source"] = p.source;
    j["code"] = p.code;
    j["message"] = p.message;
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const TestAccepted& p)
{
    j["test_id"] = p.test_id;
    j["assertions"] = runner::assertions_to_json(p.assertions);
    j["covered_lines"] = p.covered_lines;
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const TestRejected& p)
{
    j["assertions"] = runner::assertions_to_json(p.assertions);
    j["code"] = p.code;
    j["message"] = p.message;
    j["index"] = p.index ? ordered_json(*p.index) : ordered_json(nullptr);
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const MutantKilled& p)
{
    j["mutant_id"] = p.mutant_id;
    j["test_id"] = p.test_id;
    j["at_birth"] = p.at_birth;
}

void put_payload(ordered_json& j, const MutantSurvivedTest& p)
{
    j["mutant_id"] = p.mutant_id;
    j["test_id"] = p.test_id;
}

void put_payload(ordered_json& j, const EquivalenceClaimed& p)
{
    j["mutant_id"] = p.mutant_id;
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const ClaimCountered& p)
{
    j["mutant_id"] = p.mutant_id;
    j["assertions"] = runner::assertions_to_json(p.assertions);
    j["submission_id"] = p.submission_id;
}

void put_payload(ordered_json& j, const ClaimUpheld& p)
{
    j["mutant_id"] = p.mutant_id;
}

void put_payload(ordered_json& j, const GameFinished& p)
{
    j["reason"] = p.reason;
}

EventPayload read_payload(std::string_view type, const json& j)
{
    if (type == "GameCreated") {
        GameCreated p{str(j, "game_id"), {}};
        try {
            p.config = config_from_json(field(j, "config"));
        } catch (const Error& e) {
            malformed(std::string("config: ") + e.what());
        }
        return p;
    }
    if (type == "PlayerJoined") {
        const auto role = parse_role(str(j, "role"));
        if (!role)
            malformed("unknown role");
        return PlayerJoined{str(j, "player_id"), str(j, "name"), *role, str(j, "team")};
    }
    if (type == "MutantAccepted")
        return MutantAccepted{str(j, "mutant_id"),      str(j, "source"),
                              str(j, "source_hash"),    lines(j, "edited_lines"),
                              uint(j, "edited_nodes"),  str(j, "submission_id")};
    if (type == "MutantRejected")
        return MutantRejected{str(j, "source"), str(j, "code"), str(j, "message"), str(j, "submission_id")};
    if (type == "TestAccepted")
        return TestAccepted{str(j, "test_id"), assertions(j, "assertions"), lines(j, "covered_lines"),
                            str(j, "submission_id")};
    if (type == "TestRejected") {
        TestRejected p{assertions(j, "assertions"), str(j, "code"), str(j, "message"), std::nullopt,
                       str(j, "submission_id")};
        if (!field(j, "index").is_null())
            p.index = uint(j, "index");
        return p;
    }
    if (type == "MutantKilled")
        return MutantKilled{str(j, "mutant_id"), str(j, "test_id"), boolean(j, "at_birth")};
    if (type == "MutantSurvivedTest")
        return MutantSurvivedTest{str(j, "mutant_id"), str(j, "test_id")};
    if (type == "EquivalenceClaimed")
        return EquivalenceClaimed{str(j, "mutant_id"), str(j, "submission_id")};
    if (type == "ClaimCountered")
        return ClaimCountered{str(j, "mutant_id"), assertions(j, "assertions"), str(j, "submission_id")};
    if (type == "ClaimUpheld")
        return ClaimUpheld{str(j, "mutant_id")};
    if (type == "GameFinished")
        return GameFinished{str(j, "reason")};
    malformed("unknown event type '" + std::string(type) + "'");
}

}  // namespace

std::string_view event_type(const EventPayload& payload) noexcept
{
    return std::visit([](const auto& p) { return type_name<std::decay_t<decltype(p)>>(); }, payload);
}

std::string_view event_type(const GameEvent& event) noexcept
{
    return event_type(event.payload);
}

std::string_view submission_id(const GameEvent& event) noexcept
{
    return std::visit(
        [](const auto& p) -> std::string_view {
            if constexpr (requires { p.submission_id; })
                return p.submission_id;
            else
                return {};
        },
        event.payload);
}

ordered_json event_to_json(const GameEvent& event)
{
    ordered_json j;
    j["seq"] = event.seq;
    j["timestamp"] = event.timestamp;
    j["actor"] = event.actor;
    j["type"] = event_type(event);
    std::visit([&j](const auto& p) { put_payload(j, p); }, event.payload);
    return j;
}

GameEvent event_from_json(const json& j)
{
    if (!j.is_object())
        malformed("an event is a JSON object");
    GameEvent e;
    e.seq = uint(j, "seq");
    e.timestamp = str(j, "timestamp");
    e.actor = str(j, "actor");
    e.payload = read_payload(str(j, "type"), j);
    return e;
}

std::string canonical_event(const GameEvent& event)
{
    return event_to_json(event).dump();
}

}  // namespace arena::game
