#include "arena/server/service.hpp"

#include "httplib.h"

#include <cctype>

namespace arena::server {

namespace {

Request convert(const httplib::Request& in)
{
    Request out;
    out.method = in.method;
    out.path = in.path;
    for (const auto& [k, v] : in.params)
        out.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) {
        std::string name = k;
        for (char& c : name)
            c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.headers.emplace(std::move(name), v);
    }
    out.body = in.body;
    return out;
}

}  // namespace

bool serve(ArenaService& service, const std::string& host, int port, const std::atomic<bool>* stop,
           std::function<void(int)> on_listening)
{
    httplib::Server server;
    server.set_payload_max_length(kMaxBodyBytes);
    const auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        const Response out = service.handle(convert(req));
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Put(".*", forward);
    server.Delete(".*", forward);
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty())
            return;
        const std::string code = res.status == 413 ? "BodyTooLarge" : "HttpError";
        res.set_content("{\"error\":{\"code\":\"" + code + "\",\"message\":\"status " + std::to_string(res.status) +
                            "\"}}",
                        "application/json");
    });

    const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0)
        return false;
    if (on_listening)
        on_listening(bound);
    if (!stop)
        return server.listen_after_bind();
    std::thread loop([&server] { server.listen_after_bind(); });
    while (!stop->load())
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    server.stop();
    loop.join();
    return true;
}

}  // namespace arena::server
