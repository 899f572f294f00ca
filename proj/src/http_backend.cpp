#include "vizlink/agents.hpp"

#include <httplib.h>

namespace vizlink {

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

std::string HttpBackend::complete(const AgentRequest& request) {
    request.validate();
    if (config_.url.empty()) throw Error(ErrorCode::AgentUnavailable, "AGENT_API_URL is not set");

    auto scheme_end = config_.url.find("://");
    auto path_start = config_.url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    std::string origin = config_.url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : config_.url.substr(path_start);

    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(config_.timeout.count());
    client.set_connection_timeout(secs, 0);
    client.set_read_timeout(secs, 0);
    client.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (!config_.apiKey.empty()) headers.emplace("Authorization", "Bearer " + config_.apiKey);

    auto res = client.Post(path, headers, build_body(request).dump(), "application/json");
    if (!res) {
        auto err = res.error();
        if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout)
            throw TransportError(ErrorCode::Timeout, "agent request timed out after " +
                                                         std::to_string(config_.timeout.count()) + " s");
        throw TransportError(ErrorCode::AgentUnavailable, "agent transport failure: " + httplib::to_string(err));
    }
    if (res->status == 429) {
        std::optional<int> retry_after;
        if (res->has_header("Retry-After")) {
            if (auto v = parse_number(res->get_header_value("Retry-After"))) retry_after = static_cast<int>(*v);
        }
        throw RateLimitedError("agent rate limited", retry_after);
    }
    if (res->status == 401 || res->status == 403)
        throw Error(ErrorCode::AgentUnavailable, "agent rejected credentials (HTTP " + std::to_string(res->status) + ")");
    if (res->status >= 500)
        throw TransportError(ErrorCode::AgentUnavailable, "agent server error (HTTP " + std::to_string(res->status) + ")");
    if (res->status != 200)
        throw Error(ErrorCode::AgentUnavailable, "agent request failed (HTTP " + std::to_string(res->status) + ")");
    return parse_body(res->body);
}

} // namespace vizlink
