#include "oais/http_fetch.hpp"

#include <charconv>
#include <chrono>
#include <thread>

#include "httplib.h"

namespace oais::client {

std::string_view to_string(ClientErrc c) {
    switch (c) {
        case ClientErrc::Transport: return "Transport";
        case ClientErrc::Protocol: return "ProtocolError";
        case ClientErrc::DipParse: return "DipParseError";
        case ClientErrc::EmptyChoice: return "EmptyChoice";
        case ClientErrc::Dissemination: return "DisseminationError";
    }
    return "ClientError";
}

UrlParts split_url(const std::string& url) {
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        throw ClientError(ClientErrc::Transport, "only http:// URLs are supported: '" + url + "'");
    const auto rest = std::string_view(url).substr(scheme.size());
    const auto slash = rest.find('/');
    const auto authority = slash == std::string_view::npos ? rest : rest.substr(0, slash);
    UrlParts parts;
    parts.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    const auto colon = authority.rfind(':');
    if (colon == std::string_view::npos) {
        parts.host = std::string(authority);
    } else {
        parts.host = std::string(authority.substr(0, colon));
        const auto port_sv = authority.substr(colon + 1);
        int port = 0;
        const auto [p, ec] = std::from_chars(port_sv.data(), port_sv.data() + port_sv.size(), port);
        if (ec != std::errc() || p != port_sv.data() + port_sv.size() || port <= 0 || port > 65535)
            throw ClientError(ClientErrc::Transport, "bad port in URL '" + url + "'");
        parts.port = port;
    }
    if (parts.host.empty())
        throw ClientError(ClientErrc::Transport, "no host in URL '" + url + "'");
    return parts;
}

HttpResponse http_get(const std::string& url, const std::string& query, const FetchOptions& opts) {
    const UrlParts parts = split_url(url);
    const std::string target = query.empty() ? parts.path : parts.path + "?" + query;

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, opts.attempts); ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(
                static_cast<long long>(opts.backoff_base_ms) * (1LL << (attempt - 1)));
            std::this_thread::sleep_for(delay);
        }
        httplib::Client cli(parts.host, parts.port);
        cli.set_connection_timeout(opts.timeout_seconds, 0);
        cli.set_read_timeout(opts.timeout_seconds, 0);
        auto res = cli.Get(target);
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        HttpResponse out;
        out.status = res->status;
        out.content_type = res->get_header_value("Content-Type");
        out.body = std::move(res->body);
        return out;
    }
    throw ClientError(ClientErrc::Transport, "GET " + url + " failed: " + last_error);
}

}  // namespace oais::client
