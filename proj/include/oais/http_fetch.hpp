// Thin HTTP GET wrapper for the protocol clients: URL splitting, configurable
// timeouts, and retry with exponential backoff on transport failures.
// Protocol-level failures (any HTTP response) are never retried here.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace oais::client {

enum class ClientErrc { Transport, Protocol, DipParse, EmptyChoice, Dissemination };

std::string_view to_string(ClientErrc c);

class ClientError : public std::runtime_error {
public:
    ClientError(ClientErrc code, const std::string& message, std::string protocol_code = "")
        : std::runtime_error(std::string(to_string(code)) + ": " + message),
          code_(code),
          protocol_code_(std::move(protocol_code)) {}
    ClientErrc code() const { return code_; }
    // OAI-PMH error code or HTTP status text accompanying a Protocol error.
    const std::string& protocol_code() const { return protocol_code_; }

private:
    ClientErrc code_;
    std::string protocol_code_;
};

struct FetchOptions {
    int attempts = 3;
    int backoff_base_ms = 1000;  // doubled per retry
    int timeout_seconds = 30;
};

struct HttpResponse {
    int status = 0;
    std::string content_type;
    std::string body;
};

struct UrlParts {
    std::string host;
    int port = 80;
    std::string path;  // always starts with '/'
};

// http:// URLs only. Throws ClientError(Transport) on anything else.
UrlParts split_url(const std::string& url);

// GET base_url + ("?" + query). Throws ClientError(Transport) after all
// attempts fail; returns whatever status the server sent otherwise.
HttpResponse http_get(const std::string& url, const std::string& query, const FetchOptions& opts);

}  // namespace oais::client
