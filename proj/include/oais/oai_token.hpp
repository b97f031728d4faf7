// Stateless resumption tokens: base64url payload plus an HMAC-SHA256 tag so a
// restarted service honors outstanding tokens without session state. The
// payload pins the query fingerprint (verb, format, window, set), the cursor
// offset, the complete list size and the issue instant.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace oais::oaipmh {

struct TokenPayload {
    std::string verb;
    std::string format_uri;
    std::optional<std::int64_t> from;
    std::optional<std::int64_t> until;
    std::string set;  // empty = no set restriction
    std::size_t cursor = 0;
    std::size_t total = 0;
    std::int64_t issued = 0;

    bool same_query(const TokenPayload& other) const {
        return verb == other.verb && format_uri == other.format_uri && from == other.from &&
               until == other.until && set == other.set;
    }
};

std::string encode_token(const TokenPayload& payload, std::string_view secret);

// nullopt on malformed input or signature mismatch. Expiry is the caller's
// check (the payload carries the issue instant).
std::optional<TokenPayload> decode_token(std::string_view token, std::string_view secret);

}  // namespace oais::oaipmh
