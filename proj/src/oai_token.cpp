#include "oais/oai_token.hpp"

#include <charconv>

#include "oais/base64.hpp"
#include "oais/hash.hpp"
#include "oais/text.hpp"

namespace oais::oaipmh {

namespace {

void put(std::string& out, std::string_view key, std::string_view value) {
    if (!out.empty()) out += '&';
    out += key;
    out += '=';
    out += text::percent_encode(value);
}

std::optional<std::int64_t> to_i64(std::string_view s) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::string encode_token(const TokenPayload& payload, std::string_view secret) {
    std::string p;
    put(p, "v", payload.verb);
    put(p, "f", payload.format_uri);
    if (payload.from) put(p, "a", std::to_string(*payload.from));
    if (payload.until) put(p, "b", std::to_string(*payload.until));
    if (!payload.set.empty()) put(p, "s", payload.set);
    put(p, "c", std::to_string(payload.cursor));
    put(p, "n", std::to_string(payload.total));
    put(p, "i", std::to_string(payload.issued));
    return base64::encode_url(p) + "." + hash::hmac_sha256_hex(secret, p);
}

std::optional<TokenPayload> decode_token(std::string_view token, std::string_view secret) {
    const auto dot = token.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    const auto payload_b64 = token.substr(0, dot);
    const auto tag = token.substr(dot + 1);
    const auto payload = base64::decode_url(payload_b64);
    if (!payload) return std::nullopt;
    if (hash::hmac_sha256_hex(secret, *payload) != tag) return std::nullopt;

    TokenPayload out;
    bool have_cursor = false, have_issued = false, have_total = false;
    for (const auto& part : text::split(*payload, '&')) {
        const auto eq = part.find('=');
        if (eq == std::string::npos) return std::nullopt;
        const auto key = part.substr(0, eq);
        const auto value = text::percent_decode(std::string_view(part).substr(eq + 1));
        if (!value) return std::nullopt;
        if (key == "v") {
            out.verb = *value;
        } else if (key == "f") {
            out.format_uri = *value;
        } else if (key == "a") {
            const auto v = to_i64(*value);
            if (!v) return std::nullopt;
            out.from = *v;
        } else if (key == "b") {
            const auto v = to_i64(*value);
            if (!v) return std::nullopt;
            out.until = *v;
        } else if (key == "s") {
            out.set = *value;
        } else if (key == "c") {
            const auto v = to_i64(*value);
            if (!v || *v < 0) return std::nullopt;
            out.cursor = static_cast<std::size_t>(*v);
            have_cursor = true;
        } else if (key == "n") {
            const auto v = to_i64(*value);
            if (!v || *v < 0) return std::nullopt;
            out.total = static_cast<std::size_t>(*v);
            have_total = true;
        } else if (key == "i") {
            const auto v = to_i64(*value);
            if (!v) return std::nullopt;
            out.issued = *v;
            have_issued = true;
        } else {
            return std::nullopt;
        }
    }
    if (out.verb.empty() || out.format_uri.empty() || !have_cursor || !have_issued || !have_total)
        return std::nullopt;
    return out;
}

}  // namespace oais::oaipmh
