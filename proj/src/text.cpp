#include "oais/text.hpp"

#include <cctype>

namespace oais::text {

namespace {

bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

bool in_set(char c, std::string_view set) { return set.find(c) != std::string_view::npos; }

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// restricted token for media type fields
bool is_mime_token(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (!is_alnum(c) && !in_set(c, "!#$&-^_.+")) return false;
    return true;
}

}  // namespace

bool is_absolute_uri(std::string_view s) {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= s.size()) return false;
    if (!is_alpha(s[0])) return false;
    for (std::size_t i = 1; i < colon; ++i)
        if (!is_alnum(s[i]) && !in_set(s[i], "+-.")) return false;
    for (const char c : s)
        if (static_cast<unsigned char>(c) <= 0x20 || c == 0x7F) return false;
    return true;
}

bool is_ncname(std::string_view s) {
    if (s.empty()) return false;
    if (!is_alpha(s[0]) && s[0] != '_') return false;
    for (const char c : s.substr(1))
        if (!is_alnum(c) && !in_set(c, "._-")) return false;
    return true;
}

bool is_media_type(std::string_view s) {
    const auto slash = s.find('/');
    if (slash == std::string_view::npos) return false;
    if (!is_mime_token(s.substr(0, slash))) return false;
    auto rest = s.substr(slash + 1);
    const auto semi = rest.find(';');
    const auto subtype = semi == std::string_view::npos ? rest : rest.substr(0, semi);
    if (!is_mime_token(subtype)) return false;
    if (semi == std::string_view::npos) return true;
    // parameters: key=value, loosely checked
    rest = rest.substr(semi + 1);
    while (!rest.empty()) {
        const auto next = rest.find(';');
        auto param = next == std::string_view::npos ? rest : rest.substr(0, next);
        while (!param.empty() && param.front() == ' ') param.remove_prefix(1);
        const auto eq = param.find('=');
        if (eq == std::string_view::npos || eq == 0 || eq + 1 > param.size()) return false;
        if (next == std::string_view::npos) break;
        rest = rest.substr(next + 1);
    }
    return true;
}

bool is_set_spec(std::string_view s) {
    if (s.empty()) return false;
    bool segment_start = true;
    for (const char c : s) {
        if (c == ':') {
            if (segment_start) return false;
            segment_start = true;
            continue;
        }
        if (!is_alnum(c) && !in_set(c, "_.!~*'()-")) return false;
        segment_start = false;
    }
    return !segment_start;
}

bool is_metadata_prefix(std::string_view s) {
    if (s.empty()) return false;
    for (const char c : s)
        if (!is_alnum(c) && !in_set(c, "._!~*'()-")) return false;
    return true;
}

std::string percent_encode(std::string_view s) {
    static const char* hex = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        if (is_alnum(c) || in_set(c, "-._~")) {
            out += c;
        } else {
            const auto b = static_cast<unsigned char>(c);
            out += '%';
            out += hex[b >> 4];
            out += hex[b & 0xF];
        }
    }
    return out;
}

std::optional<std::string> percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '%') {
            if (i + 2 >= s.size()) return std::nullopt;
            const int hi = hex_value(s[i + 1]);
            const int lo = hex_value(s[i + 2]);
            if (hi < 0 || lo < 0) return std::nullopt;
            out += static_cast<char>((hi << 4) | lo);
            i += 2;
        } else if (c == '+') {
            out += ' ';
        } else {
            out += c;
        }
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            break;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace oais::text
