#include "oais/base64.hpp"

#include <array>
#include <cstdint>

namespace oais::base64 {

namespace {

constexpr char kStd[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
constexpr char kUrl[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::string encode_with(std::string_view in, const char* alphabet, bool pad) {
    std::string out;
    out.reserve((in.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= in.size()) {
        const std::uint32_t v = (static_cast<std::uint8_t>(in[i]) << 16) |
                                (static_cast<std::uint8_t>(in[i + 1]) << 8) |
                                static_cast<std::uint8_t>(in[i + 2]);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        out += alphabet[v & 63];
        i += 3;
    }
    const std::size_t rest = in.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<std::uint8_t>(in[i]) << 16;
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        if (pad) out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<std::uint8_t>(in[i]) << 16) |
                                (static_cast<std::uint8_t>(in[i + 1]) << 8);
        out += alphabet[(v >> 18) & 63];
        out += alphabet[(v >> 12) & 63];
        out += alphabet[(v >> 6) & 63];
        if (pad) out += '=';
    }
    return out;
}

std::array<std::int8_t, 256> make_table(const char* alphabet) {
    std::array<std::int8_t, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<std::uint8_t>(alphabet[i])] = static_cast<std::int8_t>(i);
    return t;
}

std::optional<std::string> decode_with(std::string_view in, const std::array<std::int8_t, 256>& table,
                                       bool require_padding) {
    std::string out;
    out.reserve(in.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    std::size_t pad = 0;
    for (const char c : in) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') continue;
        if (c == '=') {
            ++pad;
            continue;
        }
        if (pad > 0) return std::nullopt;  // data after padding
        const std::int8_t v = table[static_cast<std::uint8_t>(c)];
        if (v < 0) return std::nullopt;
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out += static_cast<char>((acc >> bits) & 0xFF);
        }
    }
    if (bits >= 6) return std::nullopt;  // dangling unit: length % 4 == 1
    if ((acc & ((1u << bits) - 1)) != 0) return std::nullopt;  // nonzero discarded bits
    if (require_padding && pad > 2) return std::nullopt;
    if (require_padding) {
        const std::size_t expect = bits == 0 ? 0 : (bits == 4 ? 2 : 1);
        if (pad != expect) return std::nullopt;
    } else if (pad != 0) {
        return std::nullopt;
    }
    return out;
}

const std::array<std::int8_t, 256> kStdTable = make_table(kStd);
const std::array<std::int8_t, 256> kUrlTable = make_table(kUrl);

}  // namespace

std::string encode(std::string_view bytes) { return encode_with(bytes, kStd, true); }

std::optional<std::string> decode(std::string_view text) { return decode_with(text, kStdTable, true); }

std::string encode_url(std::string_view bytes) { return encode_with(bytes, kUrl, false); }

std::optional<std::string> decode_url(std::string_view text) { return decode_with(text, kUrlTable, false); }

}  // namespace oais::base64
