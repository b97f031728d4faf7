// Base64 codecs. The DIP wire format requires a single unwrapped run, so the
// encoder never inserts line breaks. The URL-safe variant (used by resumption
// tokens) drops padding.
#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace oais::base64 {

std::string encode(std::string_view bytes);

// Strict alphabet check; ASCII whitespace is skipped so re-flowed documents
// still decode. Returns nullopt on any other non-alphabet byte or bad padding.
std::optional<std::string> decode(std::string_view text);

std::string encode_url(std::string_view bytes);
std::optional<std::string> decode_url(std::string_view text);

}  // namespace oais::base64
