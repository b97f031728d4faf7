// Lexical checks for the identifier classes the protocols exchange, plus the
// percent-encoding codec shared by the KEV transport and the HTTP layers.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace oais::text {

// scheme ":" non-empty remainder; scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ).
// Also rejects embedded whitespace and control bytes (identifiers travel in
// TSV index rows and XML attributes).
bool is_absolute_uri(std::string_view s);

// ASCII subset of XML NCName: [A-Za-z_][A-Za-z0-9._-]*
bool is_ncname(std::string_view s);

// type "/" subtype with optional ";key=value" parameters.
bool is_media_type(std::string_view s);

// OAI-PMH setSpec: colon-separated segments of [A-Za-z0-9_.!~*'()-].
bool is_set_spec(std::string_view s);

// OAI-PMH metadataPrefix charset: [A-Za-z0-9._!~*'()-]+
bool is_metadata_prefix(std::string_view s);

// RFC 3986 percent-encoding; everything outside the unreserved set is encoded.
std::string percent_encode(std::string_view s);

// Decodes %XX; '+' decodes to space (form/KEV convention). Returns nullopt on
// truncated or non-hex escapes.
std::optional<std::string> percent_decode(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);

}  // namespace oais::text
