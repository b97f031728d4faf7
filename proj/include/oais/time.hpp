// UTC timestamps at seconds precision, the only granularity the archive and
// both protocol interfaces use. Values are seconds since the Unix epoch.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace oais::time {

// "YYYY-MM-DDThh:mm:ssZ"
std::string format_utc(std::int64_t seconds);

// Strict seconds form only.
std::optional<std::int64_t> parse_utc(std::string_view s);

// OAI-PMH datestamp: seconds form, or day form "YYYY-MM-DD" which expands to
// 00:00:00Z (end_of_day=false) or 23:59:59Z (end_of_day=true).
std::optional<std::int64_t> parse_datestamp(std::string_view s, bool end_of_day);

bool is_day_granularity(std::string_view s);

std::int64_t now_epoch_seconds();

}  // namespace oais::time
