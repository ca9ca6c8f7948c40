#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace urbantherm {

/// UTC instant with one-second resolution.
using Timestamp = std::chrono::sys_seconds;

/// "YYYYMMDD-HHMMSS" as used in catalog filenames.
std::optional<Timestamp> parse_compact_timestamp(std::string_view text);
std::string format_compact_timestamp(Timestamp t);

/// "YYYY-MM-DDTHH:MM:SSZ".
std::optional<Timestamp> parse_iso_timestamp(std::string_view text);
std::string format_iso_timestamp(Timestamp t);

/// Accepts either form.
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Fractional local hour in [0, 24) for a fixed UTC offset.
double local_hour(Timestamp t, std::chrono::minutes utc_offset);

/// "YYYY-MM" and "YYYY-MM-DD" of the local calendar date.
std::string local_month_key(Timestamp t, std::chrono::minutes utc_offset);
std::string local_day_key(Timestamp t, std::chrono::minutes utc_offset);

}  // namespace urbantherm
