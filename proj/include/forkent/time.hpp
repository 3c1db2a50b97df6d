#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace forkent {

// Seconds since the Unix epoch, always UTC.
using Timestamp = std::int64_t;

inline constexpr Timestamp kSecondsPerDay = 86400;

// Parses an RFC 3339 UTC timestamp ("2021-04-03T12:34:56Z", optional
// fractional seconds, "Z" or "+00:00" offset). Fractional seconds are
// truncated. Throws std::invalid_argument on anything else.
Timestamp parse_rfc3339(std::string_view text);

// Formats as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_rfc3339(Timestamp ts);

struct MonthRef {
    int year = 0;
    int month = 0;  // 1..12

    friend bool operator==(const MonthRef&, const MonthRef&) = default;
    friend auto operator<=>(const MonthRef&, const MonthRef&) = default;
};

// Calendar month (UTC) containing the instant.
MonthRef month_of(Timestamp ts);

// First instant of the month, i.e. YYYY-MM-01T00:00:00Z.
Timestamp month_start(MonthRef m);

MonthRef next_month(MonthRef m);

// "YYYY-MM"
std::string month_label(MonthRef m);

}  // namespace forkent
