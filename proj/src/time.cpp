#include "forkent/time.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace forkent {

namespace {

[[noreturn]] void bad_timestamp(std::string_view text) {
    throw std::invalid_argument("invalid RFC 3339 timestamp: \"" + std::string(text) + "\"");
}

bool all_digits(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (char c : s) {
        if (c < '0' || c > '9') {
            return false;
        }
    }
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s) {
        v = v * 10 + (c - '0');
    }
    return v;
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+00:00)
    if (text.size() < 20) {
        bad_timestamp(text);
    }
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != 't') ||
        text[13] != ':' || text[16] != ':') {
        bad_timestamp(text);
    }
    std::string_view ys = text.substr(0, 4), mos = text.substr(5, 2), ds = text.substr(8, 2);
    std::string_view hs = text.substr(11, 2), mis = text.substr(14, 2), ss = text.substr(17, 2);
    if (!all_digits(ys) || !all_digits(mos) || !all_digits(ds) || !all_digits(hs) ||
        !all_digits(mis) || !all_digits(ss)) {
        bad_timestamp(text);
    }

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t frac_begin = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            ++pos;
        }
        if (pos == frac_begin) {
            bad_timestamp(text);
        }
    }
    std::string_view offset = text.substr(pos);
    if (offset != "Z" && offset != "z" && offset != "+00:00" && offset != "-00:00") {
        bad_timestamp(text);
    }

    int year = to_int(ys), month = to_int(mos), day = to_int(ds);
    int hour = to_int(hs), minute = to_int(mis), second = to_int(ss);
    if (hour > 23 || minute > 59 || second > 60) {
        bad_timestamp(text);
    }
    if (second == 60) {
        second = 59;  // fold leap seconds
    }

    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{unsigned(month)},
                       std::chrono::day{unsigned(day)}};
    if (!ymd.ok()) {
        bad_timestamp(text);
    }
    sys_days days{ymd};
    return Timestamp(days.time_since_epoch().count()) * kSecondsPerDay + hour * 3600 +
           minute * 60 + second;
}

std::string format_rfc3339(Timestamp ts) {
    using namespace std::chrono;
    Timestamp day = ts >= 0 ? ts / kSecondsPerDay : (ts - kSecondsPerDay + 1) / kSecondsPerDay;
    Timestamp rem = ts - day * kSecondsPerDay;
    year_month_day ymd{sys_days{days{day}}};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                  unsigned(ymd.month()), unsigned(ymd.day()), int(rem / 3600),
                  int(rem / 60 % 60), int(rem % 60));
    return buf;
}

MonthRef month_of(Timestamp ts) {
    using namespace std::chrono;
    Timestamp day = ts >= 0 ? ts / kSecondsPerDay : (ts - kSecondsPerDay + 1) / kSecondsPerDay;
    year_month_day ymd{sys_days{days{day}}};
    return {int(ymd.year()), int(unsigned(ymd.month()))};
}

Timestamp month_start(MonthRef m) {
    using namespace std::chrono;
    sys_days days{year_month_day{std::chrono::year{m.year}, std::chrono::month{unsigned(m.month)},
                                 std::chrono::day{1}}};
    return Timestamp(days.time_since_epoch().count()) * kSecondsPerDay;
}

MonthRef next_month(MonthRef m) {
    return m.month == 12 ? MonthRef{m.year + 1, 1} : MonthRef{m.year, m.month + 1};
}

std::string month_label(MonthRef m) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d-%02d", m.year, m.month);
    return buf;
}

}  // namespace forkent
