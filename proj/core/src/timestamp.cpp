#include "urbantherm/timestamp.hpp"

#include <charconv>
#include <cmath>

#include <fmt/format.h>

namespace urbantherm {
namespace {

using namespace std::chrono;

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size())
        return false;
    const char* first = text.data() + pos;
    const char* last = first + len;
    for (const char* p = first; p != last; ++p)
        if (*p < '0' || *p > '9')
            return false;
    return std::from_chars(first, last, out).ec == std::errc{};
}

std::optional<Timestamp> make(int y, int mo, int d, int h, int mi, int s) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59)
        return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

struct Civil {
    int y, mo, d, h, mi, s;
};

Civil split(Timestamp t) {
    const auto dp = floor<days>(t);
    const year_month_day ymd{dp};
    const hh_mm_ss hms{t - dp};
    return {static_cast<int>(ymd.year()), static_cast<int>(static_cast<unsigned>(ymd.month())),
            static_cast<int>(static_cast<unsigned>(ymd.day())), static_cast<int>(hms.hours().count()),
            static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count())};
}

}  // namespace

std::optional<Timestamp> parse_compact_timestamp(std::string_view text) {
    if (text.size() != 15 || text[8] != '-')
        return std::nullopt;
    int y, mo, d, h, mi, s;
    if (!read_int(text, 0, 4, y) || !read_int(text, 4, 2, mo) || !read_int(text, 6, 2, d) ||
        !read_int(text, 9, 2, h) || !read_int(text, 11, 2, mi) || !read_int(text, 13, 2, s))
        return std::nullopt;
    return make(y, mo, d, h, mi, s);
}

std::string format_compact_timestamp(Timestamp t) {
    const auto c = split(t);
    return fmt::format("{:04}{:02}{:02}-{:02}{:02}{:02}", c.y, c.mo, c.d, c.h, c.mi, c.s);
}

std::optional<Timestamp> parse_iso_timestamp(std::string_view text) {
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || text[16] != ':' || text[19] != 'Z')
        return std::nullopt;
    int y, mo, d, h, mi, s;
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
        !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, s))
        return std::nullopt;
    return make(y, mo, d, h, mi, s);
}

std::string format_iso_timestamp(Timestamp t) {
    const auto c = split(t);
    return fmt::format("{:04}-{:02}-{:02}T{:02}:{:02}:{:02}Z", c.y, c.mo, c.d, c.h, c.mi, c.s);
}

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    if (auto t = parse_iso_timestamp(text))
        return t;
    return parse_compact_timestamp(text);
}

double local_hour(Timestamp t, std::chrono::minutes utc_offset) {
    const auto local = t + utc_offset;
    const auto since_midnight = local - floor<days>(local);
    return static_cast<double>(since_midnight.count()) / 3600.0;
}

std::string local_month_key(Timestamp t, std::chrono::minutes utc_offset) {
    const auto c = split(t + utc_offset);
    return fmt::format("{:04}-{:02}", c.y, c.mo);
}

std::string local_day_key(Timestamp t, std::chrono::minutes utc_offset) {
    const auto c = split(t + utc_offset);
    return fmt::format("{:04}-{:02}-{:02}", c.y, c.mo, c.d);
}

}  // namespace urbantherm
