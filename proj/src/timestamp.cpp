#include "feedql/timestamp.hpp"

#include <cctype>
#include <cstdio>

namespace feedql {

using namespace std::chrono;

Timestamp Timestamp::from_unix_seconds(long long seconds)
{
    return Timestamp{TimePoint{Duration{seconds * 1000}}};
}

Timestamp Timestamp::from_unix_millis(long long millis)
{
    return Timestamp{TimePoint{Duration{millis}}};
}

namespace {

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out)
{
    if (pos + count > text.size())
        return false;
    int value = 0;
    for (std::size_t i = 0; i < count; ++i) {
        char c = text[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
        value = value * 10 + (c - '0');
    }
    pos += count;
    out = value;
    return true;
}

bool expect(std::string_view text, std::size_t& pos, char c)
{
    if (pos >= text.size() || text[pos] != c)
        return false;
    ++pos;
    return true;
}

} // namespace

std::optional<Timestamp> Timestamp::parse(std::string_view text)
{
    std::size_t pos = 0;
    int y, mo, d, h, mi, s;
    if (!read_digits(text, pos, 4, y) || !expect(text, pos, '-') || !read_digits(text, pos, 2, mo)
        || !expect(text, pos, '-') || !read_digits(text, pos, 2, d))
        return std::nullopt;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't'))
        return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, h) || !expect(text, pos, ':') || !read_digits(text, pos, 2, mi)
        || !expect(text, pos, ':') || !read_digits(text, pos, 2, s))
        return std::nullopt;

    long long millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        int scale = 100;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            if (scale > 0) {
                millis += (text[pos] - '0') * scale;
                scale /= 10;
            }
            ++pos;
            ++digits;
        }
        if (digits == 0)
            return std::nullopt;
    }

    int offset_minutes = 0;
    if (pos >= text.size())
        return std::nullopt;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        int sign = text[pos] == '-' ? -1 : 1;
        ++pos;
        int oh, om;
        if (!read_digits(text, pos, 2, oh) || !expect(text, pos, ':') || !read_digits(text, pos, 2, om))
            return std::nullopt;
        if (oh > 23 || om > 59)
            return std::nullopt;
        offset_minutes = sign * (oh * 60 + om);
    } else {
        return std::nullopt;
    }
    if (pos != text.size())
        return std::nullopt;

    // Leap seconds (ss = 60) are accepted and folded into the next minute.
    if (mo < 1 || mo > 12 || h > 23 || mi > 59 || s > 60)
        return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok())
        return std::nullopt;

    auto tp = time_point_cast<Duration>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s} + Duration{millis}
        - minutes{offset_minutes};
    return Timestamp{tp};
}

std::string Timestamp::to_string() const
{
    auto day_point = floor<days>(instant_);
    year_month_day ymd{day_point};
    auto rest = instant_ - day_point;
    auto h = duration_cast<hours>(rest);
    rest -= h;
    auto mi = duration_cast<minutes>(rest);
    rest -= mi;
    auto s = duration_cast<seconds>(rest);
    rest -= s;
    long long ms = rest.count();

    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02lld", static_cast<int>(ymd.year()),
        static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
        static_cast<int>(mi.count()), static_cast<long long>(s.count()));
    std::string out(buf, static_cast<std::size_t>(n));
    if (ms != 0) {
        std::snprintf(buf, sizeof buf, ".%03lld", ms);
        out += buf;
    }
    out += 'Z';
    return out;
}

} // namespace feedql
