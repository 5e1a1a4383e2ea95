#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace feedql {

/// UTC instant with millisecond resolution. Text form is RFC 3339; parsing
/// accepts any offset and normalizes to UTC, formatting always emits "Z".
class Timestamp {
public:
    using Clock = std::chrono::system_clock;
    using Duration = std::chrono::milliseconds;
    using TimePoint = std::chrono::time_point<Clock, Duration>;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(TimePoint instant) : instant_(instant) {}

    static Timestamp from_unix_seconds(long long seconds);
    static Timestamp from_unix_millis(long long millis);

    /// Returns nullopt for anything that is not RFC 3339 date-time.
    static std::optional<Timestamp> parse(std::string_view text);

    std::string to_string() const;

    TimePoint instant() const { return instant_; }
    long long unix_millis() const { return instant_.time_since_epoch().count(); }

    friend constexpr auto operator<=>(const Timestamp&, const Timestamp&) = default;

private:
    TimePoint instant_{};
};

} // namespace feedql
