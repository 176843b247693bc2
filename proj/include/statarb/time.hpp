#pragma once

#include <cstdint>
#include <string>

namespace statarb {

// Minute-resolution UTC timestamp, stored as whole minutes since the Unix
// epoch. Integer storage keeps window arithmetic exact.
struct Timestamp {
    std::int64_t minutes = 0;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t m) : minutes(m) {}

    friend constexpr bool operator==(Timestamp a, Timestamp b) { return a.minutes == b.minutes; }
    friend constexpr bool operator!=(Timestamp a, Timestamp b) { return a.minutes != b.minutes; }
    friend constexpr bool operator<(Timestamp a, Timestamp b) { return a.minutes < b.minutes; }
    friend constexpr bool operator<=(Timestamp a, Timestamp b) { return a.minutes <= b.minutes; }
    friend constexpr bool operator>(Timestamp a, Timestamp b) { return a.minutes > b.minutes; }
    friend constexpr bool operator>=(Timestamp a, Timestamp b) { return a.minutes >= b.minutes; }

    constexpr Timestamp operator+(std::int64_t m) const { return Timestamp{minutes + m}; }
    constexpr Timestamp operator-(std::int64_t m) const { return Timestamp{minutes - m}; }
    constexpr std::int64_t operator-(Timestamp other) const { return minutes - other.minutes; }
};

constexpr std::int64_t kMinutesPerHour = 60;
constexpr std::int64_t kMinutesPerDay = 1440;

struct CivilDateTime {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
    int hour = 0;
    int minute = 0;
};

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int year, int month, int day);

CivilDateTime civil_from_timestamp(Timestamp ts);
Timestamp timestamp_from_civil(int year, int month, int day, int hour = 0, int minute = 0);

// Parses "YYYY-MM-DDTHH:MM[:SS][Z]" (also accepts a space separator).
// Seconds, when present, must be zero: the engine is minute binned.
// Throws DataFormatError on malformed input.
Timestamp parse_timestamp(const std::string& s);

// Formats as "YYYY-MM-DDTHH:MM:00Z".
std::string format_timestamp(Timestamp ts);

// True when ts falls on the 00:00 / 08:00 / 16:00 UTC funding schedule.
bool on_funding_schedule(Timestamp ts, int funding_interval_hours);

}  // namespace statarb
