#include "statarb/time.hpp"

#include <cstdio>

#include "statarb/errors.hpp"

namespace statarb {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);              // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;             // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

static void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

CivilDateTime civil_from_timestamp(Timestamp ts) {
    std::int64_t days = ts.minutes / kMinutesPerDay;
    std::int64_t rem = ts.minutes % kMinutesPerDay;
    if (rem < 0) {
        days -= 1;
        rem += kMinutesPerDay;
    }
    CivilDateTime c;
    civil_from_days(days, c.year, c.month, c.day);
    c.hour = static_cast<int>(rem / 60);
    c.minute = static_cast<int>(rem % 60);
    return c;
}

Timestamp timestamp_from_civil(int year, int month, int day, int hour, int minute) {
    return Timestamp{days_from_civil(year, month, day) * kMinutesPerDay + hour * 60 + minute};
}

Timestamp parse_timestamp(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char sep = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &sec);
    if (n < 6 || (sep != 'T' && sep != ' '))
        throw DataFormatError("unparsable timestamp: '" + s + "'");
    if (n == 7 && sec != 0)
        throw DataFormatError("sub-minute timestamp not supported: '" + s + "'");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59)
        throw DataFormatError("timestamp field out of range: '" + s + "'");
    const Timestamp ts = timestamp_from_civil(y, mo, d, h, mi);
    // Days like Feb 30 pass the range check but normalize into the next
    // month; a round-trip through the civil calendar catches them.
    const CivilDateTime back = civil_from_timestamp(ts);
    if (back.year != y || back.month != mo || back.day != d)
        throw DataFormatError("no such calendar day: '" + s + "'");
    return ts;
}

std::string format_timestamp(Timestamp ts) {
    CivilDateTime c = civil_from_timestamp(ts);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:00Z", c.year, c.month, c.day, c.hour,
                  c.minute);
    return buf;
}

bool on_funding_schedule(Timestamp ts, int funding_interval_hours) {
    if (funding_interval_hours <= 0) return false;
    const std::int64_t interval = static_cast<std::int64_t>(funding_interval_hours) * 60;
    const std::int64_t m = ts.minutes % interval;
    return (m == 0) || (m + interval == 0);
}

}  // namespace statarb
