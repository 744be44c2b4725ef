#include "agri/time_util.hpp"

#include <cmath>
#include <cstdio>

#include "agri/common.hpp"

namespace agri {

int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

std::string format_iso8601(UnixTime t) {
    double ms_total = std::round(t * 1000.0);
    int64_t ms = static_cast<int64_t>(ms_total);
    int64_t sec = ms / 1000;
    int64_t msec = ms % 1000;
    if (msec < 0) {
        msec += 1000;
        sec -= 1;
    }
    int64_t days = sec / 86400;
    int64_t sod = sec % 86400;
    if (sod < 0) {
        sod += 86400;
        days -= 1;
    }
    int y;
    unsigned mo, d;
    civil_from_days(days, y, mo, d);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", y, mo, d,
                  static_cast<int>(sod / 3600), static_cast<int>((sod % 3600) / 60),
                  static_cast<int>(sod % 60), static_cast<int>(msec));
    return buf;
}

UnixTime parse_iso8601(const std::string& s) {
    int y, mo, d, hh, mm;
    double ss = 0.0;
    int n = 0;
    if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf%n", &y, &mo, &d, &hh, &mm, &ss, &n) != 6)
        throw ValidationError("cannot parse ISO-8601 timestamp: " + s);
    std::string rest = s.substr(static_cast<size_t>(n));
    if (!rest.empty() && rest != "Z")
        throw ValidationError("unsupported timestamp suffix (UTC only): " + s);
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || hh < 0 || hh > 23 || mm < 0 || mm > 59 ||
        ss < 0.0 || ss >= 61.0)
        throw ValidationError("timestamp field out of range: " + s);
    int64_t days = days_from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
    return static_cast<double>(days) * 86400.0 + hh * 3600.0 + mm * 60.0 + ss;
}

}  // namespace agri
