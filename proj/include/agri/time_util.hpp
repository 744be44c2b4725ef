#pragma once

#include <cstdint>
#include <string>

namespace agri {

/// Timestamps are seconds since the Unix epoch, UTC. Double precision keeps
/// sub-millisecond resolution for any plausible mission date.
using UnixTime = double;

/// Formats as ISO-8601 UTC with millisecond precision: 2020-06-21T07:30:00.000Z
std::string format_iso8601(UnixTime t);

/// Parses ISO-8601 UTC ("...Z" or no suffix, optional fractional seconds).
UnixTime parse_iso8601(const std::string& s);

/// Civil date <-> days since epoch (proleptic Gregorian).
int64_t days_from_civil(int y, unsigned m, unsigned d);
void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d);

}  // namespace agri
