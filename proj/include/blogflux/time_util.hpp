// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "blogflux/common.hpp"

namespace blogflux {

// Parses "YYYY-MM-DDThh:mm:ssZ" or a trailing "+hh:mm" / "-hh:mm" offset.
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);

// Parses the Apache log time "dd/Mon/yyyy:hh:mm:ss +zzzz" (no brackets).
std::optional<Timestamp> parse_apache_time(std::string_view text);
std::string format_apache_time(Timestamp ts);

Timestamp make_utc(int year, unsigned month, unsigned day, int hour = 0, int minute = 0,
                   int second = 0);

// Local hour 0..23 and weekday 0..6 (0 = Sunday) at a fixed UTC offset.
int local_hour(Timestamp ts, int offset_hours);
int local_weekday(Timestamp ts, int offset_hours);

}  // namespace blogflux
