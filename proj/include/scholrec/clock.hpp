#pragma once

#include <string>
#include <string_view>

namespace scholrec {

// Gregorian year of the system clock, UTC.
int current_year();

// Current time as "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string now_iso8601();

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and a
// "Z" or "+HH:MM"/"-HH:MM" offset. Calendar fields are range-checked.
bool is_iso8601(std::string_view timestamp);

}  // namespace scholrec
