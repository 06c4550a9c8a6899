#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace scholrec {

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes;
// a trailing '\r' is ignored.
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace scholrec
