#include "scholrec/clock.hpp"

#include <chrono>
#include <cstdio>
#include <regex>

namespace scholrec {

int current_year() {
  using namespace std::chrono;
  const year_month_day ymd{floor<days>(system_clock::now())};
  return static_cast<int>(ymd.year());
}

std::string now_iso8601() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto day = floor<days>(now);
  const year_month_day ymd{day};
  const hh_mm_ss tod{floor<milliseconds>(now - day)};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  char ms[8];
  std::snprintf(ms, sizeof ms, ".%03lld", static_cast<long long>(tod.subseconds().count()));
  std::string out(buf);
  out.insert(out.size() - 1, ms);
  return out;
}

bool is_iso8601(std::string_view timestamp) {
  static const std::regex pattern(
      R"(^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(\.\d{1,9})?(Z|[+-](\d{2}):(\d{2}))$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(timestamp.begin(), timestamp.end(), m, pattern)) return false;

  auto field = [&](int i) { return std::stoi(m[i].str()); };
  using namespace std::chrono;
  const year_month_day ymd{year{field(1)}, month{static_cast<unsigned>(field(2))},
                           day{static_cast<unsigned>(field(3))}};
  if (!ymd.ok()) return false;
  if (field(4) > 23 || field(5) > 59 || field(6) > 60) return false;
  if (m[9].matched && (field(9) > 23 || field(10) > 59)) return false;
  return true;
}

}  // namespace scholrec
