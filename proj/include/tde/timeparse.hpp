#pragma once

#include <string>

#include "tde/common.hpp"

namespace tde {

// Civil/UTC conversions without any timezone machinery. All timestamps in
// the project are UTC epoch seconds.

i64 days_from_civil(i64 y, unsigned m, unsigned d);
void civil_from_days(i64 z, i64& y, unsigned& m, unsigned& d);

// Accepts "YYYY-MM-DDTHH:MM:SS", "YYYY-MM-DD HH:MM:SS", optional trailing
// 'Z', and bare "YYYY-MM-DD". Throws FormatError otherwise.
i64 parse_iso8601(const std::string& s);

std::string format_iso8601(i64 epoch_s);        // YYYY-MM-DDTHH:MM:SSZ
std::string format_date(i64 epoch_s);           // YYYY-MM-DD
std::string format_hhmm(i64 epoch_s);           // HH:MM
std::string day_of_week_name(i64 epoch_s);      // Monday..Sunday (UTC)

inline i64 truncate_to_minute(i64 epoch_s) {
  // epoch is non-negative in all supported datasets
  return (epoch_s / 60) * 60;
}

} // namespace tde
