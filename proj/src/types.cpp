#include "tde/types.hpp"

#include <limits>

namespace tde {

std::string to_string(Haul h) {
  switch (h) {
  case Haul::Short:
    return "short";
  case Haul::Medium:
    return "medium";
  default:
    return "long";
  }
}

std::string to_string(WakeCategory w) {
  switch (w) {
  case WakeCategory::LIGHT:
    return "LIGHT";
  case WakeCategory::MEDIUM:
    return "MEDIUM";
  case WakeCategory::HEAVY:
    return "HEAVY";
  default:
    return "SUPER";
  }
}

Haul haul_from_string(const std::string& s) {
  if (s == "short")
    return Haul::Short;
  if (s == "medium")
    return Haul::Medium;
  if (s == "long")
    return Haul::Long;
  throw FormatError("unknown haul: " + s);
}

WakeCategory wake_from_string(const std::string& s) {
  if (s == "LIGHT")
    return WakeCategory::LIGHT;
  if (s == "MEDIUM")
    return WakeCategory::MEDIUM;
  if (s == "HEAVY")
    return WakeCategory::HEAVY;
  if (s == "SUPER")
    return WakeCategory::SUPER;
  throw FormatError("unknown wake category: " + s);
}

void TrajGroup::add(const std::string& id, i64 t0,
                    const std::vector<double>& rows) {
  int len = int(rows.size() / 3);
  ids.push_back(id);
  first_ts.push_back(t0);
  n += 1;
  if (len > t_max)
    t_max = len;
  // staged flat append; finalize() pads to the final t_max
  staging_.push_back(rows);
}

void TrajGroup::finalize() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  xyz.assign(size_t(n) * size_t(t_max) * 3, nan);
  mask.assign(size_t(n) * size_t(t_max), 0);
  for (int i = 0; i < n; ++i) {
    const auto& rows = staging_[size_t(i)];
    int len = int(rows.size() / 3);
    std::copy(rows.begin(), rows.end(),
              xyz.begin() + size_t(i) * size_t(t_max) * 3);
    for (int j = 0; j < len; ++j)
      mask[size_t(i) * size_t(t_max) + size_t(j)] = 1;
  }
  staging_.clear();
  staging_.shrink_to_fit();
}

} // namespace tde
