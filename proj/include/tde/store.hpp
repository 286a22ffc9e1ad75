#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tde/geo.hpp"
#include "tde/prompts.hpp"
#include "tde/types.hpp"

namespace tde {

Haul classify_haul(double distance_km);
// Bundled ICAO wake-category table; unknown types default to MEDIUM.
WakeCategory wake_category(const std::string& aircraft_type,
                           bool* known = nullptr);

double pre_terminal_delay_min(const DelayTimeline& tl);
// (T_entry_act - T_arr_sch) in minutes plus the predicted duration; computed
// in seconds first so the delay identity holds exactly.
double total_delay_estimate_min(const DelayTimeline& tl, double y_hat_min);

struct FlightRecord {
  FlightInfo info;
  DelayTimeline timeline;
  std::vector<EnuState> track; // 1 Hz, scaled ENU, TMA-clipped
  i64 first_ts() const { return track.empty() ? 0 : i64(track.front().t); }
  i64 last_ts() const { return track.empty() ? 0 : i64(track.back().t); }
};

struct MetarQuery {
  const WeatherRecord* record = nullptr;
  bool stale = false;
};

struct PlannedScenario {
  int flight_idx = 0;
  i64 t = 0;
  int template_id = 0;
  int split = 0; // 0 train, 1 val, 2 test
  double y = 0;
};

// Immutable after load; all queries are read-only.
class AirspaceStore {
public:
  void load(const std::string& dir);

  const GeoPoint& origin() const { return origin_; }
  size_t flight_count() const { return flights_.size(); }
  const FlightRecord& flight(int idx) const { return flights_[size_t(idx)]; }
  const FlightRecord& flight(const std::string& id) const;
  int flight_index(const std::string& id) const;

  // Most recent METAR issued within the 30-minute window (t-1800, t];
  // falls back to the latest earlier one with the stale flag set.
  MetarQuery metar_at(i64 t) const;
  // Latest-issued TAF whose validity covers t.
  const WeatherRecord& taf_at(i64 t) const;
  // All NOTAMs active at t, ordered by (valid_from, id).
  std::vector<const Notam*> notams_at(i64 t) const;

  TrajectoryGroupSet trajectory_groups(int flight_idx, i64 t) const;
  Scenario build_scenario(int flight_idx, i64 t, int template_id) const;

  double label_min(int flight_idx) const; // post-terminal duration, minutes

  // min(5, T_i) seeded draws per labeled flight plus the 10%/10% split.
  std::vector<PlannedScenario> plan_dataset(u64 seed) const;
  void build_dataset(
      u64 seed,
      const std::function<void(const LabeledScenario&, int split)>& sink) const;

private:
  GeoPoint origin_{};
  std::vector<FlightRecord> flights_;
  std::map<std::string, int> by_id_;
  std::vector<WeatherRecord> metars_; // sorted by issue_time
  std::vector<WeatherRecord> tafs_;   // sorted by issue_time
  std::vector<Notam> notams_;         // sorted by (valid_from, id)
};

} // namespace tde
