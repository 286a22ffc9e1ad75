#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tde/common.hpp"

namespace tde {

enum class Haul { Short, Medium, Long };
enum class WakeCategory { LIGHT, MEDIUM, HEAVY, SUPER };

std::string to_string(Haul h);
std::string to_string(WakeCategory w);
Haul haul_from_string(const std::string& s);
WakeCategory wake_from_string(const std::string& s);

// One row of the general-flight-information table.
struct FlightInfo {
  std::string flight_id;
  std::string airline_name_english;
  std::string callsign_code_iata;
  std::string callsign_code_icao;
  Haul haul = Haul::Short;
  std::string dep_code_iata, dep_code_icao, dep_name_english;
  double dep_lat = 0, dep_lon = 0, dep_altitude = 0; // altitude in feet
  std::string dest_code_iata, dest_code_icao, dest_name_english;
  double dest_lat = 0, dest_lon = 0, dest_altitude = 0;
  double distance_km = 0;
  i64 actual_entry_time = 0; // epoch s
  i64 sched_time_utc = 0;    // scheduled arrival, epoch s
  i64 date = 0;              // arrival date (midnight KST stored as epoch s)
  std::string day_of_week;
  std::string aircraft_type;
  std::string aircraft_registration;
  WakeCategory wake_turbulence_cat = WakeCategory::MEDIUM;
};

// All temporal markers for one flight; label and delay arithmetic source.
struct DelayTimeline {
  std::optional<i64> sched_departure;
  std::optional<i64> actual_departure;
  std::optional<i64> airborne_time;
  std::optional<i64> expected_entry;
  std::optional<i64> actual_entry;
  std::optional<i64> expected_landing;
  std::optional<i64> actual_landing;
  std::optional<i64> sched_arrival;
  std::optional<i64> actual_arrival;
};

enum class WeatherKind { METAR, TAF };

struct WeatherRecord {
  WeatherKind kind = WeatherKind::METAR;
  i64 issue_time = 0;
  std::optional<i64> valid_from; // TAF only
  std::optional<i64> valid_to;
  std::string raw_text;
};

struct Notam {
  std::string id;
  i64 valid_from = 0;
  i64 valid_to = 0;
  std::string raw_text;
};

// One padded trajectory group: n x t_max x 3 scaled-ENU cells, NaN filled,
// with a validity mask marking exactly the real cells.
struct TrajGroup {
  int n = 0;
  int t_max = 0;
  std::vector<double> xyz;        // n * t_max * 3
  std::vector<char> mask;         // n * t_max
  std::vector<std::string> ids;   // per-trajectory flight id
  std::vector<i64> first_ts;      // per-trajectory first state time

  const double* traj(int i) const { return xyz.data() + size_t(i) * size_t(t_max) * 3; }
  int valid_len(int i) const {
    const char* m = mask.data() + size_t(i) * size_t(t_max);
    int len = 0;
    while (len < t_max && m[len])
      ++len;
    return len;
  }
  void add(const std::string& id, i64 t0, const std::vector<double>& rows);
  void finalize(); // pads all trajectories to the common t_max

private:
  std::vector<std::vector<double>> staging_;
};

struct TrajectoryGroupSet {
  TrajGroup focusing; // n == 1 whenever present
  TrajGroup active;
  TrajGroup prior;
};

// The multimodal sample s_{i,t}.
struct Scenario {
  std::string flight_id;
  i64 t = 0;
  std::string prompt_fp;
  std::string prompt_wx;
  std::string prompt_no;
  std::vector<std::string> notam_texts; // store-ordered source of prompt_no
  int template_id = 0;
  TrajectoryGroupSet groups;
};

struct LabeledScenario {
  Scenario scenario;
  double y = 0; // post-terminal duration, minutes
};

} // namespace tde
