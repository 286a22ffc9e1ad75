#include "tde/store.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <unordered_map>

#include <json.hpp>

#include "tde/io_util.hpp"
#include "tde/rng.hpp"
#include "tde/timeparse.hpp"

namespace tde {

using json = nlohmann::json;

Haul classify_haul(double distance_km) {
  if (distance_km < 1500.0)
    return Haul::Short;
  if (distance_km <= 4000.0)
    return Haul::Medium;
  return Haul::Long;
}

WakeCategory wake_category(const std::string& type, bool* known) {
  static const std::unordered_map<std::string, WakeCategory> table = {
      {"A388", WakeCategory::SUPER}, {"A225", WakeCategory::SUPER},
      // heavies
      {"B741", WakeCategory::HEAVY}, {"B742", WakeCategory::HEAVY},
      {"B743", WakeCategory::HEAVY}, {"B744", WakeCategory::HEAVY},
      {"B748", WakeCategory::HEAVY}, {"B772", WakeCategory::HEAVY},
      {"B773", WakeCategory::HEAVY}, {"B77L", WakeCategory::HEAVY},
      {"B77W", WakeCategory::HEAVY}, {"B788", WakeCategory::HEAVY},
      {"B789", WakeCategory::HEAVY}, {"B78X", WakeCategory::HEAVY},
      {"B763", WakeCategory::HEAVY}, {"B764", WakeCategory::HEAVY},
      {"A306", WakeCategory::HEAVY}, {"A310", WakeCategory::HEAVY},
      {"A332", WakeCategory::HEAVY}, {"A333", WakeCategory::HEAVY},
      {"A339", WakeCategory::HEAVY}, {"A342", WakeCategory::HEAVY},
      {"A343", WakeCategory::HEAVY}, {"A345", WakeCategory::HEAVY},
      {"A346", WakeCategory::HEAVY}, {"A359", WakeCategory::HEAVY},
      {"A35K", WakeCategory::HEAVY}, {"MD11", WakeCategory::HEAVY},
      {"IL96", WakeCategory::HEAVY}, {"C17", WakeCategory::HEAVY},
      // mediums
      {"B731", WakeCategory::MEDIUM}, {"B732", WakeCategory::MEDIUM},
      {"B733", WakeCategory::MEDIUM}, {"B734", WakeCategory::MEDIUM},
      {"B735", WakeCategory::MEDIUM}, {"B736", WakeCategory::MEDIUM},
      {"B737", WakeCategory::MEDIUM}, {"B738", WakeCategory::MEDIUM},
      {"B739", WakeCategory::MEDIUM}, {"B38M", WakeCategory::MEDIUM},
      {"B39M", WakeCategory::MEDIUM}, {"A318", WakeCategory::MEDIUM},
      {"A319", WakeCategory::MEDIUM}, {"A320", WakeCategory::MEDIUM},
      {"A321", WakeCategory::MEDIUM}, {"A19N", WakeCategory::MEDIUM},
      {"A20N", WakeCategory::MEDIUM}, {"A21N", WakeCategory::MEDIUM},
      {"B752", WakeCategory::MEDIUM}, {"B753", WakeCategory::MEDIUM},
      {"E170", WakeCategory::MEDIUM}, {"E175", WakeCategory::MEDIUM},
      {"E190", WakeCategory::MEDIUM}, {"E195", WakeCategory::MEDIUM},
      {"CRJ2", WakeCategory::MEDIUM}, {"CRJ7", WakeCategory::MEDIUM},
      {"CRJ9", WakeCategory::MEDIUM}, {"AT72", WakeCategory::MEDIUM},
      {"AT76", WakeCategory::MEDIUM}, {"DH8D", WakeCategory::MEDIUM},
      {"F100", WakeCategory::MEDIUM}, {"MD82", WakeCategory::MEDIUM},
      {"MD83", WakeCategory::MEDIUM}, {"MD88", WakeCategory::MEDIUM},
      {"SF34", WakeCategory::MEDIUM}, {"B722", WakeCategory::MEDIUM},
      // lights
      {"C172", WakeCategory::LIGHT}, {"C152", WakeCategory::LIGHT},
      {"C208", WakeCategory::LIGHT}, {"P28A", WakeCategory::LIGHT},
      {"DA40", WakeCategory::LIGHT}, {"BE35", WakeCategory::LIGHT},
      {"BE58", WakeCategory::LIGHT}, {"PC12", WakeCategory::LIGHT},
      {"SR22", WakeCategory::LIGHT}, {"C25A", WakeCategory::LIGHT},
  };
  auto it = table.find(type);
  if (it != table.end()) {
    if (known)
      *known = true;
    return it->second;
  }
  if (known)
    *known = false;
  static bool warned = false;
  if (!warned) {
    std::fprintf(stderr,
                 "warning: unknown aircraft type '%s', assuming MEDIUM wake "
                 "category\n",
                 type.c_str());
    warned = true;
  }
  return WakeCategory::MEDIUM;
}

double pre_terminal_delay_min(const DelayTimeline& tl) {
  if (!tl.actual_entry || !tl.expected_entry)
    throw UnlabeledFlight("pre_terminal_delay: missing entry markers");
  return double(*tl.actual_entry - *tl.expected_entry) / 60.0;
}

double total_delay_estimate_min(const DelayTimeline& tl, double y_hat_min) {
  if (!tl.actual_entry || !tl.sched_arrival)
    throw UnlabeledFlight("total_delay_estimate: missing markers");
  double offset_s = double(*tl.actual_entry - *tl.sched_arrival);
  return (offset_s + y_hat_min * 60.0) / 60.0;
}

const FlightRecord& AirspaceStore::flight(const std::string& id) const {
  return flights_[size_t(flight_index(id))];
}

int AirspaceStore::flight_index(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end())
    throw FormatError("unknown flight: " + id);
  return it->second;
}

namespace {
std::optional<i64> opt_time(const std::string& s) {
  if (s.empty())
    return std::nullopt;
  return parse_iso8601(s);
}
} // namespace

void AirspaceStore::load(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path base(dir);

  // flights
  {
    bool header = true;
    std::vector<std::string> cols;
    for_each_line((base / "flights.csv").string(), [&](const std::string& ln) {
      auto f = split_csv_line(ln);
      if (header) {
        cols = f;
        header = false;
        return;
      }
      if (f.size() != 25)
        throw FormatError("flights.csv: expected 25 columns");
      FlightRecord rec;
      FlightInfo& fi = rec.info;
      int c = 0;
      fi.flight_id = f[size_t(c++)];
      fi.airline_name_english = f[size_t(c++)];
      fi.callsign_code_iata = f[size_t(c++)];
      fi.callsign_code_icao = f[size_t(c++)];
      fi.haul = haul_from_string(f[size_t(c++)]);
      fi.dep_code_iata = f[size_t(c++)];
      fi.dep_code_icao = f[size_t(c++)];
      fi.dep_name_english = f[size_t(c++)];
      fi.dep_lat = std::stod(f[size_t(c++)]);
      fi.dep_lon = std::stod(f[size_t(c++)]);
      fi.dep_altitude = std::stod(f[size_t(c++)]);
      fi.dest_code_iata = f[size_t(c++)];
      fi.dest_code_icao = f[size_t(c++)];
      fi.dest_name_english = f[size_t(c++)];
      fi.dest_lat = std::stod(f[size_t(c++)]);
      fi.dest_lon = std::stod(f[size_t(c++)]);
      fi.dest_altitude = std::stod(f[size_t(c++)]);
      fi.distance_km = std::stod(f[size_t(c++)]);
      fi.actual_entry_time = parse_iso8601(f[size_t(c++)]);
      fi.sched_time_utc = parse_iso8601(f[size_t(c++)]);
      fi.date = parse_iso8601(f[size_t(c++)]);
      fi.day_of_week = f[size_t(c++)];
      fi.aircraft_type = f[size_t(c++)];
      fi.aircraft_registration = f[size_t(c++)];
      fi.wake_turbulence_cat = wake_from_string(f[size_t(c++)]);
      by_id_[fi.flight_id] = int(flights_.size());
      flights_.push_back(std::move(rec));
    });
  }
  if (flights_.empty())
    throw EmptyDataset("no flights in " + dir);

  origin_.lat = flights_[0].info.dest_lat;
  origin_.lon = flights_[0].info.dest_lon;
  origin_.alt = flights_[0].info.dest_altitude * kFeetToMeters;

  // timelines
  {
    bool header = true;
    for_each_line((base / "timelines.csv").string(),
                  [&](const std::string& ln) {
                    auto f = split_csv_line(ln);
                    if (header) {
                      header = false;
                      return;
                    }
                    if (f.size() != 10)
                      throw FormatError("timelines.csv: expected 10 columns");
                    auto& rec = flights_[size_t(flight_index(f[0]))];
                    DelayTimeline& tl = rec.timeline;
                    tl.sched_departure = opt_time(f[1]);
                    tl.actual_departure = opt_time(f[2]);
                    tl.airborne_time = opt_time(f[3]);
                    tl.expected_entry = opt_time(f[4]);
                    tl.actual_entry = opt_time(f[5]);
                    tl.expected_landing = opt_time(f[6]);
                    tl.actual_landing = opt_time(f[7]);
                    tl.sched_arrival = opt_time(f[8]);
                    tl.actual_arrival = opt_time(f[9]);
                    if (tl.actual_entry && tl.actual_arrival &&
                        *tl.actual_entry > *tl.actual_arrival)
                      throw FormatError("timeline: entry after arrival for " +
                                        f[0]);
                  });
  }

  // trajectories
  {
    std::map<std::string, std::vector<GeoPoint>> raw;
    bool header = true;
    for_each_line((base / "trajectories.csv").string(),
                  [&](const std::string& ln) {
                    if (header) {
                      header = false;
                      return;
                    }
                    auto f = split_csv_line(ln);
                    if (f.size() != 5)
                      throw FormatError("trajectories.csv: expected 5 columns");
                    GeoPoint p;
                    p.t = std::stod(f[1]);
                    p.lat = std::stod(f[2]);
                    p.lon = std::stod(f[3]);
                    p.alt = std::stod(f[4]) * kFeetToMeters;
                    if (!valid_geopoint(p))
                      throw FormatError("trajectories.csv: invalid point");
                    raw[f[0]].push_back(p);
                  });
    for (auto& [id, pts] : raw) {
      auto it = by_id_.find(id);
      if (it == by_id_.end())
        continue; // trajectory without flight info is dropped
      std::stable_sort(pts.begin(), pts.end(),
                       [](const GeoPoint& a, const GeoPoint& b) {
                         return a.t < b.t;
                       });
      auto grid = resample_1hz(pts);
      auto enu = to_enu_states(grid, origin_);
      // TMA clip: keep the first contiguous in-TMA run
      std::vector<EnuState> clipped;
      for (const auto& s : enu) {
        bool inside = std::hypot(s.x, s.y) <= 1.0;
        if (inside)
          clipped.push_back(s);
        else if (!clipped.empty())
          break;
      }
      auto& rec = flights_[size_t(it->second)];
      rec.track = std::move(clipped);
      if (!rec.track.empty() && !rec.timeline.actual_entry)
        rec.timeline.actual_entry = i64(rec.track.front().t);
    }
  }

  // weather
  {
    auto path = (base / "weather.jsonl").string();
    if (fs::exists(path)) {
      for_each_line(path, [&](const std::string& ln) {
        json j = json::parse(ln);
        WeatherRecord w;
        std::string kind = j.at("kind").get<std::string>();
        w.kind = kind == "METAR" ? WeatherKind::METAR : WeatherKind::TAF;
        w.issue_time = j.at("issue_time").get<i64>();
        if (j.contains("valid_from") && !j["valid_from"].is_null())
          w.valid_from = j["valid_from"].get<i64>();
        if (j.contains("valid_to") && !j["valid_to"].is_null())
          w.valid_to = j["valid_to"].get<i64>();
        w.raw_text = j.at("raw_text").get<std::string>();
        if (w.raw_text.empty())
          throw FormatError("weather record with empty raw_text");
        (w.kind == WeatherKind::METAR ? metars_ : tafs_).push_back(w);
      });
      auto by_issue = [](const WeatherRecord& a, const WeatherRecord& b) {
        return a.issue_time < b.issue_time;
      };
      std::stable_sort(metars_.begin(), metars_.end(), by_issue);
      std::stable_sort(tafs_.begin(), tafs_.end(), by_issue);
    }
  }

  // notams
  {
    auto path = (base / "notams.jsonl").string();
    if (fs::exists(path)) {
      for_each_line(path, [&](const std::string& ln) {
        json j = json::parse(ln);
        Notam n;
        n.id = j.at("id").get<std::string>();
        n.valid_from = j.at("valid_from").get<i64>();
        n.valid_to = j.at("valid_to").get<i64>();
        n.raw_text = j.at("raw_text").get<std::string>();
        if (n.valid_from > n.valid_to)
          throw FormatError("notam with inverted validity: " + n.id);
        notams_.push_back(n);
      });
      std::sort(notams_.begin(), notams_.end(),
                [](const Notam& a, const Notam& b) {
                  return a.valid_from != b.valid_from
                             ? a.valid_from < b.valid_from
                             : a.id < b.id;
                });
    }
  }
}

MetarQuery AirspaceStore::metar_at(i64 t) const {
  if (metars_.empty())
    throw MissingWeather("no METARs loaded");
  // latest issue_time <= t
  int lo = -1;
  {
    int a = 0, b = int(metars_.size()) - 1;
    while (a <= b) {
      int mid = (a + b) / 2;
      if (metars_[size_t(mid)].issue_time <= t) {
        lo = mid;
        a = mid + 1;
      } else {
        b = mid - 1;
      }
    }
  }
  if (lo < 0)
    throw MissingWeather("no METAR at or before requested time");
  const WeatherRecord& r = metars_[size_t(lo)];
  bool stale = r.issue_time <= t - 1800;
  return {&r, stale};
}

const WeatherRecord& AirspaceStore::taf_at(i64 t) const {
  const WeatherRecord* best = nullptr;
  for (const auto& w : tafs_) {
    if (w.valid_from && w.valid_to && *w.valid_from <= t && t <= *w.valid_to) {
      if (!best || w.issue_time >= best->issue_time)
        best = &w;
    }
  }
  if (!best)
    throw MissingWeather("no valid TAF at requested time");
  return *best;
}

std::vector<const Notam*> AirspaceStore::notams_at(i64 t) const {
  std::vector<const Notam*> out;
  for (const auto& n : notams_)
    if (n.valid_from <= t && t <= n.valid_to)
      out.push_back(&n);
  return out; // input order is already (valid_from, id)
}

namespace {
std::vector<double> states_to_rows(const std::vector<EnuState>& track,
                                   size_t lo, size_t hi) {
  std::vector<double> rows;
  rows.reserve((hi - lo) * 3);
  for (size_t i = lo; i < hi; ++i) {
    rows.push_back(track[i].x);
    rows.push_back(track[i].y);
    rows.push_back(track[i].z);
  }
  return rows;
}
} // namespace

TrajectoryGroupSet AirspaceStore::trajectory_groups(int flight_idx,
                                                    i64 t) const {
  const FlightRecord& rec = flights_[size_t(flight_idx)];
  if (rec.track.empty())
    throw NotAirborne("flight has no trajectory: " + rec.info.flight_id);
  const i64 entry = rec.first_ts();
  const i64 monitor_end = rec.timeline.actual_arrival
                              ? *rec.timeline.actual_arrival
                              : rec.last_ts() + 1;
  if (t < entry || t >= monitor_end)
    throw NotAirborne(rec.info.flight_id + " not airborne at t=" +
                      std::to_string(t));

  TrajectoryGroupSet out;
  // focusing: states in [entry, t], saturating at the recorded track end
  {
    size_t hi = size_t(std::min<i64>(t, rec.last_ts()) - entry) + 1;
    out.focusing.add(rec.info.flight_id, entry,
                     states_to_rows(rec.track, 0, hi));
    out.focusing.finalize();
  }

  // active: other aircraft with a recorded state at t
  struct Member {
    i64 first;
    int idx;
  };
  std::vector<Member> act;
  for (int j = 0; j < int(flights_.size()); ++j) {
    if (j == flight_idx)
      continue;
    const auto& fr = flights_[size_t(j)];
    if (fr.track.empty())
      continue;
    if (fr.first_ts() <= t && t <= fr.last_ts())
      act.push_back({fr.first_ts(), j});
  }
  std::sort(act.begin(), act.end(), [&](const Member& a, const Member& b) {
    if (a.first != b.first)
      return a.first < b.first;
    return flights_[size_t(a.idx)].info.flight_id <
           flights_[size_t(b.idx)].info.flight_id;
  });
  for (const auto& m : act) {
    const auto& fr = flights_[size_t(m.idx)];
    size_t hi = size_t(t - fr.first_ts()) + 1;
    out.active.add(fr.info.flight_id, fr.first_ts(),
                   states_to_rows(fr.track, 0, hi));
  }
  out.active.finalize();

  // prior: completed before t but still active at the earliest active start
  if (!act.empty()) {
    i64 t_ref = act.front().first;
    for (const auto& m : act)
      t_ref = std::min(t_ref, m.first);
    std::vector<Member> pri;
    for (int j = 0; j < int(flights_.size()); ++j) {
      if (j == flight_idx)
        continue;
      const auto& fr = flights_[size_t(j)];
      if (fr.track.empty())
        continue;
      if (fr.last_ts() < t && fr.first_ts() <= t_ref && t_ref <= fr.last_ts())
        pri.push_back({fr.first_ts(), j});
    }
    std::sort(pri.begin(), pri.end(), [&](const Member& a, const Member& b) {
      if (a.first != b.first)
        return a.first < b.first;
      return flights_[size_t(a.idx)].info.flight_id <
             flights_[size_t(b.idx)].info.flight_id;
    });
    for (const auto& m : pri) {
      const auto& fr = flights_[size_t(m.idx)];
      out.prior.add(fr.info.flight_id, fr.first_ts(),
                    states_to_rows(fr.track, 0, fr.track.size()));
    }
  }
  out.prior.finalize();
  return out;
}

Scenario AirspaceStore::build_scenario(int flight_idx, i64 t,
                                       int template_id) const {
  const FlightRecord& rec = flights_[size_t(flight_idx)];
  Scenario s;
  s.flight_id = rec.info.flight_id;
  s.t = t;
  s.template_id = template_id;
  s.prompt_fp = render_flight_prompt(rec.info, template_id);

  const WeatherRecord* metar = nullptr;
  bool metar_stale = false;
  try {
    MetarQuery q = metar_at(t);
    metar = q.record;
    metar_stale = q.stale;
  } catch (const MissingWeather&) {
  }
  const WeatherRecord* taf = nullptr;
  try {
    taf = &taf_at(t);
  } catch (const MissingWeather&) {
  }
  s.prompt_wx = render_weather_prompt(metar, metar_stale, taf, false);

  for (const Notam* n : notams_at(t))
    s.notam_texts.push_back(n->raw_text);
  s.prompt_no = render_notam_prompt(s.notam_texts);

  s.groups = trajectory_groups(flight_idx, t);
  return s;
}

double AirspaceStore::label_min(int flight_idx) const {
  const auto& tl = flights_[size_t(flight_idx)].timeline;
  if (!tl.actual_entry || !tl.actual_arrival)
    throw UnlabeledFlight("missing entry or arrival marker");
  i64 arr = truncate_to_minute(*tl.actual_arrival);
  double y = double(arr - *tl.actual_entry) / 60.0;
  if (y <= 0)
    throw UnlabeledFlight("non-positive post-terminal duration");
  return y;
}

std::vector<PlannedScenario> AirspaceStore::plan_dataset(u64 seed) const {
  std::vector<PlannedScenario> plan;
  for (int i = 0; i < int(flights_.size()); ++i) {
    const auto& rec = flights_[size_t(i)];
    double y;
    try {
      y = label_min(i);
    } catch (const UnlabeledFlight&) {
      continue;
    }
    if (rec.track.empty())
      continue;
    const i64 entry = rec.first_ts();
    const i64 arrival = *rec.timeline.actual_arrival;
    const i64 hi = std::min<i64>(rec.last_ts(), arrival - 1);
    if (hi < entry)
      continue;
    const i64 n_eligible = hi - entry + 1;
    const i64 t_count = i64(rec.track.size());
    int k = int(std::min<i64>(std::min<i64>(5, t_count), n_eligible));

    Rng rng(mix64(seed, fnv1a64(rec.info.flight_id), 0x5eedf00d));
    // partial Fisher-Yates over the eligible second offsets
    std::vector<i64> idx(size_t(n_eligible));
    for (i64 j = 0; j < n_eligible; ++j)
      idx[size_t(j)] = j;
    for (int j = 0; j < k; ++j) {
      i64 pick = j + rng.uniform_int(0, n_eligible - 1 - j);
      std::swap(idx[size_t(j)], idx[size_t(pick)]);
    }
    for (int j = 0; j < k; ++j) {
      PlannedScenario ps;
      ps.flight_idx = i;
      ps.t = entry + idx[size_t(j)];
      ps.template_id =
          int(mix64(seed, fnv1a64(rec.info.flight_id), u64(ps.t)) % 10);
      ps.y = y;
      plan.push_back(ps);
    }
  }
  if (plan.empty())
    throw EmptyDataset("no labeled scenarios");

  // most recent 10% by (t, flight_id) are the test set
  std::sort(plan.begin(), plan.end(),
            [&](const PlannedScenario& a, const PlannedScenario& b) {
              if (a.t != b.t)
                return a.t < b.t;
              return flights_[size_t(a.flight_idx)].info.flight_id <
                     flights_[size_t(b.flight_idx)].info.flight_id;
            });
  const size_t n = plan.size();
  const size_t n_test = n / 10;
  for (size_t j = n - n_test; j < n; ++j)
    plan[j].split = 2;

  // seeded 10% of the remainder for validation
  const size_t n_rem = n - n_test;
  const size_t n_val = n_rem / 10;
  Rng vr(mix64(seed, 0x76616c)); // "val"
  std::vector<size_t> order(n_rem);
  for (size_t j = 0; j < n_rem; ++j)
    order[j] = j;
  for (size_t j = 0; j < n_val; ++j) {
    size_t pick = j + size_t(vr.uniform_int(0, i64(n_rem - 1 - j)));
    std::swap(order[j], order[pick]);
  }
  for (size_t j = 0; j < n_val; ++j)
    plan[order[j]].split = 1;
  return plan;
}

void AirspaceStore::build_dataset(
    u64 seed,
    const std::function<void(const LabeledScenario&, int split)>& sink) const {
  auto plan = plan_dataset(seed);
  for (const auto& ps : plan) {
    LabeledScenario ls;
    ls.scenario = build_scenario(ps.flight_idx, ps.t, ps.template_id);
    ls.y = ps.y;
    sink(ls, ps.split);
  }
}

} // namespace tde
