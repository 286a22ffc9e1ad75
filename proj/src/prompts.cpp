#include "tde/prompts.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "tde/timeparse.hpp"

namespace tde {

namespace {

const char* kTemplates[10] = {
    // the published example format
    "Scheduled for arrival at {sched_time_utc} UTC on {date} ({day_of_week}), "
    "flight {callsign_code_iata}/{callsign_code_icao} by "
    "{airline_name_english} was set to land at {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft). The aircraft originated from "
    "{dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, "
    "lon: {dep_lon}, alt: {dep_altitude} ft), and the total route spanned "
    "{distance} km. The aircraft was a {aircraft_type} with registration "
    "{aircraft_registration}, and it belonged to the {wake_turbulence_cat} "
    "wake turbulence category. It was expected to enter airspace or appear "
    "via ADS-B at {actual_entry_time}. This was a {haul}-haul flight.",

    "Flight {callsign_code_iata}/{callsign_code_icao}, operated by "
    "{airline_name_english}, was a {haul}-haul service due to arrive at "
    "{sched_time_utc} UTC on {date} ({day_of_week}). Destination: "
    "{dest_name_english} ({dest_code_iata}/{dest_code_icao}, lat: "
    "{dest_lat}, lon: {dest_lon}, alt: {dest_altitude} ft). Origin: "
    "{dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, "
    "lon: {dep_lon}, alt: {dep_altitude} ft). Route length {distance} km. "
    "Aircraft {aircraft_type}, registration {aircraft_registration}, wake "
    "turbulence category {wake_turbulence_cat}. First ADS-B appearance in "
    "the airspace was expected at {actual_entry_time}.",

    "{airline_name_english} flight {callsign_code_iata} (ICAO "
    "{callsign_code_icao}) departed {dep_name_english} "
    "({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, lon: {dep_lon}, alt: "
    "{dep_altitude} ft) bound for {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft), a {haul}-haul route of {distance} km. "
    "Scheduled arrival: {sched_time_utc} UTC, {date} ({day_of_week}). The "
    "{aircraft_type} with registration {aircraft_registration} belongs to "
    "the {wake_turbulence_cat} wake turbulence category and was expected in "
    "the airspace at {actual_entry_time}.",

    "On {date} ({day_of_week}) the {haul}-haul flight "
    "{callsign_code_iata}/{callsign_code_icao} of {airline_name_english} "
    "was scheduled to arrive at {sched_time_utc} UTC at {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft) from {dep_name_english} "
    "({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, lon: {dep_lon}, alt: "
    "{dep_altitude} ft) over a {distance} km route. Equipment: "
    "{aircraft_type}, registration {aircraft_registration}, wake category "
    "{wake_turbulence_cat}. Expected airspace entry via ADS-B: "
    "{actual_entry_time}.",

    "Arrival record: flight {callsign_code_iata}/{callsign_code_icao} "
    "({airline_name_english}), {haul}-haul, {distance} km from "
    "{dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, "
    "lon: {dep_lon}, alt: {dep_altitude} ft) to {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft). Scheduled {sched_time_utc} UTC on {date} "
    "({day_of_week}); airspace entry expected {actual_entry_time}. Aircraft "
    "type {aircraft_type}, registration {aircraft_registration}, "
    "{wake_turbulence_cat} wake turbulence category.",

    "The {aircraft_type} registered {aircraft_registration} "
    "({wake_turbulence_cat} wake turbulence category) operated flight "
    "{callsign_code_iata}/{callsign_code_icao} for {airline_name_english}. "
    "It left {dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: "
    "{dep_lat}, lon: {dep_lon}, alt: {dep_altitude} ft) and was set to land "
    "at {dest_name_english} ({dest_code_iata}/{dest_code_icao}, lat: "
    "{dest_lat}, lon: {dest_lon}, alt: {dest_altitude} ft) at "
    "{sched_time_utc} UTC on {date} ({day_of_week}). The {haul}-haul route "
    "spanned {distance} km; expected airspace appearance "
    "{actual_entry_time}.",

    "Inbound to {dest_name_english} ({dest_code_iata}/{dest_code_icao}, "
    "lat: {dest_lat}, lon: {dest_lon}, alt: {dest_altitude} ft): flight "
    "{callsign_code_iata}/{callsign_code_icao} by {airline_name_english}, "
    "scheduled {sched_time_utc} UTC, {date} ({day_of_week}). Departure "
    "airport {dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: "
    "{dep_lat}, lon: {dep_lon}, alt: {dep_altitude} ft); {haul}-haul, "
    "{distance} km. Expected ADS-B airspace entry {actual_entry_time}. "
    "Aircraft: {aircraft_type} / {aircraft_registration}, wake turbulence "
    "{wake_turbulence_cat}.",

    "Flight summary. Callsign: {callsign_code_iata}/{callsign_code_icao}. "
    "Airline: {airline_name_english}. Haul: {haul}. From: "
    "{dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, "
    "lon: {dep_lon}, alt: {dep_altitude} ft). To: {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft). Distance: {distance} km. Scheduled arrival: "
    "{sched_time_utc} UTC on {date} ({day_of_week}). Expected airspace "
    "entry: {actual_entry_time}. Aircraft: {aircraft_type}, registration "
    "{aircraft_registration}, wake turbulence category "
    "{wake_turbulence_cat}.",

    "Expected in the airspace at {actual_entry_time}, the {haul}-haul "
    "flight {callsign_code_iata}/{callsign_code_icao} "
    "({airline_name_english}) was scheduled to reach {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft) at {sched_time_utc} UTC on {date} "
    "({day_of_week}) after a {distance} km journey from {dep_name_english} "
    "({dep_code_iata}/{dep_code_icao}, lat: {dep_lat}, lon: {dep_lon}, alt: "
    "{dep_altitude} ft). It was flown by a {aircraft_type}, registration "
    "{aircraft_registration}, in the {wake_turbulence_cat} wake turbulence "
    "category.",

    "{airline_name_english} scheduled flight "
    "{callsign_code_iata}/{callsign_code_icao} to arrive {sched_time_utc} "
    "UTC on {date} ({day_of_week}) at {dest_name_english} "
    "({dest_code_iata}/{dest_code_icao}, lat: {dest_lat}, lon: {dest_lon}, "
    "alt: {dest_altitude} ft). The {haul}-haul leg of {distance} km began "
    "at {dep_name_english} ({dep_code_iata}/{dep_code_icao}, lat: "
    "{dep_lat}, lon: {dep_lon}, alt: {dep_altitude} ft). The aircraft, a "
    "{aircraft_type} registered {aircraft_registration} in the "
    "{wake_turbulence_cat} wake turbulence category, was expected to "
    "appear via ADS-B at {actual_entry_time}.",
};

const std::array<std::string, 4> kStaticPrompts = {
    "Airspace is described using three trajectory types. This embedding is "
    "for the focus trajectory: {",
    "} These embeddings are for other active trajectories: {",
    "} These embeddings are for past or inactive trajectories that may still "
    "matter:{",
    "} Missing types will have no embedding. Based on the above, predict the "
    "total time spent in the airspace.",
};

std::string field_value(const FlightInfo& f, const std::string& key) {
  if (key == "airline_name_english")
    return f.airline_name_english;
  if (key == "callsign_code_iata")
    return f.callsign_code_iata;
  if (key == "callsign_code_icao")
    return f.callsign_code_icao;
  if (key == "haul")
    return to_string(f.haul);
  if (key == "dep_code_iata")
    return f.dep_code_iata;
  if (key == "dep_code_icao")
    return f.dep_code_icao;
  if (key == "dep_name_english")
    return f.dep_name_english;
  if (key == "dep_lat")
    return format_fixed(f.dep_lat, 4);
  if (key == "dep_lon")
    return format_fixed(f.dep_lon, 4);
  if (key == "dep_altitude")
    return format_fixed(f.dep_altitude, 0);
  if (key == "dest_code_iata")
    return f.dest_code_iata;
  if (key == "dest_code_icao")
    return f.dest_code_icao;
  if (key == "dest_name_english")
    return f.dest_name_english;
  if (key == "dest_lat")
    return format_fixed(f.dest_lat, 4);
  if (key == "dest_lon")
    return format_fixed(f.dest_lon, 4);
  if (key == "dest_altitude")
    return format_fixed(f.dest_altitude, 0);
  if (key == "distance")
    return format_fixed(f.distance_km, 1);
  if (key == "actual_entry_time")
    return format_iso8601(f.actual_entry_time);
  if (key == "sched_time_utc")
    return format_hhmm(f.sched_time_utc);
  if (key == "date")
    return format_date(f.date);
  if (key == "day_of_week")
    return f.day_of_week;
  if (key == "aircraft_type")
    return f.aircraft_type;
  if (key == "aircraft_registration")
    return f.aircraft_registration;
  if (key == "wake_turbulence_cat")
    return to_string(f.wake_turbulence_cat);
  throw TemplateError("unresolved placeholder: {" + key + "}");
}

} // namespace

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

const PromptTemplates& PromptTemplates::builtin() {
  static PromptTemplates t = [] {
    PromptTemplates p;
    for (const char* s : kTemplates)
      p.patterns.emplace_back(s);
    return p;
  }();
  return t;
}

PromptTemplates PromptTemplates::load_dir(const std::string& dir) {
  PromptTemplates t;
  for (int i = 0; i < 10; ++i) {
    std::filesystem::path path =
        std::filesystem::path(dir) / ("template_" + std::to_string(i) + ".txt");
    std::ifstream in(path);
    if (!in)
      throw TemplateError("missing template file: " + path.string());
    std::string s((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r'))
      s.pop_back();
    t.patterns.push_back(s);
  }
  return t;
}

std::string render_flight_prompt(const FlightInfo& f, int template_id,
                                 const PromptTemplates& templates) {
  if (template_id < 0 || size_t(template_id) >= templates.patterns.size())
    throw TemplateError("template id out of range: " +
                        std::to_string(template_id));
  const std::string& pat = templates.patterns[size_t(template_id)];
  std::string out;
  out.reserve(pat.size() + 128);
  size_t i = 0;
  while (i < pat.size()) {
    char c = pat[i];
    if (c == '{') {
      size_t close = pat.find('}', i + 1);
      if (close == std::string::npos)
        throw TemplateError("unterminated placeholder in template " +
                            std::to_string(template_id));
      out += field_value(f, pat.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      out.push_back(c);
      ++i;
    }
  }
  return out;
}

std::string render_weather_prompt(const WeatherRecord* metar, bool metar_stale,
                                  const WeatherRecord* taf, bool taf_stale) {
  std::string m = (metar && !metar_stale) ? metar->raw_text : "unavailable";
  std::string t = (taf && !taf_stale) ? taf->raw_text : "unavailable";
  return "METAR in effect: " + m + "\nTAF in effect: " + t;
}

std::string render_notam_prompt(const std::vector<std::string>& notam_texts) {
  if (notam_texts.empty())
    return "Active NOTAMs: none";
  std::string out = "Active NOTAMs: ";
  for (size_t i = 0; i < notam_texts.size(); ++i) {
    if (i)
      out += ' ';
    out += notam_texts[i];
  }
  return out;
}

const std::array<std::string, 4>& static_guiding_prompts() {
  return kStaticPrompts;
}

std::string combine_prompts(const std::string& fp, const std::string& wx,
                            const std::string& no) {
  return fp + "\n" + wx + "\n" + no;
}

} // namespace tde
