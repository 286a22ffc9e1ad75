#pragma once

#include <array>
#include <string>
#include <vector>

#include "tde/types.hpp"

namespace tde {

// Flight-information prompt templates. Template 0 follows the published
// format; the other nine are rephrasings over the same placeholder set.
struct PromptTemplates {
  std::vector<std::string> patterns; // exactly 10

  static const PromptTemplates& builtin();
  static PromptTemplates load_dir(const std::string& dir);
};

std::string render_flight_prompt(const FlightInfo& f, int template_id,
                                 const PromptTemplates& templates =
                                     PromptTemplates::builtin());

// `METAR in effect: ...\nTAF in effect: ...`; stale or missing components
// render as `unavailable`.
std::string render_weather_prompt(const WeatherRecord* metar, bool metar_stale,
                                  const WeatherRecord* taf, bool taf_stale);

// `Active NOTAMs: ` + raw texts joined by single spaces; `none` when empty.
std::string render_notam_prompt(const std::vector<std::string>& notam_texts);

// The four static trajectory-guiding prompts, in insertion order.
const std::array<std::string, 4>& static_guiding_prompts();

// fp \n wx \n no
std::string combine_prompts(const std::string& fp, const std::string& wx,
                            const std::string& no);

std::string format_fixed(double v, int decimals);

} // namespace tde
