#include "tde/serialize.hpp"

#include <cmath>
#include <cstdio>

namespace tde {

using json = nlohmann::json;

namespace {

// row-major xyz, 5 decimals (about 1.2 m in scaled units); JSON has no NaN,
// so padding is stripped and only valid rows are stored per trajectory
json group_to_json(const TrajGroup& g) {
  json arr = json::array();
  for (int i = 0; i < g.n; ++i) {
    int len = g.valid_len(i);
    json traj;
    traj["id"] = g.ids[size_t(i)];
    traj["t0"] = g.first_ts[size_t(i)];
    json xyz = json::array();
    const double* p = g.traj(i);
    for (int j = 0; j < len * 3; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.5f", p[j]);
      xyz.push_back(std::stod(buf));
    }
    traj["xyz"] = std::move(xyz);
    arr.push_back(std::move(traj));
  }
  return arr;
}

TrajGroup group_from_json(const json& arr) {
  TrajGroup g;
  for (const auto& traj : arr) {
    std::vector<double> rows = traj.at("xyz").get<std::vector<double>>();
    if (rows.size() % 3 != 0)
      throw FormatError("trajectory xyz not a multiple of 3");
    g.add(traj.at("id").get<std::string>(), traj.at("t0").get<i64>(), rows);
  }
  g.finalize();
  return g;
}

} // namespace

json scenario_to_json(const LabeledScenario& ls) {
  const Scenario& s = ls.scenario;
  json j;
  j["flight_id"] = s.flight_id;
  j["t"] = s.t;
  j["prompt_fp"] = s.prompt_fp;
  j["prompt_wx"] = s.prompt_wx;
  j["prompt_no"] = s.prompt_no;
  j["notam_texts"] = s.notam_texts;
  j["template_id"] = s.template_id;
  j["focusing"] = group_to_json(s.groups.focusing);
  j["active"] = group_to_json(s.groups.active);
  j["prior"] = group_to_json(s.groups.prior);
  j["y"] = ls.y;
  return j;
}

LabeledScenario scenario_from_json(const json& j) {
  LabeledScenario ls;
  Scenario& s = ls.scenario;
  s.flight_id = j.at("flight_id").get<std::string>();
  s.t = j.at("t").get<i64>();
  s.prompt_fp = j.at("prompt_fp").get<std::string>();
  s.prompt_wx = j.at("prompt_wx").get<std::string>();
  s.prompt_no = j.at("prompt_no").get<std::string>();
  s.notam_texts = j.at("notam_texts").get<std::vector<std::string>>();
  s.template_id = j.at("template_id").get<int>();
  s.groups.focusing = group_from_json(j.at("focusing"));
  s.groups.active = group_from_json(j.at("active"));
  s.groups.prior = group_from_json(j.at("prior"));
  ls.y = j.at("y").get<double>();
  if (ls.y <= 0)
    throw FormatError("labeled scenario with non-positive duration");
  return ls;
}

} // namespace tde
