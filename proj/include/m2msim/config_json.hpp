#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "m2msim/error.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"

namespace m2msim {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw SimError(Errc::PARSE_ERROR, "unknown field \"" + key + "\" in " + where);
  }
}

inline double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.contains(key)) throw SimError(Errc::PARSE_ERROR, "missing field \"" + key + "\" in " + where);
  if (!obj[key].is_number()) throw SimError(Errc::PARSE_ERROR, "field \"" + key + "\" in " + where + " must be a number");
  return obj[key].get<double>();
}

}  // namespace detail

inline SimConfig config_from_json(const nlohmann::json& j) {
  using detail::reject_unknown_keys;
  using detail::require_number;
  if (!j.is_object()) throw SimError(Errc::PARSE_ERROR, "config root must be an object");
  reject_unknown_keys(j, {"sensors", "service", "utility", "horizon", "seed", "replications"}, "config");

  SimConfig cfg;
  if (!j.contains("sensors") || !j["sensors"].is_array())
    throw SimError(Errc::PARSE_ERROR, "config requires a \"sensors\" array");
  for (std::size_t i = 0; i < j["sensors"].size(); ++i) {
    const auto& js = j["sensors"][i];
    const std::string where = "sensors[" + std::to_string(i) + "]";
    reject_unknown_keys(js, {"pu_period", "pu_phase", "ed_rate"}, where);
    SensorConfig s;
    s.pu_period = ms_to_ticks(require_number(js, "pu_period", where));
    s.pu_phase = js.contains("pu_phase") ? ms_to_ticks(require_number(js, "pu_phase", where)) : 0;
    s.ed_rate = require_number(js, "ed_rate", where);
    cfg.sensors.push_back(s);
  }

  if (!j.contains("service")) throw SimError(Errc::PARSE_ERROR, "config requires \"service\"");
  reject_unknown_keys(j["service"], {"mu", "s_pu", "s_ed"}, "service");
  cfg.service.mu = require_number(j["service"], "mu", "service");
  cfg.service.s_pu = require_number(j["service"], "s_pu", "service");
  cfg.service.s_ed = require_number(j["service"], "s_ed", "service");

  if (!j.contains("utility")) throw SimError(Errc::PARSE_ERROR, "config requires \"utility\"");
  reject_unknown_keys(j["utility"], {"l_d", "a", "b", "beta_pu", "beta_ed"}, "utility");
  cfg.utility.l_d = ms_to_ticks(require_number(j["utility"], "l_d", "utility"));
  cfg.utility.a = require_number(j["utility"], "a", "utility");
  cfg.utility.b = require_number(j["utility"], "b", "utility");
  cfg.utility.beta_pu = require_number(j["utility"], "beta_pu", "utility");
  cfg.utility.beta_ed = require_number(j["utility"], "beta_ed", "utility");

  cfg.horizon = ms_to_ticks(require_number(j, "horizon", "config"));
  if (!j.contains("seed") || !j["seed"].is_number_unsigned())
    throw SimError(Errc::PARSE_ERROR, "config requires an unsigned \"seed\"");
  cfg.seed = j["seed"].get<std::uint64_t>();
  cfg.replications =
      j.contains("replications") ? static_cast<int>(require_number(j, "replications", "config")) : 1;
  return cfg;
}

inline nlohmann::json config_to_json(const SimConfig& cfg) {
  nlohmann::json j;
  j["sensors"] = nlohmann::json::array();
  for (const auto& s : cfg.sensors) {
    j["sensors"].push_back({{"pu_period", ticks_to_ms(s.pu_period)},
                            {"pu_phase", ticks_to_ms(s.pu_phase)},
                            {"ed_rate", s.ed_rate}});
  }
  j["service"] = {{"mu", cfg.service.mu}, {"s_pu", cfg.service.s_pu}, {"s_ed", cfg.service.s_ed}};
  j["utility"] = {{"l_d", ticks_to_ms(cfg.utility.l_d)},
                  {"a", cfg.utility.a},
                  {"b", cfg.utility.b},
                  {"beta_pu", cfg.utility.beta_pu},
                  {"beta_ed", cfg.utility.beta_ed}};
  j["horizon"] = ticks_to_ms(cfg.horizon);
  j["seed"] = cfg.seed;
  j["replications"] = cfg.replications;
  return j;
}

inline SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError(Errc::IO_FAILURE, "cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SimError(Errc::PARSE_ERROR, "config JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

}  // namespace m2msim
