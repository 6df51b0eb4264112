#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "m2msim/engine.hpp"
#include "m2msim/error.hpp"
#include "m2msim/oracle.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/workload.hpp"

namespace m2msim {

// A hand-derived scheduling scenario: a tiny trace, the policy, and the exact
// expected completion log.
struct Fixture {
  std::string name;
  PolicySpec policy;
  UtilityParams utility;
  ServiceModel service;
  Trace trace;
  std::vector<PacketRecord> expected;
};

inline Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SimError(Errc::IO_FAILURE, "cannot open fixture " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SimError(Errc::PARSE_ERROR, path + ": " + e.what());
  }

  Fixture f;
  f.name = j.at("name").get<std::string>();

  const auto& jp = j.at("policy");
  const std::string kind = jp.at("kind").get<std::string>();
  if (kind == "fcfs") f.policy = PolicySpec::fcfs();
  else if (kind == "edd") f.policy = PolicySpec::edd();
  else if (kind == "priority_pu") f.policy = PolicySpec::priority(PriorityClass::PU_HIGH);
  else if (kind == "priority_ed") f.policy = PolicySpec::priority(PriorityClass::ED_HIGH);
  else if (kind == "proposed")
    f.policy = PolicySpec::proposed(ms_to_ticks(jp.at("lt_ms").get<double>()),
                                    jp.value("drop_expired", false));
  else throw SimError(Errc::PARSE_ERROR, path + ": unknown policy kind " + kind);

  const auto& ju = j.at("utility");
  f.utility.l_d = ms_to_ticks(ju.at("l_d").get<double>());
  f.utility.a = ju.at("a").get<double>();
  f.utility.b = ju.at("b").get<double>();
  f.utility.beta_pu = ju.value("beta_pu", 1.0);
  f.utility.beta_ed = ju.value("beta_ed", 1.0);

  const auto& js = j.at("service");
  f.service.mu = js.at("mu").get<double>();
  f.service.s_pu = js.at("s_pu").get<double>();
  f.service.s_ed = js.at("s_ed").get<double>();

  for (const auto& row : j.at("pu")) {
    f.trace.pu_arrivals.push_back(ms_to_ticks(row.at(0).get<double>()));
    f.trace.pu_services.push_back(ms_to_ticks(row.at(1).get<double>()));
  }
  for (const auto& row : j.at("ed")) {
    f.trace.ed_arrivals.push_back(ms_to_ticks(row.at(0).get<double>()));
    f.trace.ed_services.push_back(ms_to_ticks(row.at(1).get<double>()));
  }
  check_trace(f.trace);

  // expected rows: [class, arrival_ms, service_ms, completion_ms, dropped]
  for (const auto& row : j.at("expected")) {
    PacketRecord r;
    const std::string cls = row.at(0).get<std::string>();
    if (cls != "pu" && cls != "ed") throw SimError(Errc::PARSE_ERROR, path + ": bad class");
    r.cls = cls == "pu" ? PacketClass::PU : PacketClass::ED;
    r.arrival = ms_to_ticks(row.at(1).get<double>());
    r.service = ms_to_ticks(row.at(2).get<double>());
    r.completion = ms_to_ticks(row.at(3).get<double>());
    r.dropped = row.at(4).get<int>() != 0;
    f.expected.push_back(r);
  }
  if (f.expected.size() != f.trace.total())
    throw SimError(Errc::PARSE_ERROR, path + ": expected rows != trace packets");
  return f;
}

inline std::vector<Fixture> load_fixture_dir(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Fixture> fixtures;
  for (const auto& p : paths) fixtures.push_back(load_fixture(p));
  return fixtures;
}

struct FixtureRunResult {
  std::string name;
  bool pass = true;
  std::string detail;
};

// Runs one fixture three ways: engine vs stored expectation, and (for the
// threshold policy) engine vs the independent reference interpreter.
inline FixtureRunResult run_fixture(const Fixture& f) {
  FixtureRunResult res;
  res.name = f.name;
  const CompletionLog log = run(f.trace, f.policy, f.service, f.utility);
  const auto vs_expected = oracle::check_against_fixture(log, f.expected);
  if (!vs_expected.pass) {
    res.pass = false;
    res.detail = "engine vs stored: " + vs_expected.divergence;
    return res;
  }
  if (f.policy.kind == PolicyKind::PROPOSED) {
    const CompletionLog ref =
        oracle::reference_threshold_run(f.trace, f.policy.lt, f.utility.l_d, f.policy.drop_expired);
    const auto vs_ref = oracle::check_against_fixture(ref, f.expected);
    if (!vs_ref.pass) {
      res.pass = false;
      res.detail = "reference interpreter vs stored: " + vs_ref.divergence;
      return res;
    }
  }
  return res;
}

}  // namespace m2msim
