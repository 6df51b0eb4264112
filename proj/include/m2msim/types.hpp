#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "m2msim/error.hpp"
#include "m2msim/time.hpp"

namespace m2msim {

enum class PacketClass : std::uint8_t { PU, ED };

inline const char* to_string(PacketClass c) { return c == PacketClass::PU ? "pu" : "ed"; }

// One sensor's uplink behaviour: periodic updates with a fixed phase plus a
// Poisson stream of event-driven packets (rate in packets per ms).
struct SensorConfig {
  tick_t pu_period = 0;
  tick_t pu_phase = 0;
  double ed_rate = 0.0;
};

// Single server; per-class service rates derive from the per-bit rate and the
// fixed class packet sizes.
struct ServiceModel {
  double mu = 0.0;    // bits per ms
  double s_pu = 0.0;  // bits
  double s_ed = 0.0;  // bits

  double mu_pu() const { return mu / s_pu; }  // packets per ms
  double mu_ed() const { return mu / s_ed; }
};

struct UtilityParams {
  tick_t l_d = 0;       // hard latency deadline for PU packets
  double a = 0.0;       // sigmoid roll-off, per ms
  double b = 0.0;       // sigmoid midpoint, ms
  double beta_pu = 1.0;
  double beta_ed = 1.0;
};

enum class PolicyKind : std::uint8_t { FCFS, EDD, PRIORITY_PREEMPTIVE, PROPOSED };
enum class PriorityClass : std::uint8_t { PU_HIGH, ED_HIGH };

// Due-date rule for ED packets under EDD. The default places the due date at
// the sigmoid midpoint b; UNBOUNDED means ED is only served when no PU waits.
struct EddDueOffset {
  enum class Mode : std::uint8_t { SIGMOID_MIDPOINT, EXPLICIT, UNBOUNDED };
  Mode mode = Mode::SIGMOID_MIDPOINT;
  tick_t offset = 0;  // EXPLICIT only

  static EddDueOffset unbounded() { return {Mode::UNBOUNDED, 0}; }
  static EddDueOffset explicit_ms(double ms) { return {Mode::EXPLICIT, ms_to_ticks(ms)}; }

  tick_t resolve(const UtilityParams& u) const {
    switch (mode) {
      case Mode::SIGMOID_MIDPOINT: return ms_to_ticks(u.b);
      case Mode::EXPLICIT: return offset;
      case Mode::UNBOUNDED: return kNever;
    }
    return kNever;
  }
};

struct PolicySpec {
  PolicyKind kind = PolicyKind::FCFS;
  tick_t lt = 0;              // PROPOSED only; engine accepts 0 as the limit case
  bool drop_expired = false;  // PROPOSED only
  PriorityClass priority_class = PriorityClass::PU_HIGH;  // PRIORITY_PREEMPTIVE only
  EddDueOffset edd_ed_due_offset;                         // EDD only

  static PolicySpec fcfs() { return {PolicyKind::FCFS}; }
  static PolicySpec edd(EddDueOffset due = {}) {
    PolicySpec p{PolicyKind::EDD};
    p.edd_ed_due_offset = due;
    return p;
  }
  static PolicySpec priority(PriorityClass cls = PriorityClass::PU_HIGH) {
    PolicySpec p{PolicyKind::PRIORITY_PREEMPTIVE};
    p.priority_class = cls;
    return p;
  }
  static PolicySpec proposed(tick_t lt, bool drop = false) {
    PolicySpec p{PolicyKind::PROPOSED};
    p.lt = lt;
    p.drop_expired = drop;
    return p;
  }

  std::string label() const {
    switch (kind) {
      case PolicyKind::FCFS: return "fcfs";
      case PolicyKind::EDD: return "edd";
      case PolicyKind::PRIORITY_PREEMPTIVE:
        return priority_class == PriorityClass::PU_HIGH ? "priority_pu" : "priority_ed";
      case PolicyKind::PROPOSED: return drop_expired ? "proposed_drop" : "proposed";
    }
    return "unknown";
  }
};

struct SimConfig {
  std::vector<SensorConfig> sensors;
  ServiceModel service;
  UtilityParams utility;
  tick_t horizon = 0;
  std::uint64_t seed = 0;
  int replications = 1;

  double lambda_pu() const {
    double sum = 0.0;
    for (const auto& s : sensors) sum += 1.0 / ticks_to_ms(s.pu_period);
    return sum;
  }
  double lambda_ed() const {
    double sum = 0.0;
    for (const auto& s : sensors) sum += s.ed_rate;
    return sum;
  }
};

struct PacketRecord {
  PacketClass cls = PacketClass::PU;
  tick_t arrival = 0;
  tick_t service = 0;  // total demand, not residual
  tick_t completion = kPending;
  bool dropped = false;
};

struct ValidationIssue {
  Errc code;
  std::string field;
  std::string message;
};

inline std::vector<ValidationIssue> validate_config(const SimConfig& cfg) {
  std::vector<ValidationIssue> issues;
  auto fail = [&](Errc c, const std::string& field, const std::string& msg) {
    issues.push_back({c, field, msg});
  };

  if (cfg.sensors.empty()) fail(Errc::EMPTY_SENSOR_SET, "sensors", "at least one sensor required");
  for (std::size_t i = 0; i < cfg.sensors.size(); ++i) {
    const auto& s = cfg.sensors[i];
    const std::string at = "sensors[" + std::to_string(i) + "]";
    if (s.pu_period <= 0) fail(Errc::NON_POSITIVE_PERIOD, at + ".pu_period", "pu_period must be > 0");
    if (s.pu_phase < 0) fail(Errc::NON_POSITIVE_VALUE, at + ".pu_phase", "pu_phase must be >= 0");
    if (s.pu_period > 0 && s.pu_phase >= s.pu_period)
      fail(Errc::PHASE_GE_PERIOD, at + ".pu_phase", "pu_phase must be < pu_period");
    if (!std::isfinite(s.ed_rate)) fail(Errc::NON_FINITE_VALUE, at + ".ed_rate", "ed_rate must be finite");
    else if (s.ed_rate < 0.0) fail(Errc::NEGATIVE_RATE, at + ".ed_rate", "ed_rate must be >= 0");
  }

  if (!(cfg.service.mu > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "service.mu", "mu must be > 0");
  if (!(cfg.service.s_pu > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "service.s_pu", "s_pu must be > 0");
  if (!(cfg.service.s_ed > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "service.s_ed", "s_ed must be > 0");

  if (cfg.utility.l_d <= 0) fail(Errc::NON_POSITIVE_VALUE, "utility.l_d", "l_d must be > 0");
  if (!(cfg.utility.a > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "utility.a", "a must be > 0");
  if (!(cfg.utility.b > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "utility.b", "b must be > 0");
  if (!(cfg.utility.beta_pu > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "utility.beta_pu", "beta_pu must be > 0");
  if (!(cfg.utility.beta_ed > 0.0)) fail(Errc::NON_POSITIVE_VALUE, "utility.beta_ed", "beta_ed must be > 0");

  if (cfg.horizon <= 0) fail(Errc::NON_POSITIVE_VALUE, "horizon", "horizon must be > 0");
  if (cfg.replications < 1) fail(Errc::NON_POSITIVE_VALUE, "replications", "replications must be >= 1");
  return issues;
}

// The threshold must sit strictly inside (0, l_d). Checked separately from
// SimConfig because policies arrive via CLI flags, not the config document.
inline std::vector<ValidationIssue> validate_policy(const PolicySpec& policy,
                                                    const UtilityParams& utility) {
  std::vector<ValidationIssue> issues;
  if (policy.kind == PolicyKind::PROPOSED) {
    if (policy.lt <= 0 || policy.lt >= utility.l_d)
      issues.push_back({Errc::LT_OUT_OF_RANGE, "policy.lt",
                        "lt must satisfy 0 < lt < l_d (lt=" + format_ms(policy.lt) +
                            " ms, l_d=" + format_ms(utility.l_d) + " ms)"});
  }
  if (policy.kind == PolicyKind::EDD && policy.edd_ed_due_offset.mode == EddDueOffset::Mode::EXPLICIT &&
      policy.edd_ed_due_offset.offset < 0)
    issues.push_back({Errc::NON_POSITIVE_VALUE, "policy.edd_ed_due_offset", "due offset must be >= 0"});
  return issues;
}

inline void throw_if_invalid(const std::vector<ValidationIssue>& issues) {
  if (issues.empty()) return;
  std::string what;
  for (const auto& i : issues) {
    if (!what.empty()) what += "; ";
    what += std::string(errc_name(i.code)) + " at " + i.field + " (" + i.message + ")";
  }
  throw SimError(issues.front().code, what);
}

// N sensors sharing one period and ED rate, phases spread evenly over the
// period: phase_i = i * period / n. Pass synchronized=true for the all-zeros
// batch-arrival variant.
inline std::vector<SensorConfig> staggered_sensors(std::size_t n, tick_t period, double ed_rate,
                                                   bool synchronized = false) {
  std::vector<SensorConfig> sensors(n);
  for (std::size_t i = 0; i < n; ++i) {
    sensors[i].pu_period = period;
    sensors[i].pu_phase = synchronized ? 0 : static_cast<tick_t>(i) * period / static_cast<tick_t>(n);
    sensors[i].ed_rate = ed_rate;
  }
  return sensors;
}

}  // namespace m2msim
