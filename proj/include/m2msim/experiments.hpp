#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "m2msim/config_json.hpp"
#include "m2msim/engine.hpp"
#include "m2msim/error.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/workload.hpp"

namespace m2msim {

enum class SweepAxis : std::uint8_t { LT, PARAM_A, NUM_SENSORS, ED_RATE };

struct SweepSpec {
  SimConfig base;
  SweepAxis axis = SweepAxis::LT;
  std::vector<double> grid;  // LT/ED_RATE in per-ms units, PARAM_A per ms, NUM_SENSORS counts
  std::vector<PolicySpec> policies;
  int replications = 20;
  // Grid used to re-derive the optimal lt per grid point on non-LT axes.
  // Empty means 0.25 ms steps over (0, l_d).
  std::vector<double> lt_opt_grid;
};

struct SweepRow {
  double axis_value = 0.0;
  std::string policy;
  double v_mean = 0.0;
  double v_stderr = 0.0;
  double u_pu = 0.0;
  double u_ed = 0.0;
  double drop_frac = 0.0;
};

struct LutEntry {
  std::uint64_t fingerprint = 0;
  double lt_ms = 0.0;
  double v = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<LutEntry> lut_entry;
};

// Stable identity of a configuration up to its seed; keys the lt lookup table.
inline std::uint64_t config_fingerprint(const SimConfig& cfg) {
  nlohmann::json j = config_to_json(cfg);
  j.erase("seed");
  const std::string bytes = j.dump();
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

namespace detail {

struct RepAccumulator {
  std::vector<double> v;
  double u_pu_sum = 0.0;
  double u_ed_sum = 0.0;
  double drop_sum = 0.0;

  void add(const UtilityOutcome& o, double drop_frac) {
    v.push_back(o.system_v);
    u_pu_sum += o.mean_pu;
    u_ed_sum += o.mean_ed;
    drop_sum += drop_frac;
  }

  double mean() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  double stderr_of_mean() const {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    const double m = mean();
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
  }

  SweepRow row(double axis_value, const std::string& label) const {
    const auto n = static_cast<double>(v.size());
    return {axis_value, label, mean(), stderr_of_mean(), u_pu_sum / n, u_ed_sum / n, drop_sum / n};
  }
};

inline std::pair<UtilityOutcome, double> evaluate_with_drop_frac(const Trace& trace,
                                                                 const PolicySpec& policy,
                                                                 const ServiceModel& service,
                                                                 const UtilityParams& params) {
  const CompletionLog log = run(trace, policy, service, params);
  const auto [pu, ed] = compute_latencies(log);
  std::size_t drops = 0;
  for (const auto& r : log.records) drops += r.dropped ? 1 : 0;
  const double frac =
      trace.pu_count() == 0 ? 0.0 : static_cast<double>(drops) / static_cast<double>(trace.pu_count());
  return {make_outcome(pu, ed, params), frac};
}

inline std::vector<double> default_lt_grid(const UtilityParams& u) {
  std::vector<double> grid;
  const double ld_ms = ticks_to_ms(u.l_d);
  for (double lt = 0.25; lt < ld_ms - 1e-12; lt += 0.25) grid.push_back(lt);
  return grid;
}

inline void check_grid(const SweepSpec& spec) {
  if (spec.grid.empty()) throw SimError(Errc::NON_POSITIVE_VALUE, "sweep grid must be non-empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i)
    if (!(spec.grid[i] > spec.grid[i - 1]))
      throw SimError(Errc::NON_POSITIVE_VALUE, "sweep grid must be strictly increasing");
  if (spec.replications < 1) throw SimError(Errc::NON_POSITIVE_VALUE, "replications must be >= 1");
}

inline SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig cfg = base;
  switch (axis) {
    case SweepAxis::PARAM_A:
      cfg.utility.a = value;
      break;
    case SweepAxis::NUM_SENSORS: {
      // N copies of the first sensor, phases re-staggered over its period
      const auto n = static_cast<std::size_t>(std::llround(value));
      const SensorConfig tpl = base.sensors.front();
      cfg.sensors = staggered_sensors(n, tpl.pu_period, tpl.ed_rate);
      break;
    }
    case SweepAxis::ED_RATE:
      for (auto& s : cfg.sensors) s.ed_rate = value;
      break;
    case SweepAxis::LT:
      break;  // policy parameter, not a config change
  }
  return cfg;
}

// Mean V per lt over the shared traces; returns (row accumulators, argmax).
// Paired comparison: every lt sees the identical traces.
inline std::pair<std::vector<RepAccumulator>, std::size_t> lt_profile(
    const std::vector<Trace>& traces, const std::vector<double>& lt_grid, bool drop,
    const ServiceModel& service, const UtilityParams& params) {
  std::vector<RepAccumulator> acc(lt_grid.size());
  for (const auto& trace : traces) {
    for (std::size_t i = 0; i < lt_grid.size(); ++i) {
      const auto [outcome, frac] = evaluate_with_drop_frac(
          trace, PolicySpec::proposed(ms_to_ticks(lt_grid[i]), drop), service, params);
      acc[i].add(outcome, frac);
    }
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < lt_grid.size(); ++i)
    if (acc[i].mean() > acc[best].mean()) best = i;
  return {std::move(acc), best};
}

}  // namespace detail

// V as a function of the threshold, on the base configuration. Emits the
// argmax as a LUT entry keyed by the config fingerprint.
inline SweepResult sweep_lt(const SweepSpec& spec) {
  detail::check_grid(spec);
  const double ld_ms = ticks_to_ms(spec.base.utility.l_d);
  for (double lt : spec.grid)
    if (!(lt > 0.0 && lt < ld_ms))
      throw SimError(Errc::LT_OUT_OF_RANGE, "lt grid must lie inside (0, l_d)");
  bool drop = false;
  for (const auto& p : spec.policies)
    if (p.kind == PolicyKind::PROPOSED) drop = p.drop_expired;

  std::vector<Trace> traces;
  traces.reserve(spec.replications);
  for (int rep = 0; rep < spec.replications; ++rep)
    traces.push_back(build_trace(spec.base, static_cast<std::uint64_t>(rep)));

  const auto [acc, best] =
      detail::lt_profile(traces, spec.grid, drop, spec.base.service, spec.base.utility);

  SweepResult result;
  const std::string label = PolicySpec::proposed(0, drop).label();
  for (std::size_t i = 0; i < spec.grid.size(); ++i)
    result.rows.push_back(acc[i].row(spec.grid[i], label));
  result.lut_entry = LutEntry{config_fingerprint(spec.base), spec.grid[best], acc[best].mean()};
  return result;
}

namespace detail {

// Shared machinery for the non-LT axes: per grid point, re-derive the optimal
// lt for each PROPOSED variant by grid search, then evaluate every policy on
// the common traces.
inline SweepResult sweep_over(const SweepSpec& spec, SweepAxis axis) {
  check_grid(spec);
  if (spec.base.sensors.empty()) throw SimError(Errc::EMPTY_SENSOR_SET, "base config has no sensors");
  const std::vector<double> lt_grid =
      spec.lt_opt_grid.empty() ? default_lt_grid(spec.base.utility) : spec.lt_opt_grid;

  SweepResult result;
  for (double value : spec.grid) {
    const SimConfig cfg = apply_axis(spec.base, axis, value);
    std::vector<Trace> traces;
    traces.reserve(spec.replications);
    for (int rep = 0; rep < spec.replications; ++rep)
      traces.push_back(build_trace(cfg, static_cast<std::uint64_t>(rep)));

    for (const auto& policy : spec.policies) {
      if (policy.kind == PolicyKind::PROPOSED) {
        const auto [acc, best] =
            lt_profile(traces, lt_grid, policy.drop_expired, cfg.service, cfg.utility);
        result.rows.push_back(acc[best].row(value, policy.label()));
      } else {
        RepAccumulator acc;
        for (const auto& trace : traces) {
          const auto [outcome, frac] =
              evaluate_with_drop_frac(trace, policy, cfg.service, cfg.utility);
          acc.add(outcome, frac);
        }
        result.rows.push_back(acc.row(value, policy.label()));
      }
    }
  }
  std::stable_sort(result.rows.begin(), result.rows.end(), [](const SweepRow& x, const SweepRow& y) {
    if (x.axis_value != y.axis_value) return x.axis_value < y.axis_value;
    return x.policy < y.policy;
  });
  return result;
}

}  // namespace detail

inline SweepResult sweep_param_a(const SweepSpec& spec) {
  return detail::sweep_over(spec, SweepAxis::PARAM_A);
}

inline SweepResult sweep_n(const SweepSpec& spec) {
  return detail::sweep_over(spec, SweepAxis::NUM_SENSORS);
}

inline SweepResult sweep_ed_rate(const SweepSpec& spec) {
  return detail::sweep_over(spec, SweepAxis::ED_RATE);
}

inline void write_sweep_csv(const SweepResult& result, std::ostream& os) {
  os << "axis,policy,v_mean,v_stderr,u_pu,u_ed,drop_frac\n";
  char buf[160];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof(buf), "%.9f,%s,%.9f,%.9f,%.9f,%.9f,%.9f\n", r.axis_value,
                  r.policy.c_str(), r.v_mean, r.v_stderr, r.u_pu, r.u_ed, r.drop_frac);
    os << buf;
  }
}

inline void emit_csv(const SweepResult& result, const std::string& destination) {
  std::ofstream out(destination, std::ios::binary);
  if (!out) throw SimError(Errc::IO_FAILURE, "cannot open " + destination);
  write_sweep_csv(result, out);
  if (!out) throw SimError(Errc::IO_FAILURE, "write failed for " + destination);
}

}  // namespace m2msim
