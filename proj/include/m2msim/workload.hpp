#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "m2msim/error.hpp"
#include "m2msim/rng.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"

namespace m2msim {

// One replication's input arrays: per-class arrival instants and total
// service demands, index-aligned. Arrival sequences are non-decreasing.
struct Trace {
  std::vector<tick_t> pu_arrivals;
  std::vector<tick_t> pu_services;
  std::vector<tick_t> ed_arrivals;
  std::vector<tick_t> ed_services;
  std::uint64_t seed = 0;
  std::string rng_algorithm = kRngAlgorithm;

  std::size_t pu_count() const { return pu_arrivals.size(); }
  std::size_t ed_count() const { return ed_arrivals.size(); }
  std::size_t total() const { return pu_count() + ed_count(); }
};

inline void check_trace(const Trace& t) {
  if (t.pu_arrivals.size() != t.pu_services.size() || t.ed_arrivals.size() != t.ed_services.size())
    throw SimError(Errc::MALFORMED_TRACE, "arrival/service length mismatch");
  if (!std::is_sorted(t.pu_arrivals.begin(), t.pu_arrivals.end()) ||
      !std::is_sorted(t.ed_arrivals.begin(), t.ed_arrivals.end()))
    throw SimError(Errc::MALFORMED_TRACE, "arrivals not sorted");
  for (tick_t s : t.pu_services)
    if (s <= 0) throw SimError(Errc::MALFORMED_TRACE, "non-positive pu service time");
  for (tick_t s : t.ed_services)
    if (s <= 0) throw SimError(Errc::MALFORMED_TRACE, "non-positive ed service time");
}

// All periodic instants phase_i + k*period_i inside [0, horizon), merged and
// sorted. Coincident arrivals from different sensors stay as duplicates.
inline std::vector<tick_t> gen_pu_arrivals(const std::vector<SensorConfig>& sensors, tick_t horizon) {
  std::vector<tick_t> out;
  for (const auto& s : sensors) {
    for (tick_t t = s.pu_phase; t < horizon; t += s.pu_period) out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Superposed Poisson arrivals at `total_rate` (per ms) on [0, horizon).
inline std::vector<tick_t> gen_ed_arrivals(double total_rate, tick_t horizon, Xoshiro256pp& rng) {
  std::vector<tick_t> out;
  if (total_rate <= 0.0) return out;
  double t_ms = 0.0;
  const double horizon_ms = ticks_to_ms(horizon);
  for (;;) {
    t_ms += rng.exponential(total_rate);
    if (t_ms >= horizon_ms) break;
    out.push_back(ms_to_ticks(t_ms));
  }
  return out;
}

// n i.i.d. exponential service demands with mean 1/rate ms, clamped to at
// least one tick so demands stay strictly positive after quantization.
inline std::vector<tick_t> sample_service_times(double rate, std::size_t n, Xoshiro256pp& rng) {
  if (!(rate > 0.0)) throw SimError(Errc::NON_POSITIVE_RATE, "service rate must be > 0");
  std::vector<tick_t> out(n);
  for (auto& s : out) s = std::max<tick_t>(1, ms_to_ticks(rng.exponential(rate)));
  return out;
}

// Composes the generators for one replication. Distinct replication indices
// use distinct substreams of the same named generator, so any (seed, index)
// pair regenerates bit-identically.
inline Trace build_trace(const SimConfig& cfg, std::uint64_t replication_index) {
  Trace t;
  t.seed = cfg.seed;
  t.pu_arrivals = gen_pu_arrivals(cfg.sensors, cfg.horizon);

  auto ed_arrival_rng = derive_stream(cfg.seed, replication_index, StreamRole::ED_ARRIVALS);
  t.ed_arrivals = gen_ed_arrivals(cfg.lambda_ed(), cfg.horizon, ed_arrival_rng);

  auto pu_service_rng = derive_stream(cfg.seed, replication_index, StreamRole::PU_SERVICE);
  t.pu_services = sample_service_times(cfg.service.mu_pu(), t.pu_arrivals.size(), pu_service_rng);

  auto ed_service_rng = derive_stream(cfg.seed, replication_index, StreamRole::ED_SERVICE);
  t.ed_services = sample_service_times(cfg.service.mu_ed(), t.ed_arrivals.size(), ed_service_rng);

  check_trace(t);
  return t;
}

// CSV schema: header then one row per packet, interleaved by arrival time
// with PU first on ties. Export/import round-trips are byte-exact.
inline void write_trace_csv(const Trace& t, std::ostream& os) {
  os << "class,arrival_ms,service_ms\n";
  std::size_t p = 0, e = 0;
  while (p < t.pu_count() || e < t.ed_count()) {
    const bool take_pu =
        p < t.pu_count() && (e >= t.ed_count() || t.pu_arrivals[p] <= t.ed_arrivals[e]);
    if (take_pu) {
      os << "pu," << format_ms(t.pu_arrivals[p]) << ',' << format_ms(t.pu_services[p]) << '\n';
      ++p;
    } else {
      os << "ed," << format_ms(t.ed_arrivals[e]) << ',' << format_ms(t.ed_services[e]) << '\n';
      ++e;
    }
  }
}

inline Trace read_trace_csv(std::istream& is) {
  Trace t;
  std::string line;
  if (!std::getline(is, line) || line != "class,arrival_ms,service_ms")
    throw SimError(Errc::PARSE_ERROR, "bad trace CSV header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw SimError(Errc::PARSE_ERROR, "trace CSV line " + std::to_string(lineno));
    const std::string cls = line.substr(0, c1);
    bool ok1 = false, ok2 = false;
    const tick_t arrival = parse_ms(line.substr(c1 + 1, c2 - c1 - 1), &ok1);
    const tick_t service = parse_ms(line.substr(c2 + 1), &ok2);
    if (!ok1 || !ok2 || (cls != "pu" && cls != "ed"))
      throw SimError(Errc::PARSE_ERROR, "trace CSV line " + std::to_string(lineno));
    if (cls == "pu") {
      t.pu_arrivals.push_back(arrival);
      t.pu_services.push_back(service);
    } else {
      t.ed_arrivals.push_back(arrival);
      t.ed_services.push_back(service);
    }
  }
  check_trace(t);
  return t;
}

}  // namespace m2msim
