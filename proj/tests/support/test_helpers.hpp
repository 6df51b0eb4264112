#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "m2msim/engine.hpp"
#include "m2msim/rng.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/workload.hpp"

namespace testsupport {

// Independent oracle for the ED utility: the textbook three-constant form
// 1 - c*(logistic - d) evaluated in long double, deliberately NOT the
// overflow-safe rearrangement the library uses.
inline long double u_ed_reference(long double l, long double a, long double b) {
  const long double eab = expl(a * b);
  const long double c = (1.0L + eab) / eab;
  const long double d = 1.0L / (1.0L + eab);
  return 1.0L - c * (1.0L / (1.0L + expl(-a * (l - b))) - d);
}

inline m2msim::ServiceModel default_service() { return {100.0, 100.0, 200.0}; }

inline m2msim::UtilityParams default_utility() {
  m2msim::UtilityParams u;
  u.l_d = m2msim::ms_to_ticks(10.0);
  u.a = 1.0;
  u.b = 20.0;
  u.beta_pu = 1.0;
  u.beta_ed = 1.0;
  return u;
}

// Small random trace for differential and bound tests: mixed classes, heavy
// enough service times that deadline misses and preemptions actually occur.
inline m2msim::Trace random_tiny_trace(m2msim::Xoshiro256pp& rng, std::size_t max_packets = 8) {
  m2msim::Trace t;
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next() % max_packets);
  std::vector<std::pair<m2msim::tick_t, bool>> arrivals;  // (time, is_pu)
  for (std::size_t i = 0; i < n; ++i) {
    const m2msim::tick_t arrival = m2msim::ms_to_ticks(rng.uniform01() * 20.0);
    arrivals.emplace_back(arrival, rng.next() % 2 == 0);
  }
  std::sort(arrivals.begin(), arrivals.end());
  for (const auto& [arrival, is_pu] : arrivals) {
    const m2msim::tick_t service =
        std::max<m2msim::tick_t>(1, m2msim::ms_to_ticks(0.2 + rng.uniform01() * 7.8));
    if (is_pu) {
      t.pu_arrivals.push_back(arrival);
      t.pu_services.push_back(service);
    } else {
      t.ed_arrivals.push_back(arrival);
      t.ed_services.push_back(service);
    }
  }
  return t;
}

// Medium-size two-class trace for engine property fuzzing.
inline m2msim::Trace random_medium_trace(std::uint64_t seed, std::size_t pu_n = 150,
                                         std::size_t ed_n = 100) {
  m2msim::Xoshiro256pp rng(seed);
  m2msim::Trace t;
  m2msim::tick_t tp = 0, te = 0;
  for (std::size_t i = 0; i < pu_n; ++i) {
    tp += m2msim::ms_to_ticks(rng.exponential(0.8));
    t.pu_arrivals.push_back(tp);
    t.pu_services.push_back(std::max<m2msim::tick_t>(1, m2msim::ms_to_ticks(rng.exponential(1.0))));
  }
  for (std::size_t i = 0; i < ed_n; ++i) {
    te += m2msim::ms_to_ticks(rng.exponential(0.5));
    t.ed_arrivals.push_back(te);
    t.ed_services.push_back(std::max<m2msim::tick_t>(1, m2msim::ms_to_ticks(rng.exponential(0.6))));
  }
  return t;
}

inline bool logs_equal(const m2msim::CompletionLog& a, const m2msim::CompletionLog& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto& x = a.records[i];
    const auto& y = b.records[i];
    if (x.cls != y.cls || x.arrival != y.arrival || x.service != y.service ||
        x.completion != y.completion || x.dropped != y.dropped)
      return false;
  }
  return true;
}

// True when segments are pairwise non-overlapping and each starts at or after
// its packet's arrival.
inline bool segments_wellformed(const m2msim::CompletionLog& log, const m2msim::Trace& trace) {
  auto segs = log.segments;
  std::sort(segs.begin(), segs.end(),
            [](const auto& x, const auto& y) { return x.start < y.start; });
  m2msim::tick_t prev_end = 0;
  for (const auto& s : segs) {
    if (s.end <= s.start) return false;
    if (s.start < prev_end) return false;
    prev_end = s.end;
    const m2msim::tick_t arrival = s.cls == m2msim::PacketClass::PU ? trace.pu_arrivals[s.index]
                                                                    : trace.ed_arrivals[s.index];
    if (s.start < arrival) return false;
  }
  return true;
}

inline m2msim::tick_t total_segment_measure(const m2msim::CompletionLog& log) {
  m2msim::tick_t sum = 0;
  for (const auto& s : log.segments) sum += s.end - s.start;
  return sum;
}

}  // namespace testsupport
