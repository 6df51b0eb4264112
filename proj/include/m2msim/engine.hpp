#pragma once

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "m2msim/error.hpp"
#include "m2msim/policies.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/utility.hpp"
#include "m2msim/workload.hpp"

namespace m2msim {

// One contiguous interval of server work on a packet. Preempted jobs show up
// as several segments; aborted PU jobs as a final segment ending at the
// deadline. Kept for invariant checks, not serialized.
struct ServiceSegment {
  PacketClass cls;
  std::size_t index;
  tick_t start;
  tick_t end;
};

struct CompletionLog {
  std::vector<PacketRecord> records;  // one per trace packet, arrival order, PU first on ties
  std::vector<ServiceSegment> segments;
  PolicySpec policy;
  std::uint64_t trace_seed = 0;
};

namespace detail {

// Preemption instant while `cls` is in service, or kNever. For the threshold
// policy this is the oldest unserved PU's arrival + lt (that PU may still be
// in flight: its threshold can fall inside the current service). For static
// priority it is the favored class's next arrival.
inline tick_t preempt_instant(const PolicySpec& policy, const Trace& trace, const QueueState& q,
                              PacketClass cls) {
  if (cls == PacketClass::ED) {
    if (policy.kind == PolicyKind::PROPOSED && q.pu_head < trace.pu_count())
      return trace.pu_arrivals[q.pu_head] + policy.lt;
    if (policy.kind == PolicyKind::PRIORITY_PREEMPTIVE &&
        policy.priority_class == PriorityClass::PU_HIGH && q.pu_head < trace.pu_count())
      return trace.pu_arrivals[q.pu_head];
  } else {
    if (policy.kind == PolicyKind::PRIORITY_PREEMPTIVE &&
        policy.priority_class == PriorityClass::ED_HIGH && q.ed_head < trace.ed_count())
      return trace.ed_arrivals[q.ed_head];
  }
  return kNever;
}

}  // namespace detail

// Applies `policy` to `trace` and returns the completion log. The loop runs
// to cursor exhaustion: every packet is served (or dropped) even past the
// generation horizon. Deterministic: identical inputs give identical logs.
inline CompletionLog run(const Trace& trace, const PolicySpec& policy, const ServiceModel& service,
                         const UtilityParams& utility) {
  check_trace(trace);
  if (!(service.mu > 0.0) || !(service.s_pu > 0.0) || !(service.s_ed > 0.0))
    throw SimError(Errc::NON_POSITIVE_VALUE, "service model rates must be > 0");
  if (policy.kind == PolicyKind::PROPOSED) {
    // lt == 0 is accepted as the degenerate preempt-on-arrival limit.
    if (policy.lt < 0 || policy.lt >= utility.l_d)
      throw SimError(Errc::LT_OUT_OF_RANGE, "engine requires 0 <= lt < l_d");
  }
  const bool drops = policy.kind == PolicyKind::PROPOSED && policy.drop_expired;

  const std::size_t r1 = trace.pu_count();
  const std::size_t r2 = trace.ed_count();
  std::vector<tick_t> pu_done(r1, kPending), ed_done(r2, kPending);
  std::vector<bool> pu_dropped(r1, false);
  std::vector<tick_t> pu_rem = trace.pu_services;
  std::vector<tick_t> ed_rem = trace.ed_services;

  CompletionLog log;
  log.policy = policy;
  log.trace_seed = trace.seed;

  QueueState q;
  const ServerState idle_server{};
  tick_t now = 0;
  std::optional<PacketClass> forced;  // class taking over after a preemption

  while (q.pu_head < r1 || q.ed_head < r2) {
    PacketClass cls;
    if (forced) {
      cls = *forced;
      forced.reset();
    } else {
      if (!q.pu_waiting(trace, now) && !q.ed_waiting(trace, now)) {
        const tick_t next_pu = q.pu_head < r1 ? trace.pu_arrivals[q.pu_head] : kNever;
        const tick_t next_ed = q.ed_head < r2 ? trace.ed_arrivals[q.ed_head] : kNever;
        now = std::min(next_pu, next_ed);
      }
      const SchedulingAction action = decide(policy, q, idle_server, trace, utility, now);
      if (action == SchedulingAction::IDLE) throw SimError(Errc::UNSUPPORTED_POLICY, "idle with work pending");
      cls = action == SchedulingAction::SERVE_PU_HEAD ? PacketClass::PU : PacketClass::ED;
    }

    if (cls == PacketClass::PU) {
      const std::size_t idx = q.pu_head;
      const tick_t start = now;
      if (drops) {
        const tick_t deadline = trace.pu_arrivals[idx] + utility.l_d;
        if (start >= deadline) {
          // expired while queued: removed with zero service
          pu_done[idx] = deadline + kEpsilonTick;
          pu_dropped[idx] = true;
          q.pu_residuals.erase(idx);
          ++q.pu_head;
          continue;
        }
        if (start + pu_rem[idx] > deadline) {
          // cannot finish in time: occupy the server up to the deadline, then abort
          log.segments.push_back({PacketClass::PU, idx, start, deadline});
          pu_done[idx] = deadline + kEpsilonTick;
          pu_dropped[idx] = true;
          q.pu_residuals.erase(idx);
          ++q.pu_head;
          now = deadline;
          continue;
        }
      }
      const tick_t completion = start + pu_rem[idx];
      const tick_t preempt_at = detail::preempt_instant(policy, trace, q, PacketClass::PU);
      if (preempt_at < completion) {
        const tick_t cut = std::max(preempt_at, start);
        if (cut > start) log.segments.push_back({PacketClass::PU, idx, start, cut});
        pu_rem[idx] = completion - cut;
        q.pu_residuals[idx] = pu_rem[idx];
        now = cut;
        forced = PacketClass::ED;
        continue;
      }
      log.segments.push_back({PacketClass::PU, idx, start, completion});
      pu_done[idx] = completion;
      q.pu_residuals.erase(idx);
      ++q.pu_head;
      now = completion;
    } else {
      const std::size_t idx = q.ed_head;
      const tick_t start = now;
      const tick_t completion = start + ed_rem[idx];
      const tick_t preempt_at = detail::preempt_instant(policy, trace, q, PacketClass::ED);
      if (preempt_at < completion) {
        const tick_t cut = std::max(preempt_at, start);
        if (cut > start) log.segments.push_back({PacketClass::ED, idx, start, cut});
        ed_rem[idx] = completion - cut;
        q.ed_residuals[idx] = ed_rem[idx];
        now = cut;
        forced = PacketClass::PU;
        continue;
      }
      log.segments.push_back({PacketClass::ED, idx, start, completion});
      ed_done[idx] = completion;
      q.ed_residuals.erase(idx);
      ++q.ed_head;
      now = completion;
    }
  }

  // Records in global arrival order, PU first on ties (same interleaving as
  // the trace CSV).
  log.records.reserve(r1 + r2);
  std::size_t p = 0, e = 0;
  while (p < r1 || e < r2) {
    const bool take_pu = p < r1 && (e >= r2 || trace.pu_arrivals[p] <= trace.ed_arrivals[e]);
    if (take_pu) {
      log.records.push_back(
          {PacketClass::PU, trace.pu_arrivals[p], trace.pu_services[p], pu_done[p], pu_dropped[p]});
      ++p;
    } else {
      log.records.push_back(
          {PacketClass::ED, trace.ed_arrivals[e], trace.ed_services[e], ed_done[e], false});
      ++e;
    }
  }
  return log;
}

// Per-class latency sequences (completion - arrival) in arrival order.
inline std::pair<std::vector<tick_t>, std::vector<tick_t>> compute_latencies(const CompletionLog& log) {
  std::vector<tick_t> pu, ed;
  for (const auto& r : log.records) {
    if (r.completion == kPending) throw SimError(Errc::PENDING_RECORD, "record has no completion");
    (r.cls == PacketClass::PU ? pu : ed).push_back(r.completion - r.arrival);
  }
  return {std::move(pu), std::move(ed)};
}

inline UtilityOutcome evaluate(const Trace& trace, const PolicySpec& policy,
                               const ServiceModel& service, const UtilityParams& params) {
  const CompletionLog log = run(trace, policy, service, params);
  const auto [pu, ed] = compute_latencies(log);
  return make_outcome(pu, ed, params);
}

// CSV schema used by the golden-trace regression fixtures.
inline void write_log_csv(const CompletionLog& log, std::ostream& os) {
  os << "class,arrival_ms,service_ms,completion_ms,dropped\n";
  for (const auto& r : log.records) {
    os << to_string(r.cls) << ',' << format_ms(r.arrival) << ',' << format_ms(r.service) << ','
       << format_ms(r.completion) << ',' << (r.dropped ? '1' : '0') << '\n';
  }
}

inline std::vector<PacketRecord> read_log_csv(std::istream& is) {
  std::vector<PacketRecord> records;
  std::string line;
  if (!std::getline(is, line) || line != "class,arrival_ms,service_ms,completion_ms,dropped")
    throw SimError(Errc::PARSE_ERROR, "bad completion CSV header");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (cells.size() < 4) {
      const auto c = line.find(',', pos);
      if (c == std::string::npos) throw SimError(Errc::PARSE_ERROR, "log CSV line " + std::to_string(lineno));
      cells.push_back(line.substr(pos, c - pos));
      pos = c + 1;
    }
    cells.push_back(line.substr(pos));
    PacketRecord r;
    if (cells[0] == "pu") r.cls = PacketClass::PU;
    else if (cells[0] == "ed") r.cls = PacketClass::ED;
    else throw SimError(Errc::PARSE_ERROR, "log CSV line " + std::to_string(lineno));
    bool ok1 = false, ok2 = false, ok3 = false;
    r.arrival = parse_ms(cells[1], &ok1);
    r.service = parse_ms(cells[2], &ok2);
    r.completion = parse_ms(cells[3], &ok3);
    if (!ok1 || !ok2 || !ok3 || (cells[4] != "0" && cells[4] != "1"))
      throw SimError(Errc::PARSE_ERROR, "log CSV line " + std::to_string(lineno));
    r.dropped = cells[4] == "1";
    records.push_back(r);
  }
  return records;
}

}  // namespace m2msim
