#pragma once

#include <cstddef>
#include <map>

#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/workload.hpp"

namespace m2msim {

// What the policy wants the server to do at a decision instant.
enum class SchedulingAction : std::uint8_t {
  SERVE_PU_HEAD,
  SERVE_ED_HEAD,
  PREEMPT_TO_PU,
  PREEMPT_TO_ED,
  CONTINUE,  // keep the in-service packet
  IDLE,      // both queues empty
};

enum class ActiveClass : std::uint8_t { NONE, PU, ED };

struct ServerState {
  bool busy = false;
  ActiveClass active_class = ActiveClass::NONE;
  std::size_t active_index = 0;
  tick_t completion_time = kNever;
};

// Queues are FIFO within class, so the live contents are fully described by
// the next-to-serve cursors; residuals hold remaining demand for preempted
// jobs (keyed by packet index in the trace).
struct QueueState {
  std::size_t pu_head = 0;
  std::size_t ed_head = 0;
  std::map<std::size_t, tick_t> ed_residuals;
  std::map<std::size_t, tick_t> pu_residuals;

  bool pu_waiting(const Trace& t, tick_t now) const {
    return pu_head < t.pu_count() && t.pu_arrivals[pu_head] <= now;
  }
  bool ed_waiting(const Trace& t, tick_t now) const {
    return ed_head < t.ed_count() && t.ed_arrivals[ed_head] <= now;
  }
};

// Serve the earliest arrival across both classes; PU wins ties.
inline SchedulingAction decide_fcfs(const QueueState& q, const Trace& trace, tick_t now) {
  const bool pu = q.pu_waiting(trace, now);
  const bool ed = q.ed_waiting(trace, now);
  if (pu && ed)
    return trace.pu_arrivals[q.pu_head] <= trace.ed_arrivals[q.ed_head]
               ? SchedulingAction::SERVE_PU_HEAD
               : SchedulingAction::SERVE_ED_HEAD;
  if (pu) return SchedulingAction::SERVE_PU_HEAD;
  if (ed) return SchedulingAction::SERVE_ED_HEAD;
  return SchedulingAction::IDLE;
}

// Earliest due date: due(PU) = arrival + l_d, due(ED) = arrival + offset
// (UNBOUNDED offset means ED only runs when no PU waits). Ties break to the
// earlier arrival, then PU.
inline SchedulingAction decide_edd(const QueueState& q, const Trace& trace,
                                   const UtilityParams& utility, const PolicySpec& policy,
                                   tick_t now) {
  const bool pu = q.pu_waiting(trace, now);
  const bool ed = q.ed_waiting(trace, now);
  if (!pu && !ed) return SchedulingAction::IDLE;
  if (!ed) return SchedulingAction::SERVE_PU_HEAD;
  if (!pu) return SchedulingAction::SERVE_ED_HEAD;

  const tick_t ed_offset = policy.edd_ed_due_offset.resolve(utility);
  const tick_t pu_arr = trace.pu_arrivals[q.pu_head];
  const tick_t ed_arr = trace.ed_arrivals[q.ed_head];
  const tick_t pu_due = pu_arr + utility.l_d;
  const tick_t ed_due = ed_offset == kNever ? kNever : ed_arr + ed_offset;
  if (pu_due != ed_due)
    return pu_due < ed_due ? SchedulingAction::SERVE_PU_HEAD : SchedulingAction::SERVE_ED_HEAD;
  if (pu_arr != ed_arr)
    return pu_arr < ed_arr ? SchedulingAction::SERVE_PU_HEAD : SchedulingAction::SERVE_ED_HEAD;
  return SchedulingAction::SERVE_PU_HEAD;
}

// Static preemptive priority. The favored class preempts on arrival
// (preemptive-resume) and is always served first from the queue.
inline SchedulingAction decide_priority(const QueueState& q, const ServerState& server,
                                        const Trace& trace, const PolicySpec& policy, tick_t now) {
  const bool pu = q.pu_waiting(trace, now);
  const bool ed = q.ed_waiting(trace, now);
  const bool pu_high = policy.priority_class == PriorityClass::PU_HIGH;
  if (server.busy) {
    if (pu_high && server.active_class == ActiveClass::ED && pu)
      return SchedulingAction::PREEMPT_TO_PU;
    if (!pu_high && server.active_class == ActiveClass::PU && ed)
      return SchedulingAction::PREEMPT_TO_ED;
    return SchedulingAction::CONTINUE;
  }
  if (pu_high) {
    if (pu) return SchedulingAction::SERVE_PU_HEAD;
    if (ed) return SchedulingAction::SERVE_ED_HEAD;
  } else {
    if (ed) return SchedulingAction::SERVE_ED_HEAD;
    if (pu) return SchedulingAction::SERVE_PU_HEAD;
  }
  return SchedulingAction::IDLE;
}

// Threshold scheduler: ED keeps priority while the oldest waiting PU is
// younger than lt. Reaching lt preempts an in-service ED job; at an idle
// decision instant PU is chosen only when its age strictly exceeds lt (an ED
// picked at age == lt is preempted after zero service, so the PU still wins
// the server at that instant).
inline SchedulingAction decide_proposed(const QueueState& q, const ServerState& server,
                                        const Trace& trace, const PolicySpec& policy, tick_t now) {
  const bool pu = q.pu_waiting(trace, now);
  const bool ed = q.ed_waiting(trace, now);
  if (server.busy) {
    if (server.active_class == ActiveClass::ED && pu &&
        now >= trace.pu_arrivals[q.pu_head] + policy.lt)
      return SchedulingAction::PREEMPT_TO_PU;
    return SchedulingAction::CONTINUE;
  }
  if (pu && ed)
    return now > trace.pu_arrivals[q.pu_head] + policy.lt ? SchedulingAction::SERVE_PU_HEAD
                                                          : SchedulingAction::SERVE_ED_HEAD;
  if (pu) return SchedulingAction::SERVE_PU_HEAD;
  if (ed) return SchedulingAction::SERVE_ED_HEAD;
  return SchedulingAction::IDLE;
}

inline SchedulingAction decide(const PolicySpec& policy, const QueueState& q,
                               const ServerState& server, const Trace& trace,
                               const UtilityParams& utility, tick_t now) {
  switch (policy.kind) {
    case PolicyKind::FCFS: return decide_fcfs(q, trace, now);
    case PolicyKind::EDD: return decide_edd(q, trace, utility, policy, now);
    case PolicyKind::PRIORITY_PREEMPTIVE: return decide_priority(q, server, trace, policy, now);
    case PolicyKind::PROPOSED: return decide_proposed(q, server, trace, policy, now);
  }
  return SchedulingAction::IDLE;
}

}  // namespace m2msim
