#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "m2msim/engine.hpp"
#include "m2msim/error.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"
#include "m2msim/utility.hpp"
#include "m2msim/workload.hpp"

namespace m2msim::oracle {

// Independent re-implementation of the threshold discipline, kept solely to
// cross-check the forward-time engine. It re-simulates by committing one
// packet per step and repairing threshold violations after the fact: when the
// last committed ED job turns out to overrun the oldest waiting PU's
// threshold, the ED cursor is rolled back, the working service array entry is
// replaced by the residual, and the clock retreats to the preemption instant.
// Do not "simplify" this into the engine's event-driven form; its value is
// being structurally different.
inline CompletionLog reference_threshold_run(const Trace& trace, tick_t lt, tick_t ld, bool drop) {
  check_trace(trace);
  const std::size_t r1 = trace.pu_count();
  const std::size_t r2 = trace.ed_count();
  std::vector<tick_t> pu_s = trace.pu_services;  // working copies; ED entries may become residuals
  std::vector<tick_t> ed_s = trace.ed_services;
  std::vector<tick_t> pu_d(r1, kPending), ed_d(r2, kPending);
  std::vector<bool> was_dropped(r1, false);

  std::size_t p1 = 0, p2 = 0;
  tick_t t_now = 0;   // current time / instant the server frees
  tick_t t_done = 0;  // completion time of the last committed job
  int in_server = 0;  // 1 = PU, 2 = ED, 0 = nothing committed yet

  while (p1 < r1 || p2 < r2) {
    const tick_t apu = p1 < r1 ? trace.pu_arrivals[p1] : kNever;
    const tick_t aed = p2 < r2 ? trace.ed_arrivals[p2] : kNever;
    int next = apu <= aed ? 1 : 2;  // class of the next pending arrival; PU on ties
    const tick_t t_arr = next == 1 ? apu : aed;

    if (t_now <= t_arr) {
      // idle until the next arrival; on a simultaneous PU+ED arrival the
      // threshold rule decides at age zero
      t_now = t_arr;
      if (apu == aed) next = t_now > apu + lt ? 1 : 2;
    } else if (p1 < r1 && in_server == 2 && t_done > apu + lt) {
      // the committed ED job overran the PU threshold: roll it back with its
      // residual and retreat the clock to the preemption instant; the PU is
      // served next (the published pseudocode leaves `next` untouched here,
      // which livelocks when an older ED is still pending)
      --p2;
      ed_s[p2] = t_done - (apu + lt);
      ed_d[p2] = kPending;
      t_now = apu + lt;
      in_server = 1;
      next = 1;
    } else if (p1 < r1 && p2 < r2 && t_now > std::max(apu, aed)) {
      // both classes queued: PU only once its age strictly exceeds lt
      next = t_now > apu + lt ? 1 : 2;
    }

    if (next == 1) {
      in_server = 1;
      t_done = t_now + pu_s[p1];
      pu_d[p1] = t_done;
      ++p1;
    } else {
      in_server = 2;
      t_done = t_now + ed_s[p2];
      ed_d[p2] = t_done;
      ++p2;
    }

    if (drop && in_server == 1 && t_done > trace.pu_arrivals[p1 - 1] + ld) {
      pu_d[p1 - 1] = trace.pu_arrivals[p1 - 1] + ld + kEpsilonTick;
      was_dropped[p1 - 1] = true;
      t_now = std::max(t_now, trace.pu_arrivals[p1 - 1] + ld);
    } else {
      t_now = t_done;
    }
  }

  CompletionLog log;
  log.policy = PolicySpec::proposed(lt, drop);
  log.trace_seed = trace.seed;
  log.records.reserve(r1 + r2);
  std::size_t p = 0, e = 0;
  while (p < r1 || e < r2) {
    const bool take_pu = p < r1 && (e >= r2 || trace.pu_arrivals[p] <= trace.ed_arrivals[e]);
    if (take_pu) {
      log.records.push_back(
          {PacketClass::PU, trace.pu_arrivals[p], trace.pu_services[p], pu_d[p], was_dropped[p]});
      ++p;
    } else {
      log.records.push_back(
          {PacketClass::ED, trace.ed_arrivals[e], trace.ed_services[e], ed_d[e], false});
      ++e;
    }
  }
  return log;
}

// M/M/1 mean sojourn time, 1/(mu - lambda). Rates per ms, result in ms.
inline double mm1_mean_sojourn(double arrival_rate, double service_rate) {
  if (!(arrival_rate < service_rate))
    throw SimError(Errc::UNSTABLE_SYSTEM, "requires arrival_rate < service_rate");
  return 1.0 / (service_rate - arrival_rate);
}

struct ScheduleSegment {
  std::size_t packet;  // PU packets are 0..r1-1, ED packets follow
  tick_t start;
  tick_t length;
};

struct OracleResult {
  double best_v = -1.0;
  std::vector<ScheduleSegment> best_schedule;
  std::uint64_t explored = 0;
};

struct OracleOptions {
  std::size_t max_packets = 8;
  // Thresholds whose instants (pu arrival + lt) are added to the candidate
  // preemption points, so threshold-policy schedules fall inside the family.
  std::vector<tick_t> lt_candidates;
  // Also branch on idling until the next arrival. With utilities that only
  // fall with latency this cannot raise V, but the option keeps the searched
  // family a superset of delay-the-PU schedules.
  bool allow_idle = false;
};

namespace detail {

struct Packet {
  PacketClass cls;
  tick_t arrival;
  tick_t service;
};

// Depth-first enumeration over work-conserving schedules with branch-and-bound
// pruning. Serving order at free-server instants is unrestricted (all
// orderings), optionally with PU drops and inserted idleness. A running job of
// the cuttable class may be interrupted at an event instant belonging to a
// pending packet of the other class (its arrival, or for PU also its
// threshold/deadline instants), and the cut hands the server to that packet.
// Every shipped policy preempts in exactly one of the two directions (the
// threshold scheduler and PU-high priority cut only ED jobs at PU instants;
// ED-high priority cuts only PU jobs at ED arrivals), so searching each
// direction separately still covers all their schedules while keeping
// preemption cascades from exploding. V is monotone in each class's utility
// sum, so a branch whose optimistic bound (every pending packet completing as
// early as physically possible) cannot beat the incumbent is cut without
// loss.
class ClairvoyantSearch {
 public:
  ClairvoyantSearch(std::vector<Packet> packets, const UtilityParams& params, tick_t ld,
                    const OracleOptions& opt, PacketClass cuttable)
      : packets_(std::move(packets)), params_(params), opt_(opt), ld_(ld), cuttable_(cuttable) {
    triggers_.resize(packets_.size());
    for (std::size_t i = 0; i < packets_.size(); ++i) {
      auto& t = triggers_[i];
      t.push_back(packets_[i].arrival);
      if (packets_[i].cls == PacketClass::PU) {
        for (tick_t lt : opt_.lt_candidates) t.push_back(packets_[i].arrival + lt);
        t.push_back(packets_[i].arrival + ld);
      }
      std::sort(t.begin(), t.end());
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    remaining_.resize(packets_.size());
    completion_.assign(packets_.size(), kPending);
    utility_.assign(packets_.size(), 0.0);
    for (std::size_t i = 0; i < packets_.size(); ++i) {
      remaining_[i] = packets_[i].service;
      (packets_[i].cls == PacketClass::PU ? n_pu_ : n_ed_) += 1;
    }
  }

  OracleResult search() {
    decide(0, packets_.size());
    OracleResult r;
    r.best_v = packets_.empty() ? 1.0 : best_v_;
    r.best_schedule = best_schedule_;
    r.explored = explored_;
    return r;
  }

 private:
  double packet_utility(std::size_t i, tick_t completion) const {
    const tick_t latency = completion - packets_[i].arrival;
    return packets_[i].cls == PacketClass::PU ? u_pu(latency, params_) : u_ed(latency, params_);
  }

  double value_of(double sum_pu, double sum_ed) const {
    const double mean_pu = n_pu_ == 0 ? 1.0 : sum_pu / static_cast<double>(n_pu_);
    const double mean_ed = n_ed_ == 0 ? 1.0 : sum_ed / static_cast<double>(n_ed_);
    return system_utility(mean_pu, mean_ed, params_);
  }

  // Optimistic value: done packets keep their utility, pending packets
  // complete as early as a lone server could manage.
  double bound(tick_t now) const {
    double sum_pu = 0.0, sum_ed = 0.0;
    for (std::size_t i = 0; i < packets_.size(); ++i) {
      double u;
      if (completion_[i] != kPending) {
        u = utility_[i];
      } else {
        const tick_t earliest = std::max(now, packets_[i].arrival) + remaining_[i];
        u = packet_utility(i, earliest);
      }
      (packets_[i].cls == PacketClass::PU ? sum_pu : sum_ed) += u;
    }
    return value_of(sum_pu, sum_ed);
  }

  void evaluate_leaf() {
    ++explored_;
    double sum_pu = 0.0, sum_ed = 0.0;
    for (std::size_t i = 0; i < packets_.size(); ++i)
      (packets_[i].cls == PacketClass::PU ? sum_pu : sum_ed) += utility_[i];
    const double v = value_of(sum_pu, sum_ed);
    if (v > best_v_) {
      best_v_ = v;
      best_schedule_ = segments_;
    }
  }

  // Free-server decision: pick any ready packet (serve or drop), or idle.
  void decide(tick_t now, std::size_t open) {
    if (open == 0) {
      evaluate_leaf();
      return;
    }
    if (best_v_ >= 0.0 && bound(now) <= best_v_) return;

    tick_t next_arrival = kNever;
    bool any_ready = false;
    for (std::size_t i = 0; i < packets_.size(); ++i) {
      if (completion_[i] != kPending) continue;
      if (packets_[i].arrival <= now) any_ready = true;
      else next_arrival = std::min(next_arrival, packets_[i].arrival);
    }
    if (!any_ready) {
      decide(next_arrival, open);
      return;
    }

    for (std::size_t i = 0; i < packets_.size(); ++i) {
      if (completion_[i] != kPending || packets_[i].arrival > now) continue;
      if (packets_[i].cls == PacketClass::PU) {
        // drop: zero service, bookkept latency ld + epsilon
        completion_[i] = packets_[i].arrival + ld_ + kEpsilonTick;
        utility_[i] = 0.0;
        decide(now, open - 1);
        completion_[i] = kPending;
      }
      serve(i, now, open);
    }

    if (opt_.allow_idle && next_arrival != kNever) decide(next_arrival, open);
  }

  // Serve packet i from `now`: run to completion, or (if i is of the cuttable
  // class) get interrupted at a pending other-class packet's event instant,
  // handing the server over to it.
  void serve(std::size_t i, tick_t now, std::size_t open) {
    if (best_v_ >= 0.0 && bound(now) <= best_v_) return;
    const tick_t full_end = now + remaining_[i];
    const tick_t saved = remaining_[i];

    segments_.push_back({i, now, remaining_[i]});
    completion_[i] = full_end;
    utility_[i] = packet_utility(i, full_end);
    remaining_[i] = 0;
    decide(full_end, open - 1);
    remaining_[i] = saved;
    completion_[i] = kPending;
    segments_.pop_back();

    if (packets_[i].cls != cuttable_) return;
    for (std::size_t k = 0; k < packets_.size(); ++k) {
      if (k == i || completion_[k] != kPending || packets_[k].cls == cuttable_) continue;
      for (const tick_t cut : triggers_[k]) {
        if (cut <= now) continue;
        if (cut >= full_end) break;
        segments_.push_back({i, now, cut - now});
        remaining_[i] = full_end - cut;
        serve(k, cut, open);
        remaining_[i] = saved;
        segments_.pop_back();
      }
    }
  }

  std::vector<Packet> packets_;
  UtilityParams params_;
  OracleOptions opt_;
  tick_t ld_ = 0;
  PacketClass cuttable_ = PacketClass::ED;
  std::vector<std::vector<tick_t>> triggers_;
  std::vector<tick_t> remaining_, completion_;
  std::vector<double> utility_;
  std::vector<ScheduleSegment> segments_;
  std::size_t n_pu_ = 0, n_ed_ = 0;
  std::uint64_t explored_ = 0;
  double best_v_ = -1.0;
  std::vector<ScheduleSegment> best_schedule_;
};

}  // namespace detail

// Exhaustive search over work-conserving schedules of a tiny trace: all
// serving orders, preemption at candidate event instants, optional PU drops
// and optional inserted idleness. The returned V upper-bounds every shipped
// policy on the same trace.
inline OracleResult clairvoyant_best(const Trace& trace, const UtilityParams& params,
                                     const ServiceModel& service, const OracleOptions& opt = {}) {
  check_trace(trace);
  if (!(service.mu > 0.0))
    throw SimError(Errc::NON_POSITIVE_VALUE, "service model rates must be > 0");
  if (opt.max_packets > 10) throw SimError(Errc::TRACE_TOO_LARGE, "max_packets capped at 10");
  if (trace.total() > opt.max_packets)
    throw SimError(Errc::TRACE_TOO_LARGE,
                   "trace has " + std::to_string(trace.total()) + " packets, limit " +
                       std::to_string(opt.max_packets));

  std::vector<detail::Packet> packets;
  packets.reserve(trace.total());
  for (std::size_t i = 0; i < trace.pu_count(); ++i)
    packets.push_back({PacketClass::PU, trace.pu_arrivals[i], trace.pu_services[i]});
  for (std::size_t i = 0; i < trace.ed_count(); ++i)
    packets.push_back({PacketClass::ED, trace.ed_arrivals[i], trace.ed_services[i]});

  detail::ClairvoyantSearch ed_cut(packets, params, params.l_d, opt, PacketClass::ED);
  OracleResult best = ed_cut.search();
  detail::ClairvoyantSearch pu_cut(std::move(packets), params, params.l_d, opt, PacketClass::PU);
  const OracleResult alt = pu_cut.search();
  best.explored += alt.explored;
  if (alt.best_v > best.best_v) {
    best.best_v = alt.best_v;
    best.best_schedule = alt.best_schedule;
  }
  return best;
}

struct FixtureReport {
  bool pass = true;
  std::string divergence;
};

// Field-by-field comparison at exact tick resolution; reports the first
// mismatching record.
inline FixtureReport check_against_fixture(const CompletionLog& log,
                                           const std::vector<PacketRecord>& expected) {
  FixtureReport rep;
  if (log.records.size() != expected.size()) {
    rep.pass = false;
    rep.divergence = "record count " + std::to_string(log.records.size()) + " != expected " +
                     std::to_string(expected.size());
    return rep;
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& got = log.records[i];
    const auto& want = expected[i];
    std::string field;
    if (got.cls != want.cls) field = "class";
    else if (got.arrival != want.arrival) field = "arrival";
    else if (got.service != want.service) field = "service";
    else if (got.completion != want.completion) field = "completion";
    else if (got.dropped != want.dropped) field = "dropped";
    if (!field.empty()) {
      rep.pass = false;
      rep.divergence = "record " + std::to_string(i) + " (" + std::string(to_string(want.cls)) +
                       " arrival " + format_ms(want.arrival) + "): " + field + " mismatch, got " +
                       (field == "completion" ? format_ms(got.completion)
                        : field == "dropped"  ? std::string(got.dropped ? "1" : "0")
                                              : std::string("<>")) +
                       " want " +
                       (field == "completion" ? format_ms(want.completion)
                        : field == "dropped"  ? std::string(want.dropped ? "1" : "0")
                                              : std::string("<>"));
      return rep;
    }
  }
  return rep;
}

}  // namespace m2msim::oracle
