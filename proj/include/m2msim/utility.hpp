#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "m2msim/error.hpp"
#include "m2msim/time.hpp"
#include "m2msim/types.hpp"

namespace m2msim {

struct UtilityOutcome {
  double mean_pu = 1.0;
  double mean_ed = 1.0;
  double system_v = 1.0;
  std::size_t n_pu = 0;
  std::size_t n_ed = 0;
};

// Step utility: full value strictly below the deadline, zero at and past it.
// Latency in ticks keeps the boundary comparison exact.
inline double u_pu(tick_t latency, const UtilityParams& p) {
  if (latency < 0) throw SimError(Errc::NEGATIVE_LATENCY, "pu latency < 0");
  return latency < p.l_d ? 1.0 : 0.0;
}

// Sigmoid utility 1 - c*(logistic(a*(l-b)) - d) with c = (1+e^{ab})/e^{ab} and
// d = 1/(1+e^{ab}), normalized so the value at l=0 is exactly 1 and the limit
// at infinity is 0. Evaluated as (1+e^{-ab})/(1+e^{a(l-b)}), which is
// algebraically identical but never forms e^{ab} and so cannot overflow for
// large a*b.
inline double u_ed(double latency_ms, const UtilityParams& p) {
  if (latency_ms < 0.0) throw SimError(Errc::NEGATIVE_LATENCY, "ed latency < 0");
  const double num = 1.0 + std::exp(-p.a * p.b);
  const double den = 1.0 + std::exp(p.a * (latency_ms - p.b));  // may be +inf; result 0
  return num / den;
}

inline double u_ed(tick_t latency, const UtilityParams& p) { return u_ed(ticks_to_ms(latency), p); }

// Average per-packet utility for one class. Dropped PU packets arrive here
// with latency l_d + epsilon, so they contribute 0 through u_pu itself. An
// empty class averages to 1, the multiplicative identity of the system
// utility, so single-class runs remain meaningful.
inline double mean_class_utility(const std::vector<tick_t>& latencies, PacketClass cls,
                                 const UtilityParams& p) {
  if (latencies.empty()) return 1.0;
  double sum = 0.0;
  for (tick_t l : latencies) sum += cls == PacketClass::PU ? u_pu(l, p) : u_ed(l, p);
  return sum / static_cast<double>(latencies.size());
}

// V = mean_pu^beta_pu * mean_ed^beta_ed, with 0^0 = 1 (pow guarantees this).
inline double system_utility(double mean_pu, double mean_ed, const UtilityParams& p) {
  return std::pow(mean_pu, p.beta_pu) * std::pow(mean_ed, p.beta_ed);
}

inline UtilityOutcome make_outcome(const std::vector<tick_t>& pu_latencies,
                                   const std::vector<tick_t>& ed_latencies,
                                   const UtilityParams& p) {
  UtilityOutcome o;
  o.mean_pu = mean_class_utility(pu_latencies, PacketClass::PU, p);
  o.mean_ed = mean_class_utility(ed_latencies, PacketClass::ED, p);
  o.system_v = system_utility(o.mean_pu, o.mean_ed, p);
  o.n_pu = pu_latencies.size();
  o.n_ed = ed_latencies.size();
  return o;
}

}  // namespace m2msim
