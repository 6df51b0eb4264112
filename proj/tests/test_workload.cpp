#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "m2msim/workload.hpp"
#include "support/test_helpers.hpp"

using namespace m2msim;

namespace {

SimConfig small_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.sensors = staggered_sensors(5, ms_to_ticks(50.0), 0.02);
  cfg.service = testsupport::default_service();
  cfg.utility = testsupport::default_utility();
  cfg.horizon = ms_to_ticks(2000.0);
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("periodic arrivals enumerate phase + k*period inside the horizon") {
  std::vector<SensorConfig> sensors(2);
  sensors[0] = {ms_to_ticks(50.0), 0, 0.0};
  sensors[1] = {ms_to_ticks(50.0), ms_to_ticks(25.0), 0.0};
  const auto arrivals = gen_pu_arrivals(sensors, ms_to_ticks(100.0));
  const std::vector<tick_t> expected = {0, ms_to_ticks(25.0), ms_to_ticks(50.0), ms_to_ticks(75.0)};
  CHECK(arrivals == expected);
}

TEST_CASE("single sensor over long horizon yields ceil(horizon/period) arrivals") {
  std::vector<SensorConfig> sensors = {{ms_to_ticks(50.0), 0, 0.0}};
  const auto arrivals = gen_pu_arrivals(sensors, ms_to_ticks(40000.0));
  REQUIRE(arrivals.size() == 800);
  CHECK(arrivals.front() == 0);
  CHECK(arrivals.back() == ms_to_ticks(39950.0));
}

TEST_CASE("phase at or past the horizon yields no arrivals") {
  std::vector<SensorConfig> sensors = {{ms_to_ticks(2.0), ms_to_ticks(1.0), 0.0}};
  CHECK(gen_pu_arrivals(sensors, ms_to_ticks(0.5)).empty());
}

TEST_CASE("coincident arrivals from synchronized sensors survive as duplicates") {
  const auto sensors = staggered_sensors(3, ms_to_ticks(10.0), 0.0, true);
  const auto arrivals = gen_pu_arrivals(sensors, ms_to_ticks(20.0));
  REQUIRE(arrivals.size() == 6);
  CHECK(arrivals[0] == arrivals[2]);
  CHECK(arrivals[3] == arrivals[5]);
}

TEST_CASE("zero-rate stream is empty; identical seeds reproduce bit-for-bit") {
  auto rng = derive_stream(42, 0, StreamRole::ED_ARRIVALS);
  CHECK(gen_ed_arrivals(0.0, ms_to_ticks(1000.0), rng).empty());

  auto r1 = derive_stream(42, 3, StreamRole::ED_ARRIVALS);
  auto r2 = derive_stream(42, 3, StreamRole::ED_ARRIVALS);
  const auto a1 = gen_ed_arrivals(0.3, ms_to_ticks(5000.0), r1);
  const auto a2 = gen_ed_arrivals(0.3, ms_to_ticks(5000.0), r2);
  CHECK(a1 == a2);
  REQUIRE(!a1.empty());
}

TEST_CASE("superposed arrival counts fall in the Poisson central interval") {
  // rate 0.34/ms over 40 s: mean 13600; [12900, 14300] is far beyond 3 sigma
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL, 77ULL, 901ULL, 31337ULL}) {
    auto rng = derive_stream(seed, 0, StreamRole::ED_ARRIVALS);
    const auto arrivals = gen_ed_arrivals(0.34, ms_to_ticks(40000.0), rng);
    CHECK(arrivals.size() >= 12900);
    CHECK(arrivals.size() <= 14300);
  }
}

TEST_CASE("service sampling matches its mean within the CLT interval") {
  auto rng = derive_stream(99, 0, StreamRole::ED_SERVICE);
  const auto samples = sample_service_times(1.0, 1'000'000, rng);
  double sum = 0.0;
  for (tick_t s : samples) {
    REQUIRE(s > 0);
    sum += ticks_to_ms(s);
  }
  const double mean = sum / 1e6;
  CHECK(mean > 0.997);
  CHECK(mean < 1.003);

  // mu_ed from the reference setup: mean 2 ms, same +-3.29 sigma/sqrt(n) scaling
  auto rng2 = derive_stream(99, 1, StreamRole::ED_SERVICE);
  const auto ed = sample_service_times(0.5, 1'000'000, rng2);
  double sum2 = 0.0;
  for (tick_t s : ed) sum2 += ticks_to_ms(s);
  const double mean2 = sum2 / 1e6;
  CHECK(mean2 > 1.994);
  CHECK(mean2 < 2.006);

  CHECK(sample_service_times(2.0, 0, rng2).empty());
  CHECK_THROWS_AS(sample_service_times(0.0, 5, rng2), SimError);
}

TEST_CASE("per-sensor streams superpose like the single aggregate stream") {
  // Chi-square on 20 interval counts, aggregated over 100 replications, for
  // both generation routes; each statistic should sit inside mean +- 3 sigma
  // of chi^2_20, and the total counts should agree at 3 sigma.
  constexpr int kReps = 100;
  constexpr int kBins = 20;
  const double per_sensor = 0.01;
  const int n_sensors = 5;
  const tick_t horizon = ms_to_ticks(10000.0);
  const double bin_ms = 10000.0 / kBins;

  std::vector<double> merged_bins(kBins, 0.0), single_bins(kBins, 0.0);
  std::size_t merged_total = 0, single_total = 0;
  for (int rep = 0; rep < kReps; ++rep) {
    for (int s = 0; s < n_sensors; ++s) {
      auto rng = derive_stream(555, static_cast<std::uint64_t>(rep * 1000 + s),
                               StreamRole::ED_ARRIVALS);
      for (tick_t t : gen_ed_arrivals(per_sensor, horizon, rng)) {
        ++merged_bins[std::min<int>(kBins - 1, static_cast<int>(ticks_to_ms(t) / bin_ms))];
        ++merged_total;
      }
    }
    auto rng = derive_stream(556, static_cast<std::uint64_t>(rep), StreamRole::ED_ARRIVALS);
    for (tick_t t : gen_ed_arrivals(per_sensor * n_sensors, horizon, rng)) {
      ++single_bins[std::min<int>(kBins - 1, static_cast<int>(ticks_to_ms(t) / bin_ms))];
      ++single_total;
    }
  }
  const double expected_per_bin = per_sensor * n_sensors * bin_ms * kReps;
  auto chi2 = [&](const std::vector<double>& bins) {
    double stat = 0.0;
    for (double obs : bins) stat += (obs - expected_per_bin) * (obs - expected_per_bin) / expected_per_bin;
    return stat;
  };
  const double limit = kBins + 3.0 * std::sqrt(2.0 * kBins);
  CHECK(chi2(merged_bins) < limit);
  CHECK(chi2(single_bins) < limit);

  const double mean_total = per_sensor * n_sensors * 10000.0 * kReps;
  const double sigma_total = std::sqrt(mean_total);
  CHECK(std::abs(static_cast<double>(merged_total) - static_cast<double>(single_total)) <
        2.0 * 3.0 * sigma_total);
}

TEST_CASE("build_trace is reproducible and satisfies the trace invariants") {
  const SimConfig cfg = small_config(2024);
  const Trace t1 = build_trace(cfg, 0);
  const Trace t2 = build_trace(cfg, 0);
  std::ostringstream s1, s2;
  write_trace_csv(t1, s1);
  write_trace_csv(t2, s2);
  CHECK(s1.str() == s2.str());

  const Trace other = build_trace(cfg, 1);
  std::ostringstream s3;
  write_trace_csv(other, s3);
  CHECK(s1.str() != s3.str());

  CHECK(t1.rng_algorithm == kRngAlgorithm);

  // fuzz the invariants over random configs
  Xoshiro256pp rng(9001);
  for (int i = 0; i < 25; ++i) {
    SimConfig cfg2 = small_config(rng.next());
    cfg2.sensors = staggered_sensors(1 + rng.next() % 8, ms_to_ticks(20.0 + 30.0 * rng.uniform01()),
                                     0.05 * rng.uniform01());
    cfg2.horizon = ms_to_ticks(500.0 + 1500.0 * rng.uniform01());
    REQUIRE_NOTHROW(check_trace(build_trace(cfg2, rng.next() % 4)));
  }
}

TEST_CASE("reference-scale trace carries N*T_s/T_pu periodic packets") {
  SimConfig cfg;
  cfg.sensors = staggered_sensors(50, ms_to_ticks(50.0), 0.0068);
  cfg.service = testsupport::default_service();
  cfg.utility = testsupport::default_utility();
  cfg.horizon = ms_to_ticks(40000.0);
  cfg.seed = 7;
  const Trace t = build_trace(cfg, 0);
  CHECK(t.pu_count() == 40000);
  REQUIRE(t.ed_count() > 12900);
  REQUIRE(t.ed_count() < 14300);
}

TEST_CASE("all-zero ED rates yield an ED-free trace") {
  SimConfig cfg = small_config(5);
  for (auto& s : cfg.sensors) s.ed_rate = 0.0;
  CHECK(build_trace(cfg, 0).ed_count() == 0);
}

TEST_CASE("trace CSV export/import round-trips exactly") {
  const SimConfig cfg = small_config(321);
  const Trace t = build_trace(cfg, 2);
  std::ostringstream out;
  write_trace_csv(t, out);
  std::istringstream in(out.str());
  const Trace back = read_trace_csv(in);
  CHECK(back.pu_arrivals == t.pu_arrivals);
  CHECK(back.pu_services == t.pu_services);
  CHECK(back.ed_arrivals == t.ed_arrivals);
  CHECK(back.ed_services == t.ed_services);
  std::ostringstream out2;
  write_trace_csv(back, out2);
  CHECK(out2.str() == out.str());

  std::istringstream bad("class,arrival_ms\n");
  CHECK_THROWS_AS(read_trace_csv(bad), SimError);
}
