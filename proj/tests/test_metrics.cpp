#include <doctest.h>

#include <cmath>

#include "provet/metrics.hpp"

using namespace provet;

namespace {

RunReport fake_run(std::uint64_t cycles, std::uint64_t vfux, std::uint64_t reads,
                   std::uint64_t writes) {
  RunReport r;
  r.cycles = cycles;
  r.vfux_total = vfux;
  r.sram_reads = reads;
  r.sram_writes = writes;
  return r;
}

ArchConfig one_lane_pe() {
  ArchConfig c;
  c.sram_width_bits = 64;
  c.vfu_width_bits = 8;
  c.operand_width_bits = 8;
  c.vfu_count = 1;
  c.vfu_shuffle_max_range = 1;
  return validate(c);
}

}  // namespace

TEST_CASE("utilization is the minimum-to-real latency ratio") {
  const MetricsReport m = compute_metrics(fake_run(200, 10, 5, 0), {100}, one_lane_pe());
  CHECK(m.l_min == 100);
  CHECK(m.l_real == 200);
  CHECK(m.utilization == doctest::Approx(0.5));
}

TEST_CASE("cmr is compute over memory instructions") {
  const MetricsReport m = compute_metrics(fake_run(1000, 800, 90, 10), {1000}, one_lane_pe());
  CHECK(m.n_compute == 800);
  CHECK(m.n_memory == 100);
  CHECK(m.cmr == doctest::Approx(8.0));
}

TEST_CASE("zero memory accesses report an infinity sentinel") {
  const MetricsReport m = compute_metrics(fake_run(10, 5, 0, 0), {10}, one_lane_pe());
  CHECK(m.cmr_undefined);
  CHECK(std::isinf(m.cmr));
}

TEST_CASE("l_min divides the MACs over all PE lanes") {
  ArchConfig c;
  c.vfu_count = 2;  // 2 VFUs x 64 lanes
  const MetricsReport m = compute_metrics(fake_run(400, 1, 1, 0), {6400}, validate(c));
  CHECK(m.l_min == 50);
}

TEST_CASE("bandwidth scaling: unit coefficients at one PE") {
  const ScalingModel unit{1.0, 1.0, 1.0};
  const BandwidthPoint p = bandwidth_scaling(1, unit);
  CHECK(p.provet == doctest::Approx(1.0));
  CHECK(p.gpu == doctest::Approx(1.0));
  CHECK(p.sa == doctest::Approx(1.0));
}

TEST_CASE("bandwidth scaling: the array grows with the root of the PE count") {
  const ScalingModel unit{1.0, 1.0, 1.0};
  CHECK(bandwidth_scaling(64, unit).sa == doctest::Approx(8.0));
  for (std::uint64_t n : {4ull, 16ull, 64ull}) {
    const auto p = bandwidth_scaling(n, unit);
    CHECK(p.provet / p.sa == doctest::Approx(std::sqrt(static_cast<double>(n))));
  }
}

TEST_CASE("bandwidth scaling: provet quadruples where the array doubles") {
  const ScalingModel m{1.0, 0.5, 2.0};
  for (std::uint64_t n : {1ull, 4ull, 16ull}) {
    const auto a = bandwidth_scaling(n, m);
    const auto b = bandwidth_scaling(4 * n, m);
    CHECK(b.provet / a.provet == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(b.sa / a.sa == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.gpu / a.gpu == doctest::Approx(4.0).epsilon(1e-12));
  }
}

TEST_CASE("provet-to-array bandwidth ratio strictly increases with PEs") {
  const ScalingModel m{1.0, 0.8, 1.0};
  double prev = 0.0;
  for (std::uint64_t n = 1; n <= 1024; n *= 2) {
    const auto p = bandwidth_scaling(n, m);
    const double ratio = p.provet / p.sa;
    CHECK(ratio > prev);
    prev = ratio;
  }
}

TEST_CASE("scaling model validation") {
  CHECK_THROWS_AS(validate_scaling_model({0.5, 0.8, 1.0}), Error);
  CHECK_THROWS_AS(validate_scaling_model({1.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(scaling_sweep({1, 2}, {0.5, 0.8, 1.0}), Error);
}

TEST_CASE("fold utilization of a square array") {
  CHECK(sa_fold_utilization(11, 11) == doctest::Approx(1.0));
  CHECK(sa_fold_utilization(12, 11) == doctest::Approx((11.0 / 12.0) * (11.0 / 12.0)));
  for (std::uint32_t m = 1; m <= 5; ++m) CHECK(sa_fold_utilization(11 * m, 11) == doctest::Approx(1.0));
  CHECK(sa_fold_utilization(10, 11) == doctest::Approx(0.0));
  // Sawtooth: utilization dips right above each multiple.
  CHECK(sa_fold_utilization(23, 11) < 1.0);
  CHECK(sa_fold_utilization(22, 11) == doctest::Approx(1.0));
}

TEST_CASE("interconnect hop model") {
  CHECK(sa_avg_hops(16) == doctest::Approx(8.0));
  CHECK(kProvetAvgHops == doctest::Approx(1.0));
}

TEST_CASE("scaling sweep fills bandwidths, hops and fold utilization") {
  const auto rows = scaling_sweep({16, 121}, {1.0, 0.8, 1.0}, 11);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].bw.sa == doctest::Approx(4.0));
  CHECK(rows[0].sa_hops == doctest::Approx(2.0));
  CHECK(rows[0].sa_fold_util == doctest::Approx(0.0));  // 4x4 array cannot hold an 11x11 kernel
  CHECK(rows[1].sa_fold_util == doctest::Approx(1.0));  // 11x11 array fits it exactly
  CHECK(rows[1].provet_hops == doctest::Approx(1.0));

  const std::string csv = emit_scaling(rows, ReportFormat::csv);
  CHECK(csv.find("n_pes,provet_bw,sa_bw,gpu_bw,sa_hops,provet_hops,sa_fold_util") == 0);
}

TEST_CASE("csv report: header plus one row, RFC 4180 line ends, deterministic") {
  MetricsReport m;
  m.name = "demo";
  m.l_real = 100;
  m.l_min = 50;
  m.utilization = 0.5;
  m.cmr = 8.0;
  m.sram_reads = 30;
  m.total_energy = 12.5;
  const std::string a = emit_report({m}, ReportFormat::csv);
  const std::string b = emit_report({m}, ReportFormat::csv);
  CHECK(a == b);
  CHECK(a.substr(0, a.find("\r\n")) == "name,cycles,utilization,cmr,sram_reads,energy");
  CHECK(std::count(a.begin(), a.end(), '\n') == 2);
  CHECK(a.find("demo,100,0.5,8,30,12.5\r\n") != std::string::npos);

  MetricsReport quoted = m;
  quoted.name = "has,comma";
  const std::string q = emit_report({quoted}, ReportFormat::csv);
  CHECK(q.find("\"has,comma\"") != std::string::npos);
}

TEST_CASE("table report sorts by name") {
  MetricsReport a, b;
  a.name = "zeta";
  b.name = "alpha";
  const std::string t = emit_report({a, b}, ReportFormat::table);
  CHECK(t.find("alpha") < t.find("zeta"));
}

TEST_CASE("empty report lists are rejected") {
  CHECK_THROWS_AS(emit_report({}, ReportFormat::csv), Error);
}
