#include <gtest/gtest.h>

#include <osmosim/presets.hpp>
#include <osmosim/traffic.hpp>

using namespace osmosim;

namespace {
FlowSpec flow(SizeDist size, double share) {
  FlowSpec f;
  f.name = "f";
  f.size = std::move(size);
  f.arrival.share = share;
  return f;
}
}  // namespace

TEST(Trace, FullRateFixedSizeMatchesLinkRate) {
  const SimConfig cfg;
  FlowSpec f = flow(SizeDist::constant(64), 1.0);
  f.stop_cycle = 100000;
  f.volume_bytes = 1ULL << 40;
  const auto t = generate_trace(f, 0, cfg, 1);
  Bytes bytes = 0;
  for (const Packet& p : t) bytes += p.total_size;
  const double rate = static_cast<double>(bytes) / 100000.0;
  EXPECT_NEAR(rate, 50.0, 0.05);
  ASSERT_GT(t.size(), 2u);
  for (std::size_t i = 1; i < t.size(); ++i) {
    const Cycle gap = t[i].arrival_cycle - t[i - 1].arrival_cycle;
    ASSERT_TRUE(gap == 1 || gap == 2) << gap;
  }
}

TEST(Trace, ShareRateForLognormal) {
  const SimConfig cfg;
  FlowSpec f = flow(SizeDist::lognormal(std::log(512.0), 0.8, 64, 4096), 0.3);
  f.stop_cycle = 200000;
  f.volume_bytes = 1ULL << 40;
  const auto t = generate_trace(f, 0, cfg, 7);
  Bytes bytes = 0;
  for (const Packet& p : t) bytes += p.total_size;
  EXPECT_NEAR(static_cast<double>(bytes) / 200000.0, 15.0, 15.0 * 0.005);
}

TEST(Trace, EmptyVolume) {
  const SimConfig cfg;
  FlowSpec f = flow(SizeDist::constant(64), 1.0);
  EXPECT_TRUE(generate_trace(f, 0, cfg, 1).empty());
}

TEST(Trace, DeterministicPerSeed) {
  const SimConfig cfg;
  FlowSpec f = flow(SizeDist::lognormal(std::log(512.0), 0.8, 64, 4096), 0.5);
  f.volume_packets = 2000;
  const auto a = generate_trace(f, 0, cfg, 11);
  const auto b = generate_trace(f, 0, cfg, 11);
  const auto c = generate_trace(f, 0, cfg, 12);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].arrival_cycle, b[i].arrival_cycle);
    ASSERT_EQ(a[i].total_size, b[i].total_size);
    differs |= a[i].total_size != c[i].total_size;
  }
  EXPECT_TRUE(differs);
}

TEST(Trace, LognormalIsClipped) {
  const SimConfig cfg;
  FlowSpec f = flow(SizeDist::lognormal(std::log(512.0), 2.0, 100, 900), 1.0);
  f.volume_packets = 5000;
  for (const Packet& p : generate_trace(f, 0, cfg, 3)) {
    ASSERT_GE(p.total_size, 100u);
    ASSERT_LE(p.total_size, 900u);
  }
}

TEST(Trace, SweepCyclesSizes) {
  const SimConfig cfg;
  SizeDist d;
  d.kind = SizeDistKind::sweep;
  d.sweep = {64, 256};
  FlowSpec f = flow(d, 1.0);
  f.volume_packets = 4;
  const auto t = generate_trace(f, 0, cfg, 1);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].total_size, 64u);
  EXPECT_EQ(t[1].total_size, 256u);
  EXPECT_EQ(t[2].total_size, 64u);
}

TEST(Trace, FileRoundTrip) {
  const SimConfig cfg;
  const Scenario s = preset_compute_mix();
  const auto t = generate_scenario_trace(s, cfg, 5);
  std::stringstream ss;
  write_trace(ss, t);
  const auto back = read_trace(ss, s);
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ASSERT_EQ(back[i].arrival_cycle, t[i].arrival_cycle);
    ASSERT_EQ(back[i].source_flow, t[i].source_flow);
    ASSERT_EQ(back[i].total_size, t[i].total_size);
  }
}

TEST(Presets, PuContention) {
  const Scenario s = preset("pu-contention");
  ASSERT_EQ(s.flows.size(), 2u);
  EXPECT_EQ(s.flows[0].slo.compute_priority, s.flows[1].slo.compute_priority);
  EXPECT_EQ(s.flows[0].arrival.share, s.flows[1].arrival.share);
  EXPECT_EQ(s.flows[1].kernel.per_byte_cost, 2 * s.flows[0].kernel.per_byte_cost);
  EXPECT_EQ(s.flows[1].kernel.fixed_cost, 2 * s.flows[0].kernel.fixed_cost);
}

TEST(Presets, ComputeMixSizes) {
  const Scenario s = preset("compute-mix");
  ASSERT_EQ(s.flows.size(), 4u);
  EXPECT_EQ(s.flows[0].kernel.name, "reduce");
  EXPECT_EQ(s.flows[0].size.fixed, 64u);
  EXPECT_EQ(s.flows[3].kernel.name, "histogram");
  EXPECT_EQ(s.flows[3].size.clip_min, 3072u);
  EXPECT_EQ(s.flows[3].size.clip_max, 4096u);
}

TEST(Presets, StandaloneSweep) {
  const auto v = preset_sweep("standalone-reduce");
  ASSERT_EQ(v.size(), 4u);
  const Bytes want[] = {64, 256, 1024, 4096};
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(v[i].flows.size(), 1u);
    EXPECT_EQ(v[i].flows[0].size.fixed, want[i]);
  }
}

TEST(Presets, UnknownNameThrows) { EXPECT_THROW(preset("nope"), ScenarioError); }
