#include <gtest/gtest.h>

#include <sstream>

#include <osmosim/osmosim.hpp>

#include "../oracles.hpp"

using namespace osmosim;

namespace {
Scenario single_flow(KernelModel k, Bytes size, std::uint64_t packets) {
  Scenario s = preset_standalone("spin", size);
  s.flows[0].kernel = std::move(k);
  s.flows[0].volume_bytes = 0;
  s.flows[0].volume_packets = packets;
  return s;
}

std::string csv(const SimReport& r) {
  std::ostringstream os;
  write_summary_csv(os, r);
  write_series_csv(os, r.sample_cycles, r.occupancy);
  write_series_csv(os, r.sample_cycles, r.io_bytes);
  write_scalar_series_csv(os, r.sample_cycles, r.jain_windowed);
  return os.str();
}
}  // namespace

TEST(SimCore, EmptyScenario) {
  SimConfig cfg;
  cfg.max_cycles = 5000;
  const SimReport r = run(cfg, Scenario{});
  EXPECT_EQ(r.processed, 0u);
  EXPECT_EQ(r.packets_in, 0u);
}

TEST(SimCore, IdleFlowHasIdleOccupancy) {
  SimConfig cfg;
  cfg.max_cycles = 5000;
  Scenario s = single_flow(spin_kernel(10, 0), 64, 0);
  const SimReport r = run(cfg, s);
  EXPECT_EQ(r.processed, 0u);
  for (const auto& row : r.occupancy)
    for (double v : row) EXPECT_EQ(v, 0.0);
}

TEST(SimCore, SinglePacketFctMatchesHandTrace) {
  for (Bytes size : {64u, 100u, 256u}) {
    SimConfig cfg;
    cfg.local_dma_latency = {10, 10};
    const SimReport r = run(cfg, single_flow(spin_kernel(100, 0), size, 1));
    ASSERT_TRUE(r.flows[0].fct);
    const std::uint64_t want = oracle::single_packet_fct(size, cfg.ingress_bytes_per_cycle(), cfg.interconnect_width(), 10,
                                                         cfg.sched_decision_latency, 100);
    EXPECT_EQ(*r.flows[0].fct, want) << size;
    EXPECT_EQ(r.flows[0].completion.p50, r.flows[0].completion.p99);
  }
  SimConfig cfg;
  cfg.local_dma_latency = {10, 10};
  EXPECT_EQ(*run(cfg, single_flow(spin_kernel(100, 0), 64, 1)).flows[0].fct, 113u);
}

TEST(SimCore, DecisionLatencyFloorsTheCopy) {
  SimConfig cfg;
  cfg.local_dma_latency = {0, 0};
  cfg.sched_decision_latency = 5;
  const SimReport r = run(cfg, single_flow(spin_kernel(100, 0), 64, 1));
  EXPECT_EQ(*r.flows[0].fct, oracle::single_packet_fct(64, 50, 64, 0, 5, 100));
}

// A packet whose last byte lands on the cycle a PU frees up is dispatched in
// that same cycle.
TEST(SimCore, ArrivalBeforeScheduleInOneCycle) {
  SimConfig cfg;
  cfg.num_clusters = 1;
  cfg.pus_per_cluster = 1;
  cfg.local_dma_latency = {10, 10};
  Scenario s = single_flow(spin_kernel(100, 0), 64, 2);
  std::vector<Packet> trace(2);
  for (std::size_t i = 0; i < 2; ++i) {
    trace[i].id = i;
    trace[i].tuple = s.flows[0].rule.tuple;
    trace[i].total_size = 64;
  }
  trace[0].arrival_cycle = 0;
  trace[1].arrival_cycle = 112;  // last byte at 113, the first kernel's end
  Simulator sim(cfg, s, trace);
  sim.run();
  const auto& k = sim.log().kernels;
  ASSERT_EQ(k.size(), 2u);
  EXPECT_EQ(k[0].end, 113u);
  EXPECT_EQ(k[1].enqueue, 113u);
  EXPECT_EQ(k[1].dispatch, 113u);
}

TEST(SimCore, WatchdogPostsOneEvent) {
  SimConfig cfg;
  cfg.local_dma_latency = {10, 10};
  Scenario s = single_flow(spin_kernel(2000, 0), 64, 1);
  s.flows[0].slo.kernel_cycle_limit = 1000;
  Simulator sim(cfg, s);
  const SimReport r = sim.run();
  EXPECT_EQ(r.flows[0].terminated, 1u);
  EXPECT_EQ(r.flows[0].processed, 0u);
  ASSERT_EQ(sim.ectxs()[0].events.size(), 1u);
  EXPECT_EQ(sim.ectxs()[0].events.all()[0].kind, EventKind::cycle_limit_exceeded);
  EXPECT_TRUE(sim.ectxs()[0].events.all()[0].delivered.has_value());
  const auto& k = sim.log().kernels[0];
  EXPECT_EQ(k.end - k.dispatch - 1, 11u + 1000u);  // copy, then the budget
}

TEST(SimCore, IllegalHostAccessTerminatesWithOneEvent) {
  SimConfig cfg;
  Scenario s = single_flow(builtin_kernels().at("io_write"), 256, 3);
  s.flows[0].slo.allowed_host_ranges.clear();
  Simulator sim(cfg, s);
  const SimReport r = sim.run();
  EXPECT_EQ(r.flows[0].terminated, 3u);
  ASSERT_EQ(sim.ectxs()[0].events.size(), 3u);
  for (const Event& e : sim.ectxs()[0].events.all()) EXPECT_EQ(e.kind, EventKind::illegal_memory_access);
}

TEST(SimCore, BlockingFragmentedReadResumesAfterLastFragment) {
  SimConfig cfg = managed_config();
  cfg.host_dma_latency = {1000, 1000};
  cfg.local_dma_latency = {10, 10};
  KernelModel k;
  k.name = "rd";
  k.fixed_cost = 1;
  k.io_program = {io_step(IoKind::dma_read_host, IoSizing::fixed, 4096)};
  Simulator sim(cfg, single_flow(k, 64, 1));
  sim.run();
  ASSERT_EQ(sim.log().io.size(), 1u);
  const auto& io = sim.log().io[0];
  EXPECT_EQ(io.done - io.submit, 1000 + 8 * (512 / 64 + cfg.frag_overhead_cycles));
  EXPECT_EQ(sim.log().kernels[0].end, io.done);
}

TEST(SimCore, DeterministicCsv) {
  for (const char* name : {"compute-mix", "io-mix"}) {
    const Scenario s = preset(name);
    EXPECT_EQ(csv(run(managed_config(), s)), csv(run(managed_config(), s))) << name;
  }
}

TEST(SimCore, SeedChangesTheRun) {
  SimConfig a = managed_config(), b = managed_config();
  b.seed = 2;
  const Scenario s = preset("io-mix");
  EXPECT_NE(csv(run(a, s)), csv(run(b, s)));
}

TEST(SimCore, ConservationAndWorkConservationHold) {
  for (const char* name : {"pu-contention", "compute-mix", "io-mix", "hol-blocking"})
    for (Profile p : kGrid) {
      Simulator sim(apply_profile(SimConfig{}, p), preset(name));
      ASSERT_NO_THROW(sim.run()) << name;
      EXPECT_EQ(sim.conservation_violations(), 0u) << name;
      EXPECT_EQ(sim.work_conservation_violations(), 0u) << name;
    }
}

TEST(SimCore, OverflowDropsAreCounted) {
  SimConfig cfg;
  cfg.num_clusters = 1;
  cfg.pus_per_cluster = 1;
  Scenario s = single_flow(spin_kernel(5000, 0), 64, 50);
  s.flows[0].slo.fmq_fifo_capacity = 4;
  const SimReport r = run(cfg, s);
  EXPECT_EQ(r.flows[0].processed + r.flows[0].dropped, 50u);
  EXPECT_EQ(r.flows[0].dropped, r.flows[0].congestion_marks);
  EXPECT_GT(r.flows[0].dropped, 40u);
}

TEST(SimCore, InvalidConfigThrows) {
  SimConfig cfg;
  cfg.num_clusters = 0;
  EXPECT_THROW(run(cfg, Scenario{}), ConfigError);
  cfg = SimConfig{};
  cfg.fragmentation_mode = FragmentationMode::hardware;
  cfg.fragment_size = 32;
  EXPECT_THROW(run(cfg, Scenario{}), ConfigError);
}
