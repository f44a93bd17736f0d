#include <gtest/gtest.h>

#include <osmosim/io_engine.hpp>

using namespace osmosim;

namespace {
IoRequest request(std::uint64_t id, std::uint32_t ectx, Bytes len, Cycle submit, Cycle ready, std::uint32_t cluster = 0) {
  IoRequest r;
  r.id = id;
  r.ectx = ectx;
  r.total_len = len;
  r.cluster = cluster;
  r.submit_cycle = submit;
  r.ready_cycle = ready;
  return r;
}

SimConfig managed(Bytes frag = 512) {
  SimConfig c;
  c.io_arbiter = IoArbiterKind::wrr;
  c.fragmentation_mode = FragmentationMode::hardware;
  c.fragment_size = frag;
  return c;
}

std::vector<IoCompletion> run_until_idle(IoEngine& e, Cycle from = 0, Cycle limit = 100000) {
  std::vector<IoCompletion> done;
  for (Cycle c = from; c < limit && !e.idle(); ++c) e.step(c, done);
  return done;
}
}  // namespace

TEST(Fragment, Examples) {
  EXPECT_EQ(fragment(4096, 512), std::vector<Bytes>(8, 512));
  EXPECT_EQ(fragment(100, 512), std::vector<Bytes>{100});
  EXPECT_EQ(fragment(1000, 512), (std::vector<Bytes>{512, 488}));
  EXPECT_EQ(fragment(4096, 0), std::vector<Bytes>{4096});
}

TEST(IoEngine, LocalWriteTakesLatencyPlusBusCycles) {
  SimConfig cfg;  // 64 B/cycle interconnect
  IoEngine e(cfg, cfg.interconnect_bandwidth, 1);
  const Cycle latency = 17;
  IoRequest r = request(1, 0, 512, 0, latency);
  r.kind = IoKind::dma_write_l2;
  r.blocking = false;
  e.submit(r);
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(done[0].done_cycle, latency + 512 / 64);
}

TEST(IoEngine, FragmentedRequestCompletesOnceAfterAllFragments) {
  const SimConfig cfg = managed();
  IoEngine e(cfg, cfg.interconnect_bandwidth, 1);
  e.submit(request(1, 0, 4096, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 1u);
  EXPECT_EQ(done[0].bytes, 4096u);
  EXPECT_EQ(done[0].done_cycle, 8 * (512 / 64 + cfg.frag_overhead_cycles));
  EXPECT_EQ(e.total_granted(), 4096u);
}

TEST(IoEngine, EventMessageGoesFirst) {
  for (IoArbiterKind kind : {IoArbiterKind::fifo, IoArbiterKind::wrr}) {
    SimConfig cfg;
    cfg.io_arbiter = kind;
    IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
    for (std::uint64_t i = 0; i < 4; ++i) e.submit(request(i, static_cast<std::uint32_t>(i % 2), 4096, 0, 0));
    IoRequest eq = request(99, 1, 64, 0, 0);
    eq.event_message = true;
    e.submit(eq);
    const auto done = run_until_idle(e);
    ASSERT_EQ(done.size(), 5u);
    EXPECT_TRUE(done[0].event_message);
    EXPECT_EQ(done[0].done_cycle, 1u);
  }
}

TEST(IoEngine, WaitingOnLatencyDoesNotHoldTheBus) {
  SimConfig cfg;
  cfg.io_arbiter = IoArbiterKind::fifo;
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  e.submit(request(1, 0, 64, 0, 1000));
  e.submit(request(2, 1, 64, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 2u);
  EXPECT_EQ(done[0].request_id, 2u);
  EXPECT_EQ(done[0].done_cycle, 1u);
}

TEST(IoEngine, StrictFifoOrderBlocksBehindLatency) {
  SimConfig cfg;
  cfg.io_arbiter = IoArbiterKind::fifo;
  cfg.fifo_strict_order = true;
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  e.submit(request(1, 0, 64, 0, 1000));
  e.submit(request(2, 1, 64, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 2u);
  EXPECT_EQ(done[0].request_id, 1u);
}

TEST(IoEngine, UnfragmentedTransferHoldsTheBus) {
  SimConfig cfg;
  cfg.io_arbiter = IoArbiterKind::fifo;
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  e.submit(request(1, 0, 4096, 0, 0));
  e.submit(request(2, 1, 64, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 2u);
  EXPECT_EQ(done[1].request_id, 2u);
  EXPECT_EQ(done[1].done_cycle, 4096 / 64 + 1);
}

TEST(IoEngine, FragmentationBoundsTheWait) {
  const SimConfig cfg = managed();
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  e.submit(request(1, 0, 4096, 0, 0));
  e.submit(request(2, 1, 64, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 2u);
  EXPECT_EQ(done[0].request_id, 2u);
  EXPECT_LE(done[0].done_cycle, 512 / 64 + cfg.frag_overhead_cycles + 1);
}

TEST(IoEngine, SoleInputGetsTheWholeBus) {
  const SimConfig cfg = managed();
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  for (std::uint64_t i = 0; i < 10; ++i) e.submit(request(i, 0, 512, 0, 0));
  const auto done = run_until_idle(e);
  EXPECT_EQ(done.back().done_cycle, 10 * (512 / 64));
  EXPECT_EQ(e.busy_cycles(), done.back().done_cycle);
}

TEST(IoEngine, EqualWeightsAlternate) {
  const SimConfig cfg = managed();
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  for (std::uint64_t i = 0; i < 8; ++i) e.submit(request(i, static_cast<std::uint32_t>(i / 4), 512, 0, 0));
  const auto done = run_until_idle(e);
  ASSERT_EQ(done.size(), 8u);
  for (std::size_t i = 0; i < done.size(); ++i) EXPECT_EQ(done[i].ectx, i % 2) << i;
}

TEST(IoEngine, WeightedBytesTwoToOne) {
  const SimConfig cfg = managed();
  IoEngine e(cfg, cfg.interconnect_bandwidth, 2);
  e.set_tenant_weight(0, 2);
  e.set_tenant_weight(1, 1);
  std::uint64_t next = 0;
  std::vector<IoCompletion> done;
  Bytes served[2] = {0, 0};
  int backlog[2] = {0, 0};
  for (Cycle c = 0; c < 100000; ++c) {
    for (std::uint32_t t = 0; t < 2; ++t)
      for (; backlog[t] < 4; ++backlog[t]) e.submit(request(next++, t, 1536, c, c));
    done.clear();
    e.step(c, done);
    for (const auto& d : done) --backlog[d.ectx];
    for (const auto& [t, b] : e.take_granted()) served[t] += b;
  }
  const double quantum = static_cast<double>(cfg.dwrr_quantum());
  EXPECT_NEAR(static_cast<double>(served[0]) / 2.0, static_cast<double>(served[1]), quantum);
  EXPECT_GT(served[1], 0u);
}

TEST(DwrrArbiter, ServesBytesInWeightRatioWithVariableUnits) {
  DwrrArbiter a(512);
  a.add_input(3);
  a.add_input(1);
  const Bytes len[2] = {300, 500};
  Bytes served[2] = {0, 0};
  for (int i = 0; i < 100000; ++i) {
    const auto pick = a.pick([&](std::size_t k) { return len[k]; }, [](std::size_t) { return true; });
    ASSERT_TRUE(pick);
    served[*pick] += len[*pick];
  }
  const double ratio = static_cast<double>(served[0]) / static_cast<double>(served[1]);
  EXPECT_NEAR(ratio, 3.0, 0.01);
}
