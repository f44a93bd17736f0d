#include <gtest/gtest.h>

#include <osmosim/kernels.hpp>
#include <osmosim/metrics.hpp>

using namespace osmosim;

namespace {
Ectx ectx_with(const KernelModel& k, Cycle limit = kUnlimitedCycles) {
  Ectx e;
  e.kernel = k;
  e.slo.kernel_cycle_limit = limit;
  e.l2_segment = {0, 1u << 20};
  e.slo.allowed_host_ranges = {{0x1'0000'0000ULL, 1ULL << 30}};
  return e;
}

PacketDescriptor packet(Bytes total) { return PacketDescriptor{1, total, 0, 0}; }

struct FakeIo {
  std::uint64_t next = 100;
  std::vector<IoOp> ops;
  SubmitOutcome operator()(const IoOp& op, KernelInstance&, Cycle) {
    ops.push_back(op);
    return {SubmitOutcome::Status::submitted, next++};
  }
};
}  // namespace

TEST(KernelModel, SpinComputeCycles) {
  const KernelModel k = spin_kernel(0, 2);
  EXPECT_EQ(k.compute_cycles(64), 128u);
}

TEST(KernelModel, ReduceIsAffine) {
  const KernelModel k = builtin_kernels().at("reduce");
  // Equal size steps give equal cost steps; doubling steps double the cost step.
  EXPECT_EQ(k.compute_cycles(3072) - k.compute_cycles(2048), k.compute_cycles(2048) - k.compute_cycles(1024));
  EXPECT_EQ(k.compute_cycles(4096) - k.compute_cycles(2048), 2 * (k.compute_cycles(2048) - k.compute_cycles(1024)));
}

TEST(KernelModel, CalibrationAgainstPpb) {
  const SimConfig cfg;
  const double budget64 = ppb(32, 64, 400e9);
  for (const auto& [name, k] : builtin_kernels()) {
    const double service = nominal_service_cycles(k, 64, cfg) / static_cast<double>(cfg.clock_freq);
    EXPECT_GT(service, budget64) << name;
  }
  for (const char* name : {"io_read", "io_write"}) {
    const KernelModel k = builtin_kernels().at(name);
    for (Bytes size : {256u, 1024u, 4096u}) {
      const double compute = static_cast<double>(k.compute_cycles(size - kHeaderSize)) / static_cast<double>(cfg.clock_freq);
      EXPECT_LT(compute, ppb(32, size, 400e9)) << name << " " << size;
    }
  }
}

TEST(KernelModel, SinglePuExceedsBudgetEverywhere) {
  const SimConfig cfg;
  for (const auto& [name, k] : builtin_kernels()) {
    if (!is_compute_bound(k)) continue;
    for (Bytes size : {64u, 256u, 1024u, 4096u})
      EXPECT_GT(nominal_service_cycles(k, size, cfg) / 1e9, ppb(1, size, 400e9)) << name << " " << size;
  }
}

TEST(KernelInstance, CopyThenCompute) {
  const Ectx e = ectx_with(spin_kernel(0, 2));
  KernelInstance k(1, e, 0, 0, packet(64 + kHeaderSize), 0, 5);
  FakeIo io;
  Cycle c = 0;
  while (k.advance(c, io) == AdvanceResult::running) ++c;
  EXPECT_EQ(k.phase(), KernelPhase::done);
  EXPECT_EQ(k.consumed_cycles(), 128u);
  EXPECT_EQ(c + 1, 5u + 128u);
  EXPECT_EQ(k.end_cycle(), 5u + 128u);
}

TEST(KernelInstance, WatchdogTerminatesAtLimit) {
  const Ectx e = ectx_with(spin_kernel(2000, 0), 1000);
  KernelInstance k(1, e, 0, 0, packet(64), 0, 0);
  FakeIo io;
  Cycle c = 0;
  AdvanceResult r;
  while ((r = k.advance(c, io)) == AdvanceResult::running) ++c;
  EXPECT_EQ(r, AdvanceResult::terminated);
  EXPECT_EQ(k.consumed_cycles(), 1000u);
}

TEST(KernelInstance, BlockingWriteWaitsForCompletion) {
  const Ectx e = ectx_with(builtin_kernels().at("io_write"));
  KernelInstance k(1, e, 0, 0, packet(256), 0, 0);
  FakeIo io;
  Cycle c = 0;
  while (k.phase() == KernelPhase::running) ASSERT_EQ(k.advance(c++, io), AdvanceResult::running);
  EXPECT_EQ(k.phase(), KernelPhase::io_wait);
  ASSERT_EQ(io.ops.size(), 1u);
  EXPECT_EQ(io.ops[0].kind, IoKind::dma_write_host);
  EXPECT_EQ(io.ops[0].size, 256 - kHeaderSize);
  EXPECT_TRUE(io.ops[0].blocking);
  EXPECT_EQ(k.consumed_cycles(), 30u + 1u);  // fixed cost, then the issue cycle
  for (int i = 0; i < 50; ++i) EXPECT_EQ(k.advance(c++, io), AdvanceResult::running);
  EXPECT_TRUE(k.on_io_complete(100, c));
  EXPECT_EQ(k.phase(), KernelPhase::done);
}

TEST(KernelInstance, SoftwareFragmentationIssuesChunks) {
  const Ectx e = ectx_with(builtin_kernels().at("io_write"));
  KernelInstance k(1, e, 0, 0, packet(1024 + kHeaderSize), 0, 0);
  k.set_software_fragmentation(512, 20);
  FakeIo io;
  Cycle c = 0;
  for (int i = 0; i < 200 && !k.finished(); ++i) {
    k.advance(c++, io);
    if (k.phase() == KernelPhase::io_wait)
      for (std::uint64_t id : std::vector<std::uint64_t>(k.outstanding())) k.on_io_complete(id, c);
  }
  ASSERT_EQ(io.ops.size(), 2u);
  EXPECT_EQ(io.ops[0].size + io.ops[1].size, 1024u);
  EXPECT_EQ(io.ops[1].address, io.ops[0].address + 512);
}
