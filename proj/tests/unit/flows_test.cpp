#include <gtest/gtest.h>

#include <random>

#include <osmosim/control_plane.hpp>
#include <osmosim/matching.hpp>

using namespace osmosim;

namespace {
constexpr Bytes MiB = 1u << 20;

MatchRule udp_rule(std::uint32_t dst_ip, std::uint16_t port) {
  MatchRule r;
  r.tuple.dst_ip = dst_ip;
  r.tuple.dst_port = port;
  r.tuple.proto = kProtoUdp;
  return r;
}

KernelModel bare_kernel() {
  KernelModel k;
  k.name = "bare";
  k.kernel_binary_size = 0;
  return k;
}
}  // namespace

TEST(ControlPlane, FirstEctxStartsAtZero) {
  ControlPlane cp(4 * MiB);
  const auto id = cp.create_ectx(udp_rule(1, 1), SloPolicy{}, bare_kernel(), MiB);
  EXPECT_EQ(cp.ectxs()[id].l2_segment.base, 0u);
  EXPECT_EQ(cp.ectxs()[id].l2_segment.length, MiB);
}

TEST(ControlPlane, FifthMebibyteDoesNotFit) {
  ControlPlane cp(4 * MiB);
  for (std::uint16_t i = 0; i < 4; ++i) cp.create_ectx(udp_rule(1, i), SloPolicy{}, bare_kernel(), MiB);
  EXPECT_THROW(cp.create_ectx(udp_rule(1, 9), SloPolicy{}, bare_kernel(), MiB), AllocationError);
}

TEST(ControlPlane, IdenticalThreeTuplesConflict) {
  ControlPlane cp(4 * MiB);
  cp.create_ectx(udp_rule(7, 80), SloPolicy{}, bare_kernel(), 1024);
  EXPECT_THROW(cp.create_ectx(udp_rule(7, 80), SloPolicy{}, bare_kernel(), 1024), RuleConflict);
}

TEST(ControlPlane, QuotaBoundsRequest) {
  ControlPlane cp(4 * MiB);
  SloPolicy slo;
  slo.memory_quota = 1024;
  EXPECT_THROW(cp.create_ectx(udp_rule(1, 1), slo, bare_kernel(), 2048), AllocationError);
}

TEST(ControlPlane, SegmentsStayDisjointUnderChurn) {
  ControlPlane cp(4 * MiB);
  std::mt19937_64 gen(5);
  std::vector<std::uint32_t> live;
  std::uint16_t port = 0;
  for (int it = 0; it < 500; ++it) {
    if (!live.empty() && gen() % 3 == 0) {
      const std::size_t k = gen() % live.size();
      cp.destroy_ectx(live[k]);
      live.erase(live.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
      try {
        live.push_back(cp.create_ectx(udp_rule(2, ++port), SloPolicy{}, bare_kernel(), 1 + gen() % (MiB / 2)));
      } catch (const AllocationError&) {
      }
    }
    const auto& segs = cp.allocator().segments();
    ASSERT_LE(cp.allocator().allocated(), 4 * MiB);
    for (std::size_t i = 1; i < segs.size(); ++i) ASSERT_LE(segs[i - 1].base + segs[i - 1].length, segs[i].base);
  }
}

TEST(MemoryCheck, SegmentBoundaries) {
  Ectx e;
  e.l2_segment = {4096, 1024};
  EXPECT_EQ(check_memory_access(e, MemorySpace::l2_local, 4096, 1024), AccessResult::ok);
  EXPECT_EQ(e.events.size(), 0u);
  EXPECT_EQ(check_memory_access(e, MemorySpace::l2_local, 4097, 1024), AccessResult::violation);
  ASSERT_EQ(e.events.size(), 1u);
  EXPECT_EQ(e.events.all()[0].kind, EventKind::illegal_memory_access);
  EXPECT_EQ(e.events.all()[0].address, 4097u);
}

TEST(MemoryCheck, SecondHostRange) {
  Ectx e;
  e.slo.allowed_host_ranges = {{0x1000, 0x1000}, {0x10000, 0x2000}};
  EXPECT_EQ(check_memory_access(e, MemorySpace::host, 0x10800, 512), AccessResult::ok);
  EXPECT_EQ(check_memory_access(e, MemorySpace::host, 0x3000, 1), AccessResult::violation);
}

TEST(EventQueue, PollReturnsOnlyNewEvents) {
  EventQueue q;
  q.push(Event{});
  q.push(Event{});
  EXPECT_EQ(q.poll().size(), 2u);
  EXPECT_EQ(q.poll().size(), 0u);
  q.push(Event{});
  EXPECT_EQ(q.unread(), 1u);
}

TEST(Matching, ThreeTupleHit) {
  MatchTable t;
  t.insert(udp_rule(0x0A000001, 4242), 3);
  Packet p;
  p.tuple = {.src_ip = 0xC0A80001, .dst_ip = 0x0A000001, .src_port = 999, .dst_port = 4242, .proto = kProtoUdp};
  EXPECT_EQ(t.classify(p), 3u);
}

TEST(Matching, NoMatchIsCounted) {
  MatchTable t;
  t.insert(udp_rule(0x0A000001, 4242), 0);
  Packet p;
  p.tuple = {.dst_ip = 0x0A000002, .dst_port = 4242, .proto = kProtoUdp};
  EXPECT_FALSE(t.classify(p));
  EXPECT_EQ(t.unmatched(), 1u);
}

TEST(Matching, FiveTupleNeedsAllFields) {
  MatchTable t;
  MatchRule r;
  r.kind = TupleKind::five_tuple;
  r.tuple = {.src_ip = 0x0B000001, .dst_ip = 0x0A000001, .src_port = 1234, .dst_port = 80, .proto = kProtoTcp};
  t.insert(r, 1);
  Packet p;
  p.tuple = r.tuple;
  EXPECT_EQ(t.classify(p), 1u);
  p.tuple.src_port = 1235;
  EXPECT_FALSE(t.classify(p));
  p.tuple = r.tuple;
  p.tuple.src_ip = 0x0B000002;
  EXPECT_FALSE(t.classify(p));
}

TEST(Admit, EmptyFifo) {
  Fmq q;
  EXPECT_EQ(admit(q, PacketDescriptor{}), Admission::admitted);
  EXPECT_EQ(q.fifo.size(), 1u);
}

TEST(Admit, FullFifoDropsAndMarks) {
  Fmq q;
  q.capacity = 2;
  admit(q, PacketDescriptor{});
  admit(q, PacketDescriptor{});
  EXPECT_EQ(admit(q, PacketDescriptor{}), Admission::dropped);
  EXPECT_EQ(q.drops, 1u);
  EXPECT_EQ(q.congestion_marks, 1u);
}

TEST(Admit, BurstOverCapacityDropsExactlyTheExcess) {
  for (std::uint32_t k : {0u, 1u, 7u, 300u}) {
    Fmq q;
    q.capacity = 256;
    for (std::uint32_t i = 0; i < q.capacity + k; ++i) admit(q, PacketDescriptor{i, 64, 0, 0});
    EXPECT_EQ(q.drops, k);
    EXPECT_EQ(q.fifo.size(), 256u);
    for (std::uint32_t i = 0; i < 256; ++i) ASSERT_EQ(q.fifo[i].packet_id, i);  // drop-newest, order kept
  }
}
