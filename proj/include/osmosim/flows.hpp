#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "kernel_model.hpp"

namespace osmosim {

inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;

struct FlowTuple {
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t proto = kProtoUdp;
  bool operator==(const FlowTuple&) const = default;
};

struct Packet {
  std::uint64_t id = 0;
  FlowTuple tuple;
  Bytes total_size = 64;
  Cycle arrival_cycle = 0;
  std::uint32_t source_flow = 0;  // index of the generating FlowSpec

  Bytes payload_size() const { return total_size - kHeaderSize; }
};

enum class TupleKind { three_tuple, five_tuple };

struct MatchRule {
  TupleKind kind = TupleKind::three_tuple;
  FlowTuple tuple;  // three-tuple rules only look at dst_ip, dst_port, proto

  bool matches(const FlowTuple& t) const {
    const bool three = t.dst_ip == tuple.dst_ip && t.dst_port == tuple.dst_port &&
                       t.proto == tuple.proto;
    if (kind == TupleKind::three_tuple) return three;
    return three && t.src_ip == tuple.src_ip && t.src_port == tuple.src_port;
  }

  // Two rules overlap when some packet could match both.
  bool overlaps(const MatchRule& o) const {
    const bool three = tuple.dst_ip == o.tuple.dst_ip && tuple.dst_port == o.tuple.dst_port &&
                       tuple.proto == o.tuple.proto;
    if (!three) return false;
    if (kind == TupleKind::five_tuple && o.kind == TupleKind::five_tuple)
      return tuple.src_ip == o.tuple.src_ip && tuple.src_port == o.tuple.src_port;
    return true;
  }

  bool operator==(const MatchRule&) const = default;
};

struct AddressRange {
  std::uint64_t base = 0;
  std::uint64_t length = 0;

  bool contains(std::uint64_t addr, std::uint64_t len) const {
    if (addr < base) return false;
    const std::uint64_t off = addr - base;
    return off <= length && len <= length - off;
  }
  bool operator==(const AddressRange&) const = default;
};

struct SloPolicy {
  Priority compute_priority = 1;
  Priority dma_priority = 1;
  Priority egress_priority = 1;
  Cycle kernel_cycle_limit = kUnlimitedCycles;
  std::uint32_t fmq_fifo_capacity = 256;
  Bytes memory_quota = 4u << 20;
  std::vector<AddressRange> allowed_host_ranges;

  static SloPolicy with_priority(Priority p) {
    SloPolicy s;
    s.compute_priority = s.dma_priority = s.egress_priority = p;
    return s;
  }

  void validate() const {
    if (compute_priority < 1 || dma_priority < 1 || egress_priority < 1)
      throw ConfigError("SLO priorities must be >= 1");
    if (fmq_fifo_capacity < 1) throw ConfigError("FMQ FIFO capacity must be >= 1");
    if (kernel_cycle_limit == 0) throw ConfigError("kernel cycle limit must be >= 1");
  }
  bool operator==(const SloPolicy&) const = default;
};

enum class EventKind { cycle_limit_exceeded, illegal_memory_access, allocation_error };

inline std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::cycle_limit_exceeded: return "cycle_limit_exceeded";
    case EventKind::illegal_memory_access: return "illegal_memory_access";
    case EventKind::allocation_error: return "allocation_error";
  }
  return "?";
}

struct Event {
  EventKind kind = EventKind::cycle_limit_exceeded;
  Cycle cycle = 0;
  std::uint64_t kernel_id = 0;
  std::uint64_t address = 0;  // illegal_memory_access
  Bytes bytes = 0;            // allocation_error
  std::optional<Cycle> delivered;  // cycle the EQ message reached the host
};

// Host-visible, append-only event log with a read cursor.
class EventQueue {
 public:
  std::size_t push(Event e) {
    events_.push_back(e);
    return events_.size() - 1;
  }

  // Returns every event appended since the previous poll.
  std::vector<Event> poll() {
    std::vector<Event> out(events_.begin() + static_cast<std::ptrdiff_t>(cursor_), events_.end());
    cursor_ = events_.size();
    return out;
  }

  void mark_delivered(std::size_t index, Cycle at) { events_.at(index).delivered = at; }

  const std::vector<Event>& all() const { return events_; }
  std::size_t size() const { return events_.size(); }
  std::size_t unread() const { return events_.size() - cursor_; }

 private:
  std::vector<Event> events_;
  std::size_t cursor_ = 0;
};

struct PacketDescriptor {
  std::uint64_t packet_id = 0;
  Bytes total_size = 0;
  Cycle arrival_cycle = 0;   // first byte offered to the link
  Cycle enqueue_cycle = 0;   // admitted to the FMQ
};

// Flow management queue: descriptor FIFO plus WLBVT accounting state.
struct Fmq {
  FmqId id = 0;
  std::deque<PacketDescriptor> fifo;
  std::uint32_t capacity = 256;
  Priority prio = 1;
  std::uint32_t cur_pu_occup = 0;
  std::uint64_t total_pu_occup = 0;
  std::uint64_t bvt = 0;
  std::uint64_t congestion_marks = 0;
  std::uint64_t drops = 0;
  std::uint64_t admitted = 0;

  bool empty() const { return fifo.empty(); }
  bool active() const { return !fifo.empty() || cur_pu_occup > 0; }

  double tput() const {
    return bvt == 0 ? 0.0 : static_cast<double>(total_pu_occup) / static_cast<double>(bvt);
  }
};

// tput(a)/prio(a) < tput(b)/prio(b), evaluated exactly in integers.
inline bool normalized_tput_less(const Fmq& a, const Fmq& b) {
  using u128 = unsigned __int128;
  // tput = total / bvt, with tput = 0 when bvt = 0.
  const u128 an = a.bvt == 0 ? 0 : a.total_pu_occup;
  const u128 ad = a.bvt == 0 ? 1 : a.bvt;
  const u128 bn = b.bvt == 0 ? 0 : b.total_pu_occup;
  const u128 bd = b.bvt == 0 ? 1 : b.bvt;
  return an * bd * b.prio < bn * ad * a.prio;
}

struct Ectx {
  std::uint32_t id = 0;
  std::string name;
  MatchRule rule;
  SloPolicy slo;
  KernelModel kernel;
  AddressRange l2_segment;
  EventQueue events;
  FmqId fmq_id = 0;
};

enum class MemorySpace { l2_local, host };

inline bool memory_access_allowed(const Ectx& ectx, MemorySpace space, std::uint64_t addr,
                                  Bytes len) {
  if (space == MemorySpace::l2_local) return ectx.l2_segment.contains(addr, len);
  for (const AddressRange& r : ectx.slo.allowed_host_ranges)
    if (r.contains(addr, len)) return true;
  return false;
}

enum class AccessResult { ok, violation };

// Range check with side effect: a violation appends an illegal_memory_access
// event to the ECTX queue. Terminating the kernel is up to the caller.
inline AccessResult check_memory_access(Ectx& ectx, MemorySpace space, std::uint64_t addr,
                                        Bytes len, std::uint64_t kernel_id = 0, Cycle now = 0) {
  if (memory_access_allowed(ectx, space, addr, len)) return AccessResult::ok;
  Event e;
  e.kind = EventKind::illegal_memory_access;
  e.cycle = now;
  e.kernel_id = kernel_id;
  e.address = addr;
  ectx.events.push(e);
  return AccessResult::violation;
}

}  // namespace osmosim
