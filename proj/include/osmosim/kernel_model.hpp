#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"

namespace osmosim {

// Wire header counted in every packet's total size (IPv4 + UDP).
inline constexpr Bytes kHeaderSize = 28;

enum class IoKind { dma_read_host, dma_write_host, dma_read_l2, dma_write_l2, egress_send };

inline bool is_host(IoKind k) { return k == IoKind::dma_read_host || k == IoKind::dma_write_host; }
inline bool is_egress(IoKind k) { return k == IoKind::egress_send; }

inline std::string_view to_string(IoKind k) {
  switch (k) {
    case IoKind::dma_read_host: return "dma_read_host";
    case IoKind::dma_write_host: return "dma_write_host";
    case IoKind::dma_read_l2: return "dma_read_l2";
    case IoKind::dma_write_l2: return "dma_write_l2";
    case IoKind::egress_send: return "egress_send";
  }
  return "?";
}

inline IoKind parse_io_kind(std::string_view s) {
  for (IoKind k : {IoKind::dma_read_host, IoKind::dma_write_host, IoKind::dma_read_l2,
                   IoKind::dma_write_l2, IoKind::egress_send})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown IO kind '" + std::string(s) + "'");
}

// How an IO step's length is derived from the packet it serves.
enum class IoSizing { fixed, payload, packet };

inline std::string_view to_string(IoSizing s) {
  switch (s) {
    case IoSizing::fixed: return "fixed";
    case IoSizing::payload: return "payload";
    case IoSizing::packet: return "packet";
  }
  return "?";
}

inline IoSizing parse_io_sizing(std::string_view s) {
  if (s == "fixed") return IoSizing::fixed;
  if (s == "payload") return IoSizing::payload;
  if (s == "packet") return IoSizing::packet;
  throw ConfigError("unknown IO sizing '" + std::string(s) + "'");
}

struct IoStep {
  IoKind kind = IoKind::dma_write_host;
  IoSizing sizing = IoSizing::payload;
  Bytes size = 0;  // used when sizing == fixed
  bool blocking = true;
  // Offset into the target region (host window or L2 segment). An explicit
  // absolute address bypasses the region base.
  Bytes offset = 0;
  std::optional<std::uint64_t> absolute_address;

  Bytes resolved_size(Bytes total_size) const {
    switch (sizing) {
      case IoSizing::fixed: return size;
      case IoSizing::payload: return total_size - std::min(total_size, kHeaderSize);
      case IoSizing::packet: return total_size;
    }
    return size;
  }
  bool operator==(const IoStep&) const = default;
};

inline IoStep io_step(IoKind kind, IoSizing sizing, Bytes size = 0, bool blocking = true) {
  IoStep s;
  s.kind = kind;
  s.sizing = sizing;
  s.size = size;
  s.blocking = blocking;
  return s;
}

// Parametric per-packet cost model. A kernel invocation computes for
// compute_cycles(payload) and then issues its IO program in order.
struct KernelModel {
  std::string name;
  Cycle fixed_cost = 1;
  std::uint32_t per_byte_cost = 0;  // cycles per payload byte
  Cycle l2_sync_cost = 0;           // cycles per synchronization point
  Bytes l2_sync_granularity = 0;    // one sync per this many payload bytes; 0 = single sync
  std::vector<IoStep> io_program;
  Bytes kernel_binary_size = 4096;

  std::uint64_t sync_points(Bytes payload) const {
    if (l2_sync_cost == 0) return 0;
    if (l2_sync_granularity == 0) return 1;
    return std::max<std::uint64_t>(1, ceil_div(payload, l2_sync_granularity));
  }

  Cycle compute_cycles(Bytes payload) const {
    return fixed_cost + static_cast<Cycle>(per_byte_cost) * payload +
           l2_sync_cost * sync_points(payload);
  }

  bool operator==(const KernelModel&) const = default;
};

inline KernelModel spin_kernel(Cycle fixed_cost, std::uint32_t per_byte_cost,
                               std::string name = "spin") {
  KernelModel k;
  k.name = std::move(name);
  k.fixed_cost = fixed_cost;
  k.per_byte_cost = per_byte_cost;
  return k;
}

// The seven workloads. Constants are calibrated so that every kernel misses
// the 32-PU budget at 64 B while the IO kernels' compute part fits it from
// 256 B upward.
inline std::map<std::string, KernelModel, std::less<>> builtin_kernels() {
  std::map<std::string, KernelModel, std::less<>> catalog;

  KernelModel aggregate;
  aggregate.name = "aggregate";
  aggregate.fixed_cost = 20;
  aggregate.per_byte_cost = 1;
  aggregate.l2_sync_cost = 10;  // one atomic at the end
  catalog.emplace(aggregate.name, aggregate);

  KernelModel reduce;
  reduce.name = "reduce";
  reduce.fixed_cost = 20;
  reduce.per_byte_cost = 2;
  catalog.emplace(reduce.name, reduce);

  KernelModel histogram;
  histogram.name = "histogram";
  histogram.fixed_cost = 20;
  histogram.per_byte_cost = 3;
  histogram.l2_sync_cost = 10;
  histogram.l2_sync_granularity = 64;
  catalog.emplace(histogram.name, histogram);

  KernelModel io_read;
  io_read.name = "io_read";
  io_read.fixed_cost = 30;
  io_read.io_program = {io_step(IoKind::dma_read_host, IoSizing::payload)};
  catalog.emplace(io_read.name, io_read);

  KernelModel io_write;
  io_write.name = "io_write";
  io_write.fixed_cost = 30;
  io_write.io_program = {io_step(IoKind::dma_write_host, IoSizing::payload)};
  catalog.emplace(io_write.name, io_write);

  KernelModel filter;
  filter.name = "filter";
  filter.fixed_cost = 60;  // L7 header hash
  filter.io_program = {io_step(IoKind::dma_read_l2, IoSizing::fixed, 64),
                       io_step(IoKind::dma_write_host, IoSizing::payload)};
  catalog.emplace(filter.name, filter);

  KernelModel spin = spin_kernel(0, 2);
  catalog.emplace(spin.name, spin);

  return catalog;
}

inline bool is_compute_bound(const KernelModel& k) { return k.io_program.empty(); }

}  // namespace osmosim
