#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "common.hpp"

namespace osmosim {

enum class FragmentationMode { none, software, hardware };
enum class PuSchedulerKind { wlbvt, rr };
// wrr: one DWRR input per tenant, weighted by its IO priority.
// fifo: one FIFO per cluster command queue, served round-robin (no tenant awareness).
enum class IoArbiterKind { wrr, fifo };
// Scaling constant of the WLBVT PU limit. pu_count is the default reading.
enum class PuLimitScale { pu_count, fmq_count, active_fmq_count };

struct CycleRange {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;
  bool operator==(const CycleRange&) const = default;
};

struct SimConfig {
  std::uint32_t num_clusters = 4;
  std::uint32_t pus_per_cluster = 8;
  std::uint64_t clock_freq = 1'000'000'000;           // Hz
  std::uint64_t ingress_bandwidth = 400'000'000'000;  // bits/s
  std::uint64_t egress_bandwidth = 400'000'000'000;   // bits/s
  std::uint64_t interconnect_bandwidth = 512'000'000'000;
  CycleRange local_dma_latency{10, 30};               // cycles
  CycleRange host_dma_latency{500, 2000};             // nanoseconds
  Cycle sched_decision_latency = 5;
  Bytes fragment_size = 0;  // 0 = off
  FragmentationMode fragmentation_mode = FragmentationMode::none;
  PuSchedulerKind pu_scheduler = PuSchedulerKind::wlbvt;
  IoArbiterKind io_arbiter = IoArbiterKind::wrr;
  PuLimitScale pu_limit_scale = PuLimitScale::pu_count;
  Bytes l2_packet_buffer = 4u << 20;
  Bytes l2_kernel_buffer = 4u << 20;
  std::uint64_t seed = 1;
  Cycle max_cycles = 2'000'000;
  Cycle sample_interval = 1000;
  std::uint32_t cluster_fifo_depth = 64;
  Cycle sw_frag_issue_cost = 20;     // kernel cycles per software-issued fragment
  Cycle frag_overhead_cycles = 1;    // extra bus cycles per fragment of a split request
  Bytes wrr_quantum = 512;           // DWRR quantum when fragmentation is off
  Bytes eq_message_size = 64;
  bool fifo_strict_order = false;    // fifo arbiter: a request waiting on latency blocks its cluster queue
  bool check_invariants = true;

  std::uint32_t total_pus() const { return num_clusters * pus_per_cluster; }

  Bytes interconnect_width() const { return interconnect_bandwidth / clock_freq / 8; }
  Bytes ingress_bytes_per_cycle() const { return ingress_bandwidth / clock_freq / 8; }

  // Fragment length actually used by the engines; 0 when transfers are not split.
  Bytes effective_fragment_size() const {
    return fragmentation_mode == FragmentationMode::none ? 0 : fragment_size;
  }

  Bytes dwrr_quantum() const {
    const Bytes f = effective_fragment_size();
    return f != 0 ? f : wrr_quantum;
  }

  Cycle ns_to_cycles(std::uint64_t ns) const {
    const unsigned __int128 c = static_cast<unsigned __int128>(ns) * clock_freq;
    return static_cast<Cycle>(c / 1'000'000'000ULL);
  }

  void validate() const {
    if (num_clusters == 0 || pus_per_cluster == 0)
      throw ConfigError("num_clusters x pus_per_cluster must be >= 1");
    if (clock_freq == 0) throw ConfigError("clock_freq must be positive");
    if (ingress_bytes_per_cycle() < 1)
      throw ConfigError("ingress bandwidth must provide at least 1 byte/cycle");
    if (egress_bandwidth / clock_freq / 8 < 1)
      throw ConfigError("egress bandwidth must provide at least 1 byte/cycle");
    if (interconnect_width() < 1)
      throw ConfigError("interconnect bandwidth must provide at least 1 byte/cycle");
    if (local_dma_latency.lo > local_dma_latency.hi)
      throw ConfigError("local_dma_latency range is inverted");
    if (host_dma_latency.lo > host_dma_latency.hi)
      throw ConfigError("host_dma_latency range is inverted");
    if (fragmentation_mode != FragmentationMode::none) {
      if (fragment_size == 0)
        throw ConfigError("fragmentation enabled but fragment_size is off");
      if (fragment_size < interconnect_width())
        throw ConfigError("fragment_size must be >= interconnect width (" +
                          std::to_string(interconnect_width()) + " B)");
    } else if (fragment_size != 0 && fragment_size < interconnect_width()) {
      throw ConfigError("fragment_size must be >= interconnect width");
    }
    if (sample_interval == 0) throw ConfigError("sample_interval must be positive");
    if (cluster_fifo_depth == 0) throw ConfigError("cluster_fifo_depth must be positive");
    if (wrr_quantum == 0) throw ConfigError("wrr_quantum must be positive");
  }
};

inline std::string_view to_string(FragmentationMode m) {
  switch (m) {
    case FragmentationMode::none: return "none";
    case FragmentationMode::software: return "software";
    case FragmentationMode::hardware: return "hardware";
  }
  return "?";
}
inline std::string_view to_string(PuSchedulerKind k) {
  return k == PuSchedulerKind::wlbvt ? "wlbvt" : "rr";
}
inline std::string_view to_string(IoArbiterKind k) {
  return k == IoArbiterKind::wrr ? "wrr" : "fifo";
}
inline std::string_view to_string(PuLimitScale s) {
  switch (s) {
    case PuLimitScale::pu_count: return "pu_count";
    case PuLimitScale::fmq_count: return "fmq_count";
    case PuLimitScale::active_fmq_count: return "active_fmq_count";
  }
  return "?";
}

inline FragmentationMode parse_fragmentation_mode(std::string_view s) {
  if (s == "none" || s == "off") return FragmentationMode::none;
  if (s == "software") return FragmentationMode::software;
  if (s == "hardware") return FragmentationMode::hardware;
  throw ConfigError("unknown fragmentation mode '" + std::string(s) + "'");
}
inline PuSchedulerKind parse_pu_scheduler(std::string_view s) {
  if (s == "wlbvt") return PuSchedulerKind::wlbvt;
  if (s == "rr") return PuSchedulerKind::rr;
  throw ConfigError("unknown PU scheduler '" + std::string(s) + "'");
}
inline IoArbiterKind parse_io_arbiter(std::string_view s) {
  if (s == "wrr") return IoArbiterKind::wrr;
  if (s == "fifo") return IoArbiterKind::fifo;
  throw ConfigError("unknown IO arbiter '" + std::string(s) + "'");
}
inline PuLimitScale parse_pu_limit_scale(std::string_view s) {
  if (s == "pu_count") return PuLimitScale::pu_count;
  if (s == "fmq_count") return PuLimitScale::fmq_count;
  if (s == "active_fmq_count") return PuLimitScale::active_fmq_count;
  throw ConfigError("unknown pu_limit_scale '" + std::string(s) + "'");
}

}  // namespace osmosim
