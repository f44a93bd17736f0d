#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "kernel_model.hpp"
#include "traffic.hpp"

namespace osmosim {

struct UnknownPreset : ScenarioError {
  explicit UnknownPreset(std::string_view name)
      : ScenarioError("unknown preset '" + std::string(name) + "'") {}
};

inline constexpr Bytes kStandaloneSizes[] = {64, 256, 1024, 4096};
inline constexpr Bytes kHolCongestorSizes[] = {64, 512, 1024, 2048, 4096};

namespace detail {

inline MatchRule rule_for(std::uint32_t index) {
  MatchRule r;
  r.kind = TupleKind::three_tuple;
  r.tuple.dst_ip = 0x0A000001u + index;  // 10.0.0.(index+1)
  r.tuple.dst_port = static_cast<std::uint16_t>(4000 + index);
  r.tuple.proto = kProtoUdp;
  r.tuple.src_ip = 0xC0A80001u + index;
  r.tuple.src_port = static_cast<std::uint16_t>(5000 + index);
  return r;
}

inline SloPolicy roomy_slo() {
  SloPolicy s;
  s.fmq_fifo_capacity = 1u << 20;  // presets model backlog, not drops
  s.allowed_host_ranges = {AddressRange{0x1'0000'0000ULL, 1ULL << 30}};
  return s;
}

inline FlowSpec make_flow(std::uint32_t index, std::string name, std::string role, KernelModel kernel,
                          SizeDist size, double share) {
  FlowSpec f;
  f.name = std::move(name);
  f.role = std::move(role);
  f.rule = rule_for(index);
  f.slo = roomy_slo();
  f.kernel = std::move(kernel);
  f.size = std::move(size);
  f.arrival.kind = ArrivalKind::full_rate_share;
  f.arrival.share = share;
  return f;
}

inline KernelModel egress_kernel() {
  KernelModel k;
  k.name = "egress_send";
  k.fixed_cost = 10;
  k.io_program = {io_step(IoKind::egress_send, IoSizing::packet)};
  return k;
}

inline KernelModel builtin(std::string_view name) {
  auto all = builtin_kernels();
  auto it = all.find(name);
  if (it == all.end()) throw UnknownPreset(name);
  return it->second;
}

inline SizeDist victim_histogram_sizes() { return SizeDist::lognormal(std::log(96.0), 0.3, 64, 128); }
inline SizeDist congestor_histogram_sizes() { return SizeDist::lognormal(std::log(3584.0), 0.1, 3072, 4096); }

}  // namespace detail

// Two spin tenants, the congestor paying twice the cycles per byte.
inline Scenario preset_pu_contention() {
  Scenario s;
  s.name = "pu-contention";
  s.description = "spin victim vs congestor with 2x compute cost per packet, equal priority and share";
  auto victim = detail::make_flow(0, "victim", "victim", spin_kernel(0, 1, "spin_x1"), SizeDist::constant(1024), 0.5);
  victim.volume_packets = 1000;
  auto congestor =
      detail::make_flow(1, "congestor", "congestor", spin_kernel(0, 2, "spin_x2"), SizeDist::constant(1024), 0.5);
  congestor.volume_packets = 2000;
  s.flows = {victim, congestor};
  return s;
}

// Victim 64 B egress sends next to a congestor of the given size.
inline Scenario preset_hol_blocking(Bytes congestor_size = 4096) {
  Scenario s;
  s.name = "hol-blocking";
  s.description = "64 B victim egress sends vs congestor of " + std::to_string(congestor_size) + " B";
  auto victim = detail::make_flow(0, "victim", "victim", detail::egress_kernel(), SizeDist::constant(64), 0.1);
  victim.volume_packets = 3000;
  auto congestor =
      detail::make_flow(1, "congestor", "congestor", detail::egress_kernel(), SizeDist::constant(congestor_size), 0.9);
  congestor.volume_bytes = 2u << 20;
  s.flows = {victim, congestor};
  return s;
}

// Reduce and Histogram, each as a small-packet victim and a large-packet congestor.
inline Scenario preset_compute_mix() {
  Scenario s;
  s.name = "compute-mix";
  s.description = "reduce and histogram victims (small packets) and congestors (large packets)";
  const KernelModel reduce = detail::builtin("reduce");
  const KernelModel hist = detail::builtin("histogram");
  s.flows = {
      detail::make_flow(0, "reduce_victim", "victim", reduce, SizeDist::constant(64), 0.25),
      detail::make_flow(1, "reduce_congestor", "congestor", reduce, SizeDist::constant(4096), 0.25),
      detail::make_flow(2, "histogram_victim", "victim", hist, detail::victim_histogram_sizes(), 0.25),
      detail::make_flow(3, "histogram_congestor", "congestor", hist, detail::congestor_histogram_sizes(), 0.25),
  };
  for (FlowSpec& f : s.flows) f.volume_packets = 300;
  return s;
}

// IO read and IO write, each as victim and congestor with Histogram's sizes.
inline Scenario preset_io_mix() {
  Scenario s;
  s.name = "io-mix";
  s.description = "io_read and io_write victims (64-128 B) and congestors (3072-4096 B)";
  const KernelModel rd = detail::builtin("io_read");
  const KernelModel wr = detail::builtin("io_write");
  s.flows = {
      detail::make_flow(0, "io_read_victim", "victim", rd, detail::victim_histogram_sizes(), 0.25),
      detail::make_flow(1, "io_read_congestor", "congestor", rd, detail::congestor_histogram_sizes(), 0.25),
      detail::make_flow(2, "io_write_victim", "victim", wr, detail::victim_histogram_sizes(), 0.25),
      detail::make_flow(3, "io_write_congestor", "congestor", wr, detail::congestor_histogram_sizes(), 0.25),
  };
  for (FlowSpec& f : s.flows) f.volume_packets = 300;
  return s;
}

// One builtin kernel alone on the full link. With size 0 the flow cycles
// through the standalone size sweep.
inline Scenario preset_standalone(std::string_view kernel, Bytes size = 0) {
  Scenario s;
  s.name = "standalone-" + std::string(kernel);
  SizeDist d;
  if (size == 0) {
    d.kind = SizeDistKind::sweep;
    d.sweep.assign(std::begin(kStandaloneSizes), std::end(kStandaloneSizes));
    s.description = std::string(kernel) + " alone, sizes 64/256/1024/4096 B";
  } else {
    d = SizeDist::constant(size);
    s.description = std::string(kernel) + " alone, " + std::to_string(size) + " B packets";
  }
  auto f = detail::make_flow(0, std::string(kernel), "tenant", detail::builtin(kernel), d, 1.0);
  f.volume_bytes = 1u << 20;
  s.flows = {f};
  return s;
}

inline std::vector<std::string> preset_names() {
  std::vector<std::string> names = {"pu-contention", "hol-blocking", "compute-mix", "io-mix"};
  for (const auto& [name, k] : builtin_kernels()) names.push_back("standalone-" + name);
  return names;
}

inline Scenario preset(std::string_view name) {
  if (name == "pu-contention") return preset_pu_contention();
  if (name == "hol-blocking") return preset_hol_blocking();
  if (name == "compute-mix") return preset_compute_mix();
  if (name == "io-mix") return preset_io_mix();
  constexpr std::string_view prefix = "standalone-";
  if (name.starts_with(prefix)) {
    const auto kernel = name.substr(prefix.size());
    if (builtin_kernels().contains(kernel)) return preset_standalone(kernel);
  }
  throw UnknownPreset(name);
}

// The preset expanded along its size sweep (one scenario per point). Presets
// without a sweep expand to themselves.
inline std::vector<Scenario> preset_sweep(std::string_view name) {
  std::vector<Scenario> out;
  if (name == "hol-blocking") {
    for (Bytes b : kHolCongestorSizes) out.push_back(preset_hol_blocking(b));
    return out;
  }
  Scenario base = preset(name);
  if (name.starts_with("standalone-")) {
    const auto kernel = name.substr(std::string_view("standalone-").size());
    for (Bytes b : kStandaloneSizes) out.push_back(preset_standalone(kernel, b));
    return out;
  }
  out.push_back(std::move(base));
  return out;
}

// IO path of a management profile. baseline: per-cluster FIFOs, whole
// transfers. managed: per-tenant DWRR over hardware fragments.
enum class IoPath { baseline, managed };

inline std::string_view to_string(IoPath p) { return p == IoPath::baseline ? "baseline" : "managed"; }

inline constexpr Bytes kDefaultFragmentSize = 512;

inline SimConfig with_io_path(SimConfig cfg, IoPath path) {
  if (path == IoPath::baseline) {
    cfg.io_arbiter = IoArbiterKind::fifo;
    cfg.fragmentation_mode = FragmentationMode::none;
  } else {
    cfg.io_arbiter = IoArbiterKind::wrr;
    cfg.fragmentation_mode = FragmentationMode::hardware;
    if (cfg.fragment_size == 0) cfg.fragment_size = kDefaultFragmentSize;
  }
  return cfg;
}

inline SimConfig baseline_config(SimConfig cfg = {}) {
  cfg.pu_scheduler = PuSchedulerKind::rr;
  return with_io_path(cfg, IoPath::baseline);
}

inline SimConfig managed_config(SimConfig cfg = {}) {
  cfg.pu_scheduler = PuSchedulerKind::wlbvt;
  return with_io_path(cfg, IoPath::managed);
}

}  // namespace osmosim
