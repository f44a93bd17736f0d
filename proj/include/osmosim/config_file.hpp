#pragma once

// Text format for SimConfig and Scenario: `[section]` headers followed by
// `key = value` lines; `#` starts a comment line. One [sim] section, one
// [scenario] section and one [flow] section per flow, in order. Lists are
// comma separated. write_* and read_* round-trip losslessly. A [run]
// section may name the preset or scenario file, output directory and
// compare mode.

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "config.hpp"
#include "flows.hpp"
#include "kernel_model.hpp"
#include "traffic.hpp"

namespace osmosim {

struct IniSection {
  std::string name;
  std::size_t line = 0;
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::size_t> entry_lines;
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Error>
std::uint64_t to_u64(const std::string& v, std::string_view key) {
  std::size_t pos = 0;
  unsigned long long x = 0;
  try {
    x = std::stoull(v, &pos, 0);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || v.front() == '-') throw Error("'" + std::string(key) + "': expected an unsigned integer, got '" + v + "'");
  return x;
}

template <typename Error>
double to_double(const std::string& v, std::string_view key) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw Error("'" + std::string(key) + "': expected a number, got '" + v + "'");
  return x;
}

template <typename Error>
bool to_bool(const std::string& v, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw Error("'" + std::string(key) + "': expected true or false, got '" + v + "'");
}

inline std::string ip_to_string(std::uint32_t ip) {
  return std::to_string(ip >> 24) + "." + std::to_string((ip >> 16) & 0xFF) + "." + std::to_string((ip >> 8) & 0xFF) +
         "." + std::to_string(ip & 0xFF);
}

inline std::uint32_t parse_ip(const std::string& v) {
  auto parts = split(v, '.');
  if (parts.size() != 4) throw ScenarioError("bad IPv4 address '" + v + "'");
  std::uint32_t ip = 0;
  for (const auto& p : parts) {
    const auto octet = to_u64<ScenarioError>(p, "ip");
    if (octet > 255) throw ScenarioError("bad IPv4 address '" + v + "'");
    ip = (ip << 8) | static_cast<std::uint32_t>(octet);
  }
  return ip;
}

inline std::string range_to_string(const CycleRange& r) { return std::to_string(r.lo) + "," + std::to_string(r.hi); }

inline CycleRange parse_range(const std::string& v, std::string_view key) {
  auto parts = split(v, ',');
  if (parts.size() != 2) throw ConfigError("'" + std::string(key) + "': expected 'lo, hi'");
  return {to_u64<ConfigError>(parts[0], key), to_u64<ConfigError>(parts[1], key)};
}

inline std::string io_step_to_string(const IoStep& s) {
  std::string out = std::string(to_string(s.kind)) + ":" + std::string(to_string(s.sizing));
  if (s.sizing == IoSizing::fixed) out += ":" + std::to_string(s.size);
  out += s.blocking ? ":blocking" : ":async";
  if (s.offset != 0) out += ":offset=" + std::to_string(s.offset);
  if (s.absolute_address) out += ":addr=" + std::to_string(*s.absolute_address);
  return out;
}

inline IoStep parse_io_step(const std::string& v) {
  auto parts = split(v, ':');
  if (parts.size() < 2) throw ScenarioError("IO step '" + v + "': expected kind:sizing[:size][:blocking|async]");
  IoStep s;
  try {
    s.kind = parse_io_kind(parts[0]);
    s.sizing = parse_io_sizing(parts[1]);
  } catch (const ConfigError& e) {
    throw ScenarioError(e.what());
  }
  std::size_t i = 2;
  if (s.sizing == IoSizing::fixed) {
    if (parts.size() < 3) throw ScenarioError("IO step '" + v + "': fixed sizing needs a byte count");
    s.size = to_u64<ScenarioError>(parts[2], "io");
    i = 3;
  }
  for (; i < parts.size(); ++i) {
    const std::string& p = parts[i];
    if (p == "blocking") {
      s.blocking = true;
    } else if (p == "async") {
      s.blocking = false;
    } else if (p.rfind("offset=", 0) == 0) {
      s.offset = to_u64<ScenarioError>(p.substr(7), "io offset");
    } else if (p.rfind("addr=", 0) == 0) {
      s.absolute_address = to_u64<ScenarioError>(p.substr(5), "io addr");
    } else {
      throw ScenarioError("IO step '" + v + "': unknown attribute '" + p + "'");
    }
  }
  return s;
}

}  // namespace detail

template <typename Error = ConfigError>
std::vector<IniSection> parse_ini(std::istream& is) {
  std::vector<IniSection> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // A comment starts at '#' or ';' at line start or after whitespace.
    for (std::size_t i = 0; i < line.size(); ++i)
      if ((line[i] == '#' || line[i] == ';') && (i == 0 || line[i - 1] == ' ' || line[i - 1] == '\t')) {
        line.resize(i);
        break;
      }
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw Error("line " + std::to_string(lineno) + ": unterminated section header");
      out.push_back(IniSection{detail::trim(std::string_view(t).substr(1, t.size() - 2)), lineno, {}, {}});
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw Error("line " + std::to_string(lineno) + ": expected 'key = value'");
    if (out.empty()) throw Error("line " + std::to_string(lineno) + ": entry outside of a section");
    out.back().entries.emplace_back(detail::trim(std::string_view(t).substr(0, eq)),
                                    detail::trim(std::string_view(t).substr(eq + 1)));
    out.back().entry_lines.push_back(lineno);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SimConfig

inline void write_config(std::ostream& os, const SimConfig& c) {
  os << "[sim]\n";
  os << "num_clusters = " << c.num_clusters << '\n';
  os << "pus_per_cluster = " << c.pus_per_cluster << '\n';
  os << "clock_freq = " << c.clock_freq << '\n';
  os << "ingress_bandwidth = " << c.ingress_bandwidth << '\n';
  os << "egress_bandwidth = " << c.egress_bandwidth << '\n';
  os << "interconnect_bandwidth = " << c.interconnect_bandwidth << '\n';
  os << "local_dma_latency = " << detail::range_to_string(c.local_dma_latency) << '\n';
  os << "host_dma_latency_ns = " << detail::range_to_string(c.host_dma_latency) << '\n';
  os << "sched_decision_latency = " << c.sched_decision_latency << '\n';
  os << "fragment_size = " << (c.fragment_size == 0 ? std::string("off") : std::to_string(c.fragment_size)) << '\n';
  os << "fragmentation_mode = " << to_string(c.fragmentation_mode) << '\n';
  os << "pu_scheduler = " << to_string(c.pu_scheduler) << '\n';
  os << "io_arbiter = " << to_string(c.io_arbiter) << '\n';
  os << "pu_limit_scale = " << to_string(c.pu_limit_scale) << '\n';
  os << "l2_packet_buffer = " << c.l2_packet_buffer << '\n';
  os << "l2_kernel_buffer = " << c.l2_kernel_buffer << '\n';
  os << "seed = " << c.seed << '\n';
  os << "max_cycles = " << c.max_cycles << '\n';
  os << "sample_interval = " << c.sample_interval << '\n';
  os << "cluster_fifo_depth = " << c.cluster_fifo_depth << '\n';
  os << "sw_frag_issue_cost = " << c.sw_frag_issue_cost << '\n';
  os << "frag_overhead_cycles = " << c.frag_overhead_cycles << '\n';
  os << "wrr_quantum = " << c.wrr_quantum << '\n';
  os << "eq_message_size = " << c.eq_message_size << '\n';
  os << "fifo_strict_order = " << (c.fifo_strict_order ? "true" : "false") << '\n';
  os << "check_invariants = " << (c.check_invariants ? "true" : "false") << '\n';
}

// Applies one key to a config. Returns false for an unknown key.
inline bool apply_config_key(SimConfig& c, const std::string& k, const std::string& v) {
  using detail::to_u64;
  auto u = [&](auto& field) {
    field = static_cast<std::remove_reference_t<decltype(field)>>(to_u64<ConfigError>(v, k));
  };
  if (k == "num_clusters") u(c.num_clusters);
  else if (k == "pus_per_cluster") u(c.pus_per_cluster);
  else if (k == "clock_freq") u(c.clock_freq);
  else if (k == "ingress_bandwidth") u(c.ingress_bandwidth);
  else if (k == "egress_bandwidth") u(c.egress_bandwidth);
  else if (k == "interconnect_bandwidth") u(c.interconnect_bandwidth);
  else if (k == "local_dma_latency") c.local_dma_latency = detail::parse_range(v, k);
  else if (k == "host_dma_latency_ns") c.host_dma_latency = detail::parse_range(v, k);
  else if (k == "sched_decision_latency") u(c.sched_decision_latency);
  else if (k == "fragment_size") c.fragment_size = v == "off" ? 0 : to_u64<ConfigError>(v, k);
  else if (k == "fragmentation_mode") c.fragmentation_mode = parse_fragmentation_mode(v);
  else if (k == "pu_scheduler") c.pu_scheduler = parse_pu_scheduler(v);
  else if (k == "io_arbiter") c.io_arbiter = parse_io_arbiter(v);
  else if (k == "pu_limit_scale") c.pu_limit_scale = parse_pu_limit_scale(v);
  else if (k == "l2_packet_buffer") u(c.l2_packet_buffer);
  else if (k == "l2_kernel_buffer") u(c.l2_kernel_buffer);
  else if (k == "seed") u(c.seed);
  else if (k == "max_cycles") u(c.max_cycles);
  else if (k == "sample_interval") u(c.sample_interval);
  else if (k == "cluster_fifo_depth") u(c.cluster_fifo_depth);
  else if (k == "sw_frag_issue_cost") u(c.sw_frag_issue_cost);
  else if (k == "frag_overhead_cycles") u(c.frag_overhead_cycles);
  else if (k == "wrr_quantum") u(c.wrr_quantum);
  else if (k == "eq_message_size") u(c.eq_message_size);
  else if (k == "fifo_strict_order") c.fifo_strict_order = detail::to_bool<ConfigError>(v, k);
  else if (k == "check_invariants") c.check_invariants = detail::to_bool<ConfigError>(v, k);
  else return false;
  return true;
}

// Keys present in the [sim] section override `base`. Other sections are ignored.
inline SimConfig read_config(std::istream& is, SimConfig base = {}) {
  for (const IniSection& s : parse_ini<ConfigError>(is)) {
    if (s.name != "sim") continue;
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const auto& [k, v] = s.entries[i];
      if (!apply_config_key(base, k, v))
        throw ConfigError("line " + std::to_string(s.entry_lines[i]) + ": unknown [sim] key '" + k + "'");
    }
  }
  return base;
}

// ---------------------------------------------------------------------------
// [run]: file equivalents of the CLI's scenario and output flags.

struct RunOptions {
  std::optional<std::string> preset;
  std::optional<std::string> scenario_file;
  std::optional<std::string> output_dir;
  std::optional<bool> compare;
};

inline RunOptions read_run_options(std::istream& is) {
  RunOptions r;
  for (const IniSection& s : parse_ini<ConfigError>(is)) {
    if (s.name != "run") continue;
    for (std::size_t i = 0; i < s.entries.size(); ++i) {
      const auto& [k, v] = s.entries[i];
      if (k == "preset") r.preset = v;
      else if (k == "scenario") r.scenario_file = v;
      else if (k == "output") r.output_dir = v;
      else if (k == "compare") r.compare = detail::to_bool<ConfigError>(v, k);
      else throw ConfigError("line " + std::to_string(s.entry_lines[i]) + ": unknown [run] key '" + k + "'");
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Scenario

inline void write_flow(std::ostream& os, const FlowSpec& f) {
  using detail::fmt_double;
  os << "[flow]\n";
  os << "name = " << f.name << '\n';
  if (!f.role.empty()) os << "role = " << f.role << '\n';
  os << "match = " << (f.rule.kind == TupleKind::three_tuple ? "three_tuple" : "five_tuple") << '\n';
  os << "dst_ip = " << detail::ip_to_string(f.rule.tuple.dst_ip) << '\n';
  os << "dst_port = " << f.rule.tuple.dst_port << '\n';
  os << "proto = " << unsigned(f.rule.tuple.proto) << '\n';
  os << "src_ip = " << detail::ip_to_string(f.rule.tuple.src_ip) << '\n';
  os << "src_port = " << f.rule.tuple.src_port << '\n';
  os << "compute_priority = " << f.slo.compute_priority << '\n';
  os << "dma_priority = " << f.slo.dma_priority << '\n';
  os << "egress_priority = " << f.slo.egress_priority << '\n';
  os << "kernel_cycle_limit = "
     << (f.slo.kernel_cycle_limit == kUnlimitedCycles ? std::string("unlimited") : std::to_string(f.slo.kernel_cycle_limit))
     << '\n';
  os << "fmq_fifo_capacity = " << f.slo.fmq_fifo_capacity << '\n';
  os << "memory_quota = " << f.slo.memory_quota << '\n';
  os << "allowed_host_ranges = ";
  for (std::size_t i = 0; i < f.slo.allowed_host_ranges.size(); ++i)
    os << (i ? ", " : "") << f.slo.allowed_host_ranges[i].base << ":" << f.slo.allowed_host_ranges[i].length;
  os << '\n';
  os << "requested_memory = " << f.requested_memory << '\n';
  os << "kernel = " << f.kernel.name << '\n';
  os << "kernel_fixed_cost = " << f.kernel.fixed_cost << '\n';
  os << "kernel_per_byte_cost = " << f.kernel.per_byte_cost << '\n';
  os << "kernel_l2_sync_cost = " << f.kernel.l2_sync_cost << '\n';
  os << "kernel_l2_sync_granularity = " << f.kernel.l2_sync_granularity << '\n';
  os << "kernel_binary_size = " << f.kernel.kernel_binary_size << '\n';
  os << "kernel_io = ";
  for (std::size_t i = 0; i < f.kernel.io_program.size(); ++i)
    os << (i ? ", " : "") << detail::io_step_to_string(f.kernel.io_program[i]);
  os << '\n';
  switch (f.size.kind) {
    case SizeDistKind::fixed: os << "size = fixed " << f.size.fixed << '\n'; break;
    case SizeDistKind::lognormal:
      os << "size = lognormal " << fmt_double(f.size.mu) << ' ' << fmt_double(f.size.sigma) << ' ' << f.size.clip_min
         << ' ' << f.size.clip_max << '\n';
      break;
    case SizeDistKind::sweep:
      os << "size = sweep ";
      for (std::size_t i = 0; i < f.size.sweep.size(); ++i) os << (i ? "," : "") << f.size.sweep[i];
      os << '\n';
      break;
  }
  switch (f.arrival.kind) {
    case ArrivalKind::full_rate_share: os << "arrival = share " << fmt_double(f.arrival.share) << '\n'; break;
    case ArrivalKind::uniform_interarrival: os << "arrival = interarrival " << f.arrival.interarrival << '\n'; break;
    case ArrivalKind::jittered_share: os << "arrival = jittered " << fmt_double(f.arrival.share) << '\n'; break;
  }
  if (f.arrival.burst_on != 0) os << "burst = " << f.arrival.burst_on << "," << f.arrival.burst_off << '\n';
  os << "volume_packets = " << f.volume_packets << '\n';
  os << "volume_bytes = " << f.volume_bytes << '\n';
  os << "start_cycle = " << f.start_cycle << '\n';
  os << "stop_cycle = " << f.stop_cycle << '\n';
}

inline void write_scenario(std::ostream& os, const Scenario& s) {
  os << "[scenario]\n";
  os << "name = " << s.name << '\n';
  if (!s.description.empty()) os << "description = " << s.description << '\n';
  if (!s.trace_file.empty()) os << "trace_file = " << s.trace_file << '\n';
  for (const FlowSpec& f : s.flows) {
    os << '\n';
    write_flow(os, f);
  }
}

namespace detail {

inline SizeDist parse_size(const std::string& v) {
  std::istringstream is(v);
  std::string kind;
  is >> kind;
  SizeDist d;
  if (kind == "fixed") {
    d.kind = SizeDistKind::fixed;
    if (!(is >> d.fixed)) throw ScenarioError("size: expected 'fixed <bytes>'");
  } else if (kind == "lognormal") {
    d.kind = SizeDistKind::lognormal;
    std::string mu, sigma;
    if (!(is >> mu >> sigma >> d.clip_min >> d.clip_max))
      throw ScenarioError("size: expected 'lognormal <mu> <sigma> <min> <max>'");
    d.mu = to_double<ScenarioError>(mu, "size mu");
    d.sigma = to_double<ScenarioError>(sigma, "size sigma");
  } else if (kind == "sweep") {
    d.kind = SizeDistKind::sweep;
    std::string rest;
    std::getline(is, rest);
    for (const auto& p : split(rest, ',')) d.sweep.push_back(to_u64<ScenarioError>(p, "size sweep"));
  } else {
    throw ScenarioError("size: unknown distribution '" + kind + "'");
  }
  std::string extra;
  if (kind != "sweep" && (is >> extra)) throw ScenarioError("size: trailing text '" + extra + "'");
  return d;
}

inline Arrival parse_arrival(const std::string& v, Arrival a) {
  std::istringstream is(v);
  std::string kind, value;
  if (!(is >> kind >> value)) throw ScenarioError("arrival: expected '<share|interarrival|jittered> <value>'");
  if (kind == "share") {
    a.kind = ArrivalKind::full_rate_share;
    a.share = to_double<ScenarioError>(value, "arrival");
  } else if (kind == "jittered") {
    a.kind = ArrivalKind::jittered_share;
    a.share = to_double<ScenarioError>(value, "arrival");
  } else if (kind == "interarrival") {
    a.kind = ArrivalKind::uniform_interarrival;
    a.interarrival = to_u64<ScenarioError>(value, "arrival");
  } else {
    throw ScenarioError("arrival: unknown kind '" + kind + "'");
  }
  return a;
}

inline FlowSpec parse_flow(const IniSection& sec) {
  FlowSpec f;
  for (std::size_t i = 0; i < sec.entries.size(); ++i) {
    const auto& [k, v] = sec.entries[i];
    auto u64 = [&] { return to_u64<ScenarioError>(v, k); };
    auto prio = [&] {
      const auto p = u64();
      if (p < 1 || p > 0xFFFF) throw ScenarioError("'" + k + "': priority must lie in [1, 65535]");
      return static_cast<Priority>(p);
    };
    if (k == "name") f.name = v;
    else if (k == "role") f.role = v;
    else if (k == "match") {
      if (v == "three_tuple") f.rule.kind = TupleKind::three_tuple;
      else if (v == "five_tuple") f.rule.kind = TupleKind::five_tuple;
      else throw ScenarioError("match: expected three_tuple or five_tuple");
    } else if (k == "dst_ip") f.rule.tuple.dst_ip = parse_ip(v);
    else if (k == "src_ip") f.rule.tuple.src_ip = parse_ip(v);
    else if (k == "dst_port") f.rule.tuple.dst_port = static_cast<std::uint16_t>(u64());
    else if (k == "src_port") f.rule.tuple.src_port = static_cast<std::uint16_t>(u64());
    else if (k == "proto") f.rule.tuple.proto = static_cast<std::uint8_t>(u64());
    else if (k == "priority") f.slo.compute_priority = f.slo.dma_priority = f.slo.egress_priority = prio();
    else if (k == "compute_priority") f.slo.compute_priority = prio();
    else if (k == "dma_priority") f.slo.dma_priority = prio();
    else if (k == "egress_priority") f.slo.egress_priority = prio();
    else if (k == "kernel_cycle_limit") f.slo.kernel_cycle_limit = v == "unlimited" ? kUnlimitedCycles : u64();
    else if (k == "fmq_fifo_capacity") f.slo.fmq_fifo_capacity = static_cast<std::uint32_t>(u64());
    else if (k == "memory_quota") f.slo.memory_quota = u64();
    else if (k == "allowed_host_ranges") {
      f.slo.allowed_host_ranges.clear();
      if (!v.empty())
        for (const auto& r : split(v, ',')) {
          auto bl = split(r, ':');
          if (bl.size() != 2) throw ScenarioError("allowed_host_ranges: expected base:length entries");
          f.slo.allowed_host_ranges.push_back({to_u64<ScenarioError>(bl[0], k), to_u64<ScenarioError>(bl[1], k)});
        }
    } else if (k == "requested_memory") f.requested_memory = u64();
    else if (k == "kernel") {
      // A builtin name loads its parameters; later kernel_* keys override them.
      auto all = builtin_kernels();
      auto it = all.find(v);
      if (it != all.end()) f.kernel = it->second;
      f.kernel.name = v;
    } else if (k == "kernel_fixed_cost") f.kernel.fixed_cost = u64();
    else if (k == "kernel_per_byte_cost") f.kernel.per_byte_cost = static_cast<std::uint32_t>(u64());
    else if (k == "kernel_l2_sync_cost") f.kernel.l2_sync_cost = u64();
    else if (k == "kernel_l2_sync_granularity") f.kernel.l2_sync_granularity = u64();
    else if (k == "kernel_binary_size") f.kernel.kernel_binary_size = u64();
    else if (k == "kernel_io") {
      f.kernel.io_program.clear();
      if (!v.empty())
        for (const auto& step : split(v, ',')) f.kernel.io_program.push_back(parse_io_step(step));
    } else if (k == "size") f.size = parse_size(v);
    else if (k == "arrival") f.arrival = parse_arrival(v, f.arrival);
    else if (k == "burst") {
      auto parts = split(v, ',');
      if (parts.size() != 2) throw ScenarioError("burst: expected 'on, off'");
      f.arrival.burst_on = to_u64<ScenarioError>(parts[0], k);
      f.arrival.burst_off = to_u64<ScenarioError>(parts[1], k);
    } else if (k == "volume_packets") f.volume_packets = u64();
    else if (k == "volume_bytes") f.volume_bytes = u64();
    else if (k == "start_cycle") f.start_cycle = u64();
    else if (k == "stop_cycle") f.stop_cycle = u64();
    else throw ScenarioError("line " + std::to_string(sec.entry_lines[i]) + ": unknown [flow] key '" + k + "'");
  }
  return f;
}

}  // namespace detail

// Reads [scenario] and [flow] sections; [sim] is left to read_config.
inline Scenario read_scenario(std::istream& is) {
  Scenario s;
  bool seen = false;
  for (const IniSection& sec : parse_ini<ScenarioError>(is)) {
    if (sec.name == "sim" || sec.name == "run") continue;
    if (sec.name == "scenario") {
      seen = true;
      for (std::size_t i = 0; i < sec.entries.size(); ++i) {
        const auto& [k, v] = sec.entries[i];
        if (k == "name") s.name = v;
        else if (k == "description") s.description = v;
        else if (k == "trace_file") s.trace_file = v;
        else throw ScenarioError("line " + std::to_string(sec.entry_lines[i]) + ": unknown [scenario] key '" + k + "'");
      }
    } else if (sec.name == "flow") {
      s.flows.push_back(detail::parse_flow(sec));
    } else {
      throw ScenarioError("line " + std::to_string(sec.line) + ": unknown section [" + sec.name + "]");
    }
  }
  if (!seen && s.flows.empty()) throw ScenarioError("scenario file has no [scenario] or [flow] section");
  return s;
}

}  // namespace osmosim
