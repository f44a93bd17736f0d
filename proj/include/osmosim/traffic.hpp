#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "flows.hpp"
#include "kernel_model.hpp"
#include "rng.hpp"

namespace osmosim {

inline constexpr Bytes kMinPacketSize = 64;
inline constexpr Bytes kMaxPacketSize = 9216;

enum class SizeDistKind { fixed, lognormal, sweep };
enum class ArrivalKind { full_rate_share, uniform_interarrival, jittered_share };

struct SizeDist {
  SizeDistKind kind = SizeDistKind::fixed;
  Bytes fixed = 64;
  double mu = 6.2383246250395077;  // ln(512)
  double sigma = 0.8;
  Bytes clip_min = 64;
  Bytes clip_max = 4096;
  std::vector<Bytes> sweep;  // sizes cycled packet by packet

  static SizeDist constant(Bytes b) {
    SizeDist d;
    d.kind = SizeDistKind::fixed;
    d.fixed = b;
    return d;
  }
  static SizeDist lognormal(double mu, double sigma, Bytes lo, Bytes hi) {
    SizeDist d;
    d.kind = SizeDistKind::lognormal;
    d.mu = mu;
    d.sigma = sigma;
    d.clip_min = lo;
    d.clip_max = hi;
    return d;
  }
  bool operator==(const SizeDist&) const = default;
};

struct Arrival {
  ArrivalKind kind = ArrivalKind::full_rate_share;
  double share = 1.0;          // fraction of the ingress link
  Cycle interarrival = 1;      // uniform_interarrival
  Cycle burst_on = 0;          // optional on/off modulation; 0 = always on
  Cycle burst_off = 0;
  bool operator==(const Arrival&) const = default;
};

// One tenant: its ECTX parameters plus how its packets arrive.
struct FlowSpec {
  std::string name;
  MatchRule rule;
  SloPolicy slo;
  KernelModel kernel;
  Bytes requested_memory = 64 * 1024;
  SizeDist size;
  Arrival arrival;
  std::uint64_t volume_packets = 0;  // one of the two volumes is used;
  Bytes volume_bytes = 0;            // packets take precedence when non-zero
  Cycle start_cycle = 0;
  Cycle stop_cycle = 0;  // 0 = no cut-off
  std::string role;      // free-form tag (victim / congestor)

  bool operator==(const FlowSpec&) const = default;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<FlowSpec> flows;
  std::string trace_file;  // optional pre-generated arrivals
  bool operator==(const Scenario&) const = default;
};

inline void validate_flow(const FlowSpec& f) {
  f.slo.validate();
  auto in_range = [](Bytes b) { return b >= kMinPacketSize && b <= kMaxPacketSize; };
  switch (f.size.kind) {
    case SizeDistKind::fixed:
      if (!in_range(f.size.fixed)) throw ConfigError("flow '" + f.name + "': packet size out of range");
      break;
    case SizeDistKind::lognormal:
      if (!in_range(f.size.clip_min) || !in_range(f.size.clip_max) || f.size.clip_min > f.size.clip_max)
        throw ConfigError("flow '" + f.name + "': lognormal clip bounds out of range");
      if (!(f.size.sigma >= 0.0)) throw ConfigError("flow '" + f.name + "': sigma must be >= 0");
      break;
    case SizeDistKind::sweep:
      if (f.size.sweep.empty()) throw ConfigError("flow '" + f.name + "': empty size sweep");
      for (Bytes b : f.size.sweep)
        if (!in_range(b)) throw ConfigError("flow '" + f.name + "': sweep size out of range");
      break;
  }
  if (f.arrival.kind != ArrivalKind::uniform_interarrival &&
      !(f.arrival.share > 0.0 && f.arrival.share <= 1.0))
    throw ConfigError("flow '" + f.name + "': rate share must lie in (0, 1]");
  if (f.arrival.kind == ArrivalKind::uniform_interarrival && f.arrival.interarrival == 0)
    throw ConfigError("flow '" + f.name + "': interarrival must be >= 1 cycle");
}

// Shares of flows whose activity windows overlap must not exceed the link.
inline void validate_scenario(const Scenario& s) {
  for (const FlowSpec& f : s.flows) validate_flow(f);
  for (const FlowSpec& f : s.flows) {
    if (f.arrival.kind == ArrivalKind::uniform_interarrival) continue;
    double sum = 0.0;
    for (const FlowSpec& g : s.flows) {
      if (g.arrival.kind == ArrivalKind::uniform_interarrival) continue;
      const bool g_started = g.start_cycle <= f.start_cycle;
      const bool g_alive = g.stop_cycle == 0 || g.stop_cycle > f.start_cycle;
      if (g_started && g_alive) sum += g.arrival.share;
    }
    if (sum > 1.0 + 1e-9)
      throw ConfigError("scenario '" + s.name + "': concurrent rate shares exceed the link (" +
                        std::to_string(sum) + ")");
  }
}

namespace detail {

inline std::uint64_t share_ppm(double share) {
  return static_cast<std::uint64_t>(std::llround(share * 1e6));
}

inline Cycle apply_bursts(Cycle on_time, const Arrival& a) {
  if (a.burst_on == 0) return on_time;
  return on_time / a.burst_on * (a.burst_on + a.burst_off) + on_time % a.burst_on;
}

inline Bytes draw_size(const SizeDist& d, Random& rng, std::uint64_t index) {
  switch (d.kind) {
    case SizeDistKind::fixed: return d.fixed;
    case SizeDistKind::sweep: return d.sweep[index % d.sweep.size()];
    case SizeDistKind::lognormal: {
      const double x = std::round(rng.lognormal(d.mu, d.sigma));
      const double lo = static_cast<double>(d.clip_min);
      const double hi = static_cast<double>(d.clip_max);
      return static_cast<Bytes>(std::clamp(x, lo, hi));
    }
  }
  return d.fixed;
}

}  // namespace detail

// Deterministic packet arrivals for one flow. Rate shares are realized with an
// exact fractional accumulator: packet k arrives at
//   start + floor(bytes_before_k / (share * link_bytes_per_cycle)).
inline std::vector<Packet> generate_trace(const FlowSpec& spec, std::uint32_t flow_index,
                                          const SimConfig& cfg, std::uint64_t seed) {
  validate_flow(spec);
  std::vector<Packet> out;
  if (spec.volume_packets == 0 && spec.volume_bytes == 0) return out;

  Random rng(mix_seed(seed, flow_index));
  const std::uint64_t ppm = detail::share_ppm(spec.arrival.share);
  const unsigned __int128 rate_num = static_cast<unsigned __int128>(ppm) * cfg.ingress_bandwidth;
  const unsigned __int128 rate_den = static_cast<unsigned __int128>(cfg.clock_freq) * 8 * 1'000'000;

  FlowTuple tuple = spec.rule.tuple;
  Bytes cum_bytes = 0;
  Cycle jitter_clock = 0;
  for (std::uint64_t k = 0;; ++k) {
    if (spec.volume_packets != 0 && k >= spec.volume_packets) break;
    if (spec.volume_packets == 0 && cum_bytes >= spec.volume_bytes) break;
    const Bytes size = detail::draw_size(spec.size, rng, k);
    Cycle offset = 0;
    switch (spec.arrival.kind) {
      case ArrivalKind::full_rate_share:
        offset = static_cast<Cycle>(static_cast<unsigned __int128>(cum_bytes) * rate_den / rate_num);
        break;
      case ArrivalKind::uniform_interarrival:
        offset = k * spec.arrival.interarrival;
        break;
      case ArrivalKind::jittered_share: {
        // Inter-arrival uniform in [0, 2 * mean] around the share-derived mean.
        const double mean = static_cast<double>(size) * static_cast<double>(rate_den) /
                            static_cast<double>(rate_num);
        offset = jitter_clock;
        jitter_clock += static_cast<Cycle>(std::llround(rng.uniform01() * 2.0 * mean));
        break;
      }
    }
    const Cycle at = spec.start_cycle + detail::apply_bursts(offset, spec.arrival);
    if (spec.stop_cycle != 0 && at >= spec.stop_cycle) break;
    Packet p;
    p.id = (static_cast<std::uint64_t>(flow_index) << 40) | k;
    p.tuple = tuple;
    p.total_size = size;
    p.arrival_cycle = at;
    p.source_flow = flow_index;
    out.push_back(p);
    cum_bytes += size;
  }
  return out;
}

// All flows merged by (arrival cycle, flow index, sequence).
inline std::vector<Packet> generate_scenario_trace(const Scenario& s, const SimConfig& cfg,
                                                   std::uint64_t seed) {
  std::vector<Packet> all;
  for (std::uint32_t i = 0; i < s.flows.size(); ++i) {
    auto t = generate_trace(s.flows[i], i, cfg, seed);
    all.insert(all.end(), t.begin(), t.end());
  }
  std::stable_sort(all.begin(), all.end(), [](const Packet& a, const Packet& b) {
    if (a.arrival_cycle != b.arrival_cycle) return a.arrival_cycle < b.arrival_cycle;
    return a.id < b.id;
  });
  return all;
}

inline constexpr std::string_view kTraceHeader = "# osmosim-trace v1: arrival_cycle,flow_id,total_size_bytes";

inline void write_trace(std::ostream& os, const std::vector<Packet>& trace) {
  os << kTraceHeader << '\n';
  for (const Packet& p : trace) os << p.arrival_cycle << ',' << p.source_flow << ',' << p.total_size << '\n';
}

// Tuples are filled from the scenario's match rules.
inline std::vector<Packet> read_trace(std::istream& is, const Scenario& s) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# osmosim-trace v1", 0) != 0)
    throw ScenarioError("trace: missing or unsupported header");
  std::vector<Packet> out;
  std::vector<std::uint64_t> seq(s.flows.size(), 0);
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    Packet p;
    char c1 = 0, c2 = 0;
    if (!(ls >> p.arrival_cycle >> c1 >> p.source_flow >> c2 >> p.total_size) || c1 != ',' || c2 != ',')
      throw ScenarioError("trace line " + std::to_string(lineno) + ": malformed record");
    if (p.source_flow >= s.flows.size())
      throw ScenarioError("trace line " + std::to_string(lineno) + ": unknown flow id");
    if (p.total_size < kHeaderSize)
      throw ScenarioError("trace line " + std::to_string(lineno) + ": packet smaller than its header");
    p.tuple = s.flows[p.source_flow].rule.tuple;
    p.id = (static_cast<std::uint64_t>(p.source_flow) << 40) | seq[p.source_flow]++;
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Packet& a, const Packet& b) { return a.arrival_cycle < b.arrival_cycle; });
  return out;
}

}  // namespace osmosim
