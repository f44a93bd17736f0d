#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "common.hpp"
#include "kernel_model.hpp"

namespace osmosim {

// Jain's index (sum x)^2 / (n * sum x^2). nullopt is the "no traffic"
// sentinel for empty or all-zero input; such windows are left out of averages.
inline std::optional<double> jain(std::span<const double> x) {
  if (x.empty()) return std::nullopt;
  double sum = 0.0, sq = 0.0;
  for (double v : x) {
    sum += v;
    sq += v * v;
  }
  if (sq == 0.0) return std::nullopt;
  return (sum * sum) / (static_cast<double>(x.size()) * sq);
}

inline std::optional<double> jain(std::initializer_list<double> x) {
  return jain(std::span<const double>(x.begin(), x.size()));
}

// Jain over allocations normalized by priority: proportional shares score 1.
inline std::optional<double> priority_adjusted_jain(std::span<const double> alloc,
                                                    std::span<const double> prio) {
  if (alloc.size() != prio.size()) throw std::invalid_argument("allocation/priority size mismatch");
  std::vector<double> adj(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) adj[i] = alloc[i] / prio[i];
  return jain(adj);
}

// Per-packet time budget in seconds: n_pus * (bytes * 8 / link_bits_per_second).
inline double ppb(double n_pus, double packet_bytes, double link_bits_per_second) {
  return n_pus * (packet_bytes * 8.0 / link_bits_per_second);
}

// Nearest-rank percentile of an unsorted sample; p in (0, 100].
template <typename T>
T percentile(std::vector<T> v, double p) {
  if (v.empty()) return T{};
  std::sort(v.begin(), v.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(v.size())));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  return v[rank - 1];
}

struct Percentiles {
  Cycle p50 = 0, p90 = 0, p99 = 0, max = 0;
  std::size_t count = 0;
};

inline Percentiles percentiles(const std::vector<Cycle>& v) {
  Percentiles p;
  p.count = v.size();
  if (v.empty()) return p;
  p.p50 = percentile(v, 50);
  p.p90 = percentile(v, 90);
  p.p99 = percentile(v, 99);
  p.max = *std::max_element(v.begin(), v.end());
  return p;
}

// ---------------------------------------------------------------------------
// Raw log written by the simulator; summarize() turns it into a report.

struct KernelRecord {
  std::uint32_t flow = 0;
  std::uint64_t packet_id = 0;
  Bytes size = 0;
  Cycle arrival = 0;   // first byte offered to the ingress link
  Cycle enqueue = 0;   // admitted to the FMQ
  Cycle dispatch = 0;  // scheduler picked it
  Cycle end = 0;       // first cycle after completion
  bool terminated = false;
};

struct IoRecord {
  std::uint32_t flow = 0;
  IoKind kind = IoKind::dma_write_host;
  Bytes bytes = 0;
  Cycle submit = 0;
  Cycle done = 0;
};

struct SampleRecord {
  Cycle cycle = 0;                        // end of the window (exclusive)
  Cycle window = 0;                       // cycles covered
  std::vector<std::uint32_t> occupancy;   // cur_pu_occup at the sample
  std::vector<std::uint64_t> occupancy_sum;  // PU-cycles in the window
  std::vector<Bytes> io_bytes;            // DMA + egress bytes granted in the window
  std::vector<std::uint8_t> active;       // FMQ active at any point of the window
  std::uint64_t in_flight = 0;            // queued + running packets at the sample
};

struct FlowCounters {
  std::string name;
  std::string role;
  double compute_priority = 1;
  double io_priority = 1;
  std::uint64_t offered = 0;    // packets fully received from the link
  std::uint64_t admitted = 0;
  std::uint64_t dropped = 0;
  std::uint64_t congestion_marks = 0;
  std::uint64_t events = 0;
  Bytes bytes_dma = 0;
  Bytes bytes_egress = 0;
  std::optional<Cycle> first_arrival;
};

struct RawLog {
  std::uint32_t n_pus = 0;
  Cycle sample_interval = 0;
  Cycle cycles_run = 0;
  std::uint64_t pu_busy_cycles = 0;
  std::uint64_t dma_busy_cycles = 0;
  std::uint64_t egress_busy_cycles = 0;
  std::uint64_t unmatched = 0;
  std::vector<FlowCounters> flows;
  std::vector<KernelRecord> kernels;
  std::vector<IoRecord> io;
  std::vector<SampleRecord> samples;
};

struct FlowReport {
  std::uint32_t id = 0;
  std::string name;
  std::string role;
  std::uint64_t packets_in = 0;
  std::uint64_t admitted = 0;
  std::uint64_t processed = 0;
  std::uint64_t terminated = 0;
  std::uint64_t dropped = 0;
  std::uint64_t congestion_marks = 0;
  std::uint64_t events = 0;
  std::optional<Cycle> fct;
  Percentiles completion;  // enqueue -> kernel end
  Percentiles service;     // dispatch -> kernel end
  Percentiles io_latency;  // submit -> last byte moved
  Bytes bytes_dma = 0;
  Bytes bytes_egress = 0;
  double mean_occupancy = 0.0;
  double throughput_pps = 0.0;  // processed packets per cycle over the FCT window
  Bytes bytes_processed = 0;
};

struct SimReport {
  Cycle cycles = 0;
  std::uint32_t n_pus = 0;
  std::vector<FlowReport> flows;
  std::vector<Cycle> sample_cycles;
  std::vector<std::vector<double>> occupancy;      // [sample][flow]
  std::vector<std::vector<double>> occupancy_avg;  // [sample][flow]
  std::vector<std::vector<double>> io_bytes;       // [sample][flow]
  std::vector<std::optional<double>> jain_instant;
  std::vector<std::optional<double>> jain_windowed;
  std::vector<std::optional<double>> jain_io;
  double pu_utilization = 0.0;
  double dma_utilization = 0.0;
  double egress_utilization = 0.0;
  std::uint64_t packets_in = 0;
  std::uint64_t processed = 0;
  std::uint64_t dropped = 0;
  std::uint64_t unmatched = 0;
  std::optional<double> time_avg_jain_instant;
  std::optional<double> time_avg_jain;  // headline: windowed occupancy
  std::optional<double> time_avg_jain_io;

  // Mean windowed occupancy of a flow over samples whose window ends in (from, to].
  double mean_occupancy_between(std::uint32_t flow, Cycle from, Cycle to) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < sample_cycles.size(); ++s) {
      if (sample_cycles[s] <= from || sample_cycles[s] > to) continue;
      sum += occupancy_avg[s][flow];
      ++n;
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  }

  std::optional<double> mean_jain_between(Cycle from, Cycle to) const {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t s = 0; s < sample_cycles.size(); ++s) {
      if (sample_cycles[s] <= from || sample_cycles[s] > to || !jain_windowed[s]) continue;
      sum += *jain_windowed[s];
      ++n;
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

namespace detail {
inline std::optional<double> mean_defined(const std::vector<std::optional<double>>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& x : v)
    if (x) {
      sum += *x;
      ++n;
    }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

inline std::optional<double> jain_over_active(const std::vector<double>& values, const std::vector<std::uint8_t>& active,
                                              const std::vector<double>& prio) {
  std::vector<double> a, p;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!active[i]) continue;
    a.push_back(values[i]);
    p.push_back(prio[i]);
  }
  if (a.empty()) return std::nullopt;
  return priority_adjusted_jain(a, p);
}
}  // namespace detail

// Deterministic aggregation of a finished run.
inline SimReport summarize(const RawLog& log) {
  SimReport r;
  r.cycles = log.cycles_run;
  r.n_pus = log.n_pus;
  r.unmatched = log.unmatched;
  const std::size_t n = log.flows.size();

  std::vector<std::vector<Cycle>> completion(n), service(n), io_lat(n);
  std::vector<Cycle> last_end(n, 0);
  std::vector<Bytes> bytes_done(n, 0);
  r.flows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FlowCounters& c = log.flows[i];
    FlowReport& f = r.flows[i];
    f.id = static_cast<std::uint32_t>(i);
    f.name = c.name;
    f.role = c.role;
    f.packets_in = c.offered;
    f.admitted = c.admitted;
    f.dropped = c.dropped;
    f.congestion_marks = c.congestion_marks;
    f.events = c.events;
    f.bytes_dma = c.bytes_dma;
    f.bytes_egress = c.bytes_egress;
  }
  for (const KernelRecord& k : log.kernels) {
    FlowReport& f = r.flows.at(k.flow);
    if (k.terminated)
      ++f.terminated;
    else
      ++f.processed;
    completion[k.flow].push_back(k.end - k.enqueue);
    service[k.flow].push_back(k.end - k.dispatch);
    last_end[k.flow] = std::max(last_end[k.flow], k.end);
    bytes_done[k.flow] += k.size;
  }
  for (const IoRecord& io : log.io) io_lat.at(io.flow).push_back(io.done - io.submit);

  std::vector<double> cprio(n), iprio(n);
  for (std::size_t i = 0; i < n; ++i) {
    cprio[i] = log.flows[i].compute_priority;
    iprio[i] = log.flows[i].io_priority;
  }

  std::vector<double> occ_total(n, 0.0);
  Cycle covered = 0;
  for (const SampleRecord& s : log.samples) {
    r.sample_cycles.push_back(s.cycle);
    std::vector<double> inst(n), avg(n), io(n);
    for (std::size_t i = 0; i < n; ++i) {
      inst[i] = s.occupancy[i];
      avg[i] = s.window == 0 ? 0.0 : static_cast<double>(s.occupancy_sum[i]) / static_cast<double>(s.window);
      io[i] = static_cast<double>(s.io_bytes[i]);
      occ_total[i] += static_cast<double>(s.occupancy_sum[i]);
    }
    covered += s.window;
    r.jain_instant.push_back(detail::jain_over_active(inst, s.active, cprio));
    r.jain_windowed.push_back(detail::jain_over_active(avg, s.active, cprio));
    r.jain_io.push_back(detail::jain_over_active(io, s.active, iprio));
    r.occupancy.push_back(std::move(inst));
    r.occupancy_avg.push_back(std::move(avg));
    r.io_bytes.push_back(std::move(io));
  }

  for (std::size_t i = 0; i < n; ++i) {
    FlowReport& f = r.flows[i];
    f.completion = percentiles(completion[i]);
    f.service = percentiles(service[i]);
    f.io_latency = percentiles(io_lat[i]);
    f.bytes_processed = bytes_done[i];
    if (covered > 0) f.mean_occupancy = occ_total[i] / static_cast<double>(covered);
    if (log.flows[i].first_arrival && !completion[i].empty()) {
      f.fct = last_end[i] - *log.flows[i].first_arrival;
      if (*f.fct > 0) f.throughput_pps = static_cast<double>(f.processed) / static_cast<double>(*f.fct);
    }
    r.packets_in += f.packets_in;
    r.processed += f.processed + f.terminated;
    r.dropped += f.dropped;
  }

  if (log.cycles_run > 0) {
    const double c = static_cast<double>(log.cycles_run);
    r.pu_utilization = static_cast<double>(log.pu_busy_cycles) / (c * log.n_pus);
    r.dma_utilization = static_cast<double>(log.dma_busy_cycles) / c;
    r.egress_utilization = static_cast<double>(log.egress_busy_cycles) / c;
  }
  r.time_avg_jain_instant = detail::mean_defined(r.jain_instant);
  r.time_avg_jain = detail::mean_defined(r.jain_windowed);
  r.time_avg_jain_io = detail::mean_defined(r.jain_io);
  return r;
}

// ---------------------------------------------------------------------------
// CSV export. Series files: `cycle,flow_id,value`; summary: `metric,flow_id,value`.

inline constexpr int kCsvSchemaVersion = 1;

inline std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline void write_series_csv(std::ostream& os, const std::vector<Cycle>& cycles,
                             const std::vector<std::vector<double>>& values) {
  os << "cycle,flow_id,value\n";
  for (std::size_t s = 0; s < cycles.size(); ++s)
    for (std::size_t f = 0; f < values[s].size(); ++f)
      os << cycles[s] << ',' << f << ',' << format_value(values[s][f]) << '\n';
}

inline void write_scalar_series_csv(std::ostream& os, const std::vector<Cycle>& cycles,
                                    const std::vector<std::optional<double>>& values) {
  os << "cycle,flow_id,value\n";
  for (std::size_t s = 0; s < cycles.size(); ++s)
    os << cycles[s] << ",all," << (values[s] ? format_value(*values[s]) : std::string("nan")) << '\n';
}

inline void write_summary_csv(std::ostream& os, const SimReport& r) {
  os << "metric,flow_id,value\n";
  auto row = [&](std::string_view m, const std::string& flow, const std::string& v) {
    os << m << ',' << flow << ',' << v << '\n';
  };
  auto opt = [](const std::optional<double>& v) { return v ? format_value(*v) : std::string("nan"); };
  row("schema_version", "all", std::to_string(kCsvSchemaVersion));
  row("cycles", "all", std::to_string(r.cycles));
  row("n_pus", "all", std::to_string(r.n_pus));
  row("packets_in", "all", std::to_string(r.packets_in));
  row("processed", "all", std::to_string(r.processed));
  row("dropped", "all", std::to_string(r.dropped));
  row("unmatched", "all", std::to_string(r.unmatched));
  row("pu_utilization", "all", format_value(r.pu_utilization));
  row("dma_utilization", "all", format_value(r.dma_utilization));
  row("egress_utilization", "all", format_value(r.egress_utilization));
  row("time_avg_jain", "all", opt(r.time_avg_jain));
  row("time_avg_jain_instant", "all", opt(r.time_avg_jain_instant));
  row("time_avg_jain_io", "all", opt(r.time_avg_jain_io));
  for (const FlowReport& f : r.flows) {
    const std::string id = std::to_string(f.id);
    row("packets_in", id, std::to_string(f.packets_in));
    row("admitted", id, std::to_string(f.admitted));
    row("processed", id, std::to_string(f.processed));
    row("terminated", id, std::to_string(f.terminated));
    row("dropped", id, std::to_string(f.dropped));
    row("congestion_marks", id, std::to_string(f.congestion_marks));
    row("events", id, std::to_string(f.events));
    row("fct", id, f.fct ? std::to_string(*f.fct) : std::string("nan"));
    row("completion_p50", id, std::to_string(f.completion.p50));
    row("completion_p90", id, std::to_string(f.completion.p90));
    row("completion_p99", id, std::to_string(f.completion.p99));
    row("completion_max", id, std::to_string(f.completion.max));
    row("service_p50", id, std::to_string(f.service.p50));
    row("service_p99", id, std::to_string(f.service.p99));
    row("io_latency_p50", id, std::to_string(f.io_latency.p50));
    row("io_latency_p99", id, std::to_string(f.io_latency.p99));
    row("bytes_dma", id, std::to_string(f.bytes_dma));
    row("bytes_egress", id, std::to_string(f.bytes_egress));
    row("mean_occupancy", id, format_value(f.mean_occupancy));
    row("throughput_pps", id, format_value(f.throughput_pps));
  }
}

}  // namespace osmosim
