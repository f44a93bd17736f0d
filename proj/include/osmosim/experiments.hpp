#pragma once

// Management profiles, the 2x2 comparison grid and headline deltas.

#include <array>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "metrics.hpp"
#include "presets.hpp"
#include "simulator.hpp"

namespace osmosim {

struct Profile {
  PuSchedulerKind sched = PuSchedulerKind::wlbvt;
  IoPath path = IoPath::managed;
};

inline std::string profile_name(Profile p) { return std::string(to_string(p.sched)) + "-" + std::string(to_string(p.path)); }

inline SimConfig apply_profile(SimConfig cfg, Profile p) {
  cfg.pu_scheduler = p.sched;
  return with_io_path(cfg, p.path);
}

// Grid order: reference (rr, baseline) first, full management last.
inline constexpr std::array<Profile, 4> kGrid = {{
    {PuSchedulerKind::rr, IoPath::baseline},
    {PuSchedulerKind::rr, IoPath::managed},
    {PuSchedulerKind::wlbvt, IoPath::baseline},
    {PuSchedulerKind::wlbvt, IoPath::managed},
}};

struct Deltas {
  std::optional<double> fairness_improvement_pct;  // relative change of time-averaged Jain
  std::vector<std::optional<double>> fct_reduction_pct;
  std::vector<std::optional<double>> completion_p50_ratio;  // reference / run; > 1 is faster
};

inline std::optional<double> relative_pct(std::optional<double> ref, std::optional<double> now) {
  if (!ref || !now || *ref == 0.0) return std::nullopt;
  return (*now - *ref) / *ref * 100.0;
}

inline Deltas deltas(const SimReport& ref, const SimReport& run) {
  Deltas d;
  d.fairness_improvement_pct = relative_pct(ref.time_avg_jain, run.time_avg_jain);
  for (std::size_t i = 0; i < run.flows.size() && i < ref.flows.size(); ++i) {
    const auto& a = ref.flows[i];
    const auto& b = run.flows[i];
    std::optional<double> fct;
    if (a.fct && b.fct && *a.fct > 0) fct = (static_cast<double>(*a.fct) - static_cast<double>(*b.fct)) / static_cast<double>(*a.fct) * 100.0;
    d.fct_reduction_pct.push_back(fct);
    std::optional<double> ratio;
    if (a.completion.count && b.completion.count && b.completion.p50 > 0)
      ratio = static_cast<double>(a.completion.p50) / static_cast<double>(b.completion.p50);
    d.completion_p50_ratio.push_back(ratio);
  }
  return d;
}

// The scenario with only its victim flows, used as the uncontended reference
// for latency inflation. Empty when no flow has the victim role.
inline Scenario victims_only(const Scenario& s) {
  Scenario v = s;
  v.name += "-victims";
  v.flows.clear();
  for (const FlowSpec& f : s.flows)
    if (f.role == "victim") v.flows.push_back(f);
  return v;
}

// Victim completion p50 under contention over the same victims alone.
inline std::vector<std::optional<double>> victim_inflation(const SimReport& contended, const SimReport& alone) {
  std::vector<std::optional<double>> out;
  std::size_t j = 0;
  for (const FlowReport& f : contended.flows) {
    if (f.role != "victim") {
      out.emplace_back();
      continue;
    }
    std::optional<double> r;
    if (j < alone.flows.size() && alone.flows[j].completion.p50 > 0 && f.completion.count)
      r = static_cast<double>(f.completion.p50) / static_cast<double>(alone.flows[j].completion.p50);
    out.push_back(r);
    ++j;
  }
  return out;
}

namespace detail {
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
inline std::string opt_fmt(const char* f, const std::optional<double>& v) { return v ? fmt(f, *v) : std::string("n/a"); }
}  // namespace detail

inline void write_report(std::ostream& os, const std::string& scenario, const SimConfig& cfg, const SimReport& r) {
  os << "scenario        " << scenario << '\n';
  os << "scheduler       " << to_string(cfg.pu_scheduler) << '\n';
  os << "io arbiter      " << to_string(cfg.io_arbiter) << '\n';
  os << "fragmentation   " << to_string(cfg.fragmentation_mode);
  if (cfg.effective_fragment_size()) os << " (" << cfg.effective_fragment_size() << " B)";
  os << '\n';
  os << "seed            " << cfg.seed << '\n';
  os << "cycles          " << r.cycles << '\n';
  os << "packets         " << r.packets_in << " in, " << r.processed << " processed, " << r.dropped << " dropped\n";
  os << "utilization     pu " << detail::fmt("%.3f", r.pu_utilization) << ", dma " << detail::fmt("%.3f", r.dma_utilization)
     << ", egress " << detail::fmt("%.3f", r.egress_utilization) << '\n';
  os << "jain (windowed) " << detail::opt_fmt("%.4f", r.time_avg_jain) << '\n';
  os << "jain (io)       " << detail::opt_fmt("%.4f", r.time_avg_jain_io) << "\n\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-9s %8s %10s %10s %10s %8s\n", "flow", "role", "done", "fct", "compl_p50",
                "io_p50", "occ");
  os << line;
  for (const FlowReport& f : r.flows) {
    std::snprintf(line, sizeof line, "%-20s %-9s %8llu %10s %10llu %10llu %8.2f\n", f.name.c_str(), f.role.c_str(),
                  static_cast<unsigned long long>(f.processed), f.fct ? std::to_string(*f.fct).c_str() : "n/a",
                  static_cast<unsigned long long>(f.completion.p50), static_cast<unsigned long long>(f.io_latency.p50),
                  f.mean_occupancy);
    os << line;
  }
}

// Headline deltas of `run` against the reference profile and, when given,
// the victims running alone.
inline void write_deltas(std::ostream& os, const std::string& ref_name, const SimReport& ref, const SimReport& run,
                         const std::optional<SimReport>& alone) {
  const Deltas d = deltas(ref, run);
  os << "\nagainst " << ref_name << '\n';
  os << "fairness improvement " << detail::opt_fmt("%+.1f%%", d.fairness_improvement_pct) << '\n';
  std::vector<std::optional<double>> infl;
  if (alone) infl = victim_inflation(run, *alone);
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %14s %16s %18s\n", "flow", "fct_reduction", "p50_speedup", "victim_inflation");
  os << line;
  for (std::size_t i = 0; i < run.flows.size(); ++i) {
    const std::string inf = i < infl.size() ? detail::opt_fmt("%.2fx", infl[i]) : std::string("n/a");
    std::snprintf(line, sizeof line, "%-20s %14s %16s %18s\n", run.flows[i].name.c_str(),
                  detail::opt_fmt("%+.1f%%", d.fct_reduction_pct[i]).c_str(),
                  detail::opt_fmt("%.2fx", d.completion_p50_ratio[i]).c_str(), inf.c_str());
    os << line;
  }
}

}  // namespace osmosim
