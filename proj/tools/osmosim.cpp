// osmosim command-line front end.
//
// Exit codes: 0 success, 1 configuration error, 2 scenario error.
// Settings resolve as flag > config file > OSMOSIM_SEED (seed only) > default.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <osmosim/osmosim.hpp>

namespace fs = std::filesystem;
using namespace osmosim;

namespace {

struct Flags {
  std::string preset;
  std::string scenario_file;
  std::string config_file;
  std::string output_dir;
  std::string sched;
  std::string frag;
  std::optional<Bytes> frag_size;
  std::optional<std::uint64_t> seed;
  std::optional<Cycle> cycles;
  bool compare = false;
};

struct Resolved {
  SimConfig cfg;
  Scenario scenario;
  std::vector<Packet> trace;  // empty unless the scenario names a trace file
  fs::path output_dir = "out";
  bool compare = false;
  bool sched_set = false;
  bool frag_set = false;
};

std::string slurp(const fs::path& p, bool scenario) {
  std::ifstream in(p);
  if (!in) {
    const std::string msg = "cannot read '" + p.string() + "'";
    if (scenario) throw ScenarioError(msg);
    throw ConfigError(msg);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void apply_frag(SimConfig& cfg, const std::string& mode) {
  const FragmentationMode m = parse_fragmentation_mode(mode);
  if (m == FragmentationMode::none) {
    cfg = with_io_path(cfg, IoPath::baseline);
  } else {
    cfg = with_io_path(cfg, IoPath::managed);
    cfg.fragmentation_mode = m;
  }
}

Resolved resolve(const Flags& f) {
  Resolved r;
  if (const char* env = std::getenv("OSMOSIM_SEED")) r.cfg.seed = detail::to_u64<ConfigError>(env, "OSMOSIM_SEED");

  RunOptions run;
  if (!f.config_file.empty()) {
    const std::string text = slurp(f.config_file, false);
    std::istringstream a(text), b(text);
    r.cfg = read_config(a, r.cfg);
    run = read_run_options(b);
  }

  if (!f.sched.empty()) {
    r.cfg.pu_scheduler = parse_pu_scheduler(f.sched);
    r.sched_set = true;
  }
  if (!f.frag.empty()) {
    apply_frag(r.cfg, f.frag);
    r.frag_set = true;
  }
  if (f.frag_size) r.cfg.fragment_size = *f.frag_size;
  if (f.seed) r.cfg.seed = *f.seed;
  if (f.cycles) r.cfg.max_cycles = *f.cycles;
  r.cfg.validate();

  r.compare = f.compare || run.compare.value_or(false);
  if (!f.output_dir.empty()) r.output_dir = f.output_dir;
  else if (run.output_dir) r.output_dir = *run.output_dir;

  // A scenario flag replaces both scenario sources from the file.
  std::optional<std::string> preset_name, scenario_path;
  if (!f.preset.empty() || !f.scenario_file.empty()) {
    if (!f.preset.empty()) preset_name = f.preset;
    if (!f.scenario_file.empty()) scenario_path = f.scenario_file;
  } else {
    preset_name = run.preset;
    scenario_path = run.scenario_file;
    // Relative to the config file that names it.
    if (scenario_path && fs::path(*scenario_path).is_relative() && !f.config_file.empty())
      scenario_path = (fs::path(f.config_file).parent_path() / *scenario_path).string();
  }
  if (preset_name && scenario_path) throw ScenarioError("give either a preset or a scenario file, not both");
  if (!preset_name && !scenario_path) throw ScenarioError("no scenario: use --preset or --scenario");

  if (preset_name) {
    r.scenario = preset(*preset_name);
  } else {
    std::istringstream in(slurp(*scenario_path, true));
    r.scenario = read_scenario(in);
    if (!r.scenario.trace_file.empty()) {
      fs::path t = r.scenario.trace_file;
      if (t.is_relative()) t = fs::path(*scenario_path).parent_path() / t;
      std::istringstream tin(slurp(t, true));
      r.trace = read_trace(tin, r.scenario);
    }
  }
  if (r.scenario.flows.empty()) throw ScenarioError("scenario '" + r.scenario.name + "' has no flows");
  for (const FlowSpec& fl : r.scenario.flows) {
    if (!fl.slo.allowed_host_ranges.empty()) continue;
    for (const IoStep& st : fl.kernel.io_program)
      if (is_host(st.kind)) {
        std::cerr << "warning: flow '" << fl.name
                  << "' issues host DMA but has no allowed_host_ranges; every such kernel will be terminated\n";
        break;
      }
  }
  return r;
}

// Writes through a temporary file so a directory never holds a partial result.
void write_file(const fs::path& p, const std::string& body) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << body;
  }
  fs::rename(tmp, p);
}

template <typename Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

SimReport simulate(const SimConfig& cfg, const Scenario& s, const std::vector<Packet>& trace) {
  return trace.empty() ? run(cfg, s) : run(cfg, s, trace);
}

std::optional<SimReport> victims_alone(const SimConfig& cfg, const Scenario& s, const std::vector<Packet>& trace) {
  if (!trace.empty()) return std::nullopt;  // trace flow ids would not line up
  const Scenario v = victims_only(s);
  if (v.flows.empty() || v.flows.size() == s.flows.size()) return std::nullopt;
  return run(cfg, v);
}

void write_run_dir(const fs::path& dir, const std::string& report_txt, const SimReport& r) {
  fs::create_directories(dir);
  write_file(dir / "summary.csv", render([&](auto& os) { write_summary_csv(os, r); }));
  write_file(dir / "series_occupancy.csv", render([&](auto& os) { write_series_csv(os, r.sample_cycles, r.occupancy); }));
  write_file(dir / "series_occupancy_avg.csv",
             render([&](auto& os) { write_series_csv(os, r.sample_cycles, r.occupancy_avg); }));
  write_file(dir / "series_io_bytes.csv", render([&](auto& os) { write_series_csv(os, r.sample_cycles, r.io_bytes); }));
  write_file(dir / "series_jain.csv",
             render([&](auto& os) { write_scalar_series_csv(os, r.sample_cycles, r.jain_windowed); }));
  write_file(dir / "series_jain_instant.csv",
             render([&](auto& os) { write_scalar_series_csv(os, r.sample_cycles, r.jain_instant); }));
  write_file(dir / "series_jain_io.csv", render([&](auto& os) { write_scalar_series_csv(os, r.sample_cycles, r.jain_io); }));
  write_file(dir / "report.txt", report_txt);
}

// One scenario, one profile. The report compares against rr + baseline IO.
void run_single(const Resolved& res, const fs::path& dir) {
  const SimReport r = simulate(res.cfg, res.scenario, res.trace);
  const Profile ref_profile{PuSchedulerKind::rr, IoPath::baseline};
  const SimConfig ref_cfg = apply_profile(res.cfg, ref_profile);
  const SimReport ref = simulate(ref_cfg, res.scenario, res.trace);
  const auto alone = victims_alone(res.cfg, res.scenario, res.trace);
  const std::string txt = render([&](auto& os) {
    write_report(os, res.scenario.name, res.cfg, r);
    write_deltas(os, profile_name(ref_profile), ref, r, alone);
  });
  write_run_dir(dir, txt, r);
  std::cout << txt;
}

void run_compare(const Resolved& res, const fs::path& dir) {
  std::vector<SimReport> reports;
  std::vector<SimConfig> cfgs;
  std::vector<std::optional<SimReport>> alone;
  for (Profile p : kGrid) {
    cfgs.push_back(apply_profile(res.cfg, p));
    reports.push_back(simulate(cfgs.back(), res.scenario, res.trace));
    alone.push_back(victims_alone(cfgs.back(), res.scenario, res.trace));
    write_run_dir(dir / profile_name(p), render([&](auto& os) { write_report(os, res.scenario.name, cfgs.back(), reports.back()); }),
                  reports.back());
  }
  const std::string ref_name = profile_name(kGrid[0]);
  const std::string txt = render([&](auto& os) {
    os << "scenario " << res.scenario.name << ", seed " << res.cfg.seed << "\n";
    for (std::size_t i = 1; i < kGrid.size(); ++i) {
      os << "\n== " << profile_name(kGrid[i]) << '\n';
      write_deltas(os, ref_name, reports[0], reports[i], alone[i]);
    }
  });
  const std::string csv = render([&](auto& os) {
    os << "metric,profile,flow_id,value\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_value(*v) : std::string("nan"); };
    for (std::size_t i = 1; i < kGrid.size(); ++i) {
      const Deltas d = deltas(reports[0], reports[i]);
      const std::string p = profile_name(kGrid[i]);
      os << "fairness_improvement_pct," << p << ",all," << opt(d.fairness_improvement_pct) << '\n';
      for (std::size_t f = 0; f < d.fct_reduction_pct.size(); ++f) {
        os << "fct_reduction_pct," << p << ',' << f << ',' << opt(d.fct_reduction_pct[f]) << '\n';
        os << "completion_p50_speedup," << p << ',' << f << ',' << opt(d.completion_p50_ratio[f]) << '\n';
      }
    }
  });
  fs::create_directories(dir);
  write_file(dir / "delta_summary.csv", csv);
  write_file(dir / "report.txt", txt);
  std::cout << txt;
}

void cmd_run(const Flags& f) {
  const Resolved res = resolve(f);
  if (res.compare) {
    if (res.sched_set || res.frag_set) throw ConfigError("--compare runs every --sched and --frag setting; drop those flags");
    run_compare(res, res.output_dir);
  } else {
    run_single(res, res.output_dir);
  }
}

// One subdirectory per point of the preset's size sweep.
void cmd_sweep(const Flags& f) {
  if (f.preset.empty()) throw ScenarioError("sweep needs --preset");
  Resolved res = resolve(f);
  for (const Scenario& s : preset_sweep(f.preset)) {
    res.scenario = s;
    std::string sub = s.name;
    if (!s.flows.empty() && s.flows.back().size.kind == SizeDistKind::fixed)
      sub += "-" + std::to_string(s.flows.back().size.fixed);
    std::cout << "### " << sub << '\n';
    if (res.compare) run_compare(res, res.output_dir / sub);
    else run_single(res, res.output_dir / sub);
  }
}

void cmd_presets() {
  for (const std::string& n : preset_names()) std::cout << n << '\n';
}

void cmd_ppb(std::uint32_t pus, std::optional<Bytes> size, double bw) {
  SimConfig cfg;
  std::vector<Bytes> sizes;
  if (size) sizes = {*size};
  else sizes.assign(std::begin(kStandaloneSizes), std::end(kStandaloneSizes));
  std::printf("%-12s %8s %14s %10s  %s\n", "kernel", "size_B", "service_ns", "ppb_ns", "verdict");
  for (const auto& [name, k] : builtin_kernels()) {
    for (Bytes b : sizes) {
      const double service_ns = nominal_service_cycles(k, b, cfg) / static_cast<double>(cfg.clock_freq) * 1e9;
      const double budget_ns = ppb(pus, static_cast<double>(b), bw) * 1e9;
      std::printf("%-12s %8llu %14.1f %10.2f  %s\n", name.c_str(), static_cast<unsigned long long>(b), service_ns, budget_ns,
                  service_ns > budget_ns ? "exceeds PPB" : "within PPB");
    }
  }
}

void cmd_dump(const Flags& f) {
  const Resolved res = resolve(f);
  write_config(std::cout, res.cfg);
  std::cout << '\n';
  write_scenario(std::cout, res.scenario);
}

void add_run_flags(CLI::App* app, Flags& f) {
  app->add_option("--preset", f.preset, "preset scenario name (see `presets`)");
  app->add_option("--scenario", f.scenario_file, "scenario file");
  app->add_option("--config", f.config_file, "config file ([sim] and [run] sections)");
  app->add_option("--sched", f.sched, "PU scheduler")->check(CLI::IsMember({"wlbvt", "rr"}));
  app->add_option("--frag", f.frag, "IO path: none = per-cluster FIFO, software/hardware = per-tenant DWRR with fragmentation")
      ->check(CLI::IsMember({"none", "off", "software", "hardware"}));
  app->add_option("--frag-size", f.frag_size, "fragment size in bytes");
  app->add_option("--seed", f.seed, "RNG seed");
  app->add_option("--cycles", f.cycles, "cycle cap");
  app->add_flag("--compare", f.compare, "run the sched x IO path grid and emit deltas");
  app->add_option("-o,--output", f.output_dir, "output directory (default out)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osmosim: cycle-stepped multi-tenant SmartNIC simulator"};
  app.require_subcommand(1);
  Flags flags;
  auto* run_cmd = app.add_subcommand("run", "run a scenario and write CSV reports");
  add_run_flags(run_cmd, flags);
  auto* sweep_cmd = app.add_subcommand("sweep", "run every size point of a preset's sweep");
  add_run_flags(sweep_cmd, flags);
  auto* dump_cmd = app.add_subcommand("dump", "print the resolved config and scenario as a file");
  add_run_flags(dump_cmd, flags);
  auto* presets_cmd = app.add_subcommand("presets", "list preset scenarios");
  auto* ppb_cmd = app.add_subcommand("ppb", "per-packet budget vs builtin kernel service times");
  std::uint32_t pus = 32;
  std::optional<Bytes> size;
  double bw = 400e9;
  ppb_cmd->add_option("-n,--pus", pus, "processing units");
  ppb_cmd->add_option("-s,--size", size, "packet size in bytes (default: 64, 256, 1024, 4096)");
  ppb_cmd->add_option("-b,--bw", bw, "link bandwidth in bits/s");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) cmd_run(flags);
    else if (*sweep_cmd) cmd_sweep(flags);
    else if (*dump_cmd) cmd_dump(flags);
    else if (*presets_cmd) cmd_presets();
    else if (*ppb_cmd) cmd_ppb(pus, size, bw);
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const AllocationError& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const RuleConflict& e) {
    std::cerr << "scenario error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
