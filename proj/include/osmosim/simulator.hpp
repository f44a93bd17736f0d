#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "control_plane.hpp"
#include "flows.hpp"
#include "io_engine.hpp"
#include "kernels.hpp"
#include "matching.hpp"
#include "metrics.hpp"
#include "rng.hpp"
#include "scheduler.hpp"
#include "traffic.hpp"

namespace osmosim {

// Cycle-stepped data path. Phase order inside one cycle:
//   ingress -> update_tput -> schedule -> kernels -> IO (DMA, egress) -> unblock -> sample
class Simulator {
 public:
  Simulator(const SimConfig& cfg, const Scenario& scenario, std::vector<Packet> trace)
      : cfg_(validated(cfg)),
        cp_(cfg.l2_kernel_buffer),
        sched_(cfg.pu_scheduler, cfg.total_pus(), cfg.pu_limit_scale),
        dma_(cfg, cfg.interconnect_bandwidth, static_cast<std::uint32_t>(scenario.flows.size())),
        egress_(cfg, cfg.egress_bandwidth, static_cast<std::uint32_t>(scenario.flows.size())),
        ingress_(cfg.ingress_bandwidth, cfg.clock_freq),
        rng_(mix_seed(cfg.seed, 0xD3A)),
        trace_(std::move(trace)),
        pus_(cfg.total_pus()) {
    for (const FlowSpec& f : scenario.flows) {
      validate_flow(f);
      const auto id = cp_.create_ectx(f.rule, f.slo, f.kernel, f.requested_memory, f.name);
      dma_.set_tenant_weight(id, f.slo.dma_priority);
      egress_.set_tenant_weight(id, f.slo.egress_priority);
      FlowCounters c;
      c.name = cp_.ectxs()[id].name;
      c.role = f.role;
      c.compute_priority = f.slo.compute_priority;
      c.io_priority = f.slo.dma_priority;
      log_.flows.push_back(c);
    }
    const std::size_t n = scenario.flows.size();
    log_.n_pus = cfg.total_pus();
    log_.sample_interval = cfg.sample_interval;
    win_occ_.assign(n, 0);
    win_io_.assign(n, 0);
    win_active_.assign(n, 0);
  }

  Simulator(const SimConfig& cfg, const Scenario& scenario)
      : Simulator(cfg, scenario, generate_scenario_trace(scenario, cfg, cfg.seed)) {}

  void step() {
    ingress_phase();
    update_tput(fmqs());
    for (std::size_t i = 0; i < fmqs().size(); ++i) {
      win_occ_[i] += fmqs()[i].cur_pu_occup;
      if (fmqs()[i].active()) win_active_[i] = 1;
    }
    schedule_phase();
    kernel_phase();
    io_phase();
    unblock_phase();
    ++now_;
    ++win_len_;
    if (now_ % cfg_.sample_interval == 0) sample();
  }

  // Nothing left to arrive, queue, run or transfer.
  bool finished() const {
    if (next_packet_ < trace_.size() || link_.has_value()) return false;
    for (const Fmq& q : fmqs())
      if (!q.empty()) return false;
    if (!running_.empty()) return false;
    return dma_.idle() && egress_.idle();
  }

  SimReport run() {
    while (now_ < cfg_.max_cycles && !finished()) step();
    return report();
  }

  SimReport report() {
    if (win_len_ > 0) sample();
    log_.cycles_run = now_;
    log_.dma_busy_cycles = dma_.busy_cycles();
    log_.egress_busy_cycles = egress_.busy_cycles();
    log_.unmatched = cp_.table().unmatched();
    return summarize(log_);
  }

  Cycle now() const { return now_; }
  const SimConfig& config() const { return cfg_; }
  const RawLog& log() const { return log_; }
  ControlPlane& control_plane() { return cp_; }
  const std::vector<Ectx>& ectxs() const { return cp_.ectxs(); }
  std::span<Fmq> fmqs() { return cp_.fmqs(); }
  std::span<const Fmq> fmqs() const { return cp_.fmqs(); }
  std::uint64_t work_conservation_violations() const { return wc_violations_; }
  std::uint64_t conservation_violations() const { return conservation_violations_; }
  std::size_t running_kernels() const { return running_.size(); }
  const std::vector<Packet>& trace() const { return trace_; }

 private:
  static const SimConfig& validated(const SimConfig& cfg) {
    cfg.validate();
    return cfg;
  }

  struct LinkState {
    Packet pkt;
    Bytes remaining;
  };

  // (1) Link serialization and classification.
  void ingress_phase() {
    Bytes budget = ingress_.tick();
    while (budget > 0) {
      if (!link_) {
        if (next_packet_ >= trace_.size() || trace_[next_packet_].arrival_cycle > now_) break;
        link_ = LinkState{trace_[next_packet_], trace_[next_packet_].total_size};
        ++next_packet_;
      }
      const Bytes take = std::min(budget, link_->remaining);
      link_->remaining -= take;
      budget -= take;
      if (link_->remaining == 0) {
        classify(link_->pkt);
        link_.reset();
      }
    }
  }

  void classify(const Packet& p) {
    auto fmq_id = cp_.table().classify(p);
    if (!fmq_id) return;
    FlowCounters& c = log_.flows[*fmq_id];
    ++c.offered;
    if (!c.first_arrival) c.first_arrival = p.arrival_cycle;
    Fmq& q = fmqs()[*fmq_id];
    PacketDescriptor d{p.id, p.total_size, p.arrival_cycle, now_};
    if (packet_buffer_used_ + p.total_size > cfg_.l2_packet_buffer) {
      ++q.drops;
      ++q.congestion_marks;
      ++c.dropped;
      ++c.congestion_marks;
      return;
    }
    if (admit(q, d) == Admission::dropped) {
      ++c.dropped;
      ++c.congestion_marks;
      return;
    }
    ++c.admitted;
    packet_buffer_used_ += p.total_size;
  }

  // (3) Free PUs in index order; the scheduler state is updated between picks.
  void schedule_phase() {
    bool idle_pu = false;
    for (PuId pu = 0; pu < pus_.size(); ++pu) {
      if (pus_[pu]) continue;
      auto pick = sched_.dispatch(fmqs());
      if (!pick) {
        idle_pu = true;
        continue;
      }
      const auto& [fmq_id, desc] = *pick;
      const Ectx& e = cp_.ectxs()[fmq_id];
      const Cycle local = rng_.uniform_int(cfg_.local_dma_latency.lo, cfg_.local_dma_latency.hi);
      KernelInstance k(next_kernel_++, e, pu, pu / cfg_.pus_per_cluster, desc, now_,
                       copy_in_cycles(cfg_, desc.total_size, local));
      if (cfg_.fragmentation_mode == FragmentationMode::software)
        k.set_software_fragmentation(cfg_.fragment_size, cfg_.sw_frag_issue_cost);
      running_.emplace(k.id(), pu);
      pus_[pu] = std::move(k);
    }
    if (cfg_.check_invariants && idle_pu && !sched_.work_conserving(fmqs())) {
      ++wc_violations_;
      throw std::logic_error("work conservation violated at cycle " + std::to_string(now_));
    }
  }

  // (4) Kernels dispatched this cycle start on the next one.
  void kernel_phase() {
    for (PuId pu = 0; pu < pus_.size(); ++pu) {
      if (!pus_[pu]) continue;
      KernelInstance& k = *pus_[pu];
      if (k.dispatch_cycle() == now_) continue;
      auto submit = [this](const IoOp& op, KernelInstance& inst, Cycle now) { return submit_io(op, inst, now); };
      const AdvanceResult r = k.advance(now_, submit);
      if (r == AdvanceResult::running) continue;
      if (r == AdvanceResult::terminated) {
        Ectx& e = cp_.ectxs()[k.ectx()];
        if (!k.violation_address()) {
          Event ev;
          ev.kind = EventKind::cycle_limit_exceeded;
          ev.cycle = now_;
          ev.kernel_id = k.id();
          post_event(e, ev);
        } else {
          // check_memory_access already appended the event
          send_event_message(e, e.events.size() - 1);
        }
      }
      retire(pu);
    }
  }

  SubmitOutcome submit_io(const IoOp& op, KernelInstance& k, Cycle now) {
    Ectx& e = cp_.ectxs()[k.ectx()];
    if (!is_egress(op.kind)) {
      const MemorySpace space = is_host(op.kind) ? MemorySpace::host : MemorySpace::l2_local;
      if (check_memory_access(e, space, op.address, op.size, k.id(), now) == AccessResult::violation)
        return {SubmitOutcome::Status::violation};
    }
    IoEngine& eng = is_egress(op.kind) ? egress_ : dma_;
    if (!eng.can_submit(k.cluster())) return {SubmitOutcome::Status::queue_full};
    IoRequest req;
    req.id = next_request_++;
    req.ectx = e.id;
    req.kind = op.kind;
    req.total_len = op.size;
    req.priority = is_egress(op.kind) ? e.slo.egress_priority : e.slo.dma_priority;
    req.cluster = k.cluster();
    req.blocking = op.blocking;
    req.submit_cycle = now;
    req.ready_cycle = now + io_latency(op.kind);
    req.target = k.id();
    eng.submit(std::move(req));
    return {SubmitOutcome::Status::submitted, next_request_ - 1};
  }

  Cycle io_latency(IoKind kind) {
    if (is_host(kind)) return cfg_.ns_to_cycles(rng_.uniform_int(cfg_.host_dma_latency.lo, cfg_.host_dma_latency.hi));
    return rng_.uniform_int(cfg_.local_dma_latency.lo, cfg_.local_dma_latency.hi);
  }

  void post_event(Ectx& e, const Event& ev) { send_event_message(e, e.events.push(ev)); }

  // EQ notification to the host, served ahead of all tenant traffic.
  void send_event_message(Ectx& e, std::size_t index) {
    ++log_.flows[e.id].events;
    IoRequest req;
    req.id = next_request_++;
    req.ectx = e.id;
    req.kind = IoKind::dma_write_host;
    req.total_len = cfg_.eq_message_size;
    req.priority = 0xFFFF;
    req.blocking = false;
    req.event_message = true;
    req.submit_cycle = now_;
    req.ready_cycle = now_ + io_latency(IoKind::dma_write_host);
    pending_events_.emplace(req.id, std::make_pair(e.id, index));
    dma_.submit(std::move(req));
  }

  void retire(PuId pu) {
    KernelInstance& k = *pus_[pu];
    Fmq& q = fmqs()[k.fmq()];
    --q.cur_pu_occup;
    packet_buffer_used_ -= k.packet().total_size;
    KernelRecord rec;
    rec.flow = k.ectx();
    rec.packet_id = k.packet().packet_id;
    rec.size = k.packet().total_size;
    rec.arrival = k.packet().arrival_cycle;
    rec.enqueue = k.packet().enqueue_cycle;
    rec.dispatch = k.dispatch_cycle();
    rec.end = k.end_cycle();
    rec.terminated = k.phase() == KernelPhase::terminated;
    log_.kernels.push_back(rec);
    log_.pu_busy_cycles += k.end_cycle() - k.dispatch_cycle();
    running_.erase(k.id());
    pus_[pu].reset();
  }

  // (5) DMA first, then egress.
  void io_phase() {
    completions_.clear();
    dma_.step(now_, completions_);
    egress_.step(now_, completions_);
    for (const auto& [tenant, bytes] : dma_.take_granted()) {
      log_.flows[tenant].bytes_dma += bytes;
      win_io_[tenant] += bytes;
    }
    for (const auto& [tenant, bytes] : egress_.take_granted()) {
      log_.flows[tenant].bytes_egress += bytes;
      win_io_[tenant] += bytes;
    }
  }

  // (6)
  void unblock_phase() {
    for (const IoCompletion& c : completions_) {
      if (c.event_message) {
        auto it = pending_events_.find(c.request_id);
        if (it != pending_events_.end()) {
          cp_.ectxs()[it->second.first].events.mark_delivered(it->second.second, c.done_cycle);
          pending_events_.erase(it);
        }
        continue;
      }
      log_.io.push_back(IoRecord{c.ectx, c.kind, c.bytes, c.submit_cycle, c.done_cycle});
      if (!c.target) continue;
      auto it = running_.find(*c.target);
      if (it == running_.end()) continue;  // issuer was terminated
      const PuId pu = it->second;
      if (pus_[pu]->on_io_complete(c.request_id, now_)) retire(pu);
    }
  }

  // (7)
  void sample() {
    SampleRecord s;
    s.cycle = now_;
    s.window = win_len_;
    const std::size_t n = fmqs().size();
    s.occupancy.resize(n);
    std::uint64_t queued = 0;
    for (std::size_t i = 0; i < n; ++i) {
      s.occupancy[i] = fmqs()[i].cur_pu_occup;
      queued += fmqs()[i].fifo.size();
    }
    s.occupancy_sum = win_occ_;
    s.io_bytes = win_io_;
    s.active = win_active_;
    s.in_flight = queued + running_.size();
    log_.samples.push_back(std::move(s));
    std::fill(win_occ_.begin(), win_occ_.end(), 0);
    std::fill(win_io_.begin(), win_io_.end(), 0);
    for (std::size_t i = 0; i < n; ++i) win_active_[i] = fmqs()[i].active() ? 1 : 0;
    win_len_ = 0;
    check_conservation(log_.samples.back().in_flight);
  }

  void check_conservation(std::uint64_t in_flight) {
    std::uint64_t ingressed = 0, dropped = 0;
    for (const FlowCounters& c : log_.flows) {
      ingressed += c.offered;
      dropped += c.dropped;
    }
    const std::uint64_t processed = log_.kernels.size();
    if (ingressed != processed + dropped + in_flight) {
      ++conservation_violations_;
      if (cfg_.check_invariants) {
        std::ostringstream os;
        os << "packet conservation violated at cycle " << now_ << ": ingressed " << ingressed << " != processed "
           << processed << " + dropped " << dropped << " + in flight " << in_flight;
        throw std::logic_error(os.str());
      }
    }
  }

  SimConfig cfg_;
  ControlPlane cp_;
  PuScheduler sched_;
  IoEngine dma_;
  IoEngine egress_;
  ByteBudget ingress_;
  Random rng_;
  std::vector<Packet> trace_;
  std::size_t next_packet_ = 0;
  std::optional<LinkState> link_;
  Bytes packet_buffer_used_ = 0;

  std::vector<std::optional<KernelInstance>> pus_;
  std::unordered_map<std::uint64_t, PuId> running_;  // kernel id -> PU
  std::vector<IoCompletion> completions_;
  std::unordered_map<std::uint64_t, std::pair<std::uint32_t, std::size_t>> pending_events_;

  Cycle now_ = 0;
  std::uint64_t next_kernel_ = 0;
  std::uint64_t next_request_ = 1;
  std::uint64_t wc_violations_ = 0;
  std::uint64_t conservation_violations_ = 0;

  RawLog log_;
  Cycle win_len_ = 0;
  std::vector<std::uint64_t> win_occ_;
  std::vector<Bytes> win_io_;
  std::vector<std::uint8_t> win_active_;
};

// Top-level entry: builds the data path, runs it and summarizes.
inline SimReport run(const SimConfig& cfg, const Scenario& scenario) {
  Simulator sim(cfg, scenario);
  return sim.run();
}

inline SimReport run(const SimConfig& cfg, const Scenario& scenario, std::vector<Packet> trace) {
  Simulator sim(cfg, scenario, std::move(trace));
  return sim.run();
}

}  // namespace osmosim
