#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "flows.hpp"
#include "io_engine.hpp"
#include "kernel_model.hpp"

namespace osmosim {

enum class KernelPhase { copy_in, running, io_wait, done, terminated };
enum class AdvanceResult { running, done, terminated };

// Resolved IO step for one packet.
struct IoOp {
  IoKind kind;
  Bytes size;
  bool blocking;
  std::uint64_t address;
};

// What a kernel instance needs from its surroundings while it runs.
struct SubmitOutcome {
  enum class Status { submitted, queue_full, violation } status;
  std::uint64_t request_id = 0;
};

// A run-to-completion execution of one packet's kernel on one PU.
class KernelInstance {
 public:
  struct Op {
    enum class Kind { compute, issue } kind;
    Cycle cycles = 0;  // compute
    IoOp io{};         // issue
  };

  KernelInstance(std::uint64_t id, const Ectx& ectx, PuId pu, std::uint32_t cluster,
                 const PacketDescriptor& pkt, Cycle dispatch_cycle, Cycle copy_cycles)
      : id_(id),
        ectx_(ectx.id),
        fmq_(ectx.fmq_id),
        pu_(pu),
        cluster_(cluster),
        packet_(pkt),
        dispatch_cycle_(dispatch_cycle),
        copy_left_(copy_cycles),
        cycle_limit_(ectx.slo.kernel_cycle_limit) {
    build_program(ectx);
    if (copy_left_ == 0) phase_ = KernelPhase::running;
  }

  // One PU cycle. `submit(op, cluster)` hands an IO request to the engines.
  template <typename Submit>
  AdvanceResult advance(Cycle now, Submit&& submit) {
    if (phase_ == KernelPhase::done) return AdvanceResult::done;
    if (phase_ == KernelPhase::terminated) return AdvanceResult::terminated;
    if (phase_ == KernelPhase::copy_in) {
      if (--copy_left_ == 0) phase_ = KernelPhase::running;
      return AdvanceResult::running;
    }
    ++consumed_;
    if (phase_ == KernelPhase::running) {
      Op& op = program_[pc_];
      if (op.kind == Op::Kind::compute) {
        if (--op.cycles == 0) ++pc_;
      } else if (!issue(op.io, now, submit)) {
        return finish(now, AdvanceResult::terminated);
      }
      if (phase_ == KernelPhase::running && pc_ == program_.size()) {
        if (outstanding_.empty()) return finish(now, AdvanceResult::done);
        phase_ = KernelPhase::io_wait;  // implicit wait-all
      }
    }
    if (consumed_ >= cycle_limit_) return finish(now, AdvanceResult::terminated);
    return AdvanceResult::running;
  }

  // Called from the unblock phase. Returns true if the kernel finished.
  bool on_io_complete(std::uint64_t request_id, Cycle now) {
    if (phase_ == KernelPhase::done || phase_ == KernelPhase::terminated) return false;
    std::erase(outstanding_, request_id);
    std::erase(blocking_on_, request_id);
    if (phase_ != KernelPhase::io_wait) return false;
    if (pc_ < program_.size()) {
      if (blocking_on_.empty()) {
        ++pc_;
        phase_ = KernelPhase::running;
        if (pc_ == program_.size()) {
          if (outstanding_.empty()) {
            finish(now, AdvanceResult::done);
            return true;
          }
          phase_ = KernelPhase::io_wait;
        }
      }
      return false;
    }
    if (outstanding_.empty()) {
      finish(now, AdvanceResult::done);
      return true;
    }
    return false;
  }

  // Software fragmentation: per-fragment issue cost and the fragment size.
  void set_software_fragmentation(Bytes frag_size, Cycle issue_cost) {
    sw_frag_size_ = frag_size;
    sw_issue_cost_ = std::max<Cycle>(1, issue_cost);
  }

  std::uint64_t id() const { return id_; }
  std::uint32_t ectx() const { return ectx_; }
  FmqId fmq() const { return fmq_; }
  PuId pu() const { return pu_; }
  std::uint32_t cluster() const { return cluster_; }
  const PacketDescriptor& packet() const { return packet_; }
  KernelPhase phase() const { return phase_; }
  Cycle dispatch_cycle() const { return dispatch_cycle_; }
  Cycle consumed_cycles() const { return consumed_; }
  Cycle end_cycle() const { return end_cycle_; }
  bool finished() const { return phase_ == KernelPhase::done || phase_ == KernelPhase::terminated; }
  const std::vector<Op>& program() const { return program_; }
  const std::vector<std::uint64_t>& outstanding() const { return outstanding_; }
  std::optional<std::uint64_t> violation_address() const { return violation_address_; }

 private:
  void build_program(const Ectx& ectx) {
    const KernelModel& k = ectx.kernel;
    const Bytes payload = packet_.total_size - std::min(packet_.total_size, kHeaderSize);
    const Cycle compute = k.compute_cycles(payload);
    if (compute > 0) program_.push_back(Op{Op::Kind::compute, compute, {}});
    for (const IoStep& s : k.io_program) {
      const Bytes size = std::max<Bytes>(1, s.resolved_size(packet_.total_size));
      std::uint64_t base = 0;
      if (is_host(s.kind)) {
        base = ectx.slo.allowed_host_ranges.empty() ? 0 : ectx.slo.allowed_host_ranges.front().base;
      } else if (!is_egress(s.kind)) {
        base = ectx.l2_segment.base + k.kernel_binary_size;  // data lives after the binary
      }
      const std::uint64_t addr = s.absolute_address ? *s.absolute_address : base + s.offset;
      program_.push_back(Op{Op::Kind::issue, 0, IoOp{s.kind, size, s.blocking, addr}});
    }
    if (program_.empty()) program_.push_back(Op{Op::Kind::compute, 1, {}});
  }

  // Returns false on a memory violation.
  template <typename Submit>
  bool issue(const IoOp& io, Cycle now, Submit& submit) {
    if (sw_frag_size_ != 0 && io.size > sw_frag_size_) {
      if (sw_cost_left_ > 0) {  // bookkeeping between fragment submissions
        --sw_cost_left_;
        if (sw_cost_left_ == 0 && sw_pending_.empty()) complete_issue(io);
        return true;
      }
      if (!sw_started_) {
        sw_started_ = true;
        sw_pending_.clear();
        for (Bytes f : fragment(io.size, sw_frag_size_)) sw_pending_.push_back(f);
        sw_offset_ = 0;
      }
      IoOp part = io;
      part.size = sw_pending_.front();
      part.address = io.address + sw_offset_;
      const SubmitOutcome out = submit(part, *this, now);
      if (out.status == SubmitOutcome::Status::violation) {
        violation_address_ = part.address;
        return false;
      }
      if (out.status == SubmitOutcome::Status::queue_full) return true;
      track(out.request_id, io.blocking);
      sw_offset_ += part.size;
      sw_pending_.erase(sw_pending_.begin());
      sw_cost_left_ = sw_issue_cost_ - 1;
      if (sw_cost_left_ == 0 && sw_pending_.empty()) complete_issue(io);
      return true;
    }
    const SubmitOutcome out = submit(io, *this, now);
    if (out.status == SubmitOutcome::Status::violation) {
      violation_address_ = io.address;
      return false;
    }
    if (out.status == SubmitOutcome::Status::queue_full) return true;  // stall, retry next cycle
    track(out.request_id, io.blocking);
    complete_issue(io);
    return true;
  }

  void track(std::uint64_t request, bool blocking) {
    outstanding_.push_back(request);
    if (blocking) blocking_on_.push_back(request);
  }

  void complete_issue(const IoOp& io) {
    sw_started_ = false;
    if (io.blocking && !blocking_on_.empty()) {
      phase_ = KernelPhase::io_wait;
    } else {
      ++pc_;
    }
  }

  AdvanceResult finish(Cycle now, AdvanceResult how) {
    phase_ = how == AdvanceResult::done ? KernelPhase::done : KernelPhase::terminated;
    end_cycle_ = now + 1;
    return how;
  }

  std::uint64_t id_;
  std::uint32_t ectx_;
  FmqId fmq_;
  PuId pu_;
  std::uint32_t cluster_;
  PacketDescriptor packet_;
  Cycle dispatch_cycle_;
  Cycle copy_left_;
  Cycle cycle_limit_;
  KernelPhase phase_ = KernelPhase::copy_in;
  std::vector<Op> program_;
  std::size_t pc_ = 0;
  Cycle consumed_ = 0;
  Cycle end_cycle_ = 0;
  std::vector<std::uint64_t> outstanding_;
  std::vector<std::uint64_t> blocking_on_;
  std::optional<std::uint64_t> violation_address_;

  Bytes sw_frag_size_ = 0;
  Cycle sw_issue_cost_ = 1;
  Cycle sw_cost_left_ = 0;
  bool sw_started_ = false;
  std::vector<Bytes> sw_pending_;
  Bytes sw_offset_ = 0;
};

// L2 -> L1 packet copy, overlapped with the scheduling decision.
inline Cycle copy_in_cycles(const SimConfig& cfg, Bytes total_size, Cycle local_latency) {
  const Cycle copy = ceil_div(total_size, cfg.interconnect_width()) + local_latency;
  return std::max(cfg.sched_decision_latency, copy);
}

// Single-tenant, uncontended per-packet service time in cycles with mean
// latencies. Used for budget feasibility tables.
inline double nominal_service_cycles(const KernelModel& k, Bytes total_size, const SimConfig& cfg) {
  const double local = 0.5 * static_cast<double>(cfg.local_dma_latency.lo + cfg.local_dma_latency.hi);
  const double host = 0.5 * static_cast<double>(cfg.ns_to_cycles(cfg.host_dma_latency.lo) +
                                                cfg.ns_to_cycles(cfg.host_dma_latency.hi));
  const Bytes payload = total_size - std::min(total_size, kHeaderSize);
  double t = std::max(static_cast<double>(cfg.sched_decision_latency),
                      static_cast<double>(ceil_div(total_size, cfg.interconnect_width())) + local);
  t += static_cast<double>(std::max<Cycle>(1, k.compute_cycles(payload)));
  ByteBudget dma(cfg.interconnect_bandwidth, cfg.clock_freq);
  ByteBudget egress(cfg.egress_bandwidth, cfg.clock_freq);
  for (const IoStep& s : k.io_program) {
    const Bytes size = std::max<Bytes>(1, s.resolved_size(total_size));
    t += 1.0;  // issue
    if (is_egress(s.kind)) {
      t += local + static_cast<double>(egress.cycles_for(size));
    } else {
      t += (is_host(s.kind) ? host : local) + static_cast<double>(dma.cycles_for(size));
    }
  }
  return t;
}

// Compute part only (PU cycles spent computing, no IO waits).
inline Cycle compute_only_cycles(const KernelModel& k, Bytes total_size) {
  const Bytes payload = total_size - std::min(total_size, kHeaderSize);
  return std::max<Cycle>(1, k.compute_cycles(payload));
}

}  // namespace osmosim
