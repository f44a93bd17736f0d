#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "common.hpp"
#include "config.hpp"
#include "flows.hpp"

namespace osmosim {

// Upper bound on the PUs one FMQ may hold concurrently:
//   ceil(scale * prio / sum of prios of FMQs with queued descriptors)
// where scale is the PU count under the default PuLimitScale. FMQs that only
// have kernels running do not enter the sum.
inline std::uint32_t pu_limit(std::span<const Fmq> fmqs, const Fmq& fmq, std::uint32_t n_pus,
                              PuLimitScale scale_kind = PuLimitScale::pu_count) {
  std::uint64_t prio_sum = 0;
  std::uint64_t queued = 0;
  for (const Fmq& q : fmqs) {
    if (!q.empty()) {
      prio_sum += q.prio;
      ++queued;
    }
  }
  if (fmq.empty()) {  // evaluate as if it just received a descriptor
    prio_sum += fmq.prio;
    ++queued;
  }
  std::uint64_t scale = n_pus;
  if (scale_kind == PuLimitScale::fmq_count) scale = fmqs.size();
  if (scale_kind == PuLimitScale::active_fmq_count) scale = queued;
  return static_cast<std::uint32_t>(ceil_div(scale * fmq.prio, prio_sum));
}

// Per-cycle BVT accounting. Inactive FMQs are frozen.
inline void update_tput(std::span<Fmq> fmqs) {
  for (Fmq& q : fmqs) {
    q.total_pu_occup += q.cur_pu_occup;
    if (q.active()) ++q.bvt;
  }
}

// Index of the non-empty FMQ under its PU limit with the lowest
// priority-normalized throughput; lowest index wins ties.
inline std::optional<FmqId> select_fmq(std::span<const Fmq> fmqs, std::uint32_t n_pus,
                                       PuLimitScale scale = PuLimitScale::pu_count) {
  std::optional<FmqId> best;
  for (std::size_t i = 0; i < fmqs.size(); ++i) {
    const Fmq& q = fmqs[i];
    if (q.empty()) continue;
    if (q.cur_pu_occup >= pu_limit(fmqs, q, n_pus, scale)) continue;
    if (!best || normalized_tput_less(q, fmqs[*best])) best = static_cast<FmqId>(i);
  }
  return best;
}

// Next non-empty FMQ at or after `cursor` in cyclic order; advances the cursor
// past the grant.
inline std::optional<FmqId> select_fmq_rr(std::span<const Fmq> fmqs, std::size_t& cursor) {
  const std::size_t n = fmqs.size();
  if (n == 0) return std::nullopt;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = (cursor + k) % n;
    if (!fmqs[i].empty()) {
      cursor = (i + 1) % n;
      return static_cast<FmqId>(i);
    }
  }
  return std::nullopt;
}

class PuScheduler {
 public:
  PuScheduler(PuSchedulerKind policy, std::uint32_t n_pus, PuLimitScale scale = PuLimitScale::pu_count)
      : policy_(policy), n_pus_(n_pus), scale_(scale) {}

  std::optional<FmqId> select(std::span<const Fmq> fmqs) {
    if (policy_ == PuSchedulerKind::rr) return select_fmq_rr(fmqs, rr_cursor_);
    return select_fmq(fmqs, n_pus_, scale_);
  }

  // Selects an FMQ for a free PU, pops its head descriptor and charges the
  // occupancy. nullopt when no FMQ qualifies.
  std::optional<std::pair<FmqId, PacketDescriptor>> dispatch(std::span<Fmq> fmqs) {
    auto id = select(fmqs);
    if (!id) return std::nullopt;
    Fmq& q = fmqs[*id];
    PacketDescriptor d = q.fifo.front();
    q.fifo.pop_front();
    ++q.cur_pu_occup;
    return std::make_pair(*id, d);
  }

  // Called when a PU is still idle after dispatch. With the PU-count scale the
  // limits of the queued FMQs sum to at least n_pus, so no FIFO may hold
  // descriptors; other scales only promise that every queued FMQ is at its limit.
  bool work_conserving(std::span<const Fmq> fmqs) const {
    for (const Fmq& q : fmqs) {
      if (q.empty()) continue;
      if (policy_ == PuSchedulerKind::rr || scale_ == PuLimitScale::pu_count) return false;
      if (q.cur_pu_occup < pu_limit(fmqs, q, n_pus_, scale_)) return false;
    }
    return true;
  }

  PuSchedulerKind policy() const { return policy_; }
  std::size_t rr_cursor() const { return rr_cursor_; }
  std::uint32_t n_pus() const { return n_pus_; }

 private:
  PuSchedulerKind policy_;
  std::uint32_t n_pus_;
  PuLimitScale scale_;
  std::size_t rr_cursor_ = 0;
};

}  // namespace osmosim
