#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flows.hpp"
#include "matching.hpp"

namespace osmosim {

// Static first-fit allocator over the L2 kernel buffer. Freed holes are reused
// but never compacted.
class SegmentAllocator {
 public:
  explicit SegmentAllocator(Bytes capacity = 0) : capacity_(capacity) {}

  std::optional<AddressRange> allocate(Bytes length) {
    if (length == 0) length = 1;
    std::uint64_t cursor = 0;
    for (const AddressRange& s : used_) {
      if (s.base - cursor >= length) return take({cursor, length});
      cursor = s.base + s.length;
    }
    if (capacity_ >= cursor && capacity_ - cursor >= length) return take({cursor, length});
    return std::nullopt;
  }

  void release(const AddressRange& seg) {
    std::erase_if(used_, [&](const AddressRange& s) { return s == seg; });
  }

  Bytes allocated() const {
    Bytes sum = 0;
    for (const auto& s : used_) sum += s.length;
    return sum;
  }
  Bytes capacity() const { return capacity_; }
  const std::vector<AddressRange>& segments() const { return used_; }

 private:
  AddressRange take(AddressRange seg) {
    auto it = std::lower_bound(used_.begin(), used_.end(), seg,
                               [](const AddressRange& a, const AddressRange& b) { return a.base < b.base; });
    used_.insert(it, seg);
    return seg;
  }

  Bytes capacity_;
  std::vector<AddressRange> used_;  // sorted by base
};

// Host-side control plane: ECTX registry, FMQs, match table, L2 segments.
class ControlPlane {
 public:
  explicit ControlPlane(Bytes l2_kernel_buffer) : allocator_(l2_kernel_buffer) {}

  std::uint32_t create_ectx(const MatchRule& rule, const SloPolicy& slo, const KernelModel& kernel,
                            Bytes requested_memory, std::string name = {}) {
    slo.validate();
    if (table_.conflicts(rule)) throw RuleConflict("match rule of '" + name + "' overlaps an active ECTX");
    if (requested_memory > slo.memory_quota)
      throw AllocationError("requested memory exceeds the SLO memory quota");
    if (kernel.kernel_binary_size > slo.memory_quota)
      throw AllocationError("kernel binary exceeds the SLO memory quota");
    const Bytes length = requested_memory + kernel.kernel_binary_size;
    auto seg = allocator_.allocate(length);
    if (!seg)
      throw AllocationError("L2 kernel buffer exhausted: requested " + std::to_string(length) +
                            " B, " + std::to_string(allocator_.capacity() - allocator_.allocated()) +
                            " B free");

    const auto id = static_cast<std::uint32_t>(ectxs_.size());
    Ectx e;
    e.id = id;
    e.name = name.empty() ? "ectx" + std::to_string(id) : std::move(name);
    e.rule = rule;
    e.slo = slo;
    e.kernel = kernel;
    e.l2_segment = *seg;
    e.fmq_id = id;
    ectxs_.push_back(std::move(e));

    Fmq q;
    q.id = id;
    q.capacity = slo.fmq_fifo_capacity;
    q.prio = slo.compute_priority;
    fmqs_.push_back(std::move(q));

    table_.insert(rule, id);
    return id;
  }

  void destroy_ectx(std::uint32_t id) {
    Ectx& e = ectxs_.at(id);
    allocator_.release(e.l2_segment);
    table_.erase(e.fmq_id);
    e.l2_segment = {};
  }

  std::vector<Ectx>& ectxs() { return ectxs_; }
  const std::vector<Ectx>& ectxs() const { return ectxs_; }
  std::vector<Fmq>& fmqs() { return fmqs_; }
  const std::vector<Fmq>& fmqs() const { return fmqs_; }
  MatchTable& table() { return table_; }
  const SegmentAllocator& allocator() const { return allocator_; }

 private:
  SegmentAllocator allocator_;
  MatchTable table_;
  std::vector<Ectx> ectxs_;
  std::vector<Fmq> fmqs_;
};

}  // namespace osmosim
