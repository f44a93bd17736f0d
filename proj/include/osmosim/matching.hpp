#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "flows.hpp"

namespace osmosim {

// Ordered (rule, fmq) list. Rules are pairwise non-overlapping, so at most one
// entry matches any packet.
class MatchTable {
 public:
  void insert(const MatchRule& rule, FmqId fmq) {
    for (const auto& [r, id] : entries_)
      if (r.overlaps(rule)) throw RuleConflict("match rule overlaps the rule of FMQ " + std::to_string(id));
    entries_.emplace_back(rule, fmq);
  }

  void erase(FmqId fmq) {
    std::erase_if(entries_, [fmq](const auto& e) { return e.second == fmq; });
  }

  bool conflicts(const MatchRule& rule) const {
    for (const auto& e : entries_)
      if (e.first.overlaps(rule)) return true;
    return false;
  }

  // nullopt = no_match; the packet takes the host path and is counted here.
  std::optional<FmqId> classify(const Packet& pkt) {
    for (const auto& [r, id] : entries_)
      if (r.matches(pkt.tuple)) return id;
    ++unmatched_;
    return std::nullopt;
  }

  std::uint64_t unmatched() const { return unmatched_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<std::pair<MatchRule, FmqId>> entries_;
  std::uint64_t unmatched_ = 0;
};

enum class Admission { admitted, dropped };

// Drop-newest on overflow; the drop also counts as a congestion mark.
inline Admission admit(Fmq& fmq, const PacketDescriptor& d) {
  if (fmq.fifo.size() >= fmq.capacity) {
    ++fmq.drops;
    ++fmq.congestion_marks;
    return Admission::dropped;
  }
  fmq.fifo.push_back(d);
  ++fmq.admitted;
  return Admission::admitted;
}

}  // namespace osmosim
