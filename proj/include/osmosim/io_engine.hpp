#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"
#include "config.hpp"
#include "kernel_model.hpp"
#include "rng.hpp"

namespace osmosim {

// Splits a transfer into frag_size chunks with a short tail; frag_size 0
// leaves it whole.
inline std::vector<Bytes> fragment(Bytes total_len, Bytes frag_size) {
  if (total_len == 0) return {};
  if (frag_size == 0 || total_len <= frag_size) return {total_len};
  std::vector<Bytes> out(total_len / frag_size, frag_size);
  if (total_len % frag_size != 0) out.push_back(total_len % frag_size);
  return out;
}

struct IoRequest {
  std::uint64_t id = 0;
  std::uint32_t ectx = 0;
  IoKind kind = IoKind::dma_write_host;
  Bytes total_len = 0;
  Bytes remaining_len = 0;  // not yet moved over the bus
  Priority priority = 1;
  std::uint32_t cluster = 0;
  bool blocking = true;
  bool event_message = false;  // EQ traffic, served ahead of everything else
  bool split = false;           // part of a fragmented transfer; pays the per-fragment overhead
  std::deque<Bytes> fragments;  // grant units not yet started
  Cycle submit_cycle = 0;
  Cycle ready_cycle = 0;  // latency elapsed, first byte may move
  std::optional<std::uint64_t> target;  // kernel instance waiting on it
};

struct IoCompletion {
  std::uint64_t request_id = 0;
  std::uint32_t ectx = 0;
  IoKind kind = IoKind::dma_write_host;
  Bytes bytes = 0;
  Cycle submit_cycle = 0;
  Cycle done_cycle = 0;  // first cycle after the last byte moved
  bool event_message = false;
  std::optional<std::uint64_t> target;
};

// Deficit-weighted round robin over per-input FIFOs of grant units. The
// arbiter only sees unit lengths; readiness is decided by the caller.
class DwrrArbiter {
 public:
  explicit DwrrArbiter(Bytes quantum = 512) : quantum_(quantum) {}

  std::size_t add_input(std::uint32_t weight) {
    inputs_.push_back(Input{std::max<std::uint32_t>(1, weight), 0, false});
    return inputs_.size() - 1;
  }

  void set_weight(std::size_t input, std::uint32_t weight) {
    inputs_.at(input).weight = std::max<std::uint32_t>(1, weight);
  }

  // head_len(i) returns the length of input i's eligible head unit, or 0 if
  // the input has nothing eligible this cycle. backlogged(i) tells whether the
  // input holds anything at all (eligible or not).
  template <typename HeadLen, typename Backlogged>
  std::optional<std::size_t> pick(HeadLen&& head_len, Backlogged&& backlogged) {
    const std::size_t n = inputs_.size();
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (head_len(i) != 0) {
        any = true;
      } else if (!backlogged(i)) {
        inputs_[i].deficit = 0;
        inputs_[i].topped = false;
      }
    }
    if (!any) return std::nullopt;
    for (;;) {
      Input& in = inputs_[cursor_];
      const Bytes len = head_len(cursor_);
      if (len != 0) {
        if (!in.topped) {
          in.deficit += quantum_ * in.weight;
          in.topped = true;
        }
        if (len <= in.deficit) {
          in.deficit -= len;
          return cursor_;
        }
      }
      in.topped = false;
      cursor_ = (cursor_ + 1) % n;
    }
  }

  // Called after a grant emptied the input.
  void drained(std::size_t input) {
    Input& in = inputs_.at(input);
    in.deficit = 0;
    in.topped = false;
    if (cursor_ == input) cursor_ = (cursor_ + 1) % inputs_.size();
  }

  Bytes deficit(std::size_t input) const { return inputs_.at(input).deficit; }
  std::size_t size() const { return inputs_.size(); }

 private:
  struct Input {
    std::uint32_t weight;
    Bytes deficit;
    bool topped;  // quantum already added in the current visit
  };
  Bytes quantum_;
  std::vector<Input> inputs_;
  std::size_t cursor_ = 0;
};

// One shared transfer path (the DMA interconnect or the egress link). A single
// grant unit holds the bus for ceil(len / bytes_per_cycle) cycles.
class IoEngine {
 public:
  IoEngine(const SimConfig& cfg, std::uint64_t bits_per_second, std::uint32_t n_tenants)
      : arbiter_kind_(cfg.io_arbiter),
        rate_(bits_per_second, cfg.clock_freq),
        frag_size_(cfg.fragmentation_mode == FragmentationMode::hardware ? cfg.fragment_size : 0),
        frag_overhead_(cfg.fragmentation_mode == FragmentationMode::none ? 0 : cfg.frag_overhead_cycles),
        fifo_depth_(cfg.cluster_fifo_depth),
        strict_order_(cfg.io_arbiter == IoArbiterKind::fifo && cfg.fifo_strict_order),
        dwrr_(cfg.dwrr_quantum()),
        cluster_outstanding_(cfg.num_clusters, 0),
        cluster_queues_(cfg.num_clusters) {
    tenant_queues_.resize(n_tenants);
    for (std::uint32_t i = 0; i < n_tenants; ++i) dwrr_.add_input(1);
  }

  void set_tenant_weight(std::uint32_t tenant, Priority w) { dwrr_.set_weight(tenant, w); }

  bool can_submit(std::uint32_t cluster) const {
    return cluster_outstanding_.at(cluster) < fifo_depth_;
  }

  // Enqueues a request. `ready_cycle` already includes the sampled latency.
  void submit(IoRequest req) {
    req.remaining_len = req.total_len;
    req.fragments.clear();
    for (Bytes f : fragment(req.total_len, req.event_message ? 0 : frag_size_)) req.fragments.push_back(f);
    if (req.fragments.size() > 1) req.split = true;
    const std::uint64_t id = req.id;
    if (req.event_message) {
      event_queue_.push_back(id);
    } else {
      ++cluster_outstanding_.at(req.cluster);
      if (arbiter_kind_ == IoArbiterKind::wrr)
        tenant_queues_.at(req.ectx).push_back(id);
      else
        cluster_queues_.at(req.cluster).push_back(id);
    }
    requests_.emplace(id, std::move(req));
  }

  // Advances the bus by one cycle. Completed requests are appended to `done`.
  void step(Cycle now, std::vector<IoCompletion>& done) {
    if (!current_) start_next(now);
    if (!current_) return;
    ++busy_cycles_;
    if (--current_->cycles_left > 0) return;

    IoRequest& r = requests_.at(current_->request);
    r.remaining_len -= current_->len;
    granted_bytes_[r.ectx] += r.event_message ? 0 : current_->len;
    total_granted_ += current_->len;
    const bool finished = r.fragments.empty() && r.remaining_len == 0;
    current_.reset();
    if (finished) {
      done.push_back(IoCompletion{r.id, r.ectx, r.kind, r.total_len, r.submit_cycle, now + 1,
                                  r.event_message, r.target});
      if (!r.event_message) --cluster_outstanding_.at(r.cluster);
      requests_.erase(r.id);
    }
  }

  bool idle() const { return !current_ && requests_.empty(); }
  std::size_t pending() const { return requests_.size(); }
  std::uint64_t busy_cycles() const { return busy_cycles_; }
  Bytes total_granted() const { return total_granted_; }

  // Bytes moved per tenant since the last call.
  std::map<std::uint32_t, Bytes> take_granted() { return std::exchange(granted_bytes_, {}); }

  Cycle unit_cycles(Bytes len, bool split) const {
    return rate_.cycles_for(len) + (split ? frag_overhead_ : 0);
  }

 private:
  struct Grant {
    std::uint64_t request;
    Bytes len;
    Cycle cycles_left;
  };

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Position of the first request in queue order whose next unit may be
  // granted. Requests still waiting on latency are skipped: transfers are
  // outstanding in parallel and only the data phase is serialized.
  std::size_t eligible(const std::deque<std::uint64_t>& q, Cycle now) const {
    const std::size_t n = strict_order_ && &q != &event_queue_ ? std::min<std::size_t>(q.size(), 1) : q.size();
    for (std::size_t i = 0; i < n; ++i) {
      const IoRequest& r = requests_.at(q[i]);
      if (r.ready_cycle <= now && !r.fragments.empty()) return i;
    }
    return npos;
  }

  Bytes head_len(const std::deque<std::uint64_t>& q, Cycle now) const {
    const std::size_t i = eligible(q, now);
    return i == npos ? 0 : requests_.at(q[i]).fragments.front();
  }

  void grant_from(std::deque<std::uint64_t>& q, Cycle now) {
    const std::size_t i = eligible(q, now);
    IoRequest& r = requests_.at(q[i]);
    const Bytes len = r.fragments.front();
    r.fragments.pop_front();
    if (r.fragments.empty()) q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));  // remaining bytes are in flight
    current_ = Grant{r.id, len, unit_cycles(len, r.split)};
  }

  void start_next(Cycle now) {
    if (head_len(event_queue_, now) != 0) {
      grant_from(event_queue_, now);
      return;
    }
    if (arbiter_kind_ == IoArbiterKind::wrr) {
      auto pick = dwrr_.pick([&](std::size_t i) { return head_len(tenant_queues_[i], now); },
                             [&](std::size_t i) { return !tenant_queues_[i].empty(); });
      if (!pick) return;
      grant_from(tenant_queues_[*pick], now);
      if (tenant_queues_[*pick].empty()) dwrr_.drained(*pick);
      return;
    }
    const std::size_t n = cluster_queues_.size();
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = (fifo_cursor_ + k) % n;
      if (head_len(cluster_queues_[i], now) != 0) {
        grant_from(cluster_queues_[i], now);
        // A cluster keeps the bus until the granted request has fully moved.
        const bool unfinished = std::find(cluster_queues_[i].begin(), cluster_queues_[i].end(),
                                          current_->request) != cluster_queues_[i].end();
        fifo_cursor_ = unfinished ? i : (i + 1) % n;
        return;
      }
    }
  }

  IoArbiterKind arbiter_kind_;
  ByteBudget rate_;
  Bytes frag_size_;
  Cycle frag_overhead_;
  std::uint32_t fifo_depth_;
  bool strict_order_;
  DwrrArbiter dwrr_;
  std::vector<std::uint32_t> cluster_outstanding_;
  std::vector<std::deque<std::uint64_t>> cluster_queues_;
  std::vector<std::deque<std::uint64_t>> tenant_queues_;
  std::deque<std::uint64_t> event_queue_;
  std::unordered_map<std::uint64_t, IoRequest> requests_;
  std::optional<Grant> current_;
  std::size_t fifo_cursor_ = 0;
  std::uint64_t busy_cycles_ = 0;
  Bytes total_granted_ = 0;
  std::map<std::uint32_t, Bytes> granted_bytes_;
};

}  // namespace osmosim
