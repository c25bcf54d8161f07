/** Copyright 2026 The mlvc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MLVC_MULTILOG_HPP_
#define MLVC_MULTILOG_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/pager.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Serialized as dest(4) | src(4) | payload(payload_width).
struct UpdateMessage {
  VertexId dest = 0;
  VertexId src = 0;
  std::span<const std::byte> payload;
};

inline constexpr std::size_t kRecordHeaderSize = 2 * sizeof(VertexId);

constexpr std::size_t record_width_for(std::size_t payload_width) noexcept {
  return kRecordHeaderSize + payload_width;
}

inline IntervalId vid_to_interval(const GraphMeta& meta, VertexId v) {
  return meta.interval_of(v);
}

/// Stable in-page sort of a record page by destination; sets the presorted
/// header bit.
void presort_page(Page& page, std::size_t record_width);

/// A frozen interval log handed from the writer to the sort-and-group unit.
/// `superstep` is the superstep that consumes these messages.
struct SealedLog {
  IntervalId interval = 0;
  std::uint64_t superstep = 0;
  std::filesystem::path file;
  std::vector<PageId> pages;
  std::uint64_t message_count = 0;

  bool operator==(const SealedLog&) const = default;
};

void write_manifest(const std::filesystem::path& path,
                    std::span<const SealedLog> logs);
std::vector<SealedLog> read_manifest(const std::filesystem::path& path);

/// Removes a consumed log's file (no-op when nothing was flushed).
void discard_log(const SealedLog& log);

struct MultiLogConfig {
  std::filesystem::path dir;
  std::size_t page_size = kDefaultPageSize;
  std::size_t payload_width = 8;
  /// Bytes of resident top pages allowed across all intervals.
  std::uint64_t buffer_budget = 0;
  /// Eviction stops once residency is at or below this fraction of budget.
  double low_watermark = 0.9;
  bool presort = false;
};

/// Per-interval append logs with one resident top page each. A record that
/// does not fit its interval's top page flushes that page to the interval's
/// log file and starts a fresh one. Tops are allocated on demand; when a new
/// top would not fit the budget, the fullest tops are evicted first.
///
/// send_update is safe to call concurrently; appends to one interval are
/// serialized. seal_superstep requires quiescence.
class MultiLog {
 public:
  MultiLog(std::vector<VertexId> interval_bounds, MultiLogConfig config,
           IoCounters* counters = nullptr);
  ~MultiLog();

  MultiLog(const MultiLog&) = delete;
  MultiLog& operator=(const MultiLog&) = delete;

  std::size_t num_intervals() const noexcept { return logs_.size(); }
  std::size_t record_width() const noexcept { return record_width_; }
  std::size_t records_per_page() const noexcept { return per_page_; }
  const MultiLogConfig& config() const noexcept { return config_; }

  IntervalId interval_of(VertexId v) const;

  void send_update(const UpdateMessage& msg);

  /// When no page of budget is free, flushes the fullest tops until
  /// residency is at or below the low watermark. Returns pages evicted.
  std::uint64_t evict_if_needed();

  /// Flushes the (possibly partial) top, freezes the chain and opens the
  /// log for `superstep + 1`. Throws ContractViolation if the interval's
  /// open log is not for `superstep` (e.g. sealed twice).
  SealedLog seal_superstep(IntervalId k, std::uint64_t superstep);

  std::uint64_t open_superstep(IntervalId k) const;
  std::uint64_t message_count(IntervalId k) const;
  std::vector<PageId> chain(IntervalId k) const;
  std::uint32_t top_fill(IntervalId k) const;

  std::uint64_t resident_bytes() const noexcept {
    return resident_pages_.load() * config_.page_size;
  }
  std::uint64_t peak_resident_bytes() const noexcept {
    return peak_pages_.load() * config_.page_size;
  }
  void reset_peak() noexcept { peak_pages_.store(resident_pages_.load()); }
  std::uint64_t pages_evicted() const noexcept { return evicted_.load(); }

 private:
  struct IntervalLog;

  std::filesystem::path file_for(IntervalId k, std::uint64_t superstep) const;
  void flush_top_locked(IntervalId k, IntervalLog& log);
  void reserve_page();
  std::uint64_t evict_locked();

  std::vector<VertexId> bounds_;
  MultiLogConfig config_;
  IoCounters* counters_;
  std::size_t record_width_;
  std::size_t per_page_;
  std::uint64_t budget_pages_;
  std::vector<std::unique_ptr<IntervalLog>> logs_;
  std::mutex evict_mu_;
  std::atomic<std::uint64_t> resident_pages_{0};
  std::atomic<std::uint64_t> peak_pages_{0};
  std::atomic<std::uint64_t> evicted_{0};
};

}  // namespace mlvc

#endif  // MLVC_MULTILOG_HPP_
