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

#ifndef MLVC_SORTGROUP_HPP_
#define MLVC_SORTGROUP_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mlvc/multilog.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Flat array of fixed-width update records, plus the page runs they were
/// loaded from (used by the presorted merge path).
class RecordBuffer {
 public:
  struct Run {
    std::size_t begin = 0;
    std::size_t count = 0;
    bool presorted = false;
  };

  explicit RecordBuffer(std::size_t record_width = kRecordHeaderSize)
      : width_(record_width) {}

  std::size_t width() const noexcept { return width_; }
  std::size_t payload_width() const noexcept { return width_ - kRecordHeaderSize; }
  std::size_t size() const noexcept { return bytes_.size() / width_; }
  bool empty() const noexcept { return bytes_.empty(); }
  std::size_t byte_size() const noexcept { return bytes_.size(); }

  VertexId dest(std::size_t i) const noexcept {
    return load_as<VertexId>(bytes_, i * width_);
  }
  VertexId src(std::size_t i) const noexcept {
    return load_as<VertexId>(bytes_, i * width_ + sizeof(VertexId));
  }
  std::span<const std::byte> record(std::size_t i) const noexcept {
    return std::span(bytes_).subspan(i * width_, width_);
  }
  std::span<const std::byte> payload(std::size_t i) const noexcept {
    return record(i).subspan(kRecordHeaderSize);
  }
  std::span<std::byte> mutable_payload(std::size_t i) noexcept {
    return std::span(bytes_).subspan(i * width_ + kRecordHeaderSize,
                                     width_ - kRecordHeaderSize);
  }

  void append(VertexId dest, VertexId src, std::span<const std::byte> payload);
  void append_record(std::span<const std::byte> record);
  /// Appends a page's records as one run.
  void append_run(std::span<const std::byte> records, std::size_t count,
                  bool presorted);
  void reserve(std::size_t records) { bytes_.reserve(records * width_); }

  const std::vector<Run>& runs() const noexcept { return runs_; }
  void clear_runs() noexcept { runs_.clear(); }
  std::span<const std::byte> bytes() const noexcept { return bytes_; }

 private:
  std::size_t width_;
  std::vector<std::byte> bytes_;
  std::vector<Run> runs_;
};

/// Contiguous range of records bound for one destination.
struct Group {
  VertexId dest = 0;
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  bool operator==(const Group&) const = default;
};

/// Records ordered by (dest, arrival), with one group per distinct dest.
struct SortedLog {
  RecordBuffer records;
  std::vector<Group> groups;

  const Group* find(VertexId dest) const;
};

/// Contiguous, ascending intervals whose logs are loaded and sorted together.
struct FusePlan {
  std::vector<IntervalId> intervals;
  std::uint64_t estimated_bytes = 0;
  /// More than one when a single interval's log exceeds the sort budget and
  /// has to be processed in destination-bucketed passes.
  std::uint32_t passes = 1;

  bool operator==(const FusePlan&) const = default;
};

/// Greedy left-to-right fusion on per-interval message counts. Leading
/// empty intervals never start a plan and trailing empty intervals are
/// dropped, so empty logs are never loaded.
std::vector<FusePlan> plan_fusion(std::span<const std::uint64_t> counts,
                                  std::size_t record_width,
                                  std::uint64_t sort_budget);

/// Half-open destination range.
struct DestRange {
  VertexId begin = 0;
  VertexId end = 0;

  bool contains(VertexId v) const noexcept { return v >= begin && v < end; }
  bool operator==(const DestRange&) const = default;
};

/// Reads every chain page of each planned interval exactly once and returns
/// the concatenated records. With `filter`, records outside it are skipped
/// after reading. `sealed` is indexed by interval id.
RecordBuffer load_log(const FusePlan& plan, std::span<const SealedLog> sealed,
                      std::size_t page_size, std::size_t record_width,
                      IoCounters* counters = nullptr,
                      const DestRange* filter = nullptr);

/// One counting pass over a sealed log, then greedy packing of destination
/// ranges so each bucket's records fit `sort_budget`. Throws ConfigError if
/// one vertex alone overflows the budget.
std::vector<DestRange> plan_dest_buckets(const SealedLog& log,
                                         DestRange interval_range,
                                         std::size_t page_size,
                                         std::size_t record_width,
                                         std::uint64_t sort_budget,
                                         IoCounters* counters = nullptr);

/// Stable sort by destination and grouping. When every run came from a
/// presorted page, the runs are k-way merged instead; the result is
/// identical. Throws CorruptionError for a dest outside `range`.
SortedLog sort_n_group(RecordBuffer records, DestRange range);

std::vector<VertexId> extract_active(const SortedLog& sorted);

/// Folds `in` into `acc` (payload bytes only). Must be associative and
/// commutative.
using CombineFn =
    std::function<void(std::span<std::byte> acc, std::span<const std::byte> in)>;

/// Left fold per destination in stored order. The emitted record's src is
/// the smallest contributing src.
SortedLog apply_combine(const SortedLog& sorted, const CombineFn& combine);

}  // namespace mlvc

#endif  // MLVC_SORTGROUP_HPP_
