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

#ifndef MLVC_EDGELOG_HPP_
#define MLVC_EDGELOG_HPP_

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/paged_array.hpp"
#include "mlvc/pager.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Active-vertex bit vectors of the last `depth` completed supersteps.
class ActivityHistory {
 public:
  explicit ActivityHistory(std::size_t num_vertices = 0, std::size_t depth = 1);

  void record(Bitset active);

  /// True iff `v` was active in any recorded superstep. With nothing
  /// recorded yet (superstep 0) nothing is predicted.
  bool predict_active(VertexId v) const;
  /// Union of the recorded vectors: the predicted set for the next superstep.
  Bitset predicted() const;

  std::size_t depth() const noexcept { return depth_; }
  std::size_t recorded() const noexcept { return ring_.size(); }
  std::size_t num_vertices() const noexcept { return n_; }

 private:
  std::size_t n_;
  std::size_t depth_;
  std::deque<Bitset> ring_;
};

inline constexpr double kDefaultInefficiencyThreshold = 0.10;

struct PageUsage {
  std::uint64_t bytes_useful = 0;
  std::uint64_t bytes_total = 0;
};

/// A page is inefficiently used when some but less than `threshold` of it
/// served processed vertices. Untouched pages are not inefficient.
bool classify_inefficient(const PageUsage& usage, double threshold);

/// Useful bytes per colIdx page, for the current superstep.
class PageUsageStats {
 public:
  explicit PageUsageStats(std::size_t page_size = kDefaultPageSize)
      : page_size_(page_size) {}

  /// Credits [byte_begin, byte_begin+len) of interval `k`'s colIdx file.
  void add_range(IntervalId k, std::uint64_t byte_begin, std::uint64_t len);

  PageUsage usage(IntervalId k, PageId page) const;
  bool touches_inefficient(IntervalId k, std::uint64_t byte_begin,
                           std::uint64_t len, double threshold) const;

  std::uint64_t accessed_pages() const noexcept { return useful_.size(); }
  std::uint64_t inefficient_pages(double threshold) const;
  void clear() noexcept { useful_.clear(); }

 private:
  std::size_t page_size_;
  std::map<std::pair<IntervalId, PageId>, std::uint64_t> useful_;
};

class EdgeLogReader;

/// Appends adjacency lists of predicted-active vertices into sequential
/// pages. Entry: vertex(4) | degree(4) | csr_begin(8) | neighbors(4*deg) |
/// values(4*deg, when the graph has values). Entries may span pages. Once
/// an entry would overrun `byte_budget`, logging stops for the superstep.
class EdgeLogWriter {
 public:
  EdgeLogWriter(std::filesystem::path path, std::size_t page_size,
                std::uint64_t byte_budget, bool has_values,
                IoCounters* counters = nullptr);

  bool append(const AdjacencyView& adj);
  void invalidate(VertexId v);

  std::uint64_t bytes_logged() const;
  std::uint64_t entries() const;
  std::uint64_t dropped() const;
  bool exhausted() const;

  /// Flushes the partial tail page and hands the log over for reading.
  EdgeLogReader finish();

 private:
  struct Ref {
    std::uint64_t offset;
    std::uint64_t length;
  };
  void put(std::span<const std::byte> bytes);

  mutable std::mutex mu_;
  std::filesystem::path path_;
  std::size_t page_size_;
  std::uint64_t budget_;
  bool has_values_;
  IoCounters* counters_;
  std::unique_ptr<PageStore> store_;
  Page tail_;
  std::size_t tail_fill_ = 0;
  std::uint64_t bytes_ = 0;
  std::uint64_t dropped_ = 0;
  bool exhausted_ = false;
  std::unordered_map<VertexId, Ref> index_;

  friend class EdgeLogReader;
};

/// Serves adjacency from a finished edge log. Fetches are thread-safe.
class EdgeLogReader {
 public:
  EdgeLogReader() = default;
  EdgeLogReader(EdgeLogReader&&) noexcept;
  EdgeLogReader& operator=(EdgeLogReader&&) noexcept;
  ~EdgeLogReader();

  bool contains(VertexId v) const;
  std::size_t size() const;
  void invalidate(VertexId v);
  void invalidate_range(VertexId begin, VertexId end);

  /// Reads `v`'s entry; nullopt if not logged. Throws CorruptionError when
  /// the stored entry does not belong to `v`.
  std::optional<AdjacencyView> fetch(VertexId v);

  /// Drops cached pages (each page is read at most once per residency).
  void release_pages();
  std::uint64_t pages_read() const noexcept;
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Deletes the backing file.
  void discard();

 private:
  friend class EdgeLogWriter;
  struct Ref {
    std::uint64_t offset;
    std::uint64_t length;
  };

  std::unique_ptr<std::mutex> mu_ = std::make_unique<std::mutex>();
  std::filesystem::path path_;
  bool has_values_ = false;
  std::unique_ptr<PageStore> store_;
  std::unique_ptr<PagedBytes> window_;
  std::unordered_map<VertexId, Ref> index_;
};

/// Logs `adj` when its vertex is predicted active and any of its colIdx
/// pages was inefficiently used this superstep. Returns whether it logged.
bool maybe_log_edges(const AdjacencyView& adj, IntervalId interval,
                     const ActivityHistory& history,
                     const PageUsageStats& usage, double threshold,
                     EdgeLogWriter& writer);

/// Adjacency for `active` (ascending, all in `csr`'s interval): entries in
/// `reader` are served from the edge log, the rest from CSR pages. Results
/// are in `active` order and identical either way.
std::vector<AdjacencyView> fetch_adjacency(std::span<const VertexId> active,
                                           EdgeLogReader* reader,
                                           const CsrPartition& csr,
                                           std::uint64_t* served_from_log = nullptr);

}  // namespace mlvc

#endif  // MLVC_EDGELOG_HPP_
