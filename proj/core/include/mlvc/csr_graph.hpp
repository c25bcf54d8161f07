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

#ifndef MLVC_CSR_GRAPH_HPP_
#define MLVC_CSR_GRAPH_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mlvc/edge_list.hpp"
#include "mlvc/pager.hpp"
#include "mlvc/structural.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Graph-wide layout: vertex intervals and the parameters used to size them.
struct GraphMeta {
  std::uint64_t num_vertices = 0;
  std::uint64_t num_edges = 0;
  /// First vertex of each interval, then num_vertices.
  std::vector<VertexId> interval_bounds{0};
  /// Sum of in-degrees per interval (the worst-case inbox size).
  std::vector<std::uint64_t> interval_in_degree;
  /// Out-edges stored per interval.
  std::vector<std::uint64_t> interval_edges;
  std::size_t page_size = kDefaultPageSize;
  /// Bytes per edge value: 0 (none) or 4 (float32).
  std::size_t value_width = 0;
  std::size_t record_size = 16;
  std::uint64_t sort_budget = 0;
  std::uint64_t dataset_hash = 0;

  std::size_t num_intervals() const noexcept {
    return interval_bounds.size() - 1;
  }
  VertexId interval_begin(IntervalId k) const { return interval_bounds[k]; }
  VertexId interval_end(IntervalId k) const { return interval_bounds[k + 1]; }
  std::size_t interval_size(IntervalId k) const {
    return interval_end(k) - interval_begin(k);
  }

  /// Binary search over interval_bounds; a bound belongs to the interval it
  /// starts.
  IntervalId interval_of(VertexId v) const;

  void save(const std::filesystem::path& path) const;
  static GraphMeta load(const std::filesystem::path& path);
};

/// Greedy left-to-right packing of contiguous vertices so that each
/// interval's worst-case inbox, sum(max(in_degree,1)) * record_size, fits in
/// `sort_memory_budget`. Throws OversizedVertexError naming the first vertex
/// that cannot fit on its own.
GraphMeta partition_vertices(std::span<const std::uint64_t> in_degrees,
                             std::size_t update_record_size,
                             std::uint64_t sort_memory_budget);

struct AdjacencyView {
  VertexId vertex = kInvalidVertex;
  std::vector<VertexId> out_neighbors;
  std::vector<float> edge_values;
  /// Index of the vertex's first edge in its partition's colIdx vector.
  EdgeOffset csr_begin = 0;

  bool operator==(const AdjacencyView&) const = default;
};

/// One interval's slice of the graph in CSR form, as three raw page files:
/// rowPtr (u64 local offsets, size+1 entries), colIdx (u32 global ids) and
/// val (value_width bytes per edge; empty file when width is 0).
class CsrPartition {
 public:
  struct Vectors {
    std::vector<std::uint64_t> row_ptr;
    std::vector<VertexId> col_idx;
    std::vector<float> values;

    bool operator==(const Vectors&) const = default;
  };

  static std::string stem_for(IntervalId k) { return "part" + std::to_string(k); }

  static CsrPartition create(const std::filesystem::path& dir,
                             const std::string& stem, IntervalId interval,
                             VertexId first_vertex, const Vectors& vectors,
                             std::size_t page_size, std::size_t value_width,
                             IoCounters* counters = nullptr);

  static CsrPartition open(const std::filesystem::path& dir,
                           const std::string& stem, IntervalId interval,
                           VertexId first_vertex, VertexId vertex_count,
                           std::uint64_t edge_count, std::size_t page_size,
                           std::size_t value_width,
                           IoCounters* counters = nullptr);

  IntervalId interval() const noexcept { return interval_; }
  VertexId first_vertex() const noexcept { return first_; }
  VertexId vertex_count() const noexcept { return count_; }
  std::uint64_t edge_count() const noexcept { return edges_; }
  std::size_t value_width() const noexcept { return value_width_; }
  std::size_t page_size() const noexcept { return rowptr_->page_size(); }
  const std::filesystem::path& dir() const noexcept { return dir_; }
  const std::string& stem() const noexcept { return stem_; }

  /// Adjacency of exactly the `active` vertices (strictly ascending, inside
  /// this interval). Reads only pages overlapping their rowPtr entries and
  /// colIdx/val ranges, each page at most once per call.
  std::vector<AdjacencyView> load_adjacency(std::span<const VertexId> active) const;

  /// Full scan of all three vectors (counted reads).
  Vectors read_all() const;

  PageStore& rowptr_store() const noexcept { return *rowptr_; }
  PageStore& colidx_store() const noexcept { return *colidx_; }
  PageStore& val_store() const noexcept { return *val_; }
  std::uint64_t total_pages() const noexcept;
  void reset_counters() const noexcept;
  std::uint64_t pages_read() const noexcept;

 private:
  CsrPartition() = default;

  std::filesystem::path dir_;
  std::string stem_;
  IntervalId interval_ = 0;
  VertexId first_ = 0;
  VertexId count_ = 0;
  std::uint64_t edges_ = 0;
  std::size_t value_width_ = 0;
  std::unique_ptr<PageStore> rowptr_;
  std::unique_ptr<PageStore> colidx_;
  std::unique_ptr<PageStore> val_;
};

/// Builds CSR vectors for every interval from an edge list. Neighbors are
/// ascending by destination; duplicates are kept. Throws IngestError on an
/// out-of-range id.
std::vector<CsrPartition::Vectors> build_partition_vectors(
    const EdgeList& edges, const GraphMeta& meta);

/// Writes `part<k>.*` files for every interval into `dir` and fills the
/// per-interval edge counts in `meta`.
std::vector<CsrPartition> build_partitions(const EdgeList& edges,
                                           GraphMeta& meta,
                                           const std::filesystem::path& dir,
                                           IoCounters* counters = nullptr);

struct MergeResult {
  OpApplyResult applied;
  CsrPartition::Vectors vectors;
};

/// Applies batched ops (keyed by source vertex) to a partition's vectors.
/// Missing deletions are counted, not errors; an insertion whose
/// destination is outside [0, num_vertices) throws AddressingError.
MergeResult merge_structural_vectors(
    const CsrPartition::Vectors& base, VertexId first_vertex,
    const std::map<VertexId, std::vector<StructuralOp>>& ops,
    std::uint64_t num_vertices, bool has_values);

/// Rewrites a partition with the batched ops into new files `dir/stem.*`.
CsrPartition merge_structural_updates(
    const CsrPartition& partition,
    const std::map<VertexId, std::vector<StructuralOp>>& ops,
    std::uint64_t num_vertices, const std::filesystem::path& dir,
    const std::string& stem, OpApplyResult* applied = nullptr,
    IoCounters* counters = nullptr);

/// A converted graph directory: meta.json plus per-interval partitions.
class CsrGraph {
 public:
  static CsrGraph open(const std::filesystem::path& dir,
                       IoCounters* counters = nullptr);

  /// Partitions, relabels and writes `edges` into `dir`.
  static CsrGraph create(const std::filesystem::path& dir,
                         const EdgeList& edges, std::size_t page_size,
                         std::size_t update_record_size,
                         std::uint64_t sort_budget,
                         std::uint64_t dataset_hash = 0,
                         IoCounters* counters = nullptr);

  const GraphMeta& meta() const noexcept { return meta_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }
  CsrPartition& partition(IntervalId k) { return parts_.at(k); }
  const CsrPartition& partition(IntervalId k) const { return parts_.at(k); }
  std::size_t num_intervals() const noexcept { return parts_.size(); }
  void replace_partition(IntervalId k, CsrPartition p);

  std::uint64_t total_pages() const;

 private:
  std::filesystem::path dir_;
  GraphMeta meta_;
  std::vector<CsrPartition> parts_;
};

}  // namespace mlvc

#endif  // MLVC_CSR_GRAPH_HPP_
