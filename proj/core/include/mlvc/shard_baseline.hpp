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

#ifndef MLVC_SHARD_BASELINE_HPP_
#define MLVC_SHARD_BASELINE_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/edge_list.hpp"
#include "mlvc/pager.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Shard record: src(4) | dst(4), sorted by (src, dst), packed into raw
/// pages with no header.
inline constexpr std::size_t kShardRecordSize = 8;

/// GraphChi-style in-edge shards, used only to count page traffic.
struct ShardSet {
  /// Destination range bounds: shard s covers [bounds[s], bounds[s+1]).
  std::vector<VertexId> bounds{0};
  std::vector<std::uint64_t> edges;
  std::vector<std::uint64_t> pages;
  /// Distinct sources per shard, ascending.
  std::vector<std::vector<VertexId>> sources;
  std::size_t page_size = kDefaultPageSize;

  std::size_t num_shards() const noexcept { return edges.size(); }
  std::uint64_t total_pages() const;
  std::size_t shard_of(VertexId dst) const;
};

/// Destination ranges balanced by in-edge count: shard s ends at the first
/// vertex where the running in-degree sum reaches (s+1)/num_shards of all
/// edges.
std::vector<VertexId> balance_shards(std::span<const std::uint64_t> in_degrees,
                                     std::size_t num_shards);

/// Writes `dir/shard<k>.bin` and `dir/shards.json`.
ShardSet build_shards(const EdgeList& edges, std::size_t num_shards,
                      const std::filesystem::path& dir,
                      std::size_t page_size = kDefaultPageSize,
                      IoCounters* counters = nullptr);

ShardSet open_shards(const std::filesystem::path& dir);

/// Pages a shard engine reads for one superstep: every page of each shard
/// whose range holds an active vertex or that stores an out-edge of one.
std::uint64_t superstep_page_cost(const ShardSet& shards, const Bitset& active);

/// Every edge of a converted graph, in CSR order.
EdgeList load_edges(const CsrGraph& graph);

}  // namespace mlvc

#endif  // MLVC_SHARD_BASELINE_HPP_
