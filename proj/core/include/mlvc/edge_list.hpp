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

#ifndef MLVC_EDGE_LIST_HPP_
#define MLVC_EDGE_LIST_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <vector>

#include "mlvc/types.hpp"

namespace mlvc {

struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  float value = 0.0f;

  bool operator==(const Edge&) const = default;
};

/// Edge list over dense ids [0, num_vertices).
struct EdgeList {
  VertexId num_vertices = 0;
  std::vector<Edge> edges;
  bool has_values = false;

  /// Adds the reverse of every edge that is not a self loop.
  void symmetrize();
  std::vector<std::uint64_t> in_degrees() const;
  std::vector<std::uint64_t> out_degrees() const;
};

/// Result of ingesting an external (SNAP-style) edge list.
struct ParsedEdgeList {
  EdgeList graph;
  /// original_ids[dense] = id as written in the input.
  std::vector<std::uint64_t> original_ids;
  std::uint64_t content_hash = 0;
};

/// Parses whitespace-separated `src dst [weight]` lines; `#` and `%` start
/// comment lines. Ids are relabeled densely in ascending original order.
ParsedEdgeList parse_edge_list(std::istream& in, bool undirected = false);
ParsedEdgeList read_edge_list_file(const std::filesystem::path& path,
                                   bool undirected = false);

}  // namespace mlvc

#endif  // MLVC_EDGE_LIST_HPP_
