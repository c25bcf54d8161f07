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

#ifndef MLVC_STRUCTURAL_HPP_
#define MLVC_STRUCTURAL_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "mlvc/types.hpp"

namespace mlvc {

enum class StructuralOpKind : std::uint8_t {
  kAddEdge,
  kDeleteEdge,
  kDeleteVertex,
};

/// A graph mutation issued by a vertex program. `src` is the vertex whose
/// out-adjacency changes; for kDeleteVertex `dst` is unused.
struct StructuralOp {
  StructuralOpKind kind = StructuralOpKind::kAddEdge;
  VertexId src = 0;
  VertexId dst = 0;
  float value = 0.0f;

  bool operator==(const StructuralOp&) const = default;
};

struct OpApplyResult {
  std::uint64_t insertions = 0;
  std::uint64_t deletions_applied = 0;
  std::uint64_t missing_deletions = 0;
};

/// Applies one vertex's batched ops to its ascending neighbor list.
/// Insertions go first, then deletions, each group in issue order, so an
/// insert and delete of the same edge in one batch cancel. A deletion removes
/// one occurrence; kDeleteVertex removes every out-edge. `values` may be null
/// when the graph has no edge values.
OpApplyResult apply_ops(std::vector<VertexId>& neighbors,
                        std::vector<float>* values,
                        std::span<const StructuralOp> ops);

/// Per-interval in-memory buffer of pending structural ops, keyed by source
/// vertex. Thread-safe.
class StructuralBuffer {
 public:
  explicit StructuralBuffer(std::size_t num_intervals = 0)
      : per_interval_(num_intervals) {}

  void add(IntervalId interval, const StructuralOp& op);

  /// Pending ops for `v` in issue order (copy).
  std::vector<StructuralOp> ops_for(IntervalId interval, VertexId v) const;
  bool has_ops(IntervalId interval, VertexId v) const;

  std::uint64_t pending(IntervalId interval) const;
  std::uint64_t total_pending() const;

  /// Removes and returns an interval's ops grouped by source vertex.
  std::map<VertexId, std::vector<StructuralOp>> take(IntervalId interval);

 private:
  struct Slot {
    std::map<VertexId, std::vector<StructuralOp>> by_vertex;
    std::uint64_t count = 0;
  };
  mutable std::mutex mu_;
  std::vector<Slot> per_interval_;
};

}  // namespace mlvc

#endif  // MLVC_STRUCTURAL_HPP_
