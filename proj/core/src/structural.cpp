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

#include "mlvc/structural.hpp"

#include <algorithm>

namespace mlvc {

OpApplyResult apply_ops(std::vector<VertexId>& neighbors,
                        std::vector<float>* values,
                        std::span<const StructuralOp> ops) {
  OpApplyResult r;
  for (const auto& op : ops) {
    if (op.kind != StructuralOpKind::kAddEdge) continue;
    auto it = std::upper_bound(neighbors.begin(), neighbors.end(), op.dst);
    auto pos = it - neighbors.begin();
    neighbors.insert(it, op.dst);
    if (values) values->insert(values->begin() + pos, op.value);
    ++r.insertions;
  }
  for (const auto& op : ops) {
    if (op.kind == StructuralOpKind::kDeleteEdge) {
      auto it = std::lower_bound(neighbors.begin(), neighbors.end(), op.dst);
      if (it == neighbors.end() || *it != op.dst) {
        ++r.missing_deletions;
        continue;
      }
      auto pos = it - neighbors.begin();
      neighbors.erase(it);
      if (values) values->erase(values->begin() + pos);
      ++r.deletions_applied;
    } else if (op.kind == StructuralOpKind::kDeleteVertex) {
      r.deletions_applied += neighbors.size();
      neighbors.clear();
      if (values) values->clear();
    }
  }
  return r;
}

void StructuralBuffer::add(IntervalId interval, const StructuralOp& op) {
  std::lock_guard lock(mu_);
  auto& slot = per_interval_.at(interval);
  slot.by_vertex[op.src].push_back(op);
  ++slot.count;
}

std::vector<StructuralOp> StructuralBuffer::ops_for(IntervalId interval,
                                                    VertexId v) const {
  std::lock_guard lock(mu_);
  const auto& m = per_interval_.at(interval).by_vertex;
  auto it = m.find(v);
  return it == m.end() ? std::vector<StructuralOp>{} : it->second;
}

bool StructuralBuffer::has_ops(IntervalId interval, VertexId v) const {
  std::lock_guard lock(mu_);
  return per_interval_.at(interval).by_vertex.contains(v);
}

std::uint64_t StructuralBuffer::pending(IntervalId interval) const {
  std::lock_guard lock(mu_);
  return per_interval_.at(interval).count;
}

std::uint64_t StructuralBuffer::total_pending() const {
  std::lock_guard lock(mu_);
  std::uint64_t n = 0;
  for (const auto& s : per_interval_) n += s.count;
  return n;
}

std::map<VertexId, std::vector<StructuralOp>> StructuralBuffer::take(
    IntervalId interval) {
  std::lock_guard lock(mu_);
  auto& slot = per_interval_.at(interval);
  auto out = std::move(slot.by_vertex);
  slot.by_vertex.clear();
  slot.count = 0;
  return out;
}

}  // namespace mlvc
