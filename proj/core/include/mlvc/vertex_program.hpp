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

#ifndef MLVC_VERTEX_PROGRAM_HPP_
#define MLVC_VERTEX_PROGRAM_HPP_

#include <cstdint>
#include <span>
#include <string>

#include "mlvc/csr_graph.hpp"
#include "mlvc/sortgroup.hpp"
#include "mlvc/types.hpp"

namespace mlvc {

/// Messages bound for one vertex, in sorted-log order.
class Inbox {
 public:
  Inbox() = default;
  Inbox(const RecordBuffer* records, std::uint32_t begin, std::uint32_t end)
      : records_(records), begin_(begin), end_(end) {}

  std::size_t size() const noexcept { return end_ - begin_; }
  bool empty() const noexcept { return begin_ == end_; }
  VertexId src(std::size_t i) const { return records_->src(begin_ + i); }
  std::span<const std::byte> payload(std::size_t i) const {
    return records_->payload(begin_ + i);
  }
  template <typename T>
  T payload_as(std::size_t i, std::size_t offset = 0) const {
    return load_as<T>(payload(i), offset);
  }

 private:
  const RecordBuffer* records_ = nullptr;
  std::uint32_t begin_ = 0;
  std::uint32_t end_ = 0;
};

/// Handed to VertexProgram::init for every vertex before superstep 0.
class InitContext {
 public:
  virtual ~InitContext() = default;
  virtual VertexId vertex() const = 0;
  virtual std::uint64_t num_vertices() const = 0;
  virtual std::span<std::byte> state() = 0;
  /// Makes the vertex run in superstep 0 even without messages.
  virtual void activate() = 0;
  /// Queues a message for delivery in superstep 0.
  virtual void send_update(VertexId dest, std::span<const std::byte> payload) = 0;
};

/// Everything a vertex may touch while it is processed. Must not be kept
/// beyond the process() call.
class VertexContext {
 public:
  virtual ~VertexContext() = default;
  virtual VertexId vertex() const = 0;
  virtual std::uint64_t superstep() const = 0;
  virtual std::uint64_t num_vertices() const = 0;

  /// Current adjacency, including buffered structural updates.
  virtual const AdjacencyView& adjacency() const = 0;

  virtual std::span<std::byte> state() = 0;
  /// One fixed-width slot per out-edge, aligned with adjacency().
  virtual std::span<std::byte> edge_state() = 0;

  virtual void send_update(VertexId dest, std::span<const std::byte> payload) = 0;
  /// Activation is message driven, so this only records intent.
  virtual void deactivate() = 0;

  virtual void add_edge(VertexId src, VertexId dst, float value = 0.0f) = 0;
  virtual void delete_edge(VertexId src, VertexId dst) = 0;
  /// Clears every out-edge of this vertex; it never runs again and later
  /// messages to it are dropped.
  virtual void delete_vertex() = 0;
};

class VertexProgram {
 public:
  virtual ~VertexProgram() = default;

  virtual std::string name() const = 0;
  virtual std::size_t payload_width() const = 0;
  virtual std::size_t state_width() const = 0;
  virtual std::size_t edge_state_width() const { return 0; }

  virtual bool has_combine() const { return false; }
  virtual void combine(std::span<std::byte> /*acc*/,
                       std::span<const std::byte> /*in*/) const {}

  /// State starts zeroed.
  virtual void init(InitContext& ctx) const = 0;

  /// Whether this inbox makes its vertex run. When false, absorb() folds
  /// the messages into state without running the vertex.
  virtual bool activates(const Inbox& /*inbox*/) const { return true; }
  virtual void absorb(VertexId /*v*/, std::span<std::byte> /*state*/,
                      const Inbox& /*inbox*/) const {}

  virtual void process(VertexContext& ctx, const Inbox& inbox) const = 0;

  /// JSON object describing final states (levels histogram, set size, ...).
  virtual std::string summary_json(std::span<const std::byte> states,
                                   std::uint64_t num_vertices) const = 0;
};

}  // namespace mlvc

#endif  // MLVC_VERTEX_PROGRAM_HPP_
