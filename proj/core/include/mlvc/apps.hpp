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

#ifndef MLVC_APPS_HPP_
#define MLVC_APPS_HPP_

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mlvc/engine.hpp"
#include "mlvc/vertex_program.hpp"

namespace mlvc::apps {

inline constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

/// Hop levels from `source`; combine = min.
/// state: level u32 | payload: level u32
class Bfs final : public VertexProgram {
 public:
  explicit Bfs(VertexId source) : source_(source) {}
  std::string name() const override { return "bfs"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 4; }
  bool has_combine() const override { return true; }
  void combine(std::span<std::byte> acc, std::span<const std::byte> in) const override;
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

 private:
  VertexId source_;
};

/// Delta PageRank. Changes are summed by combine; a vertex runs only when
/// some incoming change carried the activation flag.
/// state: rank f64 | change f64; payload: change f64 | flag u32
class PageRank final : public VertexProgram {
 public:
  PageRank(double alpha = 0.85, double threshold = 0.4)
      : alpha_(alpha), threshold_(threshold) {}
  std::string name() const override { return "pagerank"; }
  std::size_t payload_width() const override { return 12; }
  std::size_t state_width() const override { return 16; }
  bool has_combine() const override { return true; }
  void combine(std::span<std::byte> acc, std::span<const std::byte> in) const override;
  void init(InitContext& ctx) const override;
  bool activates(const Inbox& inbox) const override;
  void absorb(VertexId v, std::span<std::byte> state,
              const Inbox& inbox) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

 private:
  double alpha_;
  double threshold_;
};

/// Most-frequent label propagation. The edge table holds label+1 per
/// out-neighbor, 0 while unknown (read as the neighbor's own id).
/// state: label u32 | payload: label u32 | edge state: u32
class Flp final : public VertexProgram {
 public:
  std::string name() const override { return "flp"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 4; }
  std::size_t edge_state_width() const override { return 4; }
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;
};

/// Greedy coloring. A vertex recolors only while a higher-priority neighbor
/// holds its color, taking the smallest free color in superstep 0 and a
/// hashed choice between the two smallest free colors afterwards.
/// state: color u32 | payload: color u32 | edge state: neighbor color u32
class Coloring final : public VertexProgram {
 public:
  explicit Coloring(std::uint64_t seed = 0) : seed_(seed) {}
  std::string name() const override { return "gc"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 4; }
  std::size_t edge_state_width() const override { return 4; }
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

  /// Ordering by (hash(seed, v), v).
  bool outranks(VertexId a, VertexId b) const;

 private:
  std::uint64_t seed_;
};

enum class MisStatus : std::uint32_t { kUndecided = 0, kIn = 1, kOut = 2 };
enum class MisMessage : std::uint32_t { kAnnounce = 1, kIn = 2, kSelf = 3 };

/// Luby-style rounds of two supersteps. Even: undecided vertices drop out
/// if a neighbor joined, otherwise announce. Odd: an announcer joins when
/// its round priority beats every announcing neighbor.
/// state: status u32 | payload: MisMessage u32
class Mis final : public VertexProgram {
 public:
  explicit Mis(std::uint64_t seed = 0) : seed_(seed) {}
  std::string name() const override { return "mis"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 4; }
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

  bool outranks(std::uint64_t round, VertexId a, VertexId b) const;

 private:
  std::uint64_t seed_;
};

/// Walkers start at every `stride`-th vertex with `steps` hops each. The
/// next hop is hash(seed, walker, remaining) mod degree.
/// state: visits u32 | payload: walker u32 | remaining u32
class RandomWalk final : public VertexProgram {
 public:
  RandomWalk(std::uint64_t seed, std::uint32_t stride, std::uint32_t steps = 10);
  std::string name() const override { return "rw"; }
  std::size_t payload_width() const override { return 8; }
  std::size_t state_width() const override { return 4; }
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

  std::size_t next_hop(std::uint32_t walker, std::uint32_t remaining,
                       std::size_t degree) const;

 private:
  std::uint64_t seed_;
  std::uint32_t stride_;
  std::uint32_t steps_;
};

/// Peels vertices whose current degree is below K, deleting their edges in
/// both directions and notifying neighbors.
/// state: alive u32 | degree u32 | payload: u32 (unused)
class KCore final : public VertexProgram {
 public:
  explicit KCore(std::uint32_t k) : k_(k) {}
  std::string name() const override { return "kcore"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 8; }
  void init(InitContext& ctx) const override;
  void process(VertexContext& ctx, const Inbox& inbox) const override;
  std::string summary_json(std::span<const std::byte> states,
                           std::uint64_t n) const override;

 private:
  std::uint32_t k_;
};

struct AppOptions {
  std::string name;
  VertexId source = 0;
  double alpha = 0.85;
  double threshold = 0.4;
  std::uint64_t seed = 0;
  /// 0 picks max(1, n / 100).
  std::uint32_t stride = 0;
  std::uint32_t steps = 10;
  std::uint32_t k = 3;
};

std::vector<std::string> app_names();

/// Throws UsageError for an unknown name or an invalid source.
std::unique_ptr<VertexProgram> make_app(const AppOptions& options,
                                        std::uint64_t num_vertices);

/// Decoders over RunResult::states.
std::vector<std::uint32_t> u32_states(const RunResult& result,
                                      std::size_t offset = 0);
std::vector<double> pagerank_ranks(const RunResult& result);

}  // namespace mlvc::apps

#endif  // MLVC_APPS_HPP_
