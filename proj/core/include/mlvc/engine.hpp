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

#ifndef MLVC_ENGINE_HPP_
#define MLVC_ENGINE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/edgelog.hpp"
#include "mlvc/multilog.hpp"
#include "mlvc/pager.hpp"
#include "mlvc/state_store.hpp"
#include "mlvc/structural.hpp"
#include "mlvc/types.hpp"
#include "mlvc/vertex_program.hpp"

namespace mlvc {

struct EngineConfig {
  /// Scratch space for logs, states, edge logs and merged partitions.
  std::filesystem::path work_dir;
  std::uint64_t memory_budget = std::uint64_t{1} << 30;
  double sort_fraction = 0.75;
  double multilog_fraction = 0.05;
  double edgelog_fraction = 0.05;
  std::uint32_t max_supersteps = 15;
  bool edge_log = true;
  bool presort = false;
  /// Lets a program's combine operator run; off forces message preservation.
  bool combine = true;
  bool parallel = false;
  unsigned threads = 0;
  std::size_t history_depth = 1;
  double inefficiency_threshold = kDefaultInefficiencyThreshold;
  std::uint64_t merge_threshold = 4096;
  /// Keeps every superstep's active set in the result (for baseline replay).
  bool record_active_sets = false;

  std::uint64_t sort_budget() const;
  std::uint64_t multilog_budget() const;
  std::uint64_t edgelog_budget() const;
  /// Throws ConfigError on out-of-range fractions or budgets.
  void validate() const;
};

struct PageCounts {
  std::uint64_t read = 0;
  std::uint64_t written = 0;
};

struct SuperstepStats {
  std::uint64_t superstep = 0;
  std::uint64_t active_vertices = 0;
  /// Vertices whose inbox only updated state (no activation).
  std::uint64_t absorbed_vertices = 0;
  std::uint64_t active_edges = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t dropped_messages = 0;
  std::uint64_t plans = 0;
  PageCounts csr;
  std::uint64_t colidx_pages_read = 0;
  PageCounts log;
  PageCounts edgelog;
  PageCounts state;
  std::uint64_t sort_resident_peak_bytes = 0;
  std::uint64_t multilog_resident_peak_bytes = 0;
  std::uint64_t multilog_pages_evicted = 0;
  std::uint64_t edgelog_bytes = 0;
  std::uint64_t edgelog_entries = 0;
  std::uint64_t edgelog_served = 0;
  std::uint64_t accessed_colidx_pages = 0;
  std::uint64_t inefficient_pages = 0;
  /// Vertices this superstep's logging predicted active for the next one.
  std::uint64_t predicted_active = 0;
  /// |predicted by the previous superstep ∩ active now|.
  std::uint64_t prediction_hits = 0;
  /// prediction_hits / active_vertices, 0 when nothing is active.
  double prediction_accuracy = 0.0;
  std::uint64_t structural_ops = 0;
  std::uint64_t merges = 0;
  std::uint64_t missing_deletions = 0;
  std::uint64_t ops_to_deleted = 0;
  double runtime_seconds = 0.0;
};

struct RunResult {
  std::vector<SuperstepStats> supersteps;
  /// Final state of every vertex, state_width bytes each.
  std::vector<std::byte> states;
  std::size_t state_width = 0;
  std::uint64_t num_vertices = 0;
  std::vector<Bitset> active_sets;
  Bitset deleted;
  PageCounts init_state;
  std::uint64_t final_merges = 0;

  std::span<const std::byte> state_of(VertexId v) const {
    return std::span(states).subspan(std::size_t{v} * state_width, state_width);
  }
};

/// Runs a vertex program to quiescence or max_supersteps over a converted
/// graph directory. The graph files are never modified; structural merges
/// land in the work directory.
class Engine {
 public:
  Engine(const std::filesystem::path& graph_dir, EngineConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const GraphMeta& meta() const noexcept;
  const EngineConfig& config() const noexcept { return config_; }

  RunResult run(const VertexProgram& program);

 private:
  struct Run;
  EngineConfig config_;
  std::filesystem::path graph_dir_;
  GraphMeta meta_;
};

}  // namespace mlvc

#endif  // MLVC_ENGINE_HPP_
