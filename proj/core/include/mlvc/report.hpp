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

#ifndef MLVC_REPORT_HPP_
#define MLVC_REPORT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/engine.hpp"
#include "mlvc/shard_baseline.hpp"

namespace mlvc {

/// Everything needed to reproduce and summarize one run. Serialized with
/// sorted keys; runtimes are left out so repeated runs compare byte-equal.
struct RunReport {
  std::string app;
  /// JSON object of app flags (source, seed, ...).
  std::string app_params_json = "{}";
  EngineConfig config;
  GraphMeta graph;
  std::vector<SuperstepStats> supersteps;
  /// JSON object from VertexProgram::summary_json.
  std::string summary_json = "{}";
  std::uint64_t final_merges = 0;
  PageCounts init_state;

  static RunReport from(std::string app, std::string app_params_json,
                        const EngineConfig& config, const GraphMeta& graph,
                        const RunResult& result, std::string summary_json);
};

std::string to_json(const RunReport& report);
std::string stats_csv(const std::vector<SuperstepStats>& stats);

/// One superstep of the shard-vs-engine page comparison.
struct CompareRow {
  std::uint64_t superstep = 0;
  std::uint64_t active_vertices = 0;
  double active_fraction = 0.0;
  std::uint64_t shard_pages = 0;
  /// CSR plus edge-log pages read by the engine.
  std::uint64_t engine_pages = 0;
  /// Multi-log pages read and written, reported separately.
  std::uint64_t log_pages = 0;
  /// shard_pages / engine_pages; empty when the engine read nothing.
  std::optional<double> ratio;
};

/// Replays the run's recorded active sets against the shards. Supersteps
/// with no active vertex are omitted.
std::vector<CompareRow> compare_pages(const RunResult& result,
                                      const ShardSet& shards);

std::string compare_json(const std::string& app, const GraphMeta& graph,
                         const ShardSet& shards,
                         const std::vector<CompareRow>& rows);

}  // namespace mlvc

#endif  // MLVC_REPORT_HPP_
