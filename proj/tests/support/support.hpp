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

#ifndef MLVC_TESTS_SUPPORT_HPP_
#define MLVC_TESTS_SUPPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/edge_list.hpp"
#include "mlvc/engine.hpp"
#include "mlvc/vertex_program.hpp"

namespace mlvc::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// ---- generators. Every undirected graph stores both directions.

/// The 6-vertex ring 0-1-2-3-4-5-0.
EdgeList ring(VertexId n);
EdgeList path_graph(VertexId n);
EdgeList star(VertexId leaves);
EdgeList clique(VertexId n);

/// `m` distinct directed edges without self loops, or m undirected edges
/// (2m stored) when `symmetric`.
EdgeList random_graph(VertexId n, std::uint64_t m, std::uint64_t seed,
                      bool symmetric);

/// Watts-Strogatz: ring lattice with `k` neighbors per side, each lattice
/// edge rewired with probability `beta`. Symmetric, simple.
EdgeList small_world(VertexId n, unsigned k, double beta, std::uint64_t seed);

/// Out-neighbors in ascending order, duplicates kept (CSR order).
std::vector<std::vector<VertexId>> out_lists(const EdgeList& g);
std::vector<std::vector<VertexId>> in_lists(const EdgeList& g);

/// Writes a converted graph into `dir`. The default sort budget keeps the
/// whole graph in one interval.
CsrGraph make_graph(const std::filesystem::path& dir, const EdgeList& g,
                    std::uint64_t sort_budget = std::uint64_t{1} << 30,
                    std::size_t page_size = kDefaultPageSize);

/// Sort budget that splits `g` into roughly `parts` intervals.
std::uint64_t budget_for_parts(const EdgeList& g, unsigned parts,
                               std::size_t record_size = 16);

EngineConfig test_config(const std::filesystem::path& work,
                         std::uint32_t max_supersteps = 15);

RunResult run_app(const std::filesystem::path& graph_dir,
                  const VertexProgram& program, const EngineConfig& cfg);

// ---- oracles. Plain in-memory synchronous simulations.

inline constexpr std::uint32_t kNoLevel = 0xffffffffu;

std::vector<std::uint32_t> bfs_oracle(const EdgeList& g, VertexId source);

struct PageRankOracle {
  std::vector<double> rank;
  std::vector<double> change;
  std::size_t supersteps = 0;
};
PageRankOracle pagerank_oracle(const EdgeList& g, double alpha,
                               double threshold, std::uint32_t max_supersteps);

struct LabelOracle {
  std::vector<std::uint32_t> values;
  std::size_t supersteps = 0;
};
LabelOracle flp_oracle(const EdgeList& g, std::uint32_t max_supersteps);
LabelOracle gc_oracle(const EdgeList& g, std::uint64_t seed,
                      std::uint32_t max_supersteps);
/// values: 0 undecided, 1 in, 2 out.
LabelOracle mis_oracle(const EdgeList& g, std::uint64_t seed,
                       std::uint32_t max_supersteps);
std::vector<std::uint32_t> rw_oracle(const EdgeList& g, std::uint64_t seed,
                                     std::uint32_t stride, std::uint32_t steps,
                                     std::uint32_t max_supersteps);

struct CoreOracle {
  std::vector<bool> alive;
  std::vector<std::uint32_t> degree;  // within the core, 0 if peeled
};
/// Iterative pruning over a simple symmetric graph.
CoreOracle kcore_oracle(const EdgeList& g, std::uint32_t k);

// ---- checkers

bool proper_coloring(const EdgeList& g, const std::vector<std::uint32_t>& color);
bool independent(const EdgeList& g, const std::vector<std::uint32_t>& status);
bool maximal(const EdgeList& g, const std::vector<std::uint32_t>& status);

}  // namespace mlvc::test

#endif  // MLVC_TESTS_SUPPORT_HPP_
