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

#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>

#include "mlvc/apps.hpp"
#include "mlvc/csr_graph.hpp"
#include "mlvc/engine.hpp"
#include "mlvc/multilog.hpp"
#include "mlvc/sortgroup.hpp"

namespace mlvc {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("mlvc_bench_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

EdgeList random_edges(VertexId n, std::uint64_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  EdgeList g;
  g.num_vertices = n;
  g.edges.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    g.edges.push_back({static_cast<VertexId>(rng() % n), static_cast<VertexId>(rng() % n)});
  }
  return g;
}

void BM_SortAndGroup(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  RecordBuffer base(16);
  std::byte payload[8]{};
  for (std::size_t i = 0; i < n; ++i) {
    base.append(static_cast<VertexId>(rng() % 100000), static_cast<VertexId>(i), payload);
  }
  for (auto _ : state) {
    state.PauseTiming();
    RecordBuffer copy = base;
    state.ResumeTiming();
    benchmark::DoNotOptimize(sort_n_group(std::move(copy), DestRange{0, 100000}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_SortAndGroup)->Arg(1 << 14)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

void BM_MultiLogSend(benchmark::State& state) {
  const auto intervals = static_cast<VertexId>(state.range(0));
  const VertexId per = 10000;
  std::vector<VertexId> bounds;
  for (VertexId k = 0; k <= intervals; ++k) bounds.push_back(k * per);
  std::mt19937_64 rng(2);
  std::byte payload[8]{};
  const auto dir = scratch("multilog");
  std::uint64_t superstep = 0;
  for (auto _ : state) {
    MultiLogConfig c;
    c.dir = dir / std::to_string(superstep++);
    c.buffer_budget = std::uint64_t{intervals} * kDefaultPageSize;
    MultiLog log(bounds, c);
    for (int i = 0; i < 100000; ++i) {
      log.send_update({static_cast<VertexId>(rng() % bounds.back()), 0, payload});
    }
    for (IntervalId k = 0; k < intervals; ++k) discard_log(log.seal_superstep(k, 0));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
  fs::remove_all(dir);
}
BENCHMARK(BM_MultiLogSend)->Arg(1)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_LoadAdjacency(benchmark::State& state) {
  const auto dir = scratch("adjacency");
  const VertexId n = 200000;
  auto graph = CsrGraph::create(dir, random_edges(n, 2000000, 3), kDefaultPageSize, 16,
                                std::uint64_t{1} << 30);
  const auto stride = static_cast<VertexId>(state.range(0));
  std::vector<VertexId> active;
  for (VertexId v = 0; v < n; v += stride) active.push_back(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(graph.partition(0).load_adjacency(active));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(active.size()));
  fs::remove_all(dir);
}
BENCHMARK(BM_LoadAdjacency)->Arg(1)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EngineColoring(benchmark::State& state) {
  const auto dir = scratch("engine");
  auto g = random_edges(50000, 250000, 4);
  g.symmetrize();
  CsrGraph::create(dir / "g", g, kDefaultPageSize, 16, 2 << 20);
  EngineConfig cfg;
  cfg.work_dir = dir / "work";
  for (auto _ : state) {
    Engine engine(dir / "g", cfg);
    benchmark::DoNotOptimize(engine.run(apps::Coloring(1)));
  }
  fs::remove_all(dir);
}
BENCHMARK(BM_EngineColoring)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace mlvc

BENCHMARK_MAIN();
