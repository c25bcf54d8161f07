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

#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "mlvc/apps.hpp"
#include "mlvc/error.hpp"
#include "mlvc/report.hpp"
#include "support.hpp"

namespace mlvc {
namespace {

using json = nlohmann::json;
using test::TempDir;

struct Ran {
  TempDir dir;
  EdgeList g;
  CsrGraph graph;
  EngineConfig cfg = test::test_config(dir / "work");
  RunResult result;

  explicit Ran(const VertexProgram& p, bool record = false,
               EdgeList edges = test::random_graph(500, 3000, 9, true), unsigned parts = 2)
      : g(std::move(edges)), graph(test::make_graph(dir / "g", g, test::budget_for_parts(g, parts))) {
    cfg.record_active_sets = record;
    result = test::run_app(dir / "g", p, cfg);
  }
  RunReport report(const VertexProgram& p) const {
    return RunReport::from(p.name(), R"({"seed":1})", cfg, graph.meta(), result,
                           p.summary_json(result.states, result.num_vertices));
  }
};

TEST(Report, CarriesConfigStatsAndSummary) {
  apps::Coloring gc(1);
  Ran r(gc);
  auto j = json::parse(to_json(r.report(gc)));
  EXPECT_EQ(j["app"], "gc");
  EXPECT_EQ(j["app_params"]["seed"], 1);
  EXPECT_EQ(j["config"]["max_supersteps"], 15);
  EXPECT_EQ(j["graph"]["num_vertices"], 500);
  EXPECT_EQ(j["graph"]["num_intervals"], r.graph.num_intervals());
  ASSERT_EQ(j["supersteps"].size(), r.result.supersteps.size());
  EXPECT_EQ(j["totals"]["supersteps"], r.result.supersteps.size());
  EXPECT_TRUE(j["summary"].contains("colors"));
  std::uint64_t active = 0;
  for (const auto& s : j["supersteps"]) active += s["active_vertices"].get<std::uint64_t>();
  EXPECT_EQ(j["totals"]["active_vertex_steps"], active);
}

TEST(Report, LeavesOutRuntimeAndWorkDir) {
  apps::Bfs bfs(0);
  Ran r(bfs);
  const auto text = to_json(r.report(bfs));
  EXPECT_EQ(text.find("runtime"), std::string::npos);
  EXPECT_EQ(text.find(r.dir.path().string()), std::string::npos);
}

TEST(Report, SerializationIsStable) {
  apps::Mis mis(3);
  Ran a(mis), b(mis);
  EXPECT_EQ(to_json(a.report(mis)), to_json(b.report(mis)));
}

TEST(Report, RejectsMalformedParams) {
  apps::Bfs bfs(0);
  Ran r(bfs);
  auto rep = r.report(bfs);
  rep.app_params_json = "[1";
  EXPECT_ANY_THROW(to_json(rep));
}

TEST(StatsCsv, OneRowPerSuperstep) {
  apps::Bfs bfs(0);
  Ran r(bfs);
  std::istringstream in(stats_csv(r.result.supersteps));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("superstep,active_vertices,", 0), 0u);
  const auto cols = std::count(line.begin(), line.end(), ',');
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), cols);
    ++rows;
  }
  EXPECT_EQ(rows, r.result.supersteps.size());
}

TEST(Compare, NeedsRecordedActiveSets) {
  apps::Bfs bfs(0);
  Ran r(bfs, false);
  TempDir sd;
  auto shards = build_shards(r.g, 2, sd.path());
  EXPECT_THROW(compare_pages(r.result, shards), ContractViolation);
}

TEST(Compare, RowsMatchReplay) {
  apps::Coloring gc(4);
  Ran r(gc, true);
  TempDir sd;
  auto shards = build_shards(load_edges(r.graph), 2, sd.path());
  auto rows = compare_pages(r.result, shards);
  std::size_t i = 0;
  for (std::size_t s = 0; s < r.result.supersteps.size(); ++s) {
    const auto& st = r.result.supersteps[s];
    if (st.active_vertices == 0) continue;
    ASSERT_LT(i, rows.size());
    const auto& row = rows[i++];
    EXPECT_EQ(row.superstep, st.superstep);
    EXPECT_EQ(row.shard_pages, superstep_page_cost(shards, r.result.active_sets[s]));
    EXPECT_EQ(row.engine_pages, st.csr.read + st.edgelog.read);
    ASSERT_TRUE(row.ratio.has_value());
    EXPECT_DOUBLE_EQ(*row.ratio, double(row.shard_pages) / double(row.engine_pages));
  }
  EXPECT_EQ(i, rows.size());
}

TEST(Compare, EmptySuperstepIsOmitted) {
  // PageRank's S1 absorbs every message without running anyone.
  apps::PageRank pr(0.85, 0.4);
  Ran r(pr, true);
  ASSERT_EQ(r.result.supersteps.size(), 2u);
  ASSERT_EQ(r.result.supersteps[1].active_vertices, 0u);
  TempDir sd;
  auto rows = compare_pages(r.result, build_shards(r.g, 1, sd.path()));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].superstep, 0u);
}

TEST(Compare, EverythingActiveOneShard) {
  // Both sides read the whole graph. Shard records are 8 bytes against 4
  // in colIdx plus one rowPtr page, so the ratio sits just under 2.
  apps::PageRank pr(0.85, 0.4);
  Ran r(pr, true, test::random_graph(2000, 40000, 5, true), 1);
  ASSERT_EQ(r.graph.num_intervals(), 1u);
  TempDir sd;
  auto shards = build_shards(r.g, 1, sd.path());
  auto rows = compare_pages(r.result, shards);
  ASSERT_FALSE(rows.empty());
  EXPECT_DOUBLE_EQ(rows[0].active_fraction, 1.0);
  EXPECT_EQ(rows[0].shard_pages, shards.total_pages());
  EXPECT_EQ(rows[0].engine_pages, r.graph.partition(0).total_pages());
  EXPECT_GE(*rows[0].ratio, 1.5);
  EXPECT_LE(*rows[0].ratio, 2.0);
  auto j = json::parse(compare_json("pagerank", r.graph.meta(), shards, rows));
  EXPECT_EQ(j["supersteps"].size(), rows.size());
}

}  // namespace
}  // namespace mlvc
