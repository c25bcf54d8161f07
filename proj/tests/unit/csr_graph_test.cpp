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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "mlvc/csr_graph.hpp"
#include "mlvc/error.hpp"
#include "support.hpp"

namespace mlvc {
namespace {

using test::TempDir;

std::vector<VertexId> bounds_of(const GraphMeta& m) { return m.interval_bounds; }

TEST(Partition, ExactPacking) {
  std::vector<std::uint64_t> deg{1, 1, 1, 1};
  EXPECT_EQ(bounds_of(partition_vertices(deg, 16, 32)),
            (std::vector<VertexId>{0, 2, 4}));
}

TEST(Partition, OversizedVertexIsNamed) {
  std::vector<std::uint64_t> deg{3, 1};
  try {
    partition_vertices(deg, 16, 32);
    FAIL() << "expected an oversized-vertex error";
  } catch (const OversizedVertexError& e) {
    EXPECT_EQ(e.vertex(), 0u);
  }
}

TEST(Partition, RingSplitsInHalves) {
  auto g = test::ring(6);
  EXPECT_EQ(bounds_of(partition_vertices(g.in_degrees(), 16, 96)),
            (std::vector<VertexId>{0, 3, 6}));
}

TEST(Partition, ZeroInDegreeStillTakesSlack) {
  std::vector<std::uint64_t> deg{0, 0, 0, 0};
  auto m = partition_vertices(deg, 16, 32);
  EXPECT_EQ(bounds_of(m), (std::vector<VertexId>{0, 2, 4}));
}

// Greedy prefix-sum oracle against random in-degree vectors.
TEST(PartitionProperty, MatchesGreedyOracle) {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> deg(1 + rng() % 50);
    for (auto& d : deg) d = rng() % 6;
    const std::uint64_t budget = 16 * (6 + rng() % 30);
    std::vector<VertexId> want{0};
    std::uint64_t acc = 0;
    for (std::size_t v = 0; v < deg.size(); ++v) {
      const std::uint64_t w = std::max<std::uint64_t>(deg[v], 1) * 16;
      if (acc + w > budget) {
        want.push_back(static_cast<VertexId>(v));
        acc = 0;
      }
      acc += w;
    }
    want.push_back(static_cast<VertexId>(deg.size()));
    auto m = partition_vertices(deg, 16, budget);
    ASSERT_EQ(m.interval_bounds, want);
    for (VertexId v = 0; v < deg.size(); ++v) {
      const IntervalId k = m.interval_of(v);
      ASSERT_GE(v, m.interval_begin(k));
      ASSERT_LT(v, m.interval_end(k));
    }
  }
}

TEST(Build, SingleEdge) {
  EdgeList g;
  g.num_vertices = 2;
  g.edges = {{0, 1}};
  GraphMeta m = partition_vertices(g.in_degrees(), 16, 1 << 20);
  auto v = build_partition_vectors(g, m);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].row_ptr, (std::vector<std::uint64_t>{0, 1, 1}));
  EXPECT_EQ(v[0].col_idx, (std::vector<VertexId>{1}));
}

TEST(Build, RingNeighborsAscending) {
  TempDir dir;
  auto csr = test::make_graph(dir.path(), test::ring(6));
  auto adj = csr.partition(0).load_adjacency(std::vector<VertexId>{2});
  ASSERT_EQ(adj.size(), 1u);
  EXPECT_EQ(adj[0].out_neighbors, (std::vector<VertexId>{1, 3}));
}

TEST(Build, DuplicatesKept) {
  EdgeList g;
  g.num_vertices = 2;
  g.edges = {{0, 1}, {0, 1}};
  GraphMeta m = partition_vertices(g.in_degrees(), 16, 1 << 20);
  EXPECT_EQ(build_partition_vectors(g, m)[0].col_idx, (std::vector<VertexId>{1, 1}));
}

TEST(Build, OutOfRangeIdIsIngestError) {
  EdgeList g;
  g.num_vertices = 2;
  g.edges = {{0, 5}};
  GraphMeta m = partition_vertices(std::vector<std::uint64_t>{0, 0}, 16, 1 << 20);
  EXPECT_THROW(build_partition_vectors(g, m), IngestError);
}

TEST(Build, MetaRoundTrips) {
  TempDir dir;
  auto g = test::ring(6);
  auto csr = test::make_graph(dir.path(), g, 96);
  auto again = CsrGraph::open(dir.path());
  EXPECT_EQ(again.meta().interval_bounds, (std::vector<VertexId>{0, 3, 6}));
  EXPECT_EQ(again.meta().num_edges, 12u);
  EXPECT_EQ(again.partition(1).read_all(), csr.partition(1).read_all());
}

// Reconstruction: the stored edge multiset equals the input.
TEST(BuildProperty, Reconstruction) {
  TempDir dir;
  auto g = test::random_graph(300, 2000, 5, false);
  auto csr = test::make_graph(dir.path(), g, test::budget_for_parts(g, 4));
  ASSERT_GT(csr.num_intervals(), 1u);
  std::multiset<std::pair<VertexId, VertexId>> want, got;
  for (const auto& e : g.edges) want.insert({e.src, e.dst});
  for (IntervalId k = 0; k < csr.num_intervals(); ++k) {
    const auto& p = csr.partition(k);
    auto v = p.read_all();
    ASSERT_EQ(v.row_ptr.front(), 0u);
    ASSERT_EQ(v.row_ptr.back(), v.col_idx.size());
    ASSERT_TRUE(std::is_sorted(v.row_ptr.begin(), v.row_ptr.end()));
    for (VertexId i = 0; i < p.vertex_count(); ++i) {
      for (auto e = v.row_ptr[i]; e < v.row_ptr[i + 1]; ++e) {
        got.insert({p.first_vertex() + i, v.col_idx[e]});
      }
    }
  }
  EXPECT_EQ(got, want);
}

TEST(LoadAdjacency, EmptyActiveReadsNothing) {
  TempDir dir;
  auto csr = test::make_graph(dir.path(), test::ring(6));
  csr.partition(0).reset_counters();
  EXPECT_TRUE(csr.partition(0).load_adjacency({}).empty());
  EXPECT_EQ(csr.partition(0).pages_read(), 0u);
}

TEST(LoadAdjacency, AllActiveReadsEveryPageOnce) {
  TempDir dir;
  auto g = test::random_graph(5000, 20000, 2, false);
  auto csr = test::make_graph(dir.path(), g);
  auto& p = csr.partition(0);
  std::vector<VertexId> all(p.vertex_count());
  for (VertexId v = 0; v < all.size(); ++v) all[v] = v;
  p.reset_counters();
  auto adj = p.load_adjacency(all);
  EXPECT_EQ(adj.size(), all.size());
  EXPECT_EQ(p.pages_read(), p.total_pages());
}

TEST(LoadAdjacency, OneVertexTouchesOneRowPtrAndOneColIdxPage) {
  TempDir dir;
  auto csr = test::make_graph(dir.path(), test::ring(6));
  auto& p = csr.partition(0);
  p.reset_counters();
  p.load_adjacency(std::vector<VertexId>{4});
  EXPECT_EQ(p.rowptr_store().pages_read(), 1u);
  EXPECT_EQ(p.colidx_store().pages_read(), 1u);
  EXPECT_EQ(p.val_store().pages_read(), 0u);
}

TEST(LoadAdjacency, UnsortedInputIsContractViolation) {
  TempDir dir;
  auto csr = test::make_graph(dir.path(), test::ring(6));
  EXPECT_THROW(csr.partition(0).load_adjacency(std::vector<VertexId>{3, 1}),
               ContractViolation);
}

// Pages read for A are exactly the pages overlapping A's byte ranges, and
// grow monotonically with A.
TEST(LoadAdjacencyProperty, PageSetIsMinimalAndMonotone) {
  TempDir dir;
  auto g = test::random_graph(4000, 30000, 8, false);
  auto csr = test::make_graph(dir.path(), g, std::uint64_t{1} << 30, 4096);
  auto& p = csr.partition(0);
  const auto vec = p.read_all();
  std::mt19937 rng(21);
  auto page_set = [&](const std::vector<VertexId>& active) {
    p.colidx_store().set_read_trace(true);
    p.rowptr_store().set_read_trace(true);
    auto adj = p.load_adjacency(active);
    for (std::size_t i = 0; i < adj.size(); ++i) {
      const VertexId v = active[i];
      std::vector<VertexId> want(vec.col_idx.begin() + static_cast<std::ptrdiff_t>(vec.row_ptr[v]),
                                 vec.col_idx.begin() + static_cast<std::ptrdiff_t>(vec.row_ptr[v + 1]));
      EXPECT_EQ(adj[i].out_neighbors, want);
    }
    auto c = p.colidx_store().read_trace();
    auto r = p.rowptr_store().read_trace();
    p.colidx_store().set_read_trace(false);
    p.rowptr_store().set_read_trace(false);
    return std::pair{std::set<PageId>(c.begin(), c.end()),
                     std::set<PageId>(r.begin(), r.end())};
  };
  for (int trial = 0; trial < 30; ++trial) {
    std::set<VertexId> pick;
    const std::size_t want = 1 + rng() % 200;
    while (pick.size() < want) pick.insert(rng() % 4000);
    std::vector<VertexId> a(pick.begin(), pick.end());
    std::vector<VertexId> b = a;
    for (int extra = 0; extra < 50; ++extra) b.push_back(rng() % 4000);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());

    auto [col_a, row_a] = page_set(a);
    std::set<PageId> expect_col, expect_row;
    for (VertexId v : a) {
      const auto lo = vec.row_ptr[v] * 4, hi = vec.row_ptr[v + 1] * 4;
      for (auto pg = lo / 4096; hi > lo && pg <= (hi - 1) / 4096; ++pg) expect_col.insert(pg);
      expect_row.insert(v * 8 / 4096);
      expect_row.insert((v * 8 + 15) / 4096);
    }
    ASSERT_EQ(col_a, expect_col);
    ASSERT_EQ(row_a, expect_row);
    auto [col_b, row_b] = page_set(b);
    ASSERT_TRUE(std::includes(col_b.begin(), col_b.end(), col_a.begin(), col_a.end()));
    ASSERT_TRUE(std::includes(row_b.begin(), row_b.end(), row_a.begin(), row_a.end()));
  }
}

using OpMap = std::map<VertexId, std::vector<StructuralOp>>;

TEST(Merge, DeleteEdge) {
  TempDir dir;
  auto csr = test::make_graph(dir / "g", test::ring(6));
  OpMap ops{{2, {{StructuralOpKind::kDeleteEdge, 2, 3}}}};
  OpApplyResult applied;
  auto merged = merge_structural_updates(csr.partition(0), ops, 6, dir.path(),
                                         "m0", &applied);
  EXPECT_EQ(merged.load_adjacency(std::vector<VertexId>{2})[0].out_neighbors,
            (std::vector<VertexId>{1}));
  EXPECT_EQ(merged.edge_count(), 11u);
  EXPECT_EQ(applied.deletions_applied, 1u);
}

TEST(Merge, EmptyBatchIsIdentity) {
  TempDir dir;
  auto csr = test::make_graph(dir / "g", test::ring(6));
  auto merged = merge_structural_updates(csr.partition(0), {}, 6, dir.path(), "m0");
  EXPECT_EQ(merged.read_all(), csr.partition(0).read_all());
}

TEST(Merge, InsertThenDeleteCancels) {
  TempDir dir;
  auto csr = test::make_graph(dir / "g", test::ring(6));
  OpMap ops{{0, {{StructuralOpKind::kAddEdge, 0, 3}, {StructuralOpKind::kDeleteEdge, 0, 3}}}};
  auto merged = merge_structural_updates(csr.partition(0), ops, 6, dir.path(), "m0");
  EXPECT_EQ(merged.read_all(), csr.partition(0).read_all());
}

TEST(Merge, MissingDeletionIsCounted) {
  TempDir dir;
  auto csr = test::make_graph(dir / "g", test::ring(6));
  OpMap ops{{0, {{StructuralOpKind::kDeleteEdge, 0, 3}}}};
  OpApplyResult applied;
  auto merged = merge_structural_updates(csr.partition(0), ops, 6, dir.path(),
                                         "m0", &applied);
  EXPECT_EQ(applied.missing_deletions, 1u);
  EXPECT_EQ(merged.read_all(), csr.partition(0).read_all());
}

TEST(Merge, InsertOutOfRangeIsAddressingError) {
  TempDir dir;
  auto csr = test::make_graph(dir / "g", test::ring(6));
  OpMap ops{{0, {{StructuralOpKind::kAddEdge, 0, 17}}}};
  EXPECT_THROW(merge_structural_updates(csr.partition(0), ops, 6, dir.path(), "m0"),
               AddressingError);
}

// Edge count bookkeeping and adjacency equal to a sequential-apply oracle.
TEST(MergeProperty, RandomBatches) {
  TempDir dir;
  auto g = test::random_graph(200, 1500, 4, false);
  auto csr = test::make_graph(dir / "g", g);
  auto want = test::out_lists(g);
  std::mt19937 rng(9);
  OpMap ops;
  std::uint64_t ins = 0, del = 0, missing = 0;
  for (VertexId v = 0; v < 200; v += 3) {
    auto& list = want[v];
    std::vector<StructuralOp> adds, dels;
    for (int i = 0; i < 4; ++i) {
      if (rng() % 2) {
        adds.push_back({StructuralOpKind::kAddEdge, v, static_cast<VertexId>(rng() % 200)});
      } else {
        VertexId d = !list.empty() && rng() % 3 ? list[rng() % list.size()]
                                                 : static_cast<VertexId>(rng() % 200);
        dels.push_back({StructuralOpKind::kDeleteEdge, v, d});
      }
    }
    for (const auto& a : adds) {
      list.insert(std::upper_bound(list.begin(), list.end(), a.dst), a.dst);
      ++ins;
    }
    for (const auto& d : dels) {
      auto it = std::lower_bound(list.begin(), list.end(), d.dst);
      if (it != list.end() && *it == d.dst) {
        list.erase(it);
        ++del;
      } else {
        ++missing;
      }
    }
    // Interleave the two kinds in issue order.
    auto& issued = ops[v];
    std::size_t a = 0, b = 0;
    while (a < adds.size() || b < dels.size()) {
      if (b == dels.size() || (a < adds.size() && rng() % 2)) {
        issued.push_back(adds[a++]);
      } else {
        issued.push_back(dels[b++]);
      }
    }
  }
  OpApplyResult applied;
  auto merged = merge_structural_updates(csr.partition(0), ops, 200, dir.path(),
                                         "m0", &applied);
  EXPECT_EQ(applied.insertions, ins);
  EXPECT_EQ(applied.deletions_applied, del);
  EXPECT_EQ(applied.missing_deletions, missing);
  EXPECT_EQ(merged.edge_count(), g.edges.size() - del + ins);
  auto vec = merged.read_all();
  ASSERT_TRUE(std::is_sorted(vec.row_ptr.begin(), vec.row_ptr.end()));
  for (VertexId v = 0; v < 200; ++v) {
    std::vector<VertexId> got(vec.col_idx.begin() + static_cast<std::ptrdiff_t>(vec.row_ptr[v]),
                              vec.col_idx.begin() + static_cast<std::ptrdiff_t>(vec.row_ptr[v + 1]));
    ASSERT_EQ(got, want[v]) << "vertex " << v;
  }
}

}  // namespace
}  // namespace mlvc
