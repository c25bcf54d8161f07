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

#include <functional>
#include <map>
#include <random>
#include <set>

#include "mlvc/apps.hpp"
#include "mlvc/engine.hpp"
#include "mlvc/error.hpp"
#include "mlvc/hash.hpp"
#include "support.hpp"

namespace mlvc {
namespace {

using test::TempDir;

std::array<std::byte, 4> word(std::uint32_t x) {
  std::array<std::byte, 4> b{};
  std::memcpy(b.data(), &x, 4);
  return b;
}

struct Call {
  std::uint64_t superstep;
  VertexId vertex;
  std::vector<VertexId> srcs;
  std::vector<VertexId> adjacency;
};

// Test program driven by callbacks; records every process() call.
class Scripted final : public VertexProgram {
 public:
  std::function<void(InitContext&)> on_init = [](InitContext&) {};
  std::function<void(VertexContext&, const Inbox&)> on_process =
      [](VertexContext&, const Inbox&) {};
  std::size_t edge_width = 0;
  mutable std::vector<Call> calls;

  std::string name() const override { return "scripted"; }
  std::size_t payload_width() const override { return 4; }
  std::size_t state_width() const override { return 4; }
  std::size_t edge_state_width() const override { return edge_width; }
  void init(InitContext& ctx) const override { on_init(ctx); }
  void process(VertexContext& ctx, const Inbox& inbox) const override {
    Call c{ctx.superstep(), ctx.vertex(), {}, ctx.adjacency().out_neighbors};
    for (std::size_t i = 0; i < inbox.size(); ++i) c.srcs.push_back(inbox.src(i));
    calls.push_back(std::move(c));
    on_process(ctx, inbox);
  }
  std::string summary_json(std::span<const std::byte>, std::uint64_t) const override {
    return "{}";
  }

  std::vector<Call> at(std::uint64_t s) const {
    std::vector<Call> out;
    for (const auto& c : calls) {
      if (c.superstep == s) out.push_back(c);
    }
    return out;
  }
};

struct Fixture {
  TempDir dir;
  EdgeList g;
  std::filesystem::path graph;

  explicit Fixture(EdgeList edges, std::uint64_t sort_budget = std::uint64_t{1} << 30,
                   std::size_t page_size = kDefaultPageSize)
      : g(std::move(edges)), graph(dir / "g") {
    test::make_graph(graph, g, sort_budget, page_size);
  }
  EngineConfig config(std::uint32_t max_supersteps = 15) const {
    return test::test_config(dir / "work", max_supersteps);
  }
  RunResult run(const VertexProgram& p, const EngineConfig& c) const {
    return test::run_app(graph, p, c);
  }
  RunResult run(const VertexProgram& p) const { return run(p, config()); }
};

TEST(Run, NothingActiveRunsZeroSupersteps) {
  Fixture f(test::ring(6));
  Scripted p;
  auto r = f.run(p);
  EXPECT_TRUE(r.supersteps.empty());
  EXPECT_TRUE(p.calls.empty());
  EXPECT_EQ(r.states.size(), 6u * 4u);
}

TEST(Run, BfsOnRingTakesFiveSupersteps) {
  Fixture f(test::ring(6));
  apps::Bfs bfs(0);
  auto r = f.run(bfs);
  // S0 source, S1..S3 frontier levels 1..3, S4 drains the last sends.
  EXPECT_EQ(r.supersteps.size(), 5u);
  EXPECT_EQ(apps::u32_states(r), (std::vector<std::uint32_t>{0, 1, 2, 3, 2, 1}));
}

TEST(Run, NonConvergingPageRankStopsAtCap) {
  Fixture f(test::ring(6));
  apps::PageRank pr(0.85, 0.0);
  auto r = f.run(pr);
  EXPECT_EQ(r.supersteps.size(), 15u);
  auto r3 = f.run(pr, f.config(3));
  EXPECT_EQ(r3.supersteps.size(), 3u);
}

TEST(Run, OnlyMessagedVertexRuns) {
  Fixture f(test::random_graph(20, 60, 3, false));
  Scripted p;
  p.on_init = [](InitContext& c) { c.send_update(7, word(c.vertex())); };
  auto r = f.run(p);
  ASSERT_EQ(p.calls.size(), 1u);
  EXPECT_EQ(p.calls[0].vertex, 7u);
  EXPECT_EQ(p.calls[0].srcs.size(), 20u);
  EXPECT_EQ(r.supersteps[0].active_vertices, 1u);
  EXPECT_EQ(r.supersteps[0].messages_delivered, 20u);
}

TEST(Run, InitActivationRunsWithEmptyInbox) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() % 2 == 0) c.activate();
  };
  auto r = f.run(p);
  ASSERT_EQ(r.supersteps.size(), 1u);
  ASSERT_EQ(p.calls.size(), 3u);
  for (const auto& c : p.calls) EXPECT_TRUE(c.srcs.empty());
}

TEST(Run, FlpTriangleKeepsEveryMessage) {
  Fixture f(test::clique(3));
  apps::Flp flp;
  auto r = f.run(flp);
  ASSERT_GE(r.supersteps.size(), 2u);
  EXPECT_EQ(r.supersteps[1].active_vertices, 3u);
  EXPECT_EQ(r.supersteps[1].messages_delivered, 6u);
  EXPECT_EQ(apps::u32_states(r), (std::vector<std::uint32_t>{0, 0, 0}));
}

TEST(Run, MessageReactivatesAfterDeactivate) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() == 1) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) {
    if (c.superstep() == 0) {
      c.deactivate();
      c.send_update(1, word(0));
    }
  };
  f.run(p);
  ASSERT_EQ(p.at(1).size(), 1u);
  EXPECT_EQ(p.at(1)[0].vertex, 1u);
}

TEST(Run, StateIsZeroedAndPersists) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    EXPECT_EQ(load_as<std::uint32_t>(c.state()), 0u);
    store_as<std::uint32_t>(c.state(), c.vertex() * 10);
    if (c.vertex() == 4) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) {
    EXPECT_EQ(load_as<std::uint32_t>(c.state()), 40u);
    store_as<std::uint32_t>(c.state(), 99);
  };
  auto r = f.run(p);
  EXPECT_EQ(apps::u32_states(r), (std::vector<std::uint32_t>{0, 10, 20, 30, 99, 50}));
}

TEST(Structural, BufferedDeleteIsVisibleBeforeMerge) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() == 2) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) {
    if (c.superstep() == 0) {
      c.delete_edge(2, 3);
      c.send_update(2, word(0));
    }
  };
  auto r = f.run(p);
  ASSERT_EQ(p.at(1).size(), 1u);
  EXPECT_EQ(p.at(0)[0].adjacency, (std::vector<VertexId>{1, 3}));
  EXPECT_EQ(p.at(1)[0].adjacency, (std::vector<VertexId>{1}));
  EXPECT_EQ(r.supersteps[0].merges, 0u);
  EXPECT_EQ(r.final_merges, 1u);
}

TEST(Structural, ThresholdTriggersMerge) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() == 2) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) {
    if (c.superstep() == 0) {
      c.delete_edge(2, 3);
      c.add_edge(2, 5);
      c.send_update(2, word(0));
    }
  };
  auto cfg = f.config();
  cfg.merge_threshold = 2;
  auto r = f.run(p, cfg);
  EXPECT_EQ(r.supersteps[0].structural_ops, 2u);
  EXPECT_EQ(r.supersteps[0].merges, 1u);
  EXPECT_EQ(r.final_merges, 0u);
  EXPECT_EQ(p.at(1)[0].adjacency, (std::vector<VertexId>{1, 5}));
}

TEST(Structural, DeletedVertexNeverRunsAgain) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) { c.activate(); };
  p.on_process = [](VertexContext& c, const Inbox&) {
    if (c.superstep() == 0 && c.vertex() == 3) {
      c.delete_vertex();
      return;
    }
    if (c.superstep() < 2) {
      for (VertexId u : c.adjacency().out_neighbors) c.send_update(u, word(0));
    }
  };
  auto r = f.run(p);
  EXPECT_TRUE(r.deleted.test(3));
  EXPECT_EQ(r.deleted.count(), 1u);
  for (const auto& c : p.calls) {
    if (c.superstep > 0) {
      EXPECT_NE(c.vertex, 3u);
    }
  }
  // 2 and 4 each sent one message to 3 in S0 and in S1.
  EXPECT_EQ(r.supersteps[1].dropped_messages, 2u);
  // Neighbors still see the edge to 3: only 3's own out-edges went away.
  for (const auto& c : p.at(1)) {
    if (c.vertex == 2) {
      EXPECT_EQ(c.adjacency, (std::vector<VertexId>{1, 3}));
    }
  }
}

TEST(Structural, EdgeStateProgramsRejectStructuralOps) {
  Fixture f(test::ring(6));
  Scripted p;
  p.edge_width = 4;
  p.on_init = [](InitContext& c) { c.activate(); };
  p.on_process = [](VertexContext& c, const Inbox&) { c.delete_vertex(); };
  EXPECT_THROW(f.run(p), ContractViolation);
}

TEST(Contract, SendToInvalidVertex) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() == 0) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) { c.send_update(6, word(0)); };
  EXPECT_THROW(f.run(p), ContractViolation);
}

TEST(Contract, WrongPayloadWidth) {
  Fixture f(test::ring(6));
  Scripted p;
  p.on_init = [](InitContext& c) {
    if (c.vertex() == 0) c.activate();
  };
  p.on_process = [](VertexContext& c, const Inbox&) {
    std::array<std::byte, 2> b{};
    c.send_update(1, b);
  };
  EXPECT_THROW(f.run(p), ContractViolation);
}

TEST(Config, Validation) {
  EngineConfig c;
  c.work_dir = "w";
  EXPECT_NO_THROW(c.validate());
  c.sort_fraction = 0.95;
  EXPECT_THROW(c.validate(), ConfigError);
  c.sort_fraction = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = EngineConfig{};
  EXPECT_THROW(c.validate(), ConfigError);  // no work dir
  c.work_dir = "w";
  c.merge_threshold = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = EngineConfig{};
  c.work_dir = "w";
  EXPECT_EQ(c.sort_budget(), (std::uint64_t{3} << 30) / 4);
}

TEST(Config, MultiLogMustHoldOnePagePerInterval) {
  auto g = test::random_graph(400, 4000, 1, false);
  Fixture f(g, test::budget_for_parts(g, 4));
  Scripted p;
  p.on_init = [](InitContext& c) { c.activate(); };
  auto cfg = f.config();
  cfg.memory_budget = 3 * kDefaultPageSize * 20;  // 3 pages at 5%
  EXPECT_THROW(f.run(p, cfg), ConfigError);
}

// Every message sent in S is delivered exactly once in S+1, across
// intervals and with evictions.
TEST(EngineProperty, SynchronousDelivery) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = test::random_graph(300, 1500, seed, false);
    Fixture f(g, test::budget_for_parts(g, 3));
    Scripted p;
    using Key = std::tuple<std::uint64_t, VertexId, VertexId>;  // S, dest, src
    std::map<Key, int> sent;
    p.on_init = [](InitContext& c) { c.activate(); };
    p.on_process = [&](VertexContext& c, const Inbox&) {
      if (c.superstep() >= 4) return;
      const auto k = keyed_hash({seed, c.superstep(), c.vertex()});
      for (std::uint64_t i = 0; i < k % 4; ++i) {
        const auto d = static_cast<VertexId>(keyed_hash({k, i}) % 300);
        c.send_update(d, word(c.vertex()));
        ++sent[{c.superstep() + 1, d, c.vertex()}];
      }
    };
    auto cfg = f.config();
    cfg.memory_budget = 100 * kDefaultPageSize;
    cfg.multilog_fraction = 0.05;
    auto r = f.run(p, cfg);
    std::map<Key, int> got;
    for (const auto& c : p.calls) {
      for (VertexId s : c.srcs) ++got[{c.superstep, c.vertex, s}];
    }
    EXPECT_EQ(got, sent);
    for (std::size_t s = 0; s + 1 < r.supersteps.size(); ++s) {
      EXPECT_EQ(r.supersteps[s].messages_sent, r.supersteps[s + 1].messages_delivered);
    }
  }
}

// With edge logging and combining off, colIdx reads are exactly the pages
// overlapping the active vertices' ranges.
TEST(EngineProperty, StorageIsolation) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto g = test::random_graph(2000, 8000, seed, false);
    Fixture f(g, std::uint64_t{1} << 30, 4096);
    const auto out = test::out_lists(g);
    std::vector<std::uint64_t> begin(g.num_vertices + 1, 0);
    for (VertexId v = 0; v < g.num_vertices; ++v) begin[v + 1] = begin[v] + out[v].size();
    apps::Bfs bfs(static_cast<VertexId>(seed * 13));
    auto cfg = f.config();
    cfg.edge_log = false;
    cfg.combine = false;
    cfg.record_active_sets = true;
    auto r = f.run(bfs, cfg);
    ASSERT_EQ(r.active_sets.size(), r.supersteps.size());
    for (std::size_t s = 0; s < r.supersteps.size(); ++s) {
      std::set<std::uint64_t> pages;
      for (VertexId v = 0; v < g.num_vertices; ++v) {
        if (!r.active_sets[s].test(v) || out[v].empty()) continue;
        for (auto p = begin[v] * 4 / 4096; p <= (begin[v + 1] * 4 - 1) / 4096; ++p) pages.insert(p);
      }
      EXPECT_EQ(r.supersteps[s].colidx_pages_read, pages.size()) << "superstep " << s;
    }
  }
}

}  // namespace
}  // namespace mlvc
