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

#include "mlvc/apps.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <map>
#include <set>

#include <json.hpp>

#include "mlvc/error.hpp"
#include "mlvc/hash.hpp"

namespace mlvc::apps {

namespace {

using nlohmann::json;

std::uint32_t u32_at(std::span<const std::byte> b, std::size_t off = 0) {
  return load_as<std::uint32_t>(b, off);
}

void put_u32(std::span<std::byte> b, std::uint32_t v, std::size_t off = 0) {
  store_as<std::uint32_t>(b, v, off);
}

template <typename... Ts>
auto bytes_array(Ts... values) {
  std::array<std::byte, (sizeof(Ts) + ...)> out{};
  std::size_t off = 0;
  ((std::memcpy(out.data() + off, &values, sizeof(Ts)), off += sizeof(Ts)), ...);
  return out;
}

// Writes `value` into every edge slot whose neighbor is `src`.
void record_neighbor(const AdjacencyView& adj, std::span<std::byte> table,
                     VertexId src, std::uint32_t value) {
  const auto& nb = adj.out_neighbors;
  auto [lo, hi] = std::equal_range(nb.begin(), nb.end(), src);
  for (auto it = lo; it != hi; ++it) {
    put_u32(table, value, static_cast<std::size_t>(it - nb.begin()) * 4);
  }
}

void broadcast(VertexContext& ctx, std::span<const std::byte> payload) {
  const VertexId self = ctx.vertex();
  for (VertexId u : ctx.adjacency().out_neighbors) {
    if (u != self) ctx.send_update(u, payload);
  }
}

std::string dump(const json& j) { return j.dump(); }

}  // namespace

// ---- BFS

void Bfs::combine(std::span<std::byte> acc, std::span<const std::byte> in) const {
  put_u32(acc, std::min(u32_at(acc), u32_at(in)));
}

void Bfs::init(InitContext& ctx) const {
  put_u32(ctx.state(), kUnreached);
  if (ctx.vertex() == source_) {
    ctx.send_update(ctx.vertex(), bytes_array(std::uint32_t{0}));
  }
}

void Bfs::process(VertexContext& ctx, const Inbox& inbox) const {
  std::uint32_t best = kUnreached;
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    best = std::min(best, inbox.payload_as<std::uint32_t>(i));
  }
  if (best >= u32_at(ctx.state())) return;
  put_u32(ctx.state(), best);
  auto msg = bytes_array(best + 1);
  for (VertexId u : ctx.adjacency().out_neighbors) ctx.send_update(u, msg);
}

std::string Bfs::summary_json(std::span<const std::byte> states,
                              std::uint64_t n) const {
  std::map<std::uint32_t, std::uint64_t> hist;
  std::uint64_t reached = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    std::uint32_t level = u32_at(states, v * 4);
    if (level == kUnreached) continue;
    ++reached;
    ++hist[level];
  }
  json levels = json::object();
  for (auto [l, c] : hist) levels[std::to_string(l)] = c;
  return dump({{"source", source_},
               {"reached", reached},
               {"unreached", n - reached},
               {"levels_histogram", levels}});
}

// ---- PageRank

void PageRank::combine(std::span<std::byte> acc,
                       std::span<const std::byte> in) const {
  store_as<double>(acc, load_as<double>(acc) + load_as<double>(in));
  put_u32(acc, u32_at(acc, 8) | u32_at(in, 8), 8);
}

void PageRank::init(InitContext& ctx) const {
  store_as<double>(ctx.state(), 0.0, 0);
  store_as<double>(ctx.state(), 1.0 - alpha_, 8);
  ctx.activate();
}

bool PageRank::activates(const Inbox& inbox) const {
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    if (inbox.payload_as<std::uint32_t>(i, 8) != 0) return true;
  }
  return false;
}

void PageRank::absorb(VertexId, std::span<std::byte> state,
                      const Inbox& inbox) const {
  double change = load_as<double>(state, 8);
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    change += inbox.payload_as<double>(i);
  }
  store_as<double>(state, change, 8);
}

void PageRank::process(VertexContext& ctx, const Inbox& inbox) const {
  auto st = ctx.state();
  absorb(ctx.vertex(), st, inbox);
  double rank = load_as<double>(st, 0);
  double change = load_as<double>(st, 8);
  rank += change;
  const auto& nb = ctx.adjacency().out_neighbors;
  if (!nb.empty()) {
    double share = alpha_ * change / static_cast<double>(nb.size());
    auto msg = bytes_array(share, std::uint32_t{change > threshold_ ? 1u : 0u});
    for (VertexId u : nb) ctx.send_update(u, msg);
  }
  store_as<double>(st, rank, 0);
  store_as<double>(st, 0.0, 8);
  ctx.deactivate();
}

std::string PageRank::summary_json(std::span<const std::byte> states,
                                   std::uint64_t n) const {
  double sum = 0.0;
  std::vector<std::pair<double, VertexId>> ranked;
  ranked.reserve(n);
  for (std::uint64_t v = 0; v < n; ++v) {
    double r = load_as<double>(states, v * 16);
    sum += r;
    ranked.emplace_back(r, static_cast<VertexId>(v));
  }
  std::size_t top = std::min<std::size_t>(10, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top),
                    ranked.end(), [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first
                                                : a.second < b.second;
                    });
  json best = json::array();
  for (std::size_t i = 0; i < top; ++i) {
    best.push_back({{"vertex", ranked[i].second}, {"rank", ranked[i].first}});
  }
  return dump({{"alpha", alpha_},
               {"threshold", threshold_},
               {"rank_sum", sum},
               {"top", best}});
}

// ---- FLP

void Flp::init(InitContext& ctx) const {
  put_u32(ctx.state(), ctx.vertex());
  ctx.activate();
}

void Flp::process(VertexContext& ctx, const Inbox& inbox) const {
  const auto& adj = ctx.adjacency();
  auto table = ctx.edge_state();
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    record_neighbor(adj, table, inbox.src(i),
                    inbox.payload_as<std::uint32_t>(i) + 1);
  }
  std::vector<std::uint32_t> labels;
  labels.reserve(adj.out_neighbors.size());
  for (std::size_t i = 0; i < adj.out_neighbors.size(); ++i) {
    VertexId u = adj.out_neighbors[i];
    if (u == ctx.vertex()) continue;
    std::uint32_t e = u32_at(table, i * 4);
    labels.push_back(e == 0 ? u : e - 1);
  }
  ctx.deactivate();
  if (labels.empty()) return;
  std::sort(labels.begin(), labels.end());
  std::uint32_t best = labels[0];
  std::size_t best_count = 0;
  for (std::size_t i = 0; i < labels.size();) {
    std::size_t j = i;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    if (j - i > best_count) {
      best_count = j - i;
      best = labels[i];
    }
    i = j;
  }
  if (best == u32_at(ctx.state())) return;
  put_u32(ctx.state(), best);
  broadcast(ctx, bytes_array(best));
}

std::string Flp::summary_json(std::span<const std::byte> states,
                              std::uint64_t n) const {
  std::map<std::uint32_t, std::uint64_t> sizes;
  for (std::uint64_t v = 0; v < n; ++v) ++sizes[u32_at(states, v * 4)];
  std::uint64_t largest = 0;
  for (auto [l, c] : sizes) largest = std::max(largest, c);
  return dump({{"communities", sizes.size()}, {"largest_community", largest}});
}

// ---- Graph coloring

bool Coloring::outranks(VertexId a, VertexId b) const {
  std::uint64_t ha = keyed_hash({seed_, a});
  std::uint64_t hb = keyed_hash({seed_, b});
  return ha != hb ? ha > hb : a < b;
}

void Coloring::init(InitContext& ctx) const {
  put_u32(ctx.state(), 0);
  ctx.activate();
}

void Coloring::process(VertexContext& ctx, const Inbox& inbox) const {
  const auto& adj = ctx.adjacency();
  const VertexId self = ctx.vertex();
  auto table = ctx.edge_state();
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    record_neighbor(adj, table, inbox.src(i), inbox.payload_as<std::uint32_t>(i));
  }
  ctx.deactivate();
  const std::uint32_t color = u32_at(ctx.state());
  bool conflict = false;
  std::vector<std::uint32_t> taken;
  taken.reserve(adj.out_neighbors.size());
  for (std::size_t i = 0; i < adj.out_neighbors.size(); ++i) {
    VertexId u = adj.out_neighbors[i];
    if (u == self) continue;
    std::uint32_t c = u32_at(table, i * 4);
    taken.push_back(c);
    if (c == color && outranks(u, self)) conflict = true;
  }
  if (!conflict) return;
  // Free colors within the degree+1 palette; after superstep 0 the hash
  // picks one of the two smallest so tied neighbors stop moving in lockstep.
  std::sort(taken.begin(), taken.end());
  const auto palette = static_cast<std::uint32_t>(taken.size()) + 1;
  std::uint32_t free[2] = {0, 0};
  std::size_t found = 0;
  auto it = taken.begin();
  for (std::uint32_t c = 0; c < palette && found < 2; ++c) {
    while (it != taken.end() && *it < c) ++it;
    if (it == taken.end() || *it != c) free[found++] = c;
  }
  const std::uint64_t step = ctx.superstep();
  const std::uint32_t pick =
      step == 0 || found < 2 ? free[0] : free[keyed_hash({seed_, self, step}) % 2];
  put_u32(ctx.state(), pick);
  broadcast(ctx, bytes_array(pick));
}

std::string Coloring::summary_json(std::span<const std::byte> states,
                                   std::uint64_t n) const {
  std::set<std::uint32_t> colors;
  for (std::uint64_t v = 0; v < n; ++v) colors.insert(u32_at(states, v * 4));
  return dump({{"seed", seed_},
               {"colors", colors.size()},
               {"max_color", colors.empty() ? 0u : *colors.rbegin()}});
}

// ---- MIS

bool Mis::outranks(std::uint64_t round, VertexId a, VertexId b) const {
  std::uint64_t ha = keyed_hash({seed_, round, a});
  std::uint64_t hb = keyed_hash({seed_, round, b});
  return ha != hb ? ha > hb : a < b;
}

void Mis::init(InitContext& ctx) const {
  put_u32(ctx.state(), static_cast<std::uint32_t>(MisStatus::kUndecided));
  ctx.activate();
}

void Mis::process(VertexContext& ctx, const Inbox& inbox) const {
  if (u32_at(ctx.state()) != static_cast<std::uint32_t>(MisStatus::kUndecided)) {
    return;
  }
  const VertexId self = ctx.vertex();
  const std::uint64_t step = ctx.superstep();
  const std::uint64_t round = step / 2;
  auto msg_of = [&](std::size_t i) {
    return static_cast<MisMessage>(inbox.payload_as<std::uint32_t>(i));
  };
  if (step % 2 == 0) {
    for (std::size_t i = 0; i < inbox.size(); ++i) {
      if (msg_of(i) == MisMessage::kIn) {
        put_u32(ctx.state(), static_cast<std::uint32_t>(MisStatus::kOut));
        return;
      }
    }
    broadcast(ctx, bytes_array(static_cast<std::uint32_t>(MisMessage::kAnnounce)));
    ctx.send_update(self, bytes_array(static_cast<std::uint32_t>(MisMessage::kSelf)));
    return;
  }
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    if (msg_of(i) == MisMessage::kAnnounce && inbox.src(i) != self &&
        !outranks(round, self, inbox.src(i))) {
      ctx.send_update(self, bytes_array(static_cast<std::uint32_t>(MisMessage::kSelf)));
      return;
    }
  }
  put_u32(ctx.state(), static_cast<std::uint32_t>(MisStatus::kIn));
  broadcast(ctx, bytes_array(static_cast<std::uint32_t>(MisMessage::kIn)));
}

std::string Mis::summary_json(std::span<const std::byte> states,
                              std::uint64_t n) const {
  std::uint64_t in = 0, out = 0, undecided = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    switch (static_cast<MisStatus>(u32_at(states, v * 4))) {
      case MisStatus::kIn: ++in; break;
      case MisStatus::kOut: ++out; break;
      default: ++undecided; break;
    }
  }
  return dump({{"seed", seed_}, {"in_set", in}, {"out", out}, {"undecided", undecided}});
}

// ---- Random walk

RandomWalk::RandomWalk(std::uint64_t seed, std::uint32_t stride,
                       std::uint32_t steps)
    : seed_(seed), stride_(stride), steps_(steps) {
  if (stride_ == 0) throw UsageError("random walk stride must be >= 1");
}

std::size_t RandomWalk::next_hop(std::uint32_t walker, std::uint32_t remaining,
                                 std::size_t degree) const {
  return static_cast<std::size_t>(keyed_hash({seed_, walker, remaining}) % degree);
}

void RandomWalk::init(InitContext& ctx) const {
  if (ctx.vertex() % stride_ != 0) return;
  ctx.send_update(ctx.vertex(), bytes_array(ctx.vertex(), steps_));
}

void RandomWalk::process(VertexContext& ctx, const Inbox& inbox) const {
  const auto& nb = ctx.adjacency().out_neighbors;
  std::uint32_t visits = u32_at(ctx.state());
  for (std::size_t i = 0; i < inbox.size(); ++i) {
    ++visits;
    auto walker = inbox.payload_as<std::uint32_t>(i, 0);
    auto remaining = inbox.payload_as<std::uint32_t>(i, 4);
    if (remaining == 0 || nb.empty()) continue;
    VertexId next = nb[next_hop(walker, remaining, nb.size())];
    ctx.send_update(next, bytes_array(walker, remaining - 1));
  }
  put_u32(ctx.state(), visits);
  ctx.deactivate();
}

std::string RandomWalk::summary_json(std::span<const std::byte> states,
                                     std::uint64_t n) const {
  std::uint64_t total = 0, visited = 0, peak = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    std::uint64_t c = u32_at(states, v * 4);
    total += c;
    if (c > 0) ++visited;
    peak = std::max(peak, c);
  }
  return dump({{"seed", seed_},
               {"stride", stride_},
               {"steps", steps_},
               {"walkers", (n + stride_ - 1) / stride_},
               {"total_visits", total},
               {"visited_vertices", visited},
               {"max_visits", peak}});
}

// ---- K-core

void KCore::init(InitContext& ctx) const {
  put_u32(ctx.state(), 1, 0);
  ctx.activate();
}

void KCore::process(VertexContext& ctx, const Inbox&) const {
  auto st = ctx.state();
  if (u32_at(st, 0) == 0) return;
  const auto& nb = ctx.adjacency().out_neighbors;
  const auto degree = static_cast<std::uint32_t>(nb.size());
  put_u32(st, degree, 4);
  ctx.deactivate();
  if (degree >= k_) return;
  put_u32(st, 0, 0);
  const VertexId self = ctx.vertex();
  const std::vector<VertexId> neighbors = nb;
  ctx.delete_vertex();
  auto note = bytes_array(std::uint32_t{0});
  for (VertexId u : neighbors) {
    if (u == self) continue;
    ctx.delete_edge(u, self);
    ctx.send_update(u, note);
  }
}

std::string KCore::summary_json(std::span<const std::byte> states,
                                std::uint64_t n) const {
  std::uint64_t alive = 0, edges = 0;
  for (std::uint64_t v = 0; v < n; ++v) {
    if (u32_at(states, v * 8) == 0) continue;
    ++alive;
    edges += u32_at(states, v * 8 + 4);
  }
  return dump({{"k", k_}, {"survivors", alive}, {"surviving_edge_slots", edges}});
}

// ---- registry

std::vector<std::string> app_names() {
  return {"bfs", "pagerank", "flp", "gc", "mis", "rw", "kcore"};
}

std::unique_ptr<VertexProgram> make_app(const AppOptions& o,
                                        std::uint64_t num_vertices) {
  const std::string& a = o.name;
  if (a == "bfs") {
    if (o.source >= num_vertices) {
      throw UsageError("bfs source " + std::to_string(o.source) +
                       " is not a vertex of this graph");
    }
    return std::make_unique<Bfs>(o.source);
  }
  if (a == "pagerank" || a == "pr") {
    if (!(o.alpha > 0.0 && o.alpha < 1.0)) {
      throw UsageError("pagerank alpha must be in (0, 1)");
    }
    return std::make_unique<PageRank>(o.alpha, o.threshold);
  }
  if (a == "flp" || a == "cd") return std::make_unique<Flp>();
  if (a == "gc") return std::make_unique<Coloring>(o.seed);
  if (a == "mis") return std::make_unique<Mis>(o.seed);
  if (a == "rw") {
    std::uint32_t stride = o.stride;
    if (stride == 0) {
      stride = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, num_vertices / 100));
    }
    return std::make_unique<RandomWalk>(o.seed, stride, o.steps);
  }
  if (a == "kcore") {
    if (o.k == 0) throw UsageError("kcore needs k >= 1");
    return std::make_unique<KCore>(o.k);
  }
  throw UsageError("unknown app '" + a + "'");
}

std::vector<std::uint32_t> u32_states(const RunResult& r, std::size_t offset) {
  std::vector<std::uint32_t> out(r.num_vertices);
  for (std::uint64_t v = 0; v < r.num_vertices; ++v) {
    out[v] = u32_at(r.states, v * r.state_width + offset);
  }
  return out;
}

std::vector<double> pagerank_ranks(const RunResult& r) {
  std::vector<double> out(r.num_vertices);
  for (std::uint64_t v = 0; v < r.num_vertices; ++v) {
    out[v] = load_as<double>(r.states, v * r.state_width);
  }
  return out;
}

}  // namespace mlvc::apps
