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

#include "support.hpp"

#include <stdlib.h>

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "mlvc/engine.hpp"
#include "mlvc/hash.hpp"

namespace mlvc::test {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  std::string tmpl = (fs::temp_directory_path() / ("mlvc-" + tag + "-XXXXXX")).string();
  if (::mkdtemp(tmpl.data()) == nullptr) {
    throw std::runtime_error("mkdtemp failed for " + tmpl);
  }
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

EdgeList from_pairs(VertexId n, const std::set<std::pair<VertexId, VertexId>>& pairs,
                    bool symmetric) {
  EdgeList g;
  g.num_vertices = n;
  for (auto [a, b] : pairs) g.edges.push_back({a, b});
  if (symmetric) g.symmetrize();
  return g;
}

}  // namespace

EdgeList ring(VertexId n) {
  std::set<std::pair<VertexId, VertexId>> p;
  for (VertexId v = 0; v < n; ++v) p.insert({v, (v + 1) % n});
  return from_pairs(n, p, true);
}

EdgeList path_graph(VertexId n) {
  std::set<std::pair<VertexId, VertexId>> p;
  for (VertexId v = 0; v + 1 < n; ++v) p.insert({v, v + 1});
  return from_pairs(n, p, true);
}

EdgeList star(VertexId leaves) {
  std::set<std::pair<VertexId, VertexId>> p;
  for (VertexId v = 1; v <= leaves; ++v) p.insert({0, v});
  return from_pairs(leaves + 1, p, true);
}

EdgeList clique(VertexId n) {
  std::set<std::pair<VertexId, VertexId>> p;
  for (VertexId a = 0; a < n; ++a) {
    for (VertexId b = a + 1; b < n; ++b) p.insert({a, b});
  }
  return from_pairs(n, p, true);
}

EdgeList random_graph(VertexId n, std::uint64_t m, std::uint64_t seed,
                      bool symmetric) {
  const std::uint64_t cap = symmetric ? std::uint64_t{n} * (n - 1) / 2
                                      : std::uint64_t{n} * (n - 1);
  m = std::min(m, cap);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::set<std::pair<VertexId, VertexId>> p;
  while (p.size() < m) {
    VertexId a = pick(rng), b = pick(rng);
    if (a == b) continue;
    if (symmetric && a > b) std::swap(a, b);
    p.insert({a, b});
  }
  return from_pairs(n, p, symmetric);
}

EdgeList small_world(VertexId n, unsigned k, double beta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<VertexId> pick(0, n - 1);
  std::set<std::pair<VertexId, VertexId>> p;
  auto key = [](VertexId a, VertexId b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
  };
  for (VertexId v = 0; v < n; ++v) {
    for (unsigned j = 1; j <= k; ++j) {
      VertexId w = static_cast<VertexId>((v + j) % n);
      if (coin(rng) < beta) {
        for (int tries = 0; tries < 16; ++tries) {
          VertexId c = pick(rng);
          if (c != v && !p.count(key(v, c))) {
            w = c;
            break;
          }
        }
      }
      if (w != v) p.insert(key(v, w));
    }
  }
  return from_pairs(n, p, true);
}

std::vector<std::vector<VertexId>> out_lists(const EdgeList& g) {
  std::vector<std::vector<VertexId>> out(g.num_vertices);
  for (const auto& e : g.edges) out[e.src].push_back(e.dst);
  for (auto& l : out) std::sort(l.begin(), l.end());
  return out;
}

std::vector<std::vector<VertexId>> in_lists(const EdgeList& g) {
  std::vector<std::vector<VertexId>> in(g.num_vertices);
  for (const auto& e : g.edges) in[e.dst].push_back(e.src);
  for (auto& l : in) std::sort(l.begin(), l.end());
  return in;
}

CsrGraph make_graph(const fs::path& dir, const EdgeList& g,
                    std::uint64_t sort_budget, std::size_t page_size) {
  return CsrGraph::create(dir, g, page_size, 16, sort_budget);
}

std::uint64_t budget_for_parts(const EdgeList& g, unsigned parts,
                               std::size_t record_size) {
  std::uint64_t total = 0, widest = 1;
  for (auto d : g.in_degrees()) {
    total += std::max<std::uint64_t>(d, 1);
    widest = std::max<std::uint64_t>(widest, d);
  }
  std::uint64_t per = (total + parts - 1) / parts;
  return std::max(per, widest) * record_size;
}

EngineConfig test_config(const fs::path& work, std::uint32_t max_supersteps) {
  EngineConfig c;
  c.work_dir = work;
  c.max_supersteps = max_supersteps;
  return c;
}

RunResult run_app(const fs::path& graph_dir, const VertexProgram& program,
                  const EngineConfig& cfg) {
  Engine engine(graph_dir, cfg);
  return engine.run(program);
}

// ---- oracles

std::vector<std::uint32_t> bfs_oracle(const EdgeList& g, VertexId source) {
  auto out = out_lists(g);
  std::vector<std::uint32_t> level(g.num_vertices, kNoLevel);
  std::deque<VertexId> q{source};
  level[source] = 0;
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    for (VertexId u : out[v]) {
      if (level[u] == kNoLevel) {
        level[u] = level[v] + 1;
        q.push_back(u);
      }
    }
  }
  return level;
}

PageRankOracle pagerank_oracle(const EdgeList& g, double alpha,
                               double threshold, std::uint32_t max_supersteps) {
  const auto out = out_lists(g);
  const std::size_t n = g.num_vertices;
  PageRankOracle r;
  r.rank.assign(n, 0.0);
  r.change.assign(n, 1.0 - alpha);
  std::vector<double> sum(n, 0.0);
  std::vector<char> got(n, 0), flag(n, 0);
  bool pending = true;
  for (std::uint32_t s = 0; s < max_supersteps && pending; ++s) {
    std::vector<double> nsum(n, 0.0);
    std::vector<char> ngot(n, 0), nflag(n, 0);
    pending = false;
    for (std::size_t v = 0; v < n; ++v) {
      const bool runs = s == 0 || (got[v] && flag[v]);
      if (!runs) {
        if (got[v]) r.change[v] += sum[v];
        continue;
      }
      r.change[v] += sum[v];
      r.rank[v] += r.change[v];
      if (!out[v].empty()) {
        const double share = alpha * r.change[v] / static_cast<double>(out[v].size());
        const bool on = r.change[v] > threshold;
        for (VertexId u : out[v]) {
          nsum[u] += share;
          ngot[u] = 1;
          nflag[u] |= on ? 1 : 0;
          pending = true;
        }
      }
      r.change[v] = 0.0;
    }
    sum.swap(nsum);
    got.swap(ngot);
    flag.swap(nflag);
    r.supersteps = s + 1;
  }
  return r;
}

namespace {

// Mode of `labels`, smallest on ties.
std::uint32_t mode_of(std::vector<std::uint32_t> labels) {
  std::map<std::uint32_t, std::size_t> freq;
  for (auto l : labels) ++freq[l];
  std::uint32_t best = 0;
  std::size_t best_n = 0;
  for (auto [l, c] : freq) {
    if (c > best_n) {
      best = l;
      best_n = c;
    }
  }
  return best;
}

bool gc_outranks(std::uint64_t seed, VertexId a, VertexId b) {
  const auto ha = keyed_hash({seed, a}), hb = keyed_hash({seed, b});
  return ha != hb ? ha > hb : a < b;
}

bool mis_outranks(std::uint64_t seed, std::uint64_t round, VertexId a,
                  VertexId b) {
  const auto ha = keyed_hash({seed, round, a}), hb = keyed_hash({seed, round, b});
  return ha != hb ? ha > hb : a < b;
}

}  // namespace

LabelOracle flp_oracle(const EdgeList& g, std::uint32_t max_supersteps) {
  const auto out = out_lists(g);
  const std::size_t n = g.num_vertices;
  LabelOracle r;
  r.values.resize(n);
  for (std::size_t v = 0; v < n; ++v) r.values[v] = static_cast<std::uint32_t>(v);
  std::vector<std::map<VertexId, std::uint32_t>> heard(n);
  using Msg = std::pair<VertexId, std::uint32_t>;
  std::vector<std::vector<Msg>> inbox(n);
  for (std::uint32_t s = 0; s < max_supersteps; ++s) {
    bool any = s == 0;
    for (const auto& b : inbox) any = any || !b.empty();
    if (!any) break;
    std::vector<std::vector<Msg>> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (s > 0 && inbox[v].empty()) continue;
      for (auto [src, label] : inbox[v]) heard[v][src] = label;
      std::vector<std::uint32_t> labels;
      for (VertexId u : out[v]) {
        if (u == v) continue;
        auto it = heard[v].find(u);
        labels.push_back(it == heard[v].end() ? u : it->second);
      }
      if (labels.empty()) continue;
      const std::uint32_t best = mode_of(labels);
      if (best == r.values[v]) continue;
      r.values[v] = best;
      for (VertexId u : out[v]) {
        if (u != v) next[u].push_back({static_cast<VertexId>(v), best});
      }
    }
    inbox.swap(next);
    r.supersteps = s + 1;
  }
  return r;
}

LabelOracle gc_oracle(const EdgeList& g, std::uint64_t seed,
                      std::uint32_t max_supersteps) {
  const auto out = out_lists(g);
  const std::size_t n = g.num_vertices;
  LabelOracle r;
  r.values.assign(n, 0);
  std::vector<std::map<VertexId, std::uint32_t>> heard(n);
  using Msg = std::pair<VertexId, std::uint32_t>;
  std::vector<std::vector<Msg>> inbox(n);
  for (std::uint32_t s = 0; s < max_supersteps; ++s) {
    bool any = s == 0;
    for (const auto& b : inbox) any = any || !b.empty();
    if (!any) break;
    std::vector<std::vector<Msg>> next(n);
    for (std::size_t v = 0; v < n; ++v) {
      if (s > 0 && inbox[v].empty()) continue;
      for (auto [src, c] : inbox[v]) heard[v][src] = c;
      const auto self = static_cast<VertexId>(v);
      bool clash = false;
      std::set<std::uint32_t> used;
      std::uint32_t used_slots = 0;  // palette is 0..degree
      for (VertexId u : out[v]) {
        if (u == self) continue;
        ++used_slots;
        auto it = heard[v].find(u);
        const std::uint32_t c = it == heard[v].end() ? 0 : it->second;
        used.insert(c);
        if (c == r.values[v] && gc_outranks(seed, u, self)) clash = true;
      }
      if (!clash) continue;
      std::vector<std::uint32_t> free;
      for (std::uint32_t c = 0; c <= used_slots && free.size() < 2; ++c) {
        if (!used.count(c)) free.push_back(c);
      }
      std::uint32_t pick = free[0];
      if (s > 0 && free.size() == 2) pick = free[keyed_hash({seed, self, s}) % 2];
      r.values[v] = pick;
      for (VertexId u : out[v]) {
        if (u != self) next[u].push_back({self, pick});
      }
    }
    inbox.swap(next);
    r.supersteps = s + 1;
  }
  return r;
}

LabelOracle mis_oracle(const EdgeList& g, std::uint64_t seed,
                       std::uint32_t max_supersteps) {
  const auto out = out_lists(g);
  const auto in = in_lists(g);
  const std::size_t n = g.num_vertices;
  LabelOracle r;
  r.values.assign(n, 0);
  std::vector<VertexId> undecided(n);
  for (std::size_t v = 0; v < n; ++v) undecided[v] = static_cast<VertexId>(v);
  std::vector<char> joined_last(n, 0);
  auto has_other_out = [&](VertexId v) {
    for (VertexId u : out[v]) {
      if (u != v) return true;
    }
    return false;
  };
  bool pending = true;  // messages waiting for the next superstep
  std::uint32_t s = 0;
  for (std::uint64_t round = 0;; ++round) {
    // Even superstep: drop out next to a fresh member, otherwise announce.
    if (s >= max_supersteps || !(pending || s == 0)) break;
    std::vector<VertexId> announcing;
    for (VertexId v : undecided) {
      bool beaten = false;
      for (VertexId j : in[v]) beaten = beaten || (j != v && joined_last[j]);
      if (beaten) {
        r.values[v] = 2;
      } else {
        announcing.push_back(v);
      }
    }
    std::fill(joined_last.begin(), joined_last.end(), 0);
    pending = !announcing.empty();
    r.supersteps = ++s;

    // Odd superstep: join when outranking every announcing in-neighbor.
    if (s >= max_supersteps || !pending) break;
    std::vector<char> ann(n, 0);
    for (VertexId v : announcing) ann[v] = 1;
    std::vector<VertexId> rest;
    pending = false;
    for (VertexId v : announcing) {
      bool wins = true;
      for (VertexId u : in[v]) {
        if (u != v && ann[u] && !mis_outranks(seed, round, v, u)) wins = false;
      }
      if (wins) {
        r.values[v] = 1;
        joined_last[v] = 1;
        pending = pending || has_other_out(v);
      } else {
        rest.push_back(v);
        pending = true;
      }
    }
    undecided.swap(rest);
    r.supersteps = ++s;
  }
  return r;
}

std::vector<std::uint32_t> rw_oracle(const EdgeList& g, std::uint64_t seed,
                                     std::uint32_t stride, std::uint32_t steps,
                                     std::uint32_t max_supersteps) {
  const auto out = out_lists(g);
  std::vector<std::uint32_t> visits(g.num_vertices, 0);
  for (VertexId w = 0; w < g.num_vertices; w += stride) {
    VertexId at = w;
    std::uint32_t left = steps;
    for (std::uint32_t s = 0; s < max_supersteps; ++s) {
      ++visits[at];
      if (left == 0 || out[at].empty()) break;
      at = out[at][keyed_hash({seed, w, left}) % out[at].size()];
      --left;
    }
  }
  return visits;
}

CoreOracle kcore_oracle(const EdgeList& g, std::uint32_t k) {
  const auto out = out_lists(g);
  const std::size_t n = g.num_vertices;
  CoreOracle r;
  r.alive.assign(n, true);
  r.degree.resize(n);
  std::deque<VertexId> q;
  for (std::size_t v = 0; v < n; ++v) {
    r.degree[v] = static_cast<std::uint32_t>(out[v].size());
    if (r.degree[v] < k) {
      r.alive[v] = false;
      q.push_back(static_cast<VertexId>(v));
    }
  }
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop_front();
    for (VertexId u : out[v]) {
      if (!r.alive[u]) continue;
      if (--r.degree[u] < k) {
        r.alive[u] = false;
        q.push_back(u);
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!r.alive[v]) r.degree[v] = 0;
  }
  return r;
}

bool proper_coloring(const EdgeList& g, const std::vector<std::uint32_t>& color) {
  for (const auto& e : g.edges) {
    if (e.src != e.dst && color[e.src] == color[e.dst]) return false;
  }
  return true;
}

bool independent(const EdgeList& g, const std::vector<std::uint32_t>& status) {
  for (const auto& e : g.edges) {
    if (e.src != e.dst && status[e.src] == 1 && status[e.dst] == 1) return false;
  }
  return true;
}

bool maximal(const EdgeList& g, const std::vector<std::uint32_t>& status) {
  std::vector<char> covered(g.num_vertices, 0);
  for (std::size_t v = 0; v < status.size(); ++v) covered[v] = status[v] == 1;
  for (const auto& e : g.edges) {
    if (status[e.src] == 1) covered[e.dst] = 1;
    if (status[e.dst] == 1) covered[e.src] = 1;
  }
  return std::all_of(covered.begin(), covered.end(), [](char c) { return c != 0; });
}

}  // namespace mlvc::test
