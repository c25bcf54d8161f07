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

#include "mlvc/shard_baseline.hpp"

#include <algorithm>
#include <fstream>
#include <string>

#include <json.hpp>

#include "mlvc/error.hpp"

namespace mlvc {

namespace {

std::filesystem::path shard_file(const std::filesystem::path& dir, std::size_t k) {
  return dir / ("shard" + std::to_string(k) + ".bin");
}

}  // namespace

std::uint64_t ShardSet::total_pages() const {
  std::uint64_t n = 0;
  for (auto p : pages) n += p;
  return n;
}

std::size_t ShardSet::shard_of(VertexId dst) const {
  auto it = std::upper_bound(bounds.begin(), bounds.end(), dst);
  if (it == bounds.begin() || it == bounds.end()) {
    throw AddressingError("vertex " + std::to_string(dst) + " is in no shard");
  }
  return static_cast<std::size_t>(it - bounds.begin()) - 1;
}

std::vector<VertexId> balance_shards(std::span<const std::uint64_t> in_degrees,
                                     std::size_t num_shards) {
  if (num_shards == 0) throw ConfigError("need at least one shard");
  std::uint64_t total = 0;
  for (auto d : in_degrees) total += d;
  std::vector<VertexId> bounds{0};
  std::uint64_t acc = 0;
  const auto n = static_cast<VertexId>(in_degrees.size());
  for (VertexId v = 0; v < n && bounds.size() < num_shards; ++v) {
    acc += in_degrees[v];
    if (acc * num_shards >= total * bounds.size()) bounds.push_back(v + 1);
  }
  while (bounds.size() < num_shards) bounds.push_back(n);
  bounds.push_back(n);
  return bounds;
}

ShardSet build_shards(const EdgeList& edges, std::size_t num_shards,
                      const std::filesystem::path& dir, std::size_t page_size,
                      IoCounters* counters) {
  std::filesystem::create_directories(dir);
  ShardSet set;
  set.page_size = page_size;
  auto indeg = edges.in_degrees();
  set.bounds = balance_shards(indeg, num_shards);
  std::vector<std::vector<std::pair<VertexId, VertexId>>> buckets(num_shards);
  for (const Edge& e : edges.edges) {
    if (e.src >= edges.num_vertices || e.dst >= edges.num_vertices) {
      throw IngestError("edge (" + std::to_string(e.src) + ", " +
                        std::to_string(e.dst) + ") is out of range");
    }
    buckets[set.shard_of(e.dst)].emplace_back(e.src, e.dst);
  }
  nlohmann::json manifest;
  manifest["page_size"] = page_size;
  manifest["bounds"] = set.bounds;
  manifest["shards"] = nlohmann::json::array();
  for (std::size_t s = 0; s < num_shards; ++s) {
    auto& b = buckets[s];
    std::sort(b.begin(), b.end());
    std::vector<std::byte> bytes(b.size() * kShardRecordSize);
    std::vector<VertexId> srcs;
    for (std::size_t i = 0; i < b.size(); ++i) {
      store_as<VertexId>(bytes, b[i].first, i * kShardRecordSize);
      store_as<VertexId>(bytes, b[i].second, i * kShardRecordSize + 4);
      if (srcs.empty() || srcs.back() != b[i].first) srcs.push_back(b[i].first);
    }
    PageStore store(shard_file(dir, s), page_size, OpenMode::kCreate, counters);
    append_raw(store, bytes);
    set.edges.push_back(b.size());
    set.pages.push_back(store.page_count());
    set.sources.push_back(std::move(srcs));
    manifest["shards"].push_back(
        {{"file", shard_file(dir, s).filename().string()},
         {"edges", b.size()},
         {"pages", store.page_count()}});
  }
  std::ofstream out(dir / "shards.json");
  out << manifest.dump(2) << "\n";
  if (!out) throw IoError("cannot write shard manifest in " + dir.string());
  return set;
}

ShardSet open_shards(const std::filesystem::path& dir) {
  std::ifstream in(dir / "shards.json");
  if (!in) throw IoError("cannot open " + (dir / "shards.json").string());
  nlohmann::json m;
  try {
    in >> m;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError("shard manifest: " + std::string(e.what()));
  }
  ShardSet set;
  set.page_size = m.at("page_size").get<std::size_t>();
  set.bounds = m.at("bounds").get<std::vector<VertexId>>();
  for (std::size_t s = 0; s < m.at("shards").size(); ++s) {
    const auto& j = m["shards"][s];
    const auto edges = j.at("edges").get<std::uint64_t>();
    PageStore store(dir / j.at("file").get<std::string>(), set.page_size,
                    OpenMode::kOpen);
    if (store.page_count() != j.at("pages").get<std::uint64_t>() ||
        pages_for_bytes(edges * kShardRecordSize, set.page_size) != store.page_count()) {
      throw CorruptionError("shard " + std::to_string(s) + " page count mismatch");
    }
    std::vector<VertexId> srcs;
    std::vector<std::byte> page(set.page_size);
    std::uint64_t seen = 0;
    const std::size_t per_page = set.page_size / kShardRecordSize;
    for (PageId p = 0; p < store.page_count(); ++p) {
      store.read_page_into(p, page);
      for (std::size_t i = 0; i < per_page && seen < edges; ++i, ++seen) {
        VertexId src = load_as<VertexId>(page, i * kShardRecordSize);
        if (!srcs.empty() && src < srcs.back()) {
          throw CorruptionError("shard " + std::to_string(s) + " is not sorted by source");
        }
        if (srcs.empty() || srcs.back() != src) srcs.push_back(src);
      }
    }
    set.edges.push_back(edges);
    set.pages.push_back(store.page_count());
    set.sources.push_back(std::move(srcs));
  }
  if (set.bounds.size() != set.edges.size() + 1) {
    throw CorruptionError("shard manifest bounds do not match shard count");
  }
  return set;
}

std::uint64_t superstep_page_cost(const ShardSet& shards, const Bitset& active) {
  std::uint64_t cost = 0;
  for (std::size_t s = 0; s < shards.num_shards(); ++s) {
    bool load = false;
    for (VertexId v = shards.bounds[s]; v < shards.bounds[s + 1] && !load; ++v) {
      load = active.test(v);
    }
    for (std::size_t i = 0; i < shards.sources[s].size() && !load; ++i) {
      load = active.test(shards.sources[s][i]);
    }
    if (load) cost += shards.pages[s];
  }
  return cost;
}

EdgeList load_edges(const CsrGraph& graph) {
  EdgeList out;
  out.num_vertices = static_cast<VertexId>(graph.meta().num_vertices);
  out.has_values = graph.meta().value_width != 0;
  for (IntervalId k = 0; k < graph.num_intervals(); ++k) {
    const auto& part = graph.partition(k);
    auto vec = part.read_all();
    for (VertexId i = 0; i < part.vertex_count(); ++i) {
      for (std::uint64_t e = vec.row_ptr[i]; e < vec.row_ptr[i + 1]; ++e) {
        out.edges.push_back({part.first_vertex() + i, vec.col_idx[e],
                             out.has_values ? vec.values[e] : 0.0f});
      }
    }
  }
  return out;
}

}  // namespace mlvc
