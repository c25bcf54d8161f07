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

#include "mlvc/csr_graph.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>

#include "mlvc/error.hpp"
#include "mlvc/paged_array.hpp"

namespace mlvc {

using nlohmann::json;

IntervalId GraphMeta::interval_of(VertexId v) const {
  auto it = std::upper_bound(interval_bounds.begin(), interval_bounds.end(), v);
  return static_cast<IntervalId>(it - interval_bounds.begin() - 1);
}

void GraphMeta::save(const std::filesystem::path& path) const {
  json j;
  j["num_vertices"] = num_vertices;
  j["num_edges"] = num_edges;
  j["interval_bounds"] = interval_bounds;
  j["interval_in_degree"] = interval_in_degree;
  j["interval_edges"] = interval_edges;
  j["page_size"] = page_size;
  j["value_width"] = value_width;
  j["record_size"] = record_size;
  j["sort_budget"] = sort_budget;
  j["dataset_hash"] = dataset_hash;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

GraphMeta GraphMeta::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  GraphMeta m;
  try {
    json j = json::parse(in);
    m.num_vertices = j.at("num_vertices").get<std::uint64_t>();
    m.num_edges = j.at("num_edges").get<std::uint64_t>();
    m.interval_bounds = j.at("interval_bounds").get<std::vector<VertexId>>();
    m.interval_in_degree =
        j.at("interval_in_degree").get<std::vector<std::uint64_t>>();
    m.interval_edges = j.at("interval_edges").get<std::vector<std::uint64_t>>();
    m.page_size = j.at("page_size").get<std::size_t>();
    m.value_width = j.at("value_width").get<std::size_t>();
    m.record_size = j.at("record_size").get<std::size_t>();
    m.sort_budget = j.at("sort_budget").get<std::uint64_t>();
    m.dataset_hash = j.at("dataset_hash").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw CorruptionError("malformed '" + path.string() + "': " + e.what());
  }
  if (m.interval_bounds.empty() || m.interval_bounds.front() != 0 ||
      m.interval_bounds.back() != m.num_vertices ||
      !std::is_sorted(m.interval_bounds.begin(), m.interval_bounds.end()) ||
      m.interval_edges.size() != m.num_intervals() ||
      m.interval_in_degree.size() != m.num_intervals()) {
    throw CorruptionError("inconsistent interval layout in '" + path.string() +
                          "'");
  }
  return m;
}

GraphMeta partition_vertices(std::span<const std::uint64_t> in_degrees,
                             std::size_t update_record_size,
                             std::uint64_t sort_memory_budget) {
  GraphMeta meta;
  meta.num_vertices = in_degrees.size();
  meta.record_size = update_record_size;
  meta.sort_budget = sort_memory_budget;
  meta.interval_bounds = {0};
  std::uint64_t used = 0;
  std::uint64_t indeg_sum = 0;
  for (std::size_t v = 0; v < in_degrees.size(); ++v) {
    std::uint64_t cost = std::max<std::uint64_t>(in_degrees[v], 1) *
                         update_record_size;
    if (cost > sort_memory_budget) {
      throw OversizedVertexError(
          static_cast<unsigned>(v),
          "vertex " + std::to_string(v) + " needs " + std::to_string(cost) +
              " bytes of inbox but the sort budget is " +
              std::to_string(sort_memory_budget));
    }
    if (used + cost > sort_memory_budget) {
      meta.interval_bounds.push_back(static_cast<VertexId>(v));
      meta.interval_in_degree.push_back(indeg_sum);
      used = 0;
      indeg_sum = 0;
    }
    used += cost;
    indeg_sum += in_degrees[v];
  }
  if (!in_degrees.empty()) {
    meta.interval_bounds.push_back(static_cast<VertexId>(in_degrees.size()));
    meta.interval_in_degree.push_back(indeg_sum);
  }
  meta.interval_edges.assign(meta.num_intervals(), 0);
  return meta;
}

namespace {

std::filesystem::path file_for(const std::filesystem::path& dir,
                               const std::string& stem, const char* ext) {
  return dir / (stem + ext);
}

}  // namespace

CsrPartition CsrPartition::create(const std::filesystem::path& dir,
                                  const std::string& stem, IntervalId interval,
                                  VertexId first_vertex, const Vectors& v,
                                  std::size_t page_size,
                                  std::size_t value_width,
                                  IoCounters* counters) {
  if (v.row_ptr.empty() || v.row_ptr.front() != 0 ||
      v.row_ptr.back() != v.col_idx.size()) {
    throw ContractViolation("row pointer does not frame the column index");
  }
  if (value_width != 0 && value_width != sizeof(float)) {
    throw ConfigError("edge value width must be 0 or 4 bytes");
  }
  if (value_width != 0 && v.values.size() != v.col_idx.size()) {
    throw ContractViolation("edge values not parallel to column index");
  }
  CsrPartition p;
  p.dir_ = dir;
  p.stem_ = stem;
  p.interval_ = interval;
  p.first_ = first_vertex;
  p.count_ = static_cast<VertexId>(v.row_ptr.size() - 1);
  p.edges_ = v.col_idx.size();
  p.value_width_ = value_width;
  p.rowptr_ = std::make_unique<PageStore>(file_for(dir, stem, ".rowptr"),
                                          page_size, OpenMode::kCreate, counters);
  p.colidx_ = std::make_unique<PageStore>(file_for(dir, stem, ".colidx"),
                                          page_size, OpenMode::kCreate, counters);
  p.val_ = std::make_unique<PageStore>(file_for(dir, stem, ".val"), page_size,
                                       OpenMode::kCreate, counters);
  append_raw(*p.rowptr_, std::as_bytes(std::span(v.row_ptr)));
  append_raw(*p.colidx_, std::as_bytes(std::span(v.col_idx)));
  if (value_width != 0) append_raw(*p.val_, std::as_bytes(std::span(v.values)));
  return p;
}

CsrPartition CsrPartition::open(const std::filesystem::path& dir,
                                const std::string& stem, IntervalId interval,
                                VertexId first_vertex, VertexId vertex_count,
                                std::uint64_t edge_count, std::size_t page_size,
                                std::size_t value_width, IoCounters* counters) {
  CsrPartition p;
  p.dir_ = dir;
  p.stem_ = stem;
  p.interval_ = interval;
  p.first_ = first_vertex;
  p.count_ = vertex_count;
  p.edges_ = edge_count;
  p.value_width_ = value_width;
  p.rowptr_ = std::make_unique<PageStore>(file_for(dir, stem, ".rowptr"),
                                          page_size, OpenMode::kOpen, counters);
  p.colidx_ = std::make_unique<PageStore>(file_for(dir, stem, ".colidx"),
                                          page_size, OpenMode::kOpen, counters);
  p.val_ = std::make_unique<PageStore>(file_for(dir, stem, ".val"), page_size,
                                       OpenMode::kOpen, counters);
  auto expect = [&](const PageStore& s, std::uint64_t bytes) {
    if (s.page_count() != pages_for_bytes(bytes, page_size)) {
      throw CorruptionError("'" + s.path().string() + "' has " +
                            std::to_string(s.page_count()) +
                            " pages, expected " +
                            std::to_string(pages_for_bytes(bytes, page_size)));
    }
  };
  expect(*p.rowptr_, (std::uint64_t{vertex_count} + 1) * sizeof(std::uint64_t));
  expect(*p.colidx_, edge_count * sizeof(VertexId));
  expect(*p.val_, edge_count * value_width);
  return p;
}

std::vector<AdjacencyView> CsrPartition::load_adjacency(
    std::span<const VertexId> active) const {
  std::vector<AdjacencyView> out;
  if (active.empty()) return out;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (i > 0 && active[i] <= active[i - 1]) {
      throw ContractViolation("active vertex list is not strictly ascending");
    }
    if (active[i] < first_ || active[i] - first_ >= count_) {
      throw AddressingError("vertex " + std::to_string(active[i]) +
                            " is outside interval " + std::to_string(interval_));
    }
  }
  PagedBytes rows(*rowptr_);
  PagedBytes cols(*colidx_);
  PagedBytes vals(*val_);
  out.reserve(active.size());
  for (VertexId v : active) {
    std::uint64_t local = v - first_;
    std::uint64_t bounds[2];
    rows.read(local * sizeof(std::uint64_t),
              std::as_writable_bytes(std::span(bounds)));
    if (bounds[1] < bounds[0] || bounds[1] > edges_) {
      throw CorruptionError("row pointer of vertex " + std::to_string(v) +
                            " is out of order");
    }
    AdjacencyView view;
    view.vertex = v;
    view.csr_begin = bounds[0];
    std::uint64_t deg = bounds[1] - bounds[0];
    view.out_neighbors.resize(deg);
    cols.read(bounds[0] * sizeof(VertexId),
              std::as_writable_bytes(std::span(view.out_neighbors)));
    if (value_width_ != 0) {
      view.edge_values.resize(deg);
      vals.read(bounds[0] * sizeof(float),
                std::as_writable_bytes(std::span(view.edge_values)));
    }
    out.push_back(std::move(view));
  }
  return out;
}

CsrPartition::Vectors CsrPartition::read_all() const {
  Vectors v;
  v.row_ptr.resize(std::size_t{count_} + 1);
  v.col_idx.resize(edges_);
  PagedBytes rows(*rowptr_);
  rows.read(0, std::as_writable_bytes(std::span(v.row_ptr)));
  PagedBytes cols(*colidx_);
  cols.read(0, std::as_writable_bytes(std::span(v.col_idx)));
  if (value_width_ != 0) {
    v.values.resize(edges_);
    PagedBytes vals(*val_);
    vals.read(0, std::as_writable_bytes(std::span(v.values)));
  }
  return v;
}

std::uint64_t CsrPartition::total_pages() const noexcept {
  return rowptr_->page_count() + colidx_->page_count() + val_->page_count();
}

void CsrPartition::reset_counters() const noexcept {
  rowptr_->reset_counters();
  colidx_->reset_counters();
  val_->reset_counters();
}

std::uint64_t CsrPartition::pages_read() const noexcept {
  return rowptr_->pages_read() + colidx_->pages_read() + val_->pages_read();
}

std::vector<CsrPartition::Vectors> build_partition_vectors(
    const EdgeList& edges, const GraphMeta& meta) {
  for (const auto& e : edges.edges) {
    if (e.src >= meta.num_vertices || e.dst >= meta.num_vertices) {
      throw IngestError("edge (" + std::to_string(e.src) + "," +
                        std::to_string(e.dst) + ") references a vertex outside [0," +
                        std::to_string(meta.num_vertices) + ")");
    }
  }
  std::vector<std::uint32_t> order(edges.edges.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    const auto& x = edges.edges[a];
    const auto& y = edges.edges[b];
    return x.src != y.src ? x.src < y.src : x.dst < y.dst;
  });

  const bool has_values = meta.value_width != 0;
  std::vector<CsrPartition::Vectors> parts(meta.num_intervals());
  std::size_t pos = 0;
  for (IntervalId k = 0; k < meta.num_intervals(); ++k) {
    auto& p = parts[k];
    p.row_ptr.assign(meta.interval_size(k) + 1, 0);
    for (VertexId v = meta.interval_begin(k); v < meta.interval_end(k); ++v) {
      while (pos < order.size() && edges.edges[order[pos]].src == v) {
        const auto& e = edges.edges[order[pos]];
        p.col_idx.push_back(e.dst);
        if (has_values) p.values.push_back(e.value);
        ++pos;
      }
      p.row_ptr[v - meta.interval_begin(k) + 1] = p.col_idx.size();
    }
  }
  return parts;
}

std::vector<CsrPartition> build_partitions(const EdgeList& edges,
                                           GraphMeta& meta,
                                           const std::filesystem::path& dir,
                                           IoCounters* counters) {
  auto vectors = build_partition_vectors(edges, meta);
  std::vector<CsrPartition> parts;
  parts.reserve(vectors.size());
  meta.interval_edges.assign(vectors.size(), 0);
  meta.num_edges = edges.edges.size();
  for (IntervalId k = 0; k < vectors.size(); ++k) {
    meta.interval_edges[k] = vectors[k].col_idx.size();
    parts.push_back(CsrPartition::create(dir, CsrPartition::stem_for(k), k,
                                         meta.interval_begin(k), vectors[k],
                                         meta.page_size, meta.value_width,
                                         counters));
  }
  return parts;
}

MergeResult merge_structural_vectors(
    const CsrPartition::Vectors& base, VertexId first_vertex,
    const std::map<VertexId, std::vector<StructuralOp>>& ops,
    std::uint64_t num_vertices, bool has_values) {
  for (const auto& [v, list] : ops) {
    if (v < first_vertex || v - first_vertex + 1 >= base.row_ptr.size()) {
      throw AddressingError("structural op source " + std::to_string(v) +
                            " is outside the partition");
    }
    for (const auto& op : list) {
      if (op.kind == StructuralOpKind::kAddEdge && op.dst >= num_vertices) {
        throw AddressingError("inserted edge (" + std::to_string(op.src) + "," +
                              std::to_string(op.dst) +
                              ") targets a vertex out of range");
      }
    }
  }
  MergeResult r;
  auto& out = r.vectors;
  const std::size_t n = base.row_ptr.size() - 1;
  out.row_ptr.assign(n + 1, 0);
  std::vector<VertexId> nbrs;
  std::vector<float> vals;
  for (std::size_t i = 0; i < n; ++i) {
    auto b = base.row_ptr[i];
    auto e = base.row_ptr[i + 1];
    auto it = ops.find(static_cast<VertexId>(first_vertex + i));
    if (it == ops.end()) {
      out.col_idx.insert(out.col_idx.end(), base.col_idx.begin() + b,
                         base.col_idx.begin() + e);
      if (has_values) {
        out.values.insert(out.values.end(), base.values.begin() + b,
                          base.values.begin() + e);
      }
    } else {
      nbrs.assign(base.col_idx.begin() + b, base.col_idx.begin() + e);
      if (has_values) vals.assign(base.values.begin() + b, base.values.begin() + e);
      auto a = apply_ops(nbrs, has_values ? &vals : nullptr, it->second);
      r.applied.insertions += a.insertions;
      r.applied.deletions_applied += a.deletions_applied;
      r.applied.missing_deletions += a.missing_deletions;
      out.col_idx.insert(out.col_idx.end(), nbrs.begin(), nbrs.end());
      if (has_values) out.values.insert(out.values.end(), vals.begin(), vals.end());
    }
    out.row_ptr[i + 1] = out.col_idx.size();
  }
  return r;
}

CsrPartition merge_structural_updates(
    const CsrPartition& partition,
    const std::map<VertexId, std::vector<StructuralOp>>& ops,
    std::uint64_t num_vertices, const std::filesystem::path& dir,
    const std::string& stem, OpApplyResult* applied, IoCounters* counters) {
  if (dir == partition.dir() && stem == partition.stem()) {
    throw ContractViolation("merge must write to new files");
  }
  auto base = partition.read_all();
  auto r = merge_structural_vectors(base, partition.first_vertex(), ops,
                                    num_vertices, partition.value_width() != 0);
  if (applied) *applied = r.applied;
  return CsrPartition::create(dir, stem, partition.interval(),
                              partition.first_vertex(), r.vectors,
                              partition.page_size(), partition.value_width(),
                              counters);
}

CsrGraph CsrGraph::open(const std::filesystem::path& dir, IoCounters* counters) {
  CsrGraph g;
  g.dir_ = dir;
  g.meta_ = GraphMeta::load(dir / "meta.json");
  for (IntervalId k = 0; k < g.meta_.num_intervals(); ++k) {
    g.parts_.push_back(CsrPartition::open(
        dir, CsrPartition::stem_for(k), k, g.meta_.interval_begin(k),
        static_cast<VertexId>(g.meta_.interval_size(k)),
        g.meta_.interval_edges[k], g.meta_.page_size, g.meta_.value_width,
        counters));
  }
  return g;
}

CsrGraph CsrGraph::create(const std::filesystem::path& dir,
                          const EdgeList& edges, std::size_t page_size,
                          std::size_t update_record_size,
                          std::uint64_t sort_budget,
                          std::uint64_t dataset_hash, IoCounters* counters) {
  std::filesystem::create_directories(dir);
  CsrGraph g;
  g.dir_ = dir;
  g.meta_ = partition_vertices(edges.in_degrees(), update_record_size,
                               sort_budget);
  g.meta_.page_size = page_size;
  g.meta_.value_width = edges.has_values ? sizeof(float) : 0;
  g.meta_.dataset_hash = dataset_hash;
  g.parts_ = build_partitions(edges, g.meta_, dir, counters);
  g.meta_.save(dir / "meta.json");
  return g;
}

void CsrGraph::replace_partition(IntervalId k, CsrPartition p) {
  meta_.interval_edges.at(k) = p.edge_count();
  std::uint64_t total = 0;
  parts_.at(k) = std::move(p);
  for (const auto& part : parts_) total += part.edge_count();
  meta_.num_edges = total;
}

std::uint64_t CsrGraph::total_pages() const {
  std::uint64_t n = 0;
  for (const auto& p : parts_) n += p.total_pages();
  return n;
}

}  // namespace mlvc
