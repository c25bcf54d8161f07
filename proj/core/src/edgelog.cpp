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

#include "mlvc/edgelog.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "mlvc/error.hpp"

namespace mlvc {

ActivityHistory::ActivityHistory(std::size_t num_vertices, std::size_t depth)
    : n_(num_vertices), depth_(depth) {
  if (depth_ == 0) throw ConfigError("activity history depth must be >= 1");
}

void ActivityHistory::record(Bitset active) {
  if (active.size() != n_) {
    throw ContractViolation("activity vector length differs from vertex count");
  }
  ring_.push_back(std::move(active));
  while (ring_.size() > depth_) ring_.pop_front();
}

bool ActivityHistory::predict_active(VertexId v) const {
  return std::any_of(ring_.begin(), ring_.end(),
                     [v](const Bitset& b) { return b.test(v); });
}

Bitset ActivityHistory::predicted() const {
  Bitset out(n_);
  for (const auto& b : ring_) out |= b;
  return out;
}

bool classify_inefficient(const PageUsage& usage, double threshold) {
  if (usage.bytes_useful == 0 || usage.bytes_total == 0) return false;
  return static_cast<double>(usage.bytes_useful) <
         threshold * static_cast<double>(usage.bytes_total);
}

void PageUsageStats::add_range(IntervalId k, std::uint64_t begin,
                               std::uint64_t len) {
  std::uint64_t end = begin + len;
  while (begin < end) {
    PageId p = begin / page_size_;
    std::uint64_t page_end = (p + 1) * page_size_;
    std::uint64_t n = std::min(end, page_end) - begin;
    useful_[{k, p}] += n;
    begin += n;
  }
}

PageUsage PageUsageStats::usage(IntervalId k, PageId page) const {
  auto it = useful_.find({k, page});
  return {it == useful_.end() ? 0 : it->second, page_size_};
}

bool PageUsageStats::touches_inefficient(IntervalId k, std::uint64_t begin,
                                         std::uint64_t len,
                                         double threshold) const {
  if (len == 0) return false;
  for (PageId p = begin / page_size_; p <= (begin + len - 1) / page_size_; ++p) {
    if (classify_inefficient(usage(k, p), threshold)) return true;
  }
  return false;
}

std::uint64_t PageUsageStats::inefficient_pages(double threshold) const {
  std::uint64_t n = 0;
  for (const auto& [key, useful] : useful_) {
    if (classify_inefficient({useful, page_size_}, threshold)) ++n;
  }
  return n;
}

EdgeLogWriter::EdgeLogWriter(std::filesystem::path path, std::size_t page_size,
                             std::uint64_t byte_budget, bool has_values,
                             IoCounters* counters)
    : path_(std::move(path)),
      page_size_(page_size),
      budget_(byte_budget),
      has_values_(has_values),
      counters_(counters),
      tail_(page_size) {}

void EdgeLogWriter::put(std::span<const std::byte> bytes) {
  while (!bytes.empty()) {
    std::size_t n = std::min(bytes.size(), page_size_ - tail_fill_);
    std::memcpy(tail_.bytes().data() + tail_fill_, bytes.data(), n);
    tail_fill_ += n;
    bytes = bytes.subspan(n);
    if (tail_fill_ == page_size_) {
      if (!store_) {
        store_ = std::make_unique<PageStore>(path_, page_size_,
                                             OpenMode::kCreate, counters_);
      }
      store_->append_page(tail_);
      tail_.zero();
      tail_fill_ = 0;
    }
  }
}

bool EdgeLogWriter::append(const AdjacencyView& adj) {
  const std::uint64_t deg = adj.out_neighbors.size();
  const std::uint64_t len =
      16 + deg * sizeof(VertexId) + (has_values_ ? deg * sizeof(float) : 0);
  std::lock_guard lock(mu_);
  if (exhausted_ || bytes_ + len > budget_) {
    exhausted_ = true;
    ++dropped_;
    return false;
  }
  const std::uint64_t offset = bytes_;
  std::byte head[16];
  std::uint32_t deg32 = static_cast<std::uint32_t>(deg);
  std::memcpy(head, &adj.vertex, 4);
  std::memcpy(head + 4, &deg32, 4);
  std::memcpy(head + 8, &adj.csr_begin, 8);
  put(head);
  put(std::as_bytes(std::span(adj.out_neighbors)));
  if (has_values_) {
    if (adj.edge_values.size() != deg) {
      throw ContractViolation("edge values missing for logged adjacency");
    }
    put(std::as_bytes(std::span(adj.edge_values)));
  }
  bytes_ += len;
  index_[adj.vertex] = {offset, len};
  return true;
}

void EdgeLogWriter::invalidate(VertexId v) {
  std::lock_guard lock(mu_);
  index_.erase(v);
}

std::uint64_t EdgeLogWriter::bytes_logged() const {
  std::lock_guard lock(mu_);
  return bytes_;
}
std::uint64_t EdgeLogWriter::entries() const {
  std::lock_guard lock(mu_);
  return index_.size();
}
std::uint64_t EdgeLogWriter::dropped() const {
  std::lock_guard lock(mu_);
  return dropped_;
}
bool EdgeLogWriter::exhausted() const {
  std::lock_guard lock(mu_);
  return exhausted_;
}

EdgeLogReader EdgeLogWriter::finish() {
  std::lock_guard lock(mu_);
  if (tail_fill_ > 0) {
    if (!store_) {
      store_ = std::make_unique<PageStore>(path_, page_size_, OpenMode::kCreate,
                                           counters_);
    }
    store_->append_page(tail_);
    tail_.zero();
    tail_fill_ = 0;
  }
  EdgeLogReader r;
  r.path_ = path_;
  r.has_values_ = has_values_;
  for (const auto& [v, ref] : index_) r.index_[v] = {ref.offset, ref.length};
  index_.clear();
  if (store_) {
    r.store_ = std::move(store_);
    r.window_ = std::make_unique<PagedBytes>(*r.store_);
  }
  return r;
}

EdgeLogReader::EdgeLogReader(EdgeLogReader&&) noexcept = default;
EdgeLogReader& EdgeLogReader::operator=(EdgeLogReader&&) noexcept = default;
EdgeLogReader::~EdgeLogReader() = default;

bool EdgeLogReader::contains(VertexId v) const {
  std::lock_guard lock(*mu_);
  return index_.contains(v);
}

std::size_t EdgeLogReader::size() const {
  std::lock_guard lock(*mu_);
  return index_.size();
}

void EdgeLogReader::invalidate(VertexId v) {
  std::lock_guard lock(*mu_);
  index_.erase(v);
}

void EdgeLogReader::invalidate_range(VertexId begin, VertexId end) {
  std::lock_guard lock(*mu_);
  std::erase_if(index_, [&](const auto& kv) {
    return kv.first >= begin && kv.first < end;
  });
}

std::optional<AdjacencyView> EdgeLogReader::fetch(VertexId v) {
  Ref ref;
  {
    std::lock_guard lock(*mu_);
    auto it = index_.find(v);
    if (it == index_.end()) return std::nullopt;
    ref = it->second;
  }
  if (!window_ || ref.offset + ref.length > store_->page_count() * store_->page_size()) {
    throw CorruptionError("edge-log index points past the end of '" +
                          path_.string() + "'");
  }
  std::vector<std::byte> buf(ref.length);
  window_->read(ref.offset, buf);
  AdjacencyView adj;
  adj.vertex = load_as<VertexId>(buf, 0);
  auto deg = load_as<std::uint32_t>(buf, 4);
  adj.csr_begin = load_as<std::uint64_t>(buf, 8);
  const std::uint64_t expect =
      16 + std::uint64_t{deg} * (has_values_ ? 8 : 4);
  if (adj.vertex != v || expect != ref.length) {
    throw CorruptionError("edge-log entry for vertex " + std::to_string(v) +
                          " does not match its index");
  }
  adj.out_neighbors.resize(deg);
  std::memcpy(adj.out_neighbors.data(), buf.data() + 16, deg * sizeof(VertexId));
  if (has_values_) {
    adj.edge_values.resize(deg);
    std::memcpy(adj.edge_values.data(), buf.data() + 16 + deg * sizeof(VertexId),
                deg * sizeof(float));
  }
  return adj;
}

void EdgeLogReader::release_pages() {
  if (window_) window_->clear();
}

std::uint64_t EdgeLogReader::pages_read() const noexcept {
  return store_ ? store_->pages_read() : 0;
}

void EdgeLogReader::discard() {
  window_.reset();
  if (store_) {
    auto p = store_->path();
    store_.reset();
    std::error_code ec;
    std::filesystem::remove(p, ec);
  }
  index_.clear();
}

bool maybe_log_edges(const AdjacencyView& adj, IntervalId interval,
                     const ActivityHistory& history,
                     const PageUsageStats& usage, double threshold,
                     EdgeLogWriter& writer) {
  if (!history.predict_active(adj.vertex)) return false;
  const std::uint64_t begin = adj.csr_begin * sizeof(VertexId);
  const std::uint64_t len = adj.out_neighbors.size() * sizeof(VertexId);
  if (!usage.touches_inefficient(interval, begin, len, threshold)) return false;
  return writer.append(adj);
}

std::vector<AdjacencyView> fetch_adjacency(std::span<const VertexId> active,
                                           EdgeLogReader* reader,
                                           const CsrPartition& csr,
                                           std::uint64_t* served_from_log) {
  std::vector<AdjacencyView> out(active.size());
  std::vector<VertexId> from_csr;
  std::vector<std::size_t> slots;
  std::uint64_t logged = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    std::optional<AdjacencyView> hit;
    if (reader) hit = reader->fetch(active[i]);
    if (hit) {
      out[i] = std::move(*hit);
      ++logged;
    } else {
      from_csr.push_back(active[i]);
      slots.push_back(i);
    }
  }
  auto loaded = csr.load_adjacency(from_csr);
  for (std::size_t j = 0; j < loaded.size(); ++j) out[slots[j]] = std::move(loaded[j]);
  if (served_from_log) *served_from_log += logged;
  return out;
}

}  // namespace mlvc
