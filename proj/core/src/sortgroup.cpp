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

#include "mlvc/sortgroup.hpp"

#include <algorithm>
#include <cstring>
#include <queue>
#include <string>

#include "mlvc/error.hpp"

namespace mlvc {

void RecordBuffer::append(VertexId dest, VertexId src,
                          std::span<const std::byte> payload) {
  if (payload.size() != payload_width()) {
    throw ContractViolation("payload width mismatch");
  }
  auto at = bytes_.size();
  bytes_.resize(at + width_);
  std::memcpy(bytes_.data() + at, &dest, sizeof(VertexId));
  std::memcpy(bytes_.data() + at + sizeof(VertexId), &src, sizeof(VertexId));
  if (!payload.empty()) {
    std::memcpy(bytes_.data() + at + kRecordHeaderSize, payload.data(),
                payload.size());
  }
}

void RecordBuffer::append_record(std::span<const std::byte> record) {
  if (record.size() != width_) throw ContractViolation("record width mismatch");
  bytes_.insert(bytes_.end(), record.begin(), record.end());
}

void RecordBuffer::append_run(std::span<const std::byte> records,
                              std::size_t count, bool presorted) {
  runs_.push_back({size(), count, presorted});
  bytes_.insert(bytes_.end(), records.begin(),
                records.begin() + static_cast<std::ptrdiff_t>(count * width_));
}

const Group* SortedLog::find(VertexId dest) const {
  auto it = std::lower_bound(
      groups.begin(), groups.end(), dest,
      [](const Group& g, VertexId d) { return g.dest < d; });
  return (it != groups.end() && it->dest == dest) ? &*it : nullptr;
}

std::vector<FusePlan> plan_fusion(std::span<const std::uint64_t> counts,
                                  std::size_t record_width,
                                  std::uint64_t sort_budget) {
  std::vector<FusePlan> plans;
  FusePlan cur;
  auto close = [&] {
    if (cur.intervals.empty()) return;
    while (!cur.intervals.empty() && counts[cur.intervals.back()] == 0) {
      cur.intervals.pop_back();
    }
    if (cur.estimated_bytes > sort_budget) {
      cur.passes = static_cast<std::uint32_t>(
          (cur.estimated_bytes + sort_budget - 1) / std::max<std::uint64_t>(sort_budget, 1));
    }
    plans.push_back(std::move(cur));
    cur = FusePlan{};
  };
  for (IntervalId k = 0; k < counts.size(); ++k) {
    const std::uint64_t bytes = counts[k] * record_width;
    if (cur.intervals.empty()) {
      if (counts[k] == 0) continue;
      cur.intervals.push_back(k);
      cur.estimated_bytes = bytes;
      if (bytes > sort_budget) close();
      continue;
    }
    if (cur.estimated_bytes + bytes <= sort_budget) {
      cur.intervals.push_back(k);
      cur.estimated_bytes += bytes;
    } else {
      close();
      if (counts[k] == 0) continue;
      cur.intervals.push_back(k);
      cur.estimated_bytes = bytes;
      if (bytes > sort_budget) close();
    }
  }
  close();
  return plans;
}

namespace {

template <typename Fn>
void for_each_page(const SealedLog& log, std::size_t page_size,
                   std::size_t record_width, IoCounters* counters, Fn&& fn) {
  if (log.pages.empty()) {
    if (log.message_count != 0) {
      throw CorruptionError("log of interval " + std::to_string(log.interval) +
                            " claims " + std::to_string(log.message_count) +
                            " messages but has no pages");
    }
    return;
  }
  PageStore store(log.file, page_size, OpenMode::kOpen, counters);
  const std::size_t cap = records_per_page(page_size, record_width);
  Page page(page_size);
  std::uint64_t seen = 0;
  for (PageId id : log.pages) {
    if (id >= store.page_count()) {
      throw CorruptionError("manifest names page " + std::to_string(id) +
                            " beyond the end of '" + log.file.string() + "'");
    }
    store.read_page_into(id, page.bytes());
    if (page.record_count() > cap) {
      throw CorruptionError("page " + std::to_string(id) + " of '" +
                            log.file.string() + "' has a bad record count");
    }
    seen += page.record_count();
    fn(page);
  }
  if (seen != log.message_count) {
    throw CorruptionError("log of interval " + std::to_string(log.interval) +
                          " holds " + std::to_string(seen) +
                          " records, manifest says " +
                          std::to_string(log.message_count));
  }
}

}  // namespace

RecordBuffer load_log(const FusePlan& plan, std::span<const SealedLog> sealed,
                      std::size_t page_size, std::size_t record_width,
                      IoCounters* counters, const DestRange* filter) {
  RecordBuffer out(record_width);
  if (!filter) {
    std::uint64_t total = 0;
    for (auto k : plan.intervals) total += sealed[k].message_count;
    out.reserve(total);
  }
  for (IntervalId k : plan.intervals) {
    const auto& log = sealed[k];
    if (log.interval != k) {
      throw CorruptionError("sealed log table is not indexed by interval");
    }
    for_each_page(log, page_size, record_width, counters, [&](const Page& p) {
      auto region = p.record_region();
      if (!filter) {
        out.append_run(region, p.record_count(), p.presorted());
        return;
      }
      for (std::size_t i = 0; i < p.record_count(); ++i) {
        auto rec = region.subspan(i * record_width, record_width);
        if (filter->contains(load_as<VertexId>(rec))) out.append_record(rec);
      }
    });
  }
  return out;
}

std::vector<DestRange> plan_dest_buckets(const SealedLog& log,
                                         DestRange range,
                                         std::size_t page_size,
                                         std::size_t record_width,
                                         std::uint64_t sort_budget,
                                         IoCounters* counters) {
  std::vector<std::uint64_t> hist(range.end - range.begin, 0);
  for_each_page(log, page_size, record_width, counters, [&](const Page& p) {
    auto region = p.record_region();
    for (std::size_t i = 0; i < p.record_count(); ++i) {
      VertexId d = load_as<VertexId>(region, i * record_width);
      if (!range.contains(d)) {
        throw CorruptionError("record for vertex " + std::to_string(d) +
                              " in the log of interval " +
                              std::to_string(log.interval));
      }
      ++hist[d - range.begin];
    }
  });
  std::vector<DestRange> buckets;
  DestRange cur{range.begin, range.begin};
  std::uint64_t used = 0;
  for (VertexId v = range.begin; v < range.end; ++v) {
    std::uint64_t bytes = hist[v - range.begin] * record_width;
    if (bytes > sort_budget) {
      throw ConfigError("inbox of vertex " + std::to_string(v) + " (" +
                        std::to_string(bytes) +
                        " bytes) exceeds the sort budget");
    }
    if (used + bytes > sort_budget) {
      cur.end = v;
      buckets.push_back(cur);
      cur = {v, v};
      used = 0;
    }
    used += bytes;
  }
  cur.end = range.end;
  buckets.push_back(cur);
  return buckets;
}

namespace {

SortedLog group(RecordBuffer sorted) {
  SortedLog out;
  const std::size_t n = sorted.size();
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    VertexId d = sorted.dest(i);
    while (j < n && sorted.dest(j) == d) ++j;
    out.groups.push_back({d, static_cast<std::uint32_t>(i),
                          static_cast<std::uint32_t>(j)});
    i = j;
  }
  out.records = std::move(sorted);
  return out;
}

}  // namespace

SortedLog sort_n_group(RecordBuffer records, DestRange range) {
  const std::size_t n = records.size();
  const std::size_t w = records.width();
  if (n >= (std::size_t{1} << 32)) {
    throw ConfigError("too many records in one sort batch");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!range.contains(records.dest(i))) {
      throw CorruptionError("record for vertex " +
                            std::to_string(records.dest(i)) +
                            " outside the loaded range [" +
                            std::to_string(range.begin) + "," +
                            std::to_string(range.end) + ")");
    }
  }

  const auto& runs = records.runs();
  const bool all_presorted =
      !runs.empty() &&
      std::all_of(runs.begin(), runs.end(), [](const auto& r) { return r.presorted; });

  std::vector<std::uint32_t> order;
  order.reserve(n);
  if (all_presorted) {
    // K-way merge of sorted runs; ties go to the earlier run, which keeps
    // (page ordinal, in-page order) as the stable order.
    using Head = std::pair<std::uint64_t, std::size_t>;  // (dest<<32|run, run)
    std::priority_queue<Head, std::vector<Head>, std::greater<>> heap;
    std::vector<std::size_t> pos(runs.size(), 0);
    auto key = [&](std::size_t r) {
      return (std::uint64_t{records.dest(runs[r].begin + pos[r])} << 32) | r;
    };
    for (std::size_t r = 0; r < runs.size(); ++r) {
      if (runs[r].count > 0) heap.push({key(r), r});
    }
    while (!heap.empty()) {
      auto [k, r] = heap.top();
      heap.pop();
      order.push_back(static_cast<std::uint32_t>(runs[r].begin + pos[r]));
      if (++pos[r] < runs[r].count) heap.push({key(r), r});
    }
  } else {
    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = (std::uint64_t{records.dest(i)} << 32) | i;
    }
    std::sort(keys.begin(), keys.end());
    for (auto k : keys) order.push_back(static_cast<std::uint32_t>(k));
  }

  RecordBuffer sorted(w);
  sorted.reserve(n);
  for (auto i : order) sorted.append_record(records.record(i));
  return group(std::move(sorted));
}

std::vector<VertexId> extract_active(const SortedLog& sorted) {
  std::vector<VertexId> out;
  out.reserve(sorted.groups.size());
  for (const auto& g : sorted.groups) out.push_back(g.dest);
  return out;
}

SortedLog apply_combine(const SortedLog& sorted, const CombineFn& combine) {
  const std::size_t w = sorted.records.width();
  RecordBuffer out(w);
  out.reserve(sorted.groups.size());
  std::vector<std::byte> acc(w);
  SortedLog result;
  for (const auto& g : sorted.groups) {
    auto first = sorted.records.record(g.begin);
    std::copy(first.begin(), first.end(), acc.begin());
    VertexId min_src = sorted.records.src(g.begin);
    auto acc_payload = std::span(acc).subspan(kRecordHeaderSize);
    for (auto i = g.begin + 1; i < g.end; ++i) {
      combine(acc_payload, sorted.records.payload(i));
      min_src = std::min(min_src, sorted.records.src(i));
    }
    store_as<VertexId>(acc, min_src, sizeof(VertexId));
    auto idx = static_cast<std::uint32_t>(out.size());
    out.append_record(acc);
    result.groups.push_back({g.dest, idx, idx + 1});
  }
  result.records = std::move(out);
  return result;
}

}  // namespace mlvc
