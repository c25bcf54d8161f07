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

#include "mlvc/multilog.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <numeric>

#include "mlvc/error.hpp"

namespace mlvc {

void presort_page(Page& page, std::size_t record_width) {
  const std::size_t n = page.record_count();
  auto region = page.record_region();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  auto dest = [&](std::uint32_t i) {
    return load_as<VertexId>(region, i * record_width);
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return dest(a) < dest(b); });
  std::vector<std::byte> sorted(n * record_width);
  for (std::size_t i = 0; i < n; ++i) {
    std::memcpy(sorted.data() + i * record_width,
                region.data() + order[i] * record_width, record_width);
  }
  std::memcpy(region.data(), sorted.data(), sorted.size());
  page.set_presorted(true);
}

void write_manifest(const std::filesystem::path& path,
                    std::span<const SealedLog> logs) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& l : logs) {
    j.push_back({{"interval", l.interval},
                 {"superstep", l.superstep},
                 {"file", l.file.filename().string()},
                 {"pages", l.pages},
                 {"message_count", l.message_count}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest '" + path.string() + "'");
  out << j.dump(1) << '\n';
}

std::vector<SealedLog> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest '" + path.string() + "'");
  std::vector<SealedLog> logs;
  try {
    auto j = nlohmann::json::parse(in);
    for (const auto& e : j) {
      SealedLog l;
      l.interval = e.at("interval").get<IntervalId>();
      l.superstep = e.at("superstep").get<std::uint64_t>();
      l.file = path.parent_path() / e.at("file").get<std::string>();
      l.pages = e.at("pages").get<std::vector<PageId>>();
      l.message_count = e.at("message_count").get<std::uint64_t>();
      logs.push_back(std::move(l));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptionError("malformed manifest '" + path.string() +
                          "': " + e.what());
  }
  return logs;
}

void discard_log(const SealedLog& log) {
  std::error_code ec;
  if (!log.pages.empty()) std::filesystem::remove(log.file, ec);
}

struct MultiLog::IntervalLog {
  mutable std::mutex mu;
  std::uint64_t superstep = 0;
  std::unique_ptr<Page> top;
  std::uint32_t fill = 0;
  std::unique_ptr<PageStore> store;
  std::vector<PageId> chain;
  std::uint64_t message_count = 0;
};

MultiLog::MultiLog(std::vector<VertexId> interval_bounds, MultiLogConfig config,
                   IoCounters* counters)
    : bounds_(std::move(interval_bounds)),
      config_(std::move(config)),
      counters_(counters),
      record_width_(record_width_for(config_.payload_width)),
      per_page_(mlvc::records_per_page(config_.page_size, record_width_)),
      budget_pages_(config_.buffer_budget / config_.page_size) {
  if (bounds_.empty()) throw ConfigError("interval bounds must not be empty");
  const std::size_t n = bounds_.size() - 1;
  if (budget_pages_ < n) {
    throw ConfigError("multi-log buffer of " +
                      std::to_string(config_.buffer_budget) +
                      " bytes holds fewer than one page per interval (" +
                      std::to_string(n) + " intervals)");
  }
  if (!(config_.low_watermark > 0.0 && config_.low_watermark <= 1.0)) {
    throw ConfigError("low watermark must be in (0, 1]");
  }
  logs_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) logs_.push_back(std::make_unique<IntervalLog>());
  std::filesystem::create_directories(config_.dir);
}

MultiLog::~MultiLog() = default;

IntervalId MultiLog::interval_of(VertexId v) const {
  auto it = std::upper_bound(bounds_.begin(), bounds_.end(), v);
  return static_cast<IntervalId>(it - bounds_.begin() - 1);
}

std::filesystem::path MultiLog::file_for(IntervalId k,
                                         std::uint64_t superstep) const {
  return config_.dir /
         ("log." + std::to_string(superstep) + "." + std::to_string(k));
}

void MultiLog::flush_top_locked(IntervalId k, IntervalLog& log) {
  if (!log.top || log.fill == 0) return;
  log.top->set_record_count(static_cast<std::uint16_t>(log.fill));
  if (config_.presort) presort_page(*log.top, record_width_);
  if (!log.store) {
    log.store = std::make_unique<PageStore>(file_for(k, log.superstep),
                                            config_.page_size,
                                            OpenMode::kCreate, counters_);
  }
  log.chain.push_back(log.store->append_page(*log.top));
  log.top->zero();
  log.fill = 0;
}

void MultiLog::send_update(const UpdateMessage& msg) {
  if (msg.payload.size() != config_.payload_width) {
    throw ContractViolation("payload of " + std::to_string(msg.payload.size()) +
                            " bytes, expected " +
                            std::to_string(config_.payload_width));
  }
  if (msg.dest >= bounds_.back()) {
    throw ContractViolation("message to vertex " + std::to_string(msg.dest) +
                            " outside the graph");
  }
  const IntervalId k = interval_of(msg.dest);
  auto& log = *logs_[k];
  std::unique_lock lock(log.mu);
  if (!log.top) {
    lock.unlock();
    reserve_page();
    lock.lock();
    if (log.top) {
      // Another sender allocated it meanwhile; hand back our reservation.
      resident_pages_.fetch_sub(1);
    } else {
      log.top = std::make_unique<Page>(config_.page_size);
      log.fill = 0;
    }
  }
  if (log.fill == per_page_) flush_top_locked(k, log);
  auto region = log.top->record_region();
  std::byte* rec = region.data() + std::size_t{log.fill} * record_width_;
  std::memcpy(rec, &msg.dest, sizeof(VertexId));
  std::memcpy(rec + sizeof(VertexId), &msg.src, sizeof(VertexId));
  if (!msg.payload.empty()) {
    std::memcpy(rec + kRecordHeaderSize, msg.payload.data(), msg.payload.size());
  }
  ++log.fill;
  ++log.message_count;
}

void MultiLog::reserve_page() {
  std::lock_guard guard(evict_mu_);
  if (resident_pages_.load() + 1 > budget_pages_) evict_locked();
  auto now = resident_pages_.fetch_add(1) + 1;
  auto peak = peak_pages_.load();
  while (now > peak && !peak_pages_.compare_exchange_weak(peak, now)) {
  }
}

std::uint64_t MultiLog::evict_if_needed() {
  std::lock_guard guard(evict_mu_);
  return evict_locked();
}

std::uint64_t MultiLog::evict_locked() {
  if (resident_pages_.load() < budget_pages_) return 0;
  const auto target = static_cast<std::uint64_t>(std::floor(
      config_.low_watermark * static_cast<double>(budget_pages_)));
  std::vector<std::pair<std::uint32_t, IntervalId>> victims;
  for (IntervalId k = 0; k < logs_.size(); ++k) {
    std::lock_guard lock(logs_[k]->mu);
    if (logs_[k]->top) victims.emplace_back(logs_[k]->fill, k);
  }
  std::sort(victims.begin(), victims.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::uint64_t evicted = 0;
  for (const auto& [fill, k] : victims) {
    if (resident_pages_.load() <= target) break;
    auto& log = *logs_[k];
    std::lock_guard lock(log.mu);
    if (!log.top) continue;
    flush_top_locked(k, log);
    log.top.reset();
    resident_pages_.fetch_sub(1);
    ++evicted;
  }
  evicted_.fetch_add(evicted);
  return evicted;
}

SealedLog MultiLog::seal_superstep(IntervalId k, std::uint64_t superstep) {
  auto& log = *logs_.at(k);
  std::lock_guard lock(log.mu);
  if (log.superstep != superstep) {
    throw ContractViolation("interval " + std::to_string(k) +
                            " log for superstep " + std::to_string(superstep) +
                            " is already sealed");
  }
  flush_top_locked(k, log);
  if (log.top) {
    log.top.reset();
    resident_pages_.fetch_sub(1);
  }
  SealedLog sealed;
  sealed.interval = k;
  sealed.superstep = superstep;
  sealed.file = file_for(k, superstep);
  sealed.pages = std::move(log.chain);
  sealed.message_count = log.message_count;
  log.store.reset();
  log.chain.clear();
  log.message_count = 0;
  log.superstep = superstep + 1;
  return sealed;
}

std::uint64_t MultiLog::open_superstep(IntervalId k) const {
  std::lock_guard lock(logs_.at(k)->mu);
  return logs_[k]->superstep;
}

std::uint64_t MultiLog::message_count(IntervalId k) const {
  std::lock_guard lock(logs_.at(k)->mu);
  return logs_[k]->message_count;
}

std::vector<PageId> MultiLog::chain(IntervalId k) const {
  std::lock_guard lock(logs_.at(k)->mu);
  return logs_[k]->chain;
}

std::uint32_t MultiLog::top_fill(IntervalId k) const {
  std::lock_guard lock(logs_.at(k)->mu);
  return logs_[k]->top ? logs_[k]->fill : 0;
}

}  // namespace mlvc
