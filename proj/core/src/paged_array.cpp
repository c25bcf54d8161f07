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

#include "mlvc/paged_array.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "mlvc/error.hpp"

namespace mlvc {

PagedBytes::Entry& PagedBytes::entry(PageId id) {
  std::lock_guard lock(mu_);
  auto it = cache_.find(id);
  if (it != cache_.end()) return *it->second;
  auto e = std::make_unique<Entry>(store_->page_size());
  store_->read_page_into(id, e->page.bytes());
  return *cache_.emplace(id, std::move(e)).first->second;
}

void PagedBytes::read(std::uint64_t offset, std::span<std::byte> out) {
  const std::size_t ps = store_->page_size();
  std::size_t done = 0;
  while (done < out.size()) {
    std::uint64_t pos = offset + done;
    PageId id = pos / ps;
    std::size_t in_page = pos % ps;
    std::size_t n = std::min(out.size() - done, ps - in_page);
    auto& e = entry(id);
    std::memcpy(out.data() + done, e.page.bytes().data() + in_page, n);
    done += n;
  }
}

void PagedBytes::write(std::uint64_t offset, std::span<const std::byte> in) {
  const std::size_t ps = store_->page_size();
  std::size_t done = 0;
  while (done < in.size()) {
    std::uint64_t pos = offset + done;
    PageId id = pos / ps;
    std::size_t in_page = pos % ps;
    std::size_t n = std::min(in.size() - done, ps - in_page);
    auto& e = entry(id);
    std::memcpy(e.page.bytes().data() + in_page, in.data() + done, n);
    e.dirty.store(true, std::memory_order_relaxed);
    done += n;
  }
}

std::span<std::byte> PagedBytes::mutable_slice(std::uint64_t offset,
                                               std::size_t len) {
  const std::size_t ps = store_->page_size();
  std::size_t in_page = offset % ps;
  if (in_page + len > ps) {
    throw ContractViolation("slice of " + std::to_string(len) +
                            " bytes crosses a page boundary");
  }
  auto& e = entry(offset / ps);
  e.dirty.store(true, std::memory_order_relaxed);
  return e.page.bytes().subspan(in_page, len);
}

void PagedBytes::flush() {
  std::lock_guard lock(mu_);
  for (auto& [id, e] : cache_) {
    if (e->dirty.load()) {
      store_->write_page(id, e->page.bytes());
      e->dirty.store(false);
    }
  }
}

void PagedBytes::clear() {
  std::lock_guard lock(mu_);
  for (auto& [id, e] : cache_) {
    if (e->dirty.load()) {
      throw ContractViolation("clearing paged window with unflushed writes");
    }
  }
  cache_.clear();
}

std::size_t PagedBytes::resident_pages() const {
  std::lock_guard lock(mu_);
  return cache_.size();
}

std::size_t PagedBytes::dirty_pages() const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(
      cache_.begin(), cache_.end(),
      [](const auto& kv) { return kv.second->dirty.load(); }));
}

}  // namespace mlvc
