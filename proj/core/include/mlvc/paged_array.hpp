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

#ifndef MLVC_PAGED_ARRAY_HPP_
#define MLVC_PAGED_ARRAY_HPP_

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>

#include "mlvc/pager.hpp"

namespace mlvc {

/// Byte-addressed window over a raw paged file. Pages are fetched on first
/// touch and kept until clear(), so each page is read at most once per
/// residency. Lookups are safe from several threads; writes to disjoint bytes
/// of the same page are too.
class PagedBytes {
 public:
  explicit PagedBytes(PageStore& store) : store_(&store) {}

  void read(std::uint64_t offset, std::span<std::byte> out);
  void write(std::uint64_t offset, std::span<const std::byte> in);

  template <typename T>
  T get(std::uint64_t offset) {
    T v;
    read(offset, std::as_writable_bytes(std::span<T, 1>(&v, 1)));
    return v;
  }

  /// Mutable view of [offset, offset+len) when it lies inside one page;
  /// marks the page dirty.
  std::span<std::byte> mutable_slice(std::uint64_t offset, std::size_t len);

  void flush();
  void clear();

  std::size_t resident_pages() const;
  std::size_t dirty_pages() const;
  PageStore& store() noexcept { return *store_; }

 private:
  struct Entry {
    explicit Entry(std::size_t ps) : page(ps) {}
    Page page;
    std::atomic<bool> dirty{false};
  };
  Entry& entry(PageId id);

  PageStore* store_;
  mutable std::mutex mu_;
  std::map<PageId, std::unique_ptr<Entry>> cache_;
};

}  // namespace mlvc

#endif  // MLVC_PAGED_ARRAY_HPP_
