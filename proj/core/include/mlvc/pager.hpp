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

#ifndef MLVC_PAGER_HPP_
#define MLVC_PAGER_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "mlvc/types.hpp"

namespace mlvc {

inline constexpr std::size_t kDefaultPageSize = 16384;

// Record pages carry a 16-byte header:
//   byte 0      presorted flag (0/1)
//   bytes 1..2  record count (little-endian u16)
//   bytes 3..15 reserved, zero
// Raw pages (CSR vectors, vertex state, shards) have no header.
inline constexpr std::size_t kPageHeaderSize = 16;

/// Shared sink so several stores can be accounted as one storage class.
struct IoCounters {
  std::atomic<std::uint64_t> pages_read{0};
  std::atomic<std::uint64_t> pages_written{0};

  void reset() noexcept {
    pages_read.store(0);
    pages_written.store(0);
  }
};

/// A page-sized byte buffer. Page id is assigned by the store on append.
class Page {
 public:
  explicit Page(std::size_t page_size = kDefaultPageSize)
      : data_(page_size, std::byte{0}) {}

  std::size_t size() const noexcept { return data_.size(); }
  std::span<std::byte> bytes() noexcept { return data_; }
  std::span<const std::byte> bytes() const noexcept { return data_; }

  bool presorted() const noexcept { return data_[0] != std::byte{0}; }
  void set_presorted(bool on) noexcept {
    data_[0] = on ? std::byte{1} : std::byte{0};
  }

  std::uint16_t record_count() const noexcept {
    return load_as<std::uint16_t>(data_, 1);
  }
  void set_record_count(std::uint16_t n) noexcept {
    store_as<std::uint16_t>(data_, n, 1);
  }

  std::span<std::byte> record_region() noexcept {
    return bytes().subspan(kPageHeaderSize);
  }
  std::span<const std::byte> record_region() const noexcept {
    return bytes().subspan(kPageHeaderSize);
  }

  void zero() noexcept { std::fill(data_.begin(), data_.end(), std::byte{0}); }

  bool operator==(const Page&) const = default;

 private:
  std::vector<std::byte> data_;
};

/// Records of `record_width` bytes that fit in one record page.
std::size_t records_per_page(std::size_t page_size, std::size_t record_width);

enum class OpenMode { kCreate, kOpen };

/// Flat file of fixed-size pages. Every access is one whole page and is
/// counted. There is deliberately no cache here; callers own caching policy.
class PageStore {
 public:
  PageStore(std::filesystem::path path, std::size_t page_size, OpenMode mode,
            IoCounters* class_counters = nullptr);
  ~PageStore();

  PageStore(const PageStore&) = delete;
  PageStore& operator=(const PageStore&) = delete;
  PageStore(PageStore&& other) noexcept;
  PageStore& operator=(PageStore&& other) noexcept;

  Page read_page(PageId id) const;
  void read_page_into(PageId id, std::span<std::byte> out) const;

  PageId append_page(const Page& page);
  PageId append_page(std::span<const std::byte> data);

  /// Overwrites an existing page in place (vertex-state files).
  void write_page(PageId id, std::span<const std::byte> data);

  std::uint64_t page_count() const noexcept { return page_count_.load(); }
  std::size_t page_size() const noexcept { return page_size_; }
  const std::filesystem::path& path() const noexcept { return path_; }

  std::uint64_t pages_read() const noexcept { return pages_read_.load(); }
  std::uint64_t pages_written() const noexcept {
    return pages_written_.load();
  }
  void reset_counters() noexcept;

  /// Records the ids of subsequent reads, for page-set assertions in tests.
  void set_read_trace(bool on);
  std::vector<PageId> read_trace() const;

 private:
  void close() noexcept;

  std::filesystem::path path_;
  std::size_t page_size_ = kDefaultPageSize;
  int fd_ = -1;
  IoCounters* class_counters_ = nullptr;
  std::atomic<std::uint64_t> page_count_{0};
  mutable std::atomic<std::uint64_t> pages_read_{0};
  std::atomic<std::uint64_t> pages_written_{0};
  std::unique_ptr<std::mutex> append_mu_ = std::make_unique<std::mutex>();
  mutable std::unique_ptr<std::mutex> trace_mu_ =
      std::make_unique<std::mutex>();
  bool tracing_ = false;
  mutable std::vector<PageId> trace_;
};

/// Writes `data` as consecutive raw pages, zero-padding the tail. Returns
/// the number of pages appended.
std::uint64_t append_raw(PageStore& store, std::span<const std::byte> data);

/// Number of pages needed to hold `bytes` bytes of raw data.
constexpr std::uint64_t pages_for_bytes(std::uint64_t bytes,
                                        std::size_t page_size) noexcept {
  return (bytes + page_size - 1) / page_size;
}

}  // namespace mlvc

#endif  // MLVC_PAGER_HPP_
