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

#include "mlvc/pager.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <string>

#include "mlvc/error.hpp"

namespace mlvc {

namespace {

std::string sys_error(const std::string& what, const std::filesystem::path& p) {
  return what + " '" + p.string() + "': " + std::strerror(errno);
}

void pwrite_all(int fd, const std::byte* data, std::size_t size, off_t offset,
                const std::filesystem::path& p) {
  while (size > 0) {
    ssize_t n = ::pwrite(fd, data, size, offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(sys_error("write failed", p));
    }
    data += n;
    size -= static_cast<std::size_t>(n);
    offset += n;
  }
}

}  // namespace

std::size_t records_per_page(std::size_t page_size, std::size_t record_width) {
  if (record_width == 0 || page_size <= kPageHeaderSize) {
    throw ConfigError("record width and page size leave no room for records");
  }
  std::size_t n = (page_size - kPageHeaderSize) / record_width;
  if (n == 0) {
    throw ConfigError("record of " + std::to_string(record_width) +
                      " bytes does not fit a " + std::to_string(page_size) +
                      "-byte page");
  }
  if (n > 0xffff) {
    throw ConfigError("page holds more records than the u16 header can count");
  }
  return n;
}

PageStore::PageStore(std::filesystem::path path, std::size_t page_size,
                     OpenMode mode, IoCounters* class_counters)
    : path_(std::move(path)),
      page_size_(page_size),
      class_counters_(class_counters) {
  if (page_size_ <= kPageHeaderSize) {
    throw ConfigError("page size must exceed the 16-byte page header");
  }
  int flags = O_RDWR | O_CLOEXEC;
  if (mode == OpenMode::kCreate) flags |= O_CREAT | O_TRUNC;
  fd_ = ::open(path_.c_str(), flags, 0644);
  if (fd_ < 0) throw IoError(sys_error("cannot open page file", path_));
  struct stat st{};
  if (::fstat(fd_, &st) != 0) {
    close();
    throw IoError(sys_error("cannot stat page file", path_));
  }
  auto size = static_cast<std::uint64_t>(st.st_size);
  if (size % page_size_ != 0) {
    close();
    throw CorruptionError("page file '" + path_.string() + "' length " +
                          std::to_string(size) + " is not a multiple of " +
                          std::to_string(page_size_));
  }
  page_count_ = size / page_size_;
}

PageStore::~PageStore() { close(); }

PageStore::PageStore(PageStore&& other) noexcept
    : path_(std::move(other.path_)),
      page_size_(other.page_size_),
      fd_(std::exchange(other.fd_, -1)),
      class_counters_(other.class_counters_),
      page_count_(other.page_count_.load()),
      pages_read_(other.pages_read_.load()),
      pages_written_(other.pages_written_.load()),
      append_mu_(std::move(other.append_mu_)),
      trace_mu_(std::move(other.trace_mu_)),
      tracing_(other.tracing_),
      trace_(std::move(other.trace_)) {}

PageStore& PageStore::operator=(PageStore&& other) noexcept {
  if (this != &other) {
    close();
    path_ = std::move(other.path_);
    page_size_ = other.page_size_;
    fd_ = std::exchange(other.fd_, -1);
    class_counters_ = other.class_counters_;
    page_count_ = other.page_count_.load();
    pages_read_ = other.pages_read_.load();
    pages_written_ = other.pages_written_.load();
    append_mu_ = std::move(other.append_mu_);
    trace_mu_ = std::move(other.trace_mu_);
    tracing_ = other.tracing_;
    trace_ = std::move(other.trace_);
  }
  return *this;
}

void PageStore::close() noexcept {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

Page PageStore::read_page(PageId id) const {
  Page page(page_size_);
  read_page_into(id, page.bytes());
  return page;
}

void PageStore::read_page_into(PageId id, std::span<std::byte> out) const {
  if (out.size() != page_size_) {
    throw ContractViolation("read buffer is not page-sized");
  }
  if (id >= page_count_.load()) {
    throw AddressingError("page " + std::to_string(id) + " out of range for '" +
                          path_.string() + "' (" +
                          std::to_string(page_count_.load()) + " pages)");
  }
  std::size_t done = 0;
  auto offset = static_cast<off_t>(id * page_size_);
  while (done < page_size_) {
    ssize_t n = ::pread(fd_, out.data() + done, page_size_ - done,
                        offset + static_cast<off_t>(done));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(sys_error("read failed", path_));
    }
    if (n == 0) {
      throw CorruptionError("short read of page " + std::to_string(id) +
                            " in '" + path_.string() + "'");
    }
    done += static_cast<std::size_t>(n);
  }
  pages_read_.fetch_add(1);
  if (class_counters_) class_counters_->pages_read.fetch_add(1);
  if (tracing_) {
    std::lock_guard lock(*trace_mu_);
    trace_.push_back(id);
  }
}

PageId PageStore::append_page(const Page& page) {
  return append_page(page.bytes());
}

PageId PageStore::append_page(std::span<const std::byte> data) {
  if (data.size() != page_size_) {
    throw ContractViolation("append of " + std::to_string(data.size()) +
                            "-byte buffer to store with page size " +
                            std::to_string(page_size_));
  }
  std::lock_guard lock(*append_mu_);
  PageId id = page_count_.load();
  pwrite_all(fd_, data.data(), data.size(), static_cast<off_t>(id * page_size_),
             path_);
  page_count_.store(id + 1);
  pages_written_.fetch_add(1);
  if (class_counters_) class_counters_->pages_written.fetch_add(1);
  return id;
}

void PageStore::write_page(PageId id, std::span<const std::byte> data) {
  if (data.size() != page_size_) {
    throw ContractViolation("page write with wrong-size buffer");
  }
  if (id >= page_count_.load()) {
    throw AddressingError("write to page " + std::to_string(id) +
                          " beyond end of '" + path_.string() + "'");
  }
  pwrite_all(fd_, data.data(), data.size(), static_cast<off_t>(id * page_size_),
             path_);
  pages_written_.fetch_add(1);
  if (class_counters_) class_counters_->pages_written.fetch_add(1);
}

void PageStore::reset_counters() noexcept {
  pages_read_.store(0);
  pages_written_.store(0);
}

void PageStore::set_read_trace(bool on) {
  std::lock_guard lock(*trace_mu_);
  tracing_ = on;
  trace_.clear();
}

std::vector<PageId> PageStore::read_trace() const {
  std::lock_guard lock(*trace_mu_);
  return trace_;
}

std::uint64_t append_raw(PageStore& store, std::span<const std::byte> data) {
  const std::size_t ps = store.page_size();
  std::uint64_t appended = 0;
  std::vector<std::byte> buf(ps);
  for (std::size_t off = 0; off < data.size(); off += ps) {
    std::size_t n = std::min(ps, data.size() - off);
    std::memcpy(buf.data(), data.data() + off, n);
    if (n < ps) std::fill(buf.begin() + static_cast<std::ptrdiff_t>(n), buf.end(), std::byte{0});
    store.append_page(buf);
    ++appended;
  }
  return appended;
}

}  // namespace mlvc
