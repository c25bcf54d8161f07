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

#ifndef MLVC_STATE_STORE_HPP_
#define MLVC_STATE_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "mlvc/csr_graph.hpp"
#include "mlvc/paged_array.hpp"
#include "mlvc/pager.hpp"

namespace mlvc {

/// Fixed-width records on page storage, one file per vertex interval.
/// Used for vertex states (one slot per vertex) and edge states (one slot
/// per stored out-edge, aligned with colIdx).
class StateStore {
 public:
  /// Creates `dir/<prefix><k>.bin` with `slots[k]` zeroed slots each.
  StateStore(const std::filesystem::path& dir, const std::string& prefix,
             std::span<const std::uint64_t> slots, std::size_t width,
             std::size_t page_size, IoCounters* counters = nullptr);

  std::size_t width() const noexcept { return width_; }
  std::size_t num_intervals() const noexcept { return files_.size(); }
  std::uint64_t slots(IntervalId k) const { return slots_.at(k); }

  void read(IntervalId k, std::uint64_t slot, std::span<std::byte> out);
  void write(IntervalId k, std::uint64_t slot, std::span<const std::byte> in);
  void read_range(IntervalId k, std::uint64_t slot, std::uint64_t count,
                  std::span<std::byte> out);
  void write_range(IntervalId k, std::uint64_t slot, std::uint64_t count,
                   std::span<const std::byte> in);

  /// Writes back dirty pages of interval `k` and drops its cached pages.
  void release(IntervalId k);
  void release_all();

  std::uint64_t resident_bytes() const;
  std::vector<std::byte> read_interval(IntervalId k);

 private:
  struct File {
    std::unique_ptr<PageStore> store;
    std::unique_ptr<PagedBytes> window;
  };
  void check(IntervalId k, std::uint64_t slot, std::uint64_t count,
             std::size_t bytes) const;

  std::size_t width_;
  std::vector<std::uint64_t> slots_;
  std::vector<File> files_;
};

}  // namespace mlvc

#endif  // MLVC_STATE_STORE_HPP_
