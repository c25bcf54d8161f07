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

#include "mlvc/state_store.hpp"

#include <string>

#include "mlvc/error.hpp"

namespace mlvc {

StateStore::StateStore(const std::filesystem::path& dir,
                       const std::string& prefix,
                       std::span<const std::uint64_t> slots, std::size_t width,
                       std::size_t page_size, IoCounters* counters)
    : width_(width), slots_(slots.begin(), slots.end()) {
  std::filesystem::create_directories(dir);
  files_.resize(slots_.size());
  Page zero(page_size);
  for (std::size_t k = 0; k < slots_.size(); ++k) {
    auto path = dir / (prefix + std::to_string(k) + ".bin");
    auto& f = files_[k];
    f.store = std::make_unique<PageStore>(path, page_size, OpenMode::kCreate,
                                          counters);
    std::uint64_t pages = pages_for_bytes(slots_[k] * width_, page_size);
    for (std::uint64_t p = 0; p < pages; ++p) f.store->append_page(zero);
    f.window = std::make_unique<PagedBytes>(*f.store);
  }
}

void StateStore::check(IntervalId k, std::uint64_t slot, std::uint64_t count,
                       std::size_t bytes) const {
  if (k >= files_.size()) {
    throw AddressingError("state interval " + std::to_string(k) +
                          " out of range");
  }
  if (slot + count > slots_[k]) {
    throw AddressingError("state slot " + std::to_string(slot + count) +
                          " past end of interval " + std::to_string(k));
  }
  if (bytes != count * width_) {
    throw ContractViolation("state buffer size mismatch");
  }
}

void StateStore::read(IntervalId k, std::uint64_t slot,
                      std::span<std::byte> out) {
  read_range(k, slot, 1, out);
}

void StateStore::write(IntervalId k, std::uint64_t slot,
                       std::span<const std::byte> in) {
  write_range(k, slot, 1, in);
}

void StateStore::read_range(IntervalId k, std::uint64_t slot,
                            std::uint64_t count, std::span<std::byte> out) {
  check(k, slot, count, out.size());
  if (count == 0 || width_ == 0) return;
  files_[k].window->read(slot * width_, out);
}

void StateStore::write_range(IntervalId k, std::uint64_t slot,
                             std::uint64_t count,
                             std::span<const std::byte> in) {
  check(k, slot, count, in.size());
  if (count == 0 || width_ == 0) return;
  files_[k].window->write(slot * width_, in);
}

void StateStore::release(IntervalId k) {
  auto& f = files_.at(k);
  f.window->flush();
  f.window->clear();
}

void StateStore::release_all() {
  for (std::size_t k = 0; k < files_.size(); ++k) release(static_cast<IntervalId>(k));
}

std::uint64_t StateStore::resident_bytes() const {
  std::uint64_t n = 0;
  for (const auto& f : files_) {
    n += f.window->resident_pages() * f.store->page_size();
  }
  return n;
}

std::vector<std::byte> StateStore::read_interval(IntervalId k) {
  std::vector<std::byte> out(slots_.at(k) * width_);
  read_range(k, 0, slots_[k], out);
  return out;
}

}  // namespace mlvc
