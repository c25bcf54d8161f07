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

#include "mlvc/error.hpp"

namespace mlvc {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kAddressing:
      return "addressing";
    case ErrorKind::kCorruption:
      return "corruption";
    case ErrorKind::kContract:
      return "contract_violation";
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kIngest:
      return "ingest";
    case ErrorKind::kOversizedVertex:
      return "oversized_vertex";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kUsage:
      return "usage";
  }
  return "unknown";
}

}  // namespace mlvc
