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

#ifndef MLVC_ERROR_HPP_
#define MLVC_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace mlvc {

enum class ErrorKind {
  kAddressing,
  kCorruption,
  kContract,
  kConfig,
  kIngest,
  kOversizedVertex,
  kIo,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

/// Base of every exception thrown by the library. The kind is stable and is
/// what the CLI reports in its structured error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define MLVC_DEFINE_ERROR(Name, Kind)                                        \
  class Name : public Error {                                                \
   public:                                                                   \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  }

MLVC_DEFINE_ERROR(AddressingError, kAddressing);
MLVC_DEFINE_ERROR(CorruptionError, kCorruption);
MLVC_DEFINE_ERROR(ContractViolation, kContract);
MLVC_DEFINE_ERROR(ConfigError, kConfig);
MLVC_DEFINE_ERROR(IngestError, kIngest);
MLVC_DEFINE_ERROR(IoError, kIo);
MLVC_DEFINE_ERROR(UsageError, kUsage);

#undef MLVC_DEFINE_ERROR

/// Raised by interval partitioning when one vertex's worst-case inbox cannot
/// fit the sort budget on its own.
class OversizedVertexError : public Error {
 public:
  OversizedVertexError(unsigned vertex, const std::string& what)
      : Error(ErrorKind::kOversizedVertex, what), vertex_(vertex) {}

  unsigned vertex() const noexcept { return vertex_; }

 private:
  unsigned vertex_;
};

}  // namespace mlvc

#endif  // MLVC_ERROR_HPP_
