//
// Copyright 2026 The LSP Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef LSP_ERROR_H_
#define LSP_ERROR_H_

#include <stdexcept>
#include <string>

namespace lsp {

// Broad failure categories. The experiment CLI maps these onto its exit codes.
enum class ErrorKind {
  kConfig,     // invalid parameters or configuration
  kData,       // malformed or unusable input data
  kShape,      // tensor dimension mismatch
  kContract,   // API misuse (precondition violated by the caller)
  kNumerical,  // NaN/Inf or an undefined numerical quantity
  kFormat,     // bad on-disk format (magic, version, checksum, length)
  kIo,         // filesystem failures
};

const char* ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ConfigError(const std::string& m) {
  return Error(ErrorKind::kConfig, m);
}
inline Error DataError(const std::string& m) {
  return Error(ErrorKind::kData, m);
}
inline Error ShapeError(const std::string& m) {
  return Error(ErrorKind::kShape, m);
}
inline Error ContractError(const std::string& m) {
  return Error(ErrorKind::kContract, m);
}
inline Error NumericalError(const std::string& m) {
  return Error(ErrorKind::kNumerical, m);
}
inline Error FormatError(const std::string& m) {
  return Error(ErrorKind::kFormat, m);
}
inline Error IoError(const std::string& m) { return Error(ErrorKind::kIo, m); }

}  // namespace lsp

#endif  // LSP_ERROR_H_
