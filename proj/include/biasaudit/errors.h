/*
 * Copyright 2026 The biasaudit Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BIASAUDIT_ERRORS_H_
#define BIASAUDIT_ERRORS_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace biasaudit {

// Error categories. The CLI maps these to the structured error report.
enum class ErrorKind {
  kIo,
  kParse,
  kConfig,
  kContract,
  kTransport,
  kProtocol,
  kNumerical,
  kInsufficientData,
};

std::string_view ErrorKindName(ErrorKind kind);

// Base class of every error raised by the library.
class AuditError : public std::runtime_error {
 public:
  AuditError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class IoError : public AuditError {
 public:
  explicit IoError(const std::string& message)
      : AuditError(ErrorKind::kIo, message) {}
};

// Malformed input. `line` is 1-based, or 0 when not tied to a line.
class ParseError : public AuditError {
 public:
  ParseError(const std::string& message, int line = 0)
      : AuditError(ErrorKind::kParse,
                   line > 0 ? "line " + std::to_string(line) + ": " + message
                            : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

class ConfigError : public AuditError {
 public:
  explicit ConfigError(const std::string& message)
      : AuditError(ErrorKind::kConfig, message) {}
};

// A caller broke an operation precondition.
class ContractError : public AuditError {
 public:
  explicit ContractError(const std::string& message)
      : AuditError(ErrorKind::kContract, message) {}
};

// Transport failure that persisted through all retries.
class BatchError : public AuditError {
 public:
  BatchError(const std::string& message, size_t chunk_index)
      : AuditError(ErrorKind::kTransport, message), chunk_index_(chunk_index) {}

  size_t chunk_index() const { return chunk_index_; }

 private:
  size_t chunk_index_;
};

// A server answered, but the answer violates the wire protocol.
class ProtocolError : public AuditError {
 public:
  explicit ProtocolError(const std::string& message)
      : AuditError(ErrorKind::kProtocol, message) {}
};

class NumericalError : public AuditError {
 public:
  NumericalError(const std::string& message, double condition_estimate)
      : AuditError(ErrorKind::kNumerical, message),
        condition_estimate_(condition_estimate) {}

  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class InsufficientDataError : public AuditError {
 public:
  explicit InsufficientDataError(const std::string& message)
      : AuditError(ErrorKind::kInsufficientData, message) {}
};

}  // namespace biasaudit

#endif  // BIASAUDIT_ERRORS_H_
