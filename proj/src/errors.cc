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

#include "biasaudit/errors.h"

namespace biasaudit {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return "io_error";
    case ErrorKind::kParse:
      return "parse_error";
    case ErrorKind::kConfig:
      return "config_error";
    case ErrorKind::kContract:
      return "contract_error";
    case ErrorKind::kTransport:
      return "batch_error";
    case ErrorKind::kProtocol:
      return "protocol_error";
    case ErrorKind::kNumerical:
      return "numerical_error";
    case ErrorKind::kInsufficientData:
      return "insufficient_data";
  }
  return "error";
}

}  // namespace biasaudit
