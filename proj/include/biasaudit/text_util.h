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

#ifndef BIASAUDIT_TEXT_UTIL_H_
#define BIASAUDIT_TEXT_UTIL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace biasaudit {

// Decodes one UTF-8 scalar starting at `pos`. On malformed input returns the
// byte as-is with length 1.
struct DecodedScalar {
  char32_t value;
  size_t length;
};
DecodedScalar DecodeUtf8(std::string_view text, size_t pos);
void AppendUtf8(char32_t scalar, std::string& out);

bool IsUnicodeWhitespace(char32_t c);
bool IsPunctuation(char32_t c);

// Simple (one-to-one) lowercase mapping for Latin, Greek and Cyrillic
// letters. Locale independent.
char32_t ToLowerScalar(char32_t c);

std::string_view Trim(std::string_view text);
std::string AsciiLower(std::string_view text);
std::string Utf8Lower(std::string_view text);

// Splits on any Unicode whitespace; empty pieces are dropped.
std::vector<std::string> SplitWhitespace(std::string_view text);

// Removes leading and trailing punctuation scalars.
std::string_view StripPunctuation(std::string_view token);

std::string Join(const std::vector<std::string>& pieces, std::string_view sep);

// Reads a whole file. Throws IoError.
std::string ReadFile(const std::string& path);
// Writes (truncating) a whole file. Throws IoError.
void WriteFile(const std::string& path, std::string_view content);

std::string Sha256Hex(std::string_view bytes);

}  // namespace biasaudit

#endif  // BIASAUDIT_TEXT_UTIL_H_
